"""
Finite Field Tower - GF(p) ⊆ GF(q) ⊂ GF(q³) ⊂ GF(q⁶)

This module builds the exact arithmetic every geometric construction runs on.

Key responsibilities:
- Base field GF(q), q = p^e, from galois tables (galois integer representation)
- Cubic level GF(q³) over x³ - t2·x² - t1·x - t0 with a validated primitive root τ
- Sextic level GF(q⁶) over the first irreducible quadratic x² + b·x + c
- Frobenius x ↦ x^q as precomputed GF(q)-linear matrices
- Embeddings, descent tests, element orders and the text encoding

Element codes:
    Every element is a plain int. A cubic element c0 + c1·τ + c2·τ² has code
    c0 + c1·q + c2·q², a sextic element a + b·ω has code a + b·q³. Subfield
    elements therefore keep their code under embedding, so embedding a point
    or a form never rewrites its coordinates.

Public API:
    build_tower(p, e, cubic_modulus) -> FieldTower
    find_primitive_cubic(p, e) -> (t0, t1, t2)
    frobenius_power(x, k) -> FieldElem
    element_order(x) -> int
    embed(x, level) / try_descend(x, level) -> FieldElem
    parse_elem(text, field) / format_elem(field, code) -> str
    transversal_constants(tower) -> (a0, a1, a2)
"""

import itertools
import json
import logging
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Optional, Sequence, Union

import galois
import numpy as np

from src.errors import (
    LevelMismatch,
    NoSexticModulus,
    NotInSubfield,
    NotPrime,
    NotPrimitive,
    ReducibleModulus,
    ZeroElement,
)

logger = logging.getLogger(__name__)


class Level(IntEnum):
    BASE = 0
    CUBIC = 1
    SEXTIC = 2


LEVEL_NAMES = {Level.BASE: "base", Level.CUBIC: "cubic", Level.SEXTIC: "sextic"}


# ============================================================================
# Field levels
# ============================================================================


class FiniteField:
    """
    One level of the tower.

    Subclasses provide add, neg, mul, inv and frob on int codes. Shared
    helpers (sub, div, pow, dot, elements, ...) live here.
    """

    level: Level
    size: int
    degree: int  # over GF(q)

    def __init__(self, p: int, q: int):
        self.p = p
        self.q = q
        self.tower: Optional["FieldTower"] = None
        self.zero = 0
        self.one = 1

    # --- subclass hooks -----------------------------------------------------

    def add(self, a: int, b: int) -> int:
        raise NotImplementedError

    def neg(self, a: int) -> int:
        raise NotImplementedError

    def mul(self, a: int, b: int) -> int:
        raise NotImplementedError

    def inv(self, a: int) -> int:
        raise NotImplementedError

    def frob(self, a: int, k: int = 1) -> int:
        raise NotImplementedError

    # --- shared helpers -----------------------------------------------------

    @property
    def name(self) -> str:
        return LEVEL_NAMES[self.level]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            a = self.inv(a)
            n = -n
        result = self.one
        while n:
            if n & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            n >>= 1
        return result

    def from_int(self, n: int) -> int:
        """Image of the integer n in the prime field (codes 0..p-1)."""
        return n % self.p

    def dot(self, u: Sequence[int], v: Sequence[int]) -> int:
        total = 0
        for a, b in zip(u, v):
            if a and b:
                total = self.add(total, self.mul(a, b))
        return total

    def elements(self) -> range:
        return range(self.size)

    def nonzero_elements(self) -> range:
        return range(1, self.size)

    def contains_code(self, code: int) -> bool:
        return 0 <= code < self.size

    def __repr__(self) -> str:
        return f"<{type(self).__name__} size={self.size}>"


class BaseField(FiniteField):
    """GF(q) with lookup tables taken from galois.GF(q)."""

    level = Level.BASE
    degree = 1

    def __init__(self, p: int, e: int):
        q = p**e
        super().__init__(p, q)
        self.e = e
        self.size = q
        self.galois_field = galois.GF(q)

        elems = self.galois_field.elements
        self._add = _as_int_list((elems[:, None] + elems[None, :]).ravel())
        self._mul = _as_int_list((elems[:, None] * elems[None, :]).ravel())
        self._neg = _as_int_list(-elems)
        self._inv = [0] + _as_int_list(np.reciprocal(elems[1:]))

    def add(self, a: int, b: int) -> int:
        return self._add[a * self.size + b]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a * self.size + b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroElement("0 has no inverse")
        return self._inv[a]

    def frob(self, a: int, k: int = 1) -> int:
        return a

    def prime_coefficients(self, code: int) -> tuple[int, ...]:
        digits = []
        for _ in range(self.e):
            code, digit = divmod(code, self.p)
            digits.append(digit)
        return tuple(digits)


class CubicField(FiniteField):
    """
    GF(q³) = GF(q)[τ] with τ³ = t0 + t1·τ + t2·τ².

    Multiplication goes through exp/log tables of τ, which exist only because
    τ is validated as primitive.
    """

    level = Level.CUBIC
    degree = 3

    def __init__(self, base: BaseField, modulus: tuple[int, int, int]):
        super().__init__(base.p, base.q)
        self.base = base
        self.modulus = modulus
        q = base.q
        self.size = q**3
        self._check_irreducible()

        exp = self._power_table()
        order = self.size - 1
        log = [0] * self.size
        for i, code in enumerate(exp):
            log[code] = i
        self._exp = exp
        self._log = log

        codes = np.arange(self.size)
        c0, c1, c2 = codes % q, (codes // q) % q, codes // (q * q)
        add_table = np.array(base._add).reshape(q, q)
        self._add = _as_int_list(
            (
                add_table[c0[:, None], c0[None, :]]
                + q * add_table[c1[:, None], c1[None, :]]
                + q * q * add_table[c2[:, None], c2[None, :]]
            ).ravel()
        )
        neg = np.array(base._neg)
        self._neg = _as_int_list(neg[c0] + q * neg[c1] + q * q * neg[c2])

        log_arr = np.array(log)
        exp_arr = np.array(exp)
        products = exp_arr[(log_arr[:, None] + log_arr[None, :]) % order]
        products[0, :] = 0
        products[:, 0] = 0
        self._mul = _as_int_list(products.ravel())
        self._inv = [0] + [exp[(-log[a]) % order] for a in range(1, self.size)]

        # columns are the power-basis coefficients of (τ^j)^q
        self.frobenius_matrix = tuple(
            tuple(self.coefficients(exp[(j * q) % order])[i] for j in range(3))
            for i in range(3)
        )
        self._frob = [
            self.from_coefficients(
                _apply_matrix(base, self.frobenius_matrix, self.coefficients(a))
            )
            for a in range(self.size)
        ]

    def _check_irreducible(self) -> None:
        t0, t1, t2 = self.modulus
        base = self.base
        for r in base.elements():
            r2 = base.mul(r, r)
            r3 = base.mul(r2, r)
            value = base.sub(
                base.sub(base.sub(r3, base.mul(t2, r2)), base.mul(t1, r)), t0
            )
            if value == 0:
                raise ReducibleModulus(
                    f"x^3 - {t2}x^2 - {t1}x - {t0} has the root {r} in GF({base.q})"
                )

    def _power_table(self) -> list[int]:
        """exp[i] = code of τ^i for 0 <= i < q³ - 1."""
        base = self.base
        t0, t1, t2 = self.modulus
        q = base.q
        exp = [1]
        c0, c1, c2 = 0, 1, 0
        for i in range(1, self.size - 1):
            code = c0 + q * c1 + q * q * c2
            if code == 1:
                raise NotPrimitive(f"τ has order {i}, expected {self.size - 1}")
            exp.append(code)
            c0, c1, c2 = (
                base.mul(t0, c2),
                base.add(c0, base.mul(t1, c2)),
                base.add(c1, base.mul(t2, c2)),
            )
        if c0 + q * c1 + q * q * c2 != 1:
            raise NotPrimitive("powers of τ do not cycle back to 1")
        return exp

    def coefficients(self, code: int) -> tuple[int, int, int]:
        q = self.q
        return (code % q, (code // q) % q, code // (q * q))

    def from_coefficients(self, coeffs: Sequence[int]) -> int:
        q = self.q
        return coeffs[0] + q * coeffs[1] + q * q * coeffs[2]

    def add(self, a: int, b: int) -> int:
        return self._add[a * self.size + b]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a * self.size + b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroElement("0 has no inverse")
        return self._inv[a]

    def frob(self, a: int, k: int = 1) -> int:
        for _ in range(k % 3):
            a = self._frob[a]
        return a

    def log(self, a: int) -> int:
        if a == 0:
            raise ZeroElement("log of 0")
        return self._log[a]


class SexticField(FiniteField):
    """GF(q⁶) = GF(q³)[ω] with ω² = -b·ω - c."""

    level = Level.SEXTIC
    degree = 6

    def __init__(self, cubic: CubicField):
        super().__init__(cubic.p, cubic.q)
        self.cubic = cubic
        self.base = cubic.base
        self.size = cubic.size**2
        self.modulus = self._find_modulus()
        b, c = self.modulus
        self._b = b
        self._c = c

        # columns: x^q for the GF(q)-basis τ^0, τ^1, τ^2, ω, τω, τ²ω
        q = self.q
        basis = [q**i for i in range(3)] + [cubic.size * q**i for i in range(3)]
        images = [self.base_coordinates(self.pow(x, q)) for x in basis]
        self.frobenius_matrix = tuple(
            tuple(images[j][i] for j in range(6)) for i in range(6)
        )
        self._frob_cache: dict[int, int] = {}

    def _find_modulus(self) -> tuple[int, int]:
        """
        First irreducible x² + b·x + c over GF(q³), scanning c then b in
        increasing code order.
        """
        cubic = self.cubic
        for c in cubic.elements():
            if c == 0:
                continue
            minus_c = cubic.neg(c)
            for b in cubic.elements():
                values = {cubic.mul(r, cubic.add(r, b)) for r in cubic.elements()}
                if minus_c not in values:
                    logger.debug(f"Sextic modulus x^2 + {b}x + {c}")
                    return (b, c)
        raise NoSexticModulus(f"no irreducible quadratic over GF({cubic.size})")

    def split(self, code: int) -> tuple[int, int]:
        return code % self.cubic.size, code // self.cubic.size

    def join(self, lo: int, hi: int) -> int:
        return lo + self.cubic.size * hi

    def base_coordinates(self, code: int) -> tuple[int, ...]:
        lo, hi = self.split(code)
        return self.cubic.coefficients(lo) + self.cubic.coefficients(hi)

    def from_base_coordinates(self, coords: Sequence[int]) -> int:
        cubic = self.cubic
        return self.join(
            cubic.from_coefficients(coords[:3]), cubic.from_coefficients(coords[3:])
        )

    def add(self, a: int, b: int) -> int:
        f = self.cubic
        a0, a1 = self.split(a)
        b0, b1 = self.split(b)
        return self.join(f.add(a0, b0), f.add(a1, b1))

    def neg(self, a: int) -> int:
        a0, a1 = self.split(a)
        return self.join(self.cubic.neg(a0), self.cubic.neg(a1))

    def mul(self, a: int, b: int) -> int:
        f = self.cubic
        a0, a1 = self.split(a)
        b0, b1 = self.split(b)
        hh = f.mul(a1, b1)
        lo = f.sub(f.mul(a0, b0), f.mul(self._c, hh))
        hi = f.sub(f.add(f.mul(a0, b1), f.mul(a1, b0)), f.mul(self._b, hh))
        return self.join(lo, hi)

    def conjugate(self, a: int) -> int:
        """a + b·ω ↦ a + b·ω', ω' = -b_mod - ω the other root."""
        f = self.cubic
        a0, a1 = self.split(a)
        return self.join(f.sub(a0, f.mul(a1, self._b)), f.neg(a1))

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroElement("0 has no inverse")
        conj = self.conjugate(a)
        norm, _ = self.split(self.mul(a, conj))
        return self.mul(conj, self.cubic.inv(norm))

    def frob(self, a: int, k: int = 1) -> int:
        for _ in range(k % 6):
            cached = self._frob_cache.get(a)
            if cached is None:
                coords = _apply_matrix(
                    self.base, self.frobenius_matrix, self.base_coordinates(a)
                )
                cached = self.from_base_coordinates(coords)
                self._frob_cache[a] = cached
            a = cached
        return a


def _as_int_list(values: Iterable) -> list[int]:
    return [int(v) for v in np.asarray(values).ravel()]


def _apply_matrix(
    base: BaseField, matrix: Sequence[Sequence[int]], vector: Sequence[int]
) -> tuple[int, ...]:
    return tuple(base.dot(row, vector) for row in matrix)


# ============================================================================
# Tower
# ============================================================================


class FieldTower:
    """
    Immutable GF(p) ⊆ GF(q) ⊂ GF(q³) ⊂ GF(q⁶).

    Attributes:
        p, e, q: characteristic, degree of GF(q) over GF(p), q = p^e
        cubic_modulus: (t0, t1, t2) of x³ - t2·x² - t1·x - t0
        sextic_modulus: (b, c) of x² + b·x + c over GF(q³)
        base, cubic, sextic: the three field levels
        tau: τ as a cubic-level FieldElem
    """

    def __init__(self, p: int, e: int, cubic_modulus: tuple[int, int, int]):
        self.p = p
        self.e = e
        self.q = p**e
        self.cubic_modulus = tuple(cubic_modulus)
        self.base = BaseField(p, e)
        self.cubic = CubicField(self.base, self.cubic_modulus)
        self.sextic = SexticField(self.cubic)
        self.sextic_modulus = self.sextic.modulus
        for field in (self.base, self.cubic, self.sextic):
            field.tower = self
        self.tau = FieldElem(self.cubic, self.q)

    def level(self, level: Union[Level, str]) -> FiniteField:
        if isinstance(level, str):
            level = Level[level.upper()]
        return (self.base, self.cubic, self.sextic)[level]

    def elem(self, level: Union[Level, str], code: int) -> "FieldElem":
        return FieldElem(self.level(level), code)

    @property
    def frobenius_tables(self) -> dict[str, tuple[tuple[int, ...], ...]]:
        return {
            "cubic": self.cubic.frobenius_matrix,
            "sextic": self.sextic.frobenius_matrix,
        }

    def describe(self) -> dict:
        return {
            "q": self.q,
            "p": self.p,
            "e": self.e,
            "modulus": list(self.cubic_modulus),
            "sextic_modulus": [
                format_elem(self.cubic, c) for c in self.sextic_modulus
            ],
        }

    def __repr__(self) -> str:
        t0, t1, t2 = self.cubic_modulus
        return f"FieldTower(q={self.q}, x^3 - {t2}x^2 - {t1}x - {t0})"


@dataclass(frozen=True)
class FieldElem:
    """A scalar at one level of the tower; operators never mix levels."""

    field: FiniteField
    code: int

    def _other(self, other: Union["FieldElem", int]) -> int:
        if isinstance(other, FieldElem):
            if other.field is not self.field:
                raise LevelMismatch(
                    f"cannot combine {self.field.name} and {other.field.name} elements"
                )
            return other.code
        if isinstance(other, int):
            return self.field.from_int(other)
        raise TypeError(f"unsupported operand {other!r}")

    def _wrap(self, code: int) -> "FieldElem":
        return FieldElem(self.field, code)

    def __add__(self, other):
        return self._wrap(self.field.add(self.code, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.field.sub(self.code, self._other(other)))

    def __rsub__(self, other):
        return self._wrap(self.field.sub(self._other(other), self.code))

    def __mul__(self, other):
        return self._wrap(self.field.mul(self.code, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(self.field.div(self.code, self._other(other)))

    def __neg__(self):
        return self._wrap(self.field.neg(self.code))

    def __pow__(self, n: int):
        return self._wrap(self.field.pow(self.code, n))

    def __bool__(self) -> bool:
        return self.code != 0

    @property
    def level(self) -> Level:
        return self.field.level

    def coefficients(self) -> tuple[int, ...]:
        """Coefficients over the next-lower level."""
        if self.field.level == Level.CUBIC:
            return self.field.coefficients(self.code)
        if self.field.level == Level.SEXTIC:
            return self.field.split(self.code)
        return self.field.prime_coefficients(self.code)

    def __str__(self) -> str:
        return format_elem(self.field, self.code)

    def __repr__(self) -> str:
        return f"FieldElem({self.field.name}, {self})"


# ============================================================================
# Operations
# ============================================================================


def build_tower(p: int, e: int, cubic_modulus: Sequence[int]) -> FieldTower:
    """
    Build and validate the tower for q = p^e.

    Raises:
        NotPrime: p is not prime
        ReducibleModulus: the cubic has a root in GF(q)
        NotPrimitive: τ has order below q³ - 1
    """
    if not galois.is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if e < 1:
        raise ValueError(f"extension degree must be positive, got {e}")
    q = p**e
    if len(cubic_modulus) != 3 or any(not 0 <= t < q for t in cubic_modulus):
        raise ValueError(f"cubic modulus needs three GF({q}) codes, got {cubic_modulus}")

    tower = FieldTower(p, e, tuple(int(t) for t in cubic_modulus))
    logger.info(f"Built {tower!r} with sextic modulus {tower.sextic_modulus}")
    return tower


def find_primitive_cubic(p: int, e: int = 1) -> tuple[int, int, int]:
    """First (t0, t1, t2) in lexicographic code order accepted by build_tower."""
    if not galois.is_prime(p):
        raise NotPrime(f"{p} is not prime")
    q = p**e
    base = BaseField(p, e)
    for t0, t1, t2 in itertools.product(range(q), repeat=3):
        if t0 == 0:
            continue
        try:
            CubicField(base, (t0, t1, t2))
        except (ReducibleModulus, NotPrimitive):
            continue
        return (t0, t1, t2)
    raise NotPrimitive(f"no primitive cubic over GF({q})")


def frobenius_power(x: FieldElem, k: int) -> FieldElem:
    """x^(q^k). On the base level the map is the identity and x comes back as is."""
    if k < 0:
        raise ValueError(f"Frobenius power must be non-negative, got {k}")
    if x.field.level == Level.BASE:
        logger.debug("Frobenius on GF(q) is the identity, returning input")
        return x
    return FieldElem(x.field, x.field.frob(x.code, k))


def element_order(x: FieldElem) -> int:
    if x.code == 0:
        raise ZeroElement("0 has no multiplicative order")
    field = x.field
    group_order = field.size - 1
    if group_order == 1:
        return 1
    primes, _ = galois.factors(group_order)
    order = group_order
    for prime in primes:
        while order % prime == 0 and field.pow(x.code, order // prime) == 1:
            order //= prime
    return order


def embed(x: FieldElem, target: Union[Level, str]) -> FieldElem:
    tower = x.field.tower
    field = tower.level(target)
    if field.level < x.field.level:
        raise LevelMismatch(f"cannot embed {x.field.name} into {field.name}")
    return FieldElem(field, x.code)


def try_descend(x: FieldElem, target: Union[Level, str]) -> FieldElem:
    """Return x as an element of the lower level, or raise NotInSubfield."""
    tower = x.field.tower
    field = tower.level(target)
    if field.level > x.field.level:
        raise LevelMismatch(f"cannot descend {x.field.name} to {field.name}")
    if not field.contains_code(x.code):
        raise NotInSubfield(f"{x} is not in GF({field.size})")
    return FieldElem(field, x.code)


def transversal_constants(tower: FieldTower) -> tuple[FieldElem, FieldElem, FieldElem]:
    """a0 = t1 + t2·τ - τ², a1 = t2 - τ, a2 = -1."""
    t0, t1, t2 = (tower.elem(Level.CUBIC, t) for t in tower.cubic_modulus)
    tau = tower.tau
    a0 = t1 + t2 * tau - tau * tau
    a1 = t2 - tau
    a2 = -tower.elem(Level.CUBIC, 1)
    return a0, a1, a2


# ============================================================================
# Text encoding
# ============================================================================


def format_elem(field: FiniteField, code: int) -> str:
    return json.dumps(_nested(field, code), separators=(",", ":"))


def _nested(field: FiniteField, code: int):
    if field.level == Level.BASE:
        if field.e == 1:
            return code
        return list(field.prime_coefficients(code))
    if field.level == Level.CUBIC:
        return [_nested(field.base, c) for c in field.coefficients(code)]
    return [_nested(field.cubic, c) for c in field.split(code)]


def parse_elem(text: str, field: FiniteField) -> int:
    """
    Parse the text encoding into a code of `field`.

    A bare integer is read in the prime field (so "-1" is p - 1 at every
    level); bracketed lists are little-endian coefficient vectors, nested
    once per level.
    """
    try:
        value = json.loads(text.strip())
    except json.JSONDecodeError as e:
        raise ValueError(f"cannot parse field element '{text}': {e}") from e
    return _from_nested(value, field)


def _from_nested(value, field: FiniteField) -> int:
    if isinstance(value, int):
        return field.from_int(value)
    if not isinstance(value, list):
        raise ValueError(f"unexpected element encoding {value!r}")

    if field.level == Level.BASE:
        if len(value) != field.e or any(not isinstance(v, int) for v in value):
            raise ValueError(f"GF({field.q}) element needs {field.e} prime coefficients")
        code = 0
        for digit in reversed(value):
            code = code * field.p + digit % field.p
        return code
    if field.level == Level.CUBIC:
        if len(value) != 3:
            raise ValueError(f"cubic element needs 3 coefficients, got {len(value)}")
        return field.from_coefficients([_from_nested(v, field.base) for v in value])
    if len(value) != 2:
        raise ValueError(f"sextic element needs 2 coefficients, got {len(value)}")
    return field.join(*(_from_nested(v, field.cubic) for v in value))
