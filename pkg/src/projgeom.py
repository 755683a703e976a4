"""
Projective geometry over one tower level: PG(n, F) with F = GF(q), GF(q³) or GF(q⁶).

Points are normalized coordinate tuples (first nonzero coordinate 1), subspaces
carry a reduced row-echelon basis. Both are canonical, so equality and hashing
are plain tuple comparisons and sets of subspaces behave.

Public API:
    ProjPoint.from_vector(field, vector)
    Subspace.from_rows(field, n, rows) / Subspace.whole(field, n) / Subspace.empty(field, n)
    span(items) / meet(U, W)
    enumerate_points(S, cap) / enumerate_subspaces(field, n, d)
    rational_points(S, target) / conjugate_span_rational(X)
    apply_semilinear(M, frob_k, P)
    random_point(field, n, rng) / random_subspace(field, n, d, rng)
"""

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from src.errors import MixedAmbient, MixedLevel, SingularMatrix, TooLarge
from src.fields import FiniteField, Level, format_elem
from src.rng import Rng

logger = logging.getLogger(__name__)

DEFAULT_CAP = 20_000_000

Vector = tuple[int, ...]
Matrix = tuple[Vector, ...]


# ============================================================================
# Row reduction
# ============================================================================


def rref(field: FiniteField, rows: Iterable[Sequence[int]]) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row-echelon form of `rows`; zero rows are dropped."""
    mat = [list(r) for r in rows]
    if not mat:
        return (), ()
    if field.level == Level.BASE:
        return _rref_galois(field, mat)
    return _rref_codes(field, mat)


def _rref_galois(field: FiniteField, mat: list[list[int]]) -> tuple[Matrix, tuple[int, ...]]:
    # GF(q) codes are galois' integer representation
    reduced = field.galois_field(mat).row_reduce()
    kept = [row for row in reduced if np.any(row)]
    pivots = tuple(int(np.flatnonzero(row)[0]) for row in kept)
    return tuple(tuple(int(x) for x in row) for row in kept), pivots


def _rref_codes(field: FiniteField, mat: list[list[int]]) -> tuple[Matrix, tuple[int, ...]]:
    ncols = len(mat[0])
    add, mul, neg, inv = field.add, field.mul, field.neg, field.inv
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        lead = mat[r][c]
        if lead != 1:
            s = inv(lead)
            mat[r] = [mul(s, x) for x in mat[r]]
        prow = mat[r]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = neg(mat[i][c])
                row = mat[i]
                mat[i] = [add(x, mul(f, y)) if y else x for x, y in zip(row, prow)]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return tuple(tuple(row) for row in mat[:r]), tuple(pivots)


def rank(field: FiniteField, rows: Iterable[Sequence[int]]) -> int:
    return len(rref(field, rows)[0])


def nullspace(field: FiniteField, rows: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Basis of {v : row·v = 0 for every row}."""
    reduced, pivots = rref(field, rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, p in zip(reduced, pivots):
            if row[f]:
                v[p] = field.neg(row[f])
        basis.append(tuple(v))
    return tuple(basis)


def mat_vec(field: FiniteField, matrix: Sequence[Sequence[int]], vector: Sequence[int]) -> Vector:
    return tuple(field.dot(row, vector) for row in matrix)


def mat_mul(field: FiniteField, a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    cols = list(zip(*b))
    return tuple(tuple(field.dot(row, col) for col in cols) for row in a)


def mat_inverse(field: FiniteField, matrix: Sequence[Sequence[int]]) -> Matrix:
    n = len(matrix)
    augmented = [tuple(row) + tuple(1 if i == j else 0 for j in range(n)) for i, row in enumerate(matrix)]
    reduced, pivots = rref(field, augmented)
    if len(reduced) < n or pivots[n - 1] != n - 1:
        raise SingularMatrix("matrix is not invertible")
    return tuple(row[n:] for row in reduced)


def mat_frob(field: FiniteField, matrix: Sequence[Sequence[int]], k: int = 1) -> Matrix:
    return tuple(tuple(field.frob(x, k) for x in row) for row in matrix)


def transpose(matrix: Sequence[Sequence[int]]) -> Matrix:
    return tuple(zip(*matrix))


def normalize(field: FiniteField, vector: Sequence[int]) -> Optional[Vector]:
    for x in vector:
        if x:
            if x == 1:
                return tuple(vector)
            s = field.inv(x)
            return tuple(field.mul(s, y) for y in vector)
    return None


def projective_count(size: int, d: int) -> int:
    """Number of points of PG(d, size)."""
    if d < 0:
        return 0
    return (size ** (d + 1) - 1) // (size - 1)


# ============================================================================
# Points and subspaces
# ============================================================================


@dataclass(frozen=True)
class ProjPoint:
    """Point of PG(n, F); coordinates normalized with first nonzero entry 1."""

    field: FiniteField
    coords: Vector

    @classmethod
    def from_vector(cls, field: FiniteField, vector: Sequence[int]) -> "ProjPoint":
        normalized = normalize(field, vector)
        if normalized is None:
            raise ValueError("the zero vector is not a projective point")
        return cls(field, normalized)

    @property
    def n(self) -> int:
        return len(self.coords) - 1

    def frobenius(self, k: int = 1) -> "ProjPoint":
        """Coordinate-wise X ↦ X^(q^k)."""
        return ProjPoint(self.field, tuple(self.field.frob(x, k) for x in self.coords))

    def extend(self, field: FiniteField) -> "ProjPoint":
        if field.level < self.field.level:
            raise MixedLevel(f"cannot move a {self.field.name} point down to {field.name}")
        return ProjPoint(field, self.coords)

    def as_subspace(self) -> "Subspace":
        return Subspace(self.field, self.n, (self.coords,))

    def to_json(self) -> list[str]:
        return [format_elem(self.field, x) for x in self.coords]

    def __repr__(self) -> str:
        return f"ProjPoint({self.field.name}, {self.coords})"


@dataclass(frozen=True)
class Subspace:
    """Subspace of PG(n, F) with a canonical RREF basis; dim -1 is the empty subspace."""

    field: FiniteField
    n: int
    rows: Matrix

    @classmethod
    def from_rows(cls, field: FiniteField, n: int, rows: Iterable[Sequence[int]]) -> "Subspace":
        reduced, _ = rref(field, rows)
        return cls(field, n, reduced)

    @classmethod
    def whole(cls, field: FiniteField, n: int) -> "Subspace":
        return cls(field, n, tuple(tuple(1 if i == j else 0 for j in range(n + 1)) for i in range(n + 1)))

    @classmethod
    def empty(cls, field: FiniteField, n: int) -> "Subspace":
        return cls(field, n, ())

    @property
    def dim(self) -> int:
        return len(self.rows) - 1

    @property
    def is_empty(self) -> bool:
        return not self.rows

    @cached_property
    def annihilator(self) -> Matrix:
        """Linear forms (as coefficient rows) vanishing exactly on this subspace."""
        return nullspace(self.field, self.rows, self.n + 1)

    def contains_vector(self, vector: Sequence[int]) -> bool:
        dot = self.field.dot
        return all(dot(form, vector) == 0 for form in self.annihilator)

    def contains(self, item: Union[ProjPoint, "Subspace"]) -> bool:
        if isinstance(item, ProjPoint):
            _check_compatible([self, item])
            return self.contains_vector(item.coords)
        _check_compatible([self, item])
        return all(self.contains_vector(row) for row in item.rows)

    def points_basis(self) -> list[ProjPoint]:
        return [ProjPoint(self.field, row) for row in self.rows]

    def frobenius(self, k: int = 1) -> "Subspace":
        frob = self.field.frob
        return Subspace(self.field, self.n, tuple(tuple(frob(x, k) for x in row) for row in self.rows))

    def extend(self, field: FiniteField) -> "Subspace":
        if field.level < self.field.level:
            raise MixedLevel(f"cannot move a {self.field.name} subspace down to {field.name}")
        return Subspace(field, self.n, self.rows)

    def point_count(self) -> int:
        return projective_count(self.field.size, self.dim)

    def to_json(self) -> list[list[str]]:
        return [[format_elem(self.field, x) for x in row] for row in self.rows]

    def __repr__(self) -> str:
        return f"Subspace({self.field.name}, n={self.n}, dim={self.dim})"


def _check_compatible(items: Sequence[Union[ProjPoint, Subspace]]) -> tuple[FiniteField, int]:
    if not items:
        raise ValueError("need at least one item")
    field = items[0].field
    n = items[0].n
    for item in items[1:]:
        if item.n != n:
            raise MixedAmbient(f"ambient dimensions {n} and {item.n} differ")
        if item.field is not field:
            raise MixedLevel(f"levels {field.name} and {item.field.name} differ")
    return field, n


def _rows_of(item: Union[ProjPoint, Subspace]) -> Iterable[Vector]:
    if isinstance(item, ProjPoint):
        return (item.coords,)
    return item.rows


# ============================================================================
# Operations
# ============================================================================


def span(items: Sequence[Union[ProjPoint, Subspace]]) -> Subspace:
    field, n = _check_compatible(items)
    rows = [row for item in items for row in _rows_of(item)]
    return Subspace.from_rows(field, n, rows)


def meet(u: Subspace, w: Subspace) -> Subspace:
    field, n = _check_compatible([u, w])
    forms = list(u.annihilator) + list(w.annihilator)
    return Subspace.from_rows(field, n, nullspace(field, forms, n + 1))


def enumerate_points(s: Subspace, cap: int = DEFAULT_CAP) -> list[ProjPoint]:
    """All points of `s` in lexicographic order of normalized coordinates."""
    return sorted(iter_points(s, cap), key=lambda p: p.coords)


def iter_points(s: Subspace, cap: int = DEFAULT_CAP) -> Iterator[ProjPoint]:
    """
    Points of `s` in parameter order (not sorted).

    With an RREF basis, a parameter vector whose first nonzero entry is 1
    produces an already normalized point.
    """
    count = s.point_count()
    if count > cap:
        raise TooLarge(count, cap)
    field = s.field
    rows = s.rows
    k = len(rows)
    add, mul = field.add, field.mul
    for lead in range(k):
        tail = rows[lead + 1 :]
        for params in itertools.product(field.elements(), repeat=len(tail)):
            vector = list(rows[lead])
            for coeff, row in zip(params, tail):
                if coeff:
                    vector = [add(x, mul(coeff, y)) if y else x for x, y in zip(vector, row)]
            yield ProjPoint(field, tuple(vector))


def enumerate_subspaces(field: FiniteField, n: int, d: int) -> Iterator[Subspace]:
    """Every d-dimensional subspace of PG(n, F), one RREF matrix per pivot pattern and free entries."""
    k = d + 1
    width = n + 1
    for pivots in itertools.combinations(range(width), k):
        free_slots = [
            (i, c)
            for i, p in enumerate(pivots)
            for c in range(p + 1, width)
            if c not in pivots
        ]
        for values in itertools.product(field.elements(), repeat=len(free_slots)):
            rows = [[0] * width for _ in range(k)]
            for i, p in enumerate(pivots):
                rows[i][p] = 1
            for (i, c), v in zip(free_slots, values):
                rows[i][c] = v
            yield Subspace(field, n, tuple(tuple(r) for r in rows))


def gaussian_binomial(n: int, k: int, q: int) -> int:
    num, den = 1, 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def rational_points(s: Subspace, target: Optional[FiniteField] = None) -> Subspace:
    """
    The subspace of PG(n, K) whose extension lies in `s`, K the target level
    (default GF(q)).

    W = s ∩ s^φ ∩ ... is stable under the relative Frobenius φ; the traces
    Tr(λ·w) over a K-basis λ of F/K span W ∩ K^(n+1) and are echelonized over K.
    """
    field = s.field
    if target is None:
        target = field.tower.base
    if target.level > field.level:
        raise MixedLevel(f"{target.name} is above {field.name}")
    if target.level == field.level:
        return s
    rel_degree = field.degree // target.degree
    step = target.degree  # φ = x ↦ x^(q^step)

    stable = s
    for i in range(1, rel_degree):
        stable = meet(stable, s.frobenius(i * step))
        if stable.is_empty:
            return Subspace.empty(target, s.n)

    basis = _relative_basis(field, target)
    add, mul, frob = field.add, field.mul, field.frob
    vectors = []
    for row in stable.rows:
        for lam in basis:
            scaled = [mul(lam, x) for x in row]
            trace = list(scaled)
            for i in range(1, rel_degree):
                conj = [frob(x, i * step) for x in scaled]
                trace = [add(a, b) for a, b in zip(trace, conj)]
            vectors.append(tuple(trace))
    for v in vectors:
        if any(not target.contains_code(x) for x in v):
            raise AssertionError("trace vector left the subfield")
    return Subspace.from_rows(target, s.n, vectors)


def _relative_basis(field: FiniteField, target: FiniteField) -> list[int]:
    q = field.q
    if field.level == Level.CUBIC:
        return [1, q, q * q]
    cubic_size = field.cubic.size
    if target.level == Level.CUBIC:
        return [1, cubic_size]
    return [1, q, q * q, cubic_size, cubic_size * q, cubic_size * q * q]


def conjugate_span_rational(x: ProjPoint) -> Subspace:
    """
    rational_points(⟨X, X^q, X^(q²)⟩) for X over GF(q³), by the trace basis
    {Tr(X), Tr(τX), Tr(τ²X)}.
    """
    field = x.field
    if field.level != Level.CUBIC:
        raise MixedLevel("the trace route needs a GF(q³) point")
    q = field.q
    add, mul, frob = field.add, field.mul, field.frob
    vectors = []
    for lam in (1, q, q * q):
        scaled = [mul(lam, c) for c in x.coords]
        vectors.append(
            tuple(add(add(a, frob(a, 1)), frob(a, 2)) for a in scaled)
        )
    return Subspace.from_rows(field.tower.base, x.n, vectors)


def apply_semilinear(matrix: Sequence[Sequence[int]], frob_k: int, p: ProjPoint) -> ProjPoint:
    """Normalized M · P^(q^frob_k)."""
    field = p.field
    if len(matrix) != p.n + 1 or any(len(row) != p.n + 1 for row in matrix):
        raise MixedAmbient(f"matrix size does not match PG({p.n})")
    if rank(field, matrix) < len(matrix):
        raise SingularMatrix("semilinear map needs a nonsingular matrix")
    image = mat_vec(field, matrix, [field.frob(x, frob_k) for x in p.coords])
    return ProjPoint.from_vector(field, image)


def random_vector(field: FiniteField, n: int, rng: Rng) -> Vector:
    while True:
        v = tuple(rng.randbelow(field.size) for _ in range(n + 1))
        if any(v):
            return v


def random_point(field: FiniteField, n: int, rng: Rng) -> ProjPoint:
    return ProjPoint.from_vector(field, random_vector(field, n, rng))


def random_point_of(s: Subspace, rng: Rng) -> ProjPoint:
    """Uniform point of a nonempty subspace."""
    field = s.field
    while True:
        coeffs = [rng.randbelow(field.size) for _ in s.rows]
        if any(coeffs):
            break
    vector = [0] * (s.n + 1)
    for c, row in zip(coeffs, s.rows):
        if c:
            vector = [field.add(x, field.mul(c, y)) for x, y in zip(vector, row)]
    return ProjPoint.from_vector(field, vector)


def random_subspace(field: FiniteField, n: int, d: int, rng: Rng) -> Subspace:
    """Uniform d-subspace: add random points until the rank reaches d + 1."""
    if not -1 <= d <= n:
        raise ValueError(f"dimension {d} outside [-1, {n}]")
    if d == n:
        return Subspace.whole(field, n)
    rows: Matrix = ()
    while len(rows) < d + 1:
        candidate = rows + (random_vector(field, n, rng),)
        reduced, _ = rref(field, candidate)
        if len(reduced) > len(rows):
            rows = reduced
    return Subspace(field, n, rows)
