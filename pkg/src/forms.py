"""
Homogeneous forms and the varieties they define.

Key responsibilities:
- Sparse homogeneous forms over one tower level (parse, evaluate, arithmetic)
- Linear substitution, the single primitive behind the expansion
  F(x, y, z) ↦ G(x0..z2) = f0 + τ·f1 + τ²·f2, restriction to a subspace,
  and transport of forms by a change of frame
- Variety handles: a variety is its list of defining FORMS; extending a
  variety re-reads the same forms over a larger field
- Cone verification for V(G) and nondegeneracy of conics

Form text syntax:
    comma-separated "monomial:coefficient" pairs, e.g. "x*z:1, y^2:-1".
    Ternary forms use x, y, z; other arities use x0, x1, ...
    Coefficients use the element encoding of src.fields.
"""

import logging
import re
from dataclasses import dataclass, field as dataclass_field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence, Union

from src.errors import (
    DegenerateConic,
    FormSyntaxError,
    LevelMismatch,
    MixedAmbient,
    NotHomogeneous,
    SamplingExhausted,
    WrongArity,
)
from src.fields import FieldTower, FiniteField, Level, format_elem, parse_elem
from src.projgeom import (
    DEFAULT_CAP,
    ProjPoint,
    Subspace,
    enumerate_points,
    iter_points,
    mat_inverse,
    nullspace,
    random_point,
    random_point_of,
    rank,
    span,
)
from src.rng import Rng

logger = logging.getLogger(__name__)

Exponent = tuple[int, ...]

DEFAULT_REJECTION_BUDGET = 512


# ============================================================================
# HomogeneousForm
# ============================================================================


@dataclass(frozen=True)
class HomogeneousForm:
    """
    Sparse homogeneous polynomial.

    terms holds (exponent vector, coefficient code) pairs with nonzero
    coefficients, sorted in graded lexicographic order (x0 > x1 > ...).
    """

    field: FiniteField
    nvars: int
    degree: int
    terms: tuple[tuple[Exponent, int], ...]

    @classmethod
    def from_terms(
        cls,
        field: FiniteField,
        nvars: int,
        degree: int,
        terms: Union[Mapping[Exponent, int], Iterable[tuple[Exponent, int]]],
    ) -> "HomogeneousForm":
        items = terms.items() if isinstance(terms, Mapping) else terms
        collected: dict[Exponent, int] = {}
        for exps, coeff in items:
            exps = tuple(exps)
            if len(exps) != nvars:
                raise WrongArity(f"monomial {exps} has {len(exps)} exponents, expected {nvars}")
            if sum(exps) != degree:
                raise NotHomogeneous(f"monomial {exps} has degree {sum(exps)}, expected {degree}")
            collected[exps] = field.add(collected.get(exps, 0), coeff)
        ordered = tuple(sorted(((e, c) for e, c in collected.items() if c), reverse=True))
        return cls(field, nvars, degree, ordered)

    @classmethod
    def zero(cls, field: FiniteField, nvars: int, degree: int) -> "HomogeneousForm":
        return cls(field, nvars, degree, ())

    @classmethod
    def linear(cls, field: FiniteField, coeffs: Sequence[int]) -> "HomogeneousForm":
        n = len(coeffs)
        return cls.from_terms(
            field, n, 1, [(tuple(1 if j == i else 0 for j in range(n)), c) for i, c in enumerate(coeffs)]
        )

    # --- inspection ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def as_dict(self) -> dict[Exponent, int]:
        return dict(self.terms)

    def coefficient(self, exps: Exponent) -> int:
        return self.as_dict().get(tuple(exps), 0)

    @cached_property
    def _sparse_terms(self) -> tuple[tuple[tuple[tuple[int, int], ...], int], ...]:
        return tuple(
            (tuple((i, e) for i, e in enumerate(exps) if e), c) for exps, c in self.terms
        )

    def evaluate(self, coords: Sequence[int]) -> int:
        if len(coords) != self.nvars:
            raise WrongArity(f"form in {self.nvars} variables evaluated at {len(coords)} coordinates")
        add, mul = self.field.add, self.field.mul
        total = 0
        for monomial, coeff in self._sparse_terms:
            value = coeff
            for i, e in monomial:
                x = coords[i]
                if not x:
                    value = 0
                    break
                for _ in range(e):
                    value = mul(value, x)
            if value:
                total = add(total, value)
        return total

    def vanishes_at(self, point: ProjPoint) -> bool:
        return self.evaluate(point.coords) == 0

    # --- arithmetic ---------------------------------------------------------

    def _compatible(self, other: "HomogeneousForm") -> None:
        if other.field is not self.field:
            raise LevelMismatch(f"forms over {self.field.name} and {other.field.name}")
        if other.nvars != self.nvars:
            raise WrongArity(f"forms in {self.nvars} and {other.nvars} variables")

    def __add__(self, other: "HomogeneousForm") -> "HomogeneousForm":
        self._compatible(other)
        if other.degree != self.degree and not (self.is_zero() or other.is_zero()):
            raise NotHomogeneous(f"cannot add degrees {self.degree} and {other.degree}")
        degree = self.degree if not self.is_zero() else other.degree
        return HomogeneousForm.from_terms(self.field, self.nvars, degree, list(self.terms) + list(other.terms))

    def __neg__(self) -> "HomogeneousForm":
        neg = self.field.neg
        return HomogeneousForm(self.field, self.nvars, self.degree, tuple((e, neg(c)) for e, c in self.terms))

    def __sub__(self, other: "HomogeneousForm") -> "HomogeneousForm":
        return self + (-other)

    def scale(self, c: int) -> "HomogeneousForm":
        mul = self.field.mul
        return HomogeneousForm.from_terms(
            self.field, self.nvars, self.degree, [(e, mul(c, v)) for e, v in self.terms]
        )

    def __mul__(self, other: "HomogeneousForm") -> "HomogeneousForm":
        self._compatible(other)
        mul = self.field.mul
        products = [
            (tuple(a + b for a, b in zip(e1, e2)), mul(c1, c2))
            for e1, c1 in self.terms
            for e2, c2 in other.terms
        ]
        return HomogeneousForm.from_terms(self.field, self.nvars, self.degree + other.degree, products)

    def conjugate(self, k: int) -> "HomogeneousForm":
        frob = self.field.frob
        return HomogeneousForm.from_terms(
            self.field, self.nvars, self.degree, [(e, frob(c, k)) for e, c in self.terms]
        )

    def extend(self, field: FiniteField) -> "HomogeneousForm":
        if field.level < self.field.level:
            raise LevelMismatch(f"cannot move a {self.field.name} form down to {field.name}")
        return HomogeneousForm(field, self.nvars, self.degree, self.terms)

    def partial(self, i: int) -> "HomogeneousForm":
        if self.degree == 0:
            return self
        from_int, mul = self.field.from_int, self.field.mul
        terms = []
        for exps, c in self.terms:
            if exps[i]:
                lowered = list(exps)
                lowered[i] -= 1
                terms.append((tuple(lowered), mul(from_int(exps[i]), c)))
        return HomogeneousForm.from_terms(self.field, self.nvars, self.degree - 1, terms)

    def substitute(self, linear_forms: Sequence[Sequence[int]]) -> "HomogeneousForm":
        """
        Replace variable i by the linear form linear_forms[i] in new variables.

        All linear forms must have the same length (the new arity) and live
        at this form's level.
        """
        if len(linear_forms) != self.nvars:
            raise WrongArity(f"{len(linear_forms)} substitutions for {self.nvars} variables")
        width = len(linear_forms[0]) if linear_forms else 0
        field = self.field
        add, mul = field.add, field.mul
        one = tuple(0 for _ in range(width))

        power_cache: dict[tuple[int, int], dict[Exponent, int]] = {}

        def poly_mul(a: dict[Exponent, int], b: dict[Exponent, int]) -> dict[Exponent, int]:
            out: dict[Exponent, int] = {}
            for e1, c1 in a.items():
                for e2, c2 in b.items():
                    key = tuple(x + y for x, y in zip(e1, e2))
                    out[key] = add(out.get(key, 0), mul(c1, c2))
            return {k: v for k, v in out.items() if v}

        def power(i: int, e: int) -> dict[Exponent, int]:
            if (i, e) not in power_cache:
                if e == 0:
                    power_cache[(i, e)] = {one: 1}
                else:
                    base = {
                        tuple(1 if j == k else 0 for j in range(width)): c
                        for k, c in enumerate(linear_forms[i])
                        if c
                    }
                    power_cache[(i, e)] = poly_mul(power(i, e - 1), base)
            return power_cache[(i, e)]

        result: dict[Exponent, int] = {}
        for exps, coeff in self.terms:
            poly = {one: coeff}
            for i, e in enumerate(exps):
                if e:
                    poly = poly_mul(poly, power(i, e))
            for key, value in poly.items():
                result[key] = add(result.get(key, 0), value)
        return HomogeneousForm.from_terms(field, width, self.degree, result)

    def __str__(self) -> str:
        return format_form(self)


# ============================================================================
# Text syntax
# ============================================================================


_TERM_PATTERN = re.compile(r"^\s*(?P<mono>[^:]+?)\s*:\s*(?P<coeff>.+?)\s*$")
_FACTOR_PATTERN = re.compile(r"^(?P<name>[a-z]\d*)(?:\^(?P<exp>\d+))?$")


def variable_names(nvars: int) -> list[str]:
    if nvars == 3:
        return ["x", "y", "z"]
    return [f"x{i}" for i in range(nvars)]


def _split_top_level(text: str) -> list[str]:
    parts, depth, current = [], 0, []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    if "".join(current).strip():
        parts.append("".join(current))
    return parts


def parse_form(text: str, field: FiniteField, nvars: int = 3) -> HomogeneousForm:
    """
    Parse "x*z:1, y^2:-1" into a form over `field`.

    Raises:
        FormSyntaxError: unreadable term or unknown variable
        NotHomogeneous: terms of different degrees
    """
    names = variable_names(nvars)
    index = {name: i for i, name in enumerate(names)}
    terms = []
    degree: Optional[int] = None
    for raw in _split_top_level(text):
        match = _TERM_PATTERN.match(raw)
        if not match:
            raise FormSyntaxError(f"cannot read term '{raw.strip()}'")
        exps = [0] * nvars
        mono = match.group("mono").replace(" ", "")
        if mono != "1":
            for factor in mono.split("*"):
                fmatch = _FACTOR_PATTERN.match(factor)
                if not fmatch or fmatch.group("name") not in index:
                    raise FormSyntaxError(f"unknown factor '{factor}' (variables: {', '.join(names)})")
                exps[index[fmatch.group("name")]] += int(fmatch.group("exp") or 1)
        try:
            coeff = parse_elem(match.group("coeff"), field)
        except ValueError as e:
            raise FormSyntaxError(str(e)) from e
        term_degree = sum(exps)
        if degree is None:
            degree = term_degree
        elif term_degree != degree:
            raise NotHomogeneous(f"term '{raw.strip()}' has degree {term_degree}, expected {degree}")
        terms.append((tuple(exps), coeff))
    if degree is None:
        raise FormSyntaxError("empty form")
    return HomogeneousForm.from_terms(field, nvars, degree, terms)


def format_form(form: HomogeneousForm) -> str:
    if form.is_zero():
        return "0"
    names = variable_names(form.nvars)
    parts = []
    for exps, coeff in form.terms:
        factors = [
            name if e == 1 else f"{name}^{e}" for name, e in zip(names, exps) if e
        ]
        mono = "*".join(factors) or "1"
        parts.append(f"{mono}:{format_elem(form.field, coeff)}")
    return ", ".join(parts)


# ============================================================================
# Expansion
# ============================================================================


@dataclass(frozen=True)
class ExpandedForm:
    """F over GF(q³) in x, y, z and its lift G = f0 + τ·f1 + τ²·f2 in nine variables."""

    source: HomogeneousForm
    g: HomogeneousForm
    f: tuple[HomogeneousForm, HomogeneousForm, HomogeneousForm]

    def reconstruct(self) -> HomogeneousForm:
        cubic = self.g.field
        q = cubic.q
        total = HomogeneousForm.zero(cubic, 9, self.g.degree)
        for tau_j, fj in zip((1, q, q * q), self.f):
            total = total + fj.extend(cubic).scale(tau_j)
        return total

    def conjugates(self) -> tuple[HomogeneousForm, HomogeneousForm, HomogeneousForm]:
        return (self.g, self.g.conjugate(1), self.g.conjugate(2))


def expand_form(tower: FieldTower, form: HomogeneousForm) -> ExpandedForm:
    """
    Substitute x = x0 + τ·x1 + τ²·x2 (likewise y, z) and split the coefficients
    in the basis 1, τ, τ².
    """
    if form.nvars != 3:
        raise WrongArity(f"expected a ternary form, got {form.nvars} variables")
    if form.field.level == Level.SEXTIC:
        raise LevelMismatch("expand_form takes forms over GF(q) or GF(q³)")
    cubic = tower.cubic
    source = form.extend(cubic)
    q = tower.q
    tau_row = (1, q, q * q)
    substitution = [
        tuple(tau_row[j - 3 * i] if 3 * i <= j < 3 * i + 3 else 0 for j in range(9))
        for i in range(3)
    ]
    g = source.substitute(substitution)
    parts = tuple(
        HomogeneousForm.from_terms(
            tower.base, 9, g.degree, [(e, cubic.coefficients(c)[j]) for e, c in g.terms]
        )
        for j in range(3)
    )
    logger.debug(f"Expanded degree-{form.degree} form into {len(g.terms)} terms")
    return ExpandedForm(source=source, g=g, f=parts)


def conjugate_form(form: HomogeneousForm, k: int) -> HomogeneousForm:
    return form.conjugate(k)


# ============================================================================
# Varieties
# ============================================================================


@dataclass(frozen=True)
class VarietyHandle:
    """
    A variety given by its defining forms.

    Two handles with equal pointsets but different forms are different
    handles: extension always re-evaluates the forms.
    """

    field: FiniteField
    n: int
    forms: tuple[HomogeneousForm, ...] = ()
    dropped_zero_forms: int = 0

    def __post_init__(self):
        for form in self.forms:
            if form.nvars != self.n + 1:
                raise WrongArity(f"form in {form.nvars} variables for PG({self.n})")
            if form.field is not self.field:
                raise LevelMismatch(f"form over {form.field.name} in a {self.field.name} handle")

    @classmethod
    def of(cls, forms: Sequence[HomogeneousForm]) -> "VarietyHandle":
        if not forms:
            raise ValueError("use VarietyHandle(field, n) for the whole space")
        return cls(forms[0].field, forms[0].nvars - 1, tuple(forms))

    def contains_vector(self, coords: Sequence[int]) -> bool:
        return all(form.evaluate(coords) == 0 for form in self.forms)

    def contains(self, point: ProjPoint) -> bool:
        return self.contains_vector(point.coords)

    def with_forms(self, extra: Sequence[HomogeneousForm]) -> "VarietyHandle":
        return VarietyHandle(self.field, self.n, self.forms + tuple(extra), self.dropped_zero_forms)


def variety_points(
    variety: VarietyHandle, domain: Optional[Subspace] = None, cap: int = DEFAULT_CAP
) -> list[ProjPoint]:
    """Common zeros of the defining forms among the points of `domain` (default: whole space)."""
    if domain is None:
        domain = Subspace.whole(variety.field, variety.n)
    if domain.field is not variety.field:
        raise LevelMismatch(f"domain over {domain.field.name}, forms over {variety.field.name}")
    if domain.n != variety.n:
        raise MixedAmbient(f"domain in PG({domain.n}), variety in PG({variety.n})")
    return [p for p in enumerate_points(domain, cap) if variety.contains(p)]


def extend_variety(variety: VarietyHandle, target: FiniteField) -> VarietyHandle:
    if target.level < variety.field.level:
        raise LevelMismatch(f"cannot extend from {variety.field.name} down to {target.name}")
    return VarietyHandle(target, variety.n, tuple(f.extend(target) for f in variety.forms))


def restrict_to_subspace(variety: VarietyHandle, subspace: Subspace) -> VarietyHandle:
    """
    Pull the forms back along t ↦ Σ t_i·row_i for the echelon basis of
    `subspace`; the result lives in PG(dim S). Forms that become zero are dropped.
    """
    if subspace.is_empty:
        raise ValueError("cannot restrict to the empty subspace")
    if subspace.n != variety.n:
        raise MixedAmbient(f"subspace in PG({subspace.n}), variety in PG({variety.n})")
    field = variety.field if variety.field.level >= subspace.field.level else subspace.field
    rows = subspace.rows
    substitution = [tuple(row[j] for row in rows) for j in range(variety.n + 1)]
    restricted, dropped = [], 0
    for form in variety.forms:
        pulled = form.extend(field).substitute(substitution)
        if pulled.is_zero():
            dropped += 1
        else:
            restricted.append(pulled)
    return VarietyHandle(field, subspace.dim, tuple(restricted), dropped)


def extended_variety_handle(expanded: ExpandedForm) -> VarietyHandle:
    """V(G, G^q, G^(q²)) in PG(8,q³)."""
    return VarietyHandle.of(list(expanded.conjugates()))


def lifted_variety_handle(expanded: ExpandedForm) -> VarietyHandle:
    """V(f0, f1, f2) in PG(8,q)."""
    return VarietyHandle.of(list(expanded.f))


# ============================================================================
# Cone
# ============================================================================


@dataclass
class ConeReport:
    checks: dict[str, bool] = dataclass_field(default_factory=dict)
    counters: dict[str, int] = dataclass_field(default_factory=dict)
    witnesses: list[dict] = dataclass_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values()) and not self.witnesses


def verify_cone(
    g: HomogeneousForm,
    base: Sequence[ProjPoint],
    vertex: Subspace,
    rng: Rng,
    samples: int,
    budget_factor: int = DEFAULT_REJECTION_BUDGET,
) -> ConeReport:
    """
    Sample-check that V(G) is the cone with the given base (points of Γ,
    which they span) and vertex ⟨Γ^q, Γ^(q²)⟩.
    """
    field = g.field
    add, mul = field.add, field.mul
    gamma = span(list(base))
    base_set = {p.coords for p in base}
    report = ConeReport()

    line_rng, vertex_rng, zero_rng = rng.split("line"), rng.split("vertex"), rng.split("zeros")

    line_failures = 0
    for i in range(samples):
        b = line_rng.choice(base)
        v = random_point_of(vertex, line_rng)
        lam = line_rng.randbelow(field.size)
        point = [add(x, mul(lam, y)) for x, y in zip(b.coords, v.coords)]
        if g.evaluate(point) != 0:
            line_failures += 1
            if line_failures == 1:
                report.witnesses.append({"check": "line", "index": i, "base": list(b.coords), "vertex": list(v.coords), "scalar": lam})
    report.checks["line_points_in_variety"] = line_failures == 0

    vertex_failures = 0
    for i in range(samples):
        v = random_point_of(vertex, vertex_rng)
        if not g.vanishes_at(v):
            vertex_failures += 1
            if vertex_failures == 1:
                report.witnesses.append({"check": "vertex", "index": i, "point": list(v.coords)})
    report.checks["vertex_in_variety"] = vertex_failures == 0

    decompose = mat_inverse(field, list(gamma.rows) + list(vertex.rows))
    budget = budget_factor * samples
    zeros, draws, in_vertex, projection_failures = 0, 0, 0, 0
    while zeros < samples:
        if draws >= budget:
            raise SamplingExhausted(zeros, samples, draws)
        draws += 1
        p = random_point(field, g.nvars - 1, zero_rng)
        if not g.vanishes_at(p):
            continue
        zeros += 1
        coeffs = [field.dot(p.coords, [row[j] for row in decompose]) for j in range(3)]
        if not any(coeffs):
            in_vertex += 1
            continue
        projected = [0] * 9
        for c, row in zip(coeffs, gamma.rows):
            if c:
                projected = [add(x, mul(c, y)) for x, y in zip(projected, row)]
        image = ProjPoint.from_vector(field, projected)
        if image.coords not in base_set:
            projection_failures += 1
            if projection_failures == 1:
                report.witnesses.append({"check": "projection", "draw": draws, "point": list(p.coords)})
    report.checks["projection_in_base"] = projection_failures == 0

    report.counters = {
        "samples": samples,
        "line_failures": line_failures,
        "vertex_failures": vertex_failures,
        "zeros_found": zeros,
        "draws": draws,
        "zeros_in_vertex": in_vertex,
        "projection_failures": projection_failures,
    }
    logger.info(f"Cone check: {report.checks} after {draws} draws")
    return report


# ============================================================================
# Conics
# ============================================================================


def is_nondegenerate_conic(tower: FieldTower, form: HomogeneousForm) -> bool:
    """
    Odd characteristic: the Gram matrix has rank 3. Characteristic 2: the
    curve has no point over GF(q⁶) where F and all partial derivatives vanish.
    """
    if form.nvars != 3:
        raise WrongArity(f"a conic form has 3 variables, got {form.nvars}")
    if form.degree != 2:
        return False
    field = form.field
    coeff = form.coefficient

    def cross(i: int, j: int) -> int:
        e = [0, 0, 0]
        e[i] += 1
        e[j] += 1
        return coeff(tuple(e))

    if tower.p != 2:
        half = field.inv(field.from_int(2))
        gram = [
            [cross(i, i) if i == j else field.mul(half, cross(i, j)) for j in range(3)]
            for i in range(3)
        ]
        return rank(field, gram) == 3

    sextic = tower.sextic
    lifted = form.extend(sextic)
    partial_rows = [[cross(i, k) if i != k else 0 for i in range(3)] for k in range(3)]
    kernel = nullspace(sextic, partial_rows, 3)
    if not kernel:
        return True
    if len(kernel) == 1:
        return lifted.evaluate(kernel[0]) != 0
    line = Subspace.from_rows(sextic, 2, kernel[:2])
    return not any(lifted.vanishes_at(p) for p in iter_points(line))


def conic_to_quadrics(
    tower: FieldTower, form: HomogeneousForm
) -> tuple[HomogeneousForm, HomogeneousForm, HomogeneousForm]:
    """The three quadrics of PG(8,q) whose common zeros are the Bose planes of the conic."""
    if not is_nondegenerate_conic(tower, form):
        raise DegenerateConic(f"'{format_form(form)}' is not a nondegenerate conic")
    return expand_form(tower, form).f


def random_conic(tower: FieldTower, rng: Rng, field: Optional[FiniteField] = None) -> HomogeneousForm:
    """Uniform nondegenerate ternary quadratic form over `field` (default GF(q³))."""
    field = field or tower.cubic
    monomials = [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]
    while True:
        form = HomogeneousForm.from_terms(
            field, 3, 2, [(m, rng.randbelow(field.size)) for m in monomials]
        )
        if not form.is_zero() and is_nondegenerate_conic(tower, form):
            return form


# ============================================================================
# Extension convention
# ============================================================================


def convention_regression(tower: FieldTower) -> dict[str, int]:
    """
    Two handles with the same GF(q)-pointset whose extensions differ.

    x^q·y - x·y^q vanishes on every point of PG(2,q), as does the empty
    form list; over GF(q³) the first cuts out q+1 lines through (0,0,1)
    while the second is the whole plane.
    """
    base, cubic = tower.base, tower.cubic
    q = tower.q
    frobenius_form = HomogeneousForm.from_terms(
        base, 3, q + 1, [((q, 1, 0), 1), ((1, q, 0), base.neg(1))]
    )
    reduced = VarietyHandle(base, 2, (frobenius_form,))
    whole = VarietyHandle(base, 2)
    counts = {
        "reduced_base": len(variety_points(reduced)),
        "whole_base": len(variety_points(whole)),
        "reduced_extended": len(variety_points(extend_variety(reduced, cubic))),
        "whole_extended": len(variety_points(extend_variety(whole, cubic))),
    }
    logger.debug(f"Extension convention counts: {counts}")
    return counts
