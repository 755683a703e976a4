"""
Substructures of PG(2,q³) and their images in PG(8,q).

Key responsibilities:
- The unique plane through a point meeting three planes, and the Segre
  variety S2;2 through four planes (both plane systems and the nine minor
  quadrics)
- F_q-sublines and F_q-subplanes built from frame homographies, with their
  order-3 conjugacy maps
- F_q-conics and the transported form of C⁺
- Bracket planes ⟨X, (X^(c²))^q, (X^c)^(q²)⟩ at the cubic and sextic levels
- Scrolls over polynomially parametrized base curves and the birational
  parametrization of the canonical three-conic scroll
"""

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Protocol, Sequence

from src.bose import BoseFrame, gamma_coordinates, gamma_point
from src.errors import (
    ArityMismatch,
    BoseConsistencyError,
    DegenerateConic,
    DegeneratePlanes,
    DegenerateQuadrangle,
    DependentSubspaces,
    KernelPoint,
    NotCollinear,
    NotDistinct,
    NotOnGamma,
    NotSpanning,
    PointOnTransversalLine,
    TooLarge,
)
from src.fields import FiniteField, Level
from src.forms import HomogeneousForm, VarietyHandle, is_nondegenerate_conic, variety_points
from src.projgeom import (
    DEFAULT_CAP,
    Matrix,
    ProjPoint,
    Subspace,
    Vector,
    enumerate_points,
    enumerate_subspaces,
    gaussian_binomial,
    iter_points,
    mat_frob,
    mat_inverse,
    mat_mul,
    mat_vec,
    meet,
    normalize,
    rank,
    span,
)
from src.rng import Rng

logger = logging.getLogger(__name__)


def _combine(field: FiniteField, coeffs: Sequence[int], rows: Sequence[Sequence[int]]) -> list[int]:
    add, mul = field.add, field.mul
    out = [0] * len(rows[0])
    for c, row in zip(coeffs, rows):
        if c:
            out = [add(x, mul(c, y)) for x, y in zip(out, row)]
    return out


def _pivots(rows: Sequence[Sequence[int]]) -> list[int]:
    return [next(i for i, x in enumerate(row) if x) for row in rows]


# ============================================================================
# Transversal plane through a point
# ============================================================================


def unique_transversal_plane(p: ProjPoint, alpha: Subspace, beta: Subspace, gamma: Subspace) -> Subspace:
    """
    The plane through P meeting α, β and γ.

    Σ6 = ⟨P, α, β⟩ meets γ in Q, Σ4 = ⟨P, Q, α⟩ meets β in R, and the
    answer is ⟨P, Q, R⟩.

    Raises:
        NotSpanning: α, β, γ do not span the ambient space
        PointOnTransversalLine: P lies in the span of two of the planes
    """
    if span([alpha, beta, gamma]).dim != p.n:
        raise NotSpanning(f"planes span a {span([alpha, beta, gamma]).dim}-space in PG({p.n})")
    for name, (u, w) in {"α,β": (alpha, beta), "β,γ": (beta, gamma), "α,γ": (alpha, gamma)}.items():
        if span([u, w]).contains(p):
            raise PointOnTransversalLine(f"{p.coords} lies in ⟨{name}⟩")

    sigma6 = span([p, alpha, beta])
    q_point = meet(sigma6, gamma)
    sigma4 = span([p, q_point, alpha])
    r_point = meet(sigma4, beta)
    plane = span([p, q_point, r_point])
    if q_point.dim != 0 or r_point.dim != 0 or plane.dim != 2:
        raise BoseConsistencyError(f"transversal construction degenerated at {p.coords}")
    return plane


def _meets(plane_rows: Sequence[Sequence[int]], annihilator: Sequence[Sequence[int]], field: FiniteField) -> bool:
    images = [[field.dot(form, row) for form in annihilator] for row in plane_rows]
    return rank(field, images) < len(plane_rows)


def planes_through(p: ProjPoint):
    """Every plane through P: P joined with each line of the coordinate hyperplane x_c = 0, c the pivot of P."""
    field = p.field
    c = _pivots([p.coords])[0]
    for line in enumerate_subspaces(field, p.n - 1, 1):
        rows = [row[:c] + (0,) + row[c:] for row in line.rows]
        yield [p.coords] + rows


def count_transversal_planes_through(p: ProjPoint, alpha: Subspace, beta: Subspace, gamma: Subspace) -> tuple[int, int]:
    """(planes through P meeting α, β and γ; planes through P examined)."""
    field = p.field
    annihilators = [alpha.annihilator, beta.annihilator, gamma.annihilator]
    hits, total = 0, 0
    for rows in planes_through(p):
        total += 1
        if all(_meets(rows, ann, field) for ann in annihilators):
            hits += 1
    expected = gaussian_binomial(p.n, 2, field.size)
    if total != expected:
        raise BoseConsistencyError(f"enumerated {total} planes through a point, expected {expected}")
    return hits, total


# ============================================================================
# Segre variety S2;2
# ============================================================================


def canonical_minors(field: FiniteField) -> tuple[HomogeneousForm, ...]:
    """The nine 2×2 minors of Y[i][j] = y_(3i+j)."""
    minors = []
    for i, k in itertools.combinations(range(3), 2):
        for j, l in itertools.combinations(range(3), 2):
            e1 = [0] * 9
            e1[3 * i + j] += 1
            e1[3 * k + l] += 1
            e2 = [0] * 9
            e2[3 * i + l] += 1
            e2[3 * k + j] += 1
            minors.append(HomogeneousForm.from_terms(field, 9, 2, [(tuple(e1), 1), (tuple(e2), field.neg(1))]))
    return tuple(minors)


@dataclass(frozen=True)
class SegreVariety:
    """
    S2;2 through four planes α, β, γ, δ of PG(8,F).

    The frame matrix T has columns u0,u1,u2, v0,v1,v2, w0,w1,w2 where the
    basis vectors of δ split as d_j = u_j + v_j + w_j over α ⊕ β ⊕ γ. A point
    x lies on the variety iff the 3×3 matrix of y = T⁻¹x has rank one.
    """

    field: FiniteField
    frame_matrix: Matrix
    frame_inverse: Matrix
    quadrics: tuple[HomogeneousForm, ...]
    plane_system: tuple[Subspace, ...]
    transversal_system: tuple[Subspace, ...]

    def point_at(self, field: FiniteField, r: Sequence[int], a: Sequence[int]) -> ProjPoint:
        mul = field.mul
        y = [mul(ri, aj) for ri in r for aj in a]
        return ProjPoint.from_vector(field, mat_vec(field, self.frame_matrix, y))

    def handle(self, field: Optional[FiniteField] = None) -> VarietyHandle:
        field = field or self.field
        return VarietyHandle(field, 8, tuple(f.extend(field) for f in self.quadrics))

    def contains_vector(self, coords: Sequence[int], field: Optional[FiniteField] = None) -> bool:
        return self.handle(field).contains_vector(coords)


def segre_from_four_planes(
    alpha: Subspace, beta: Subspace, gamma: Subspace, delta: Subspace
) -> SegreVariety:
    """
    Raises:
        DegeneratePlanes: an input is not a plane or three of them fail to span
    """
    planes = (alpha, beta, gamma, delta)
    for plane in planes:
        if plane.dim != 2 or plane.n != 8:
            raise DegeneratePlanes(f"expected planes of PG(8), got {plane!r}")
    for triple in itertools.combinations(planes, 3):
        if span(list(triple)).dim != 8:
            raise DegeneratePlanes("three of the four planes do not span PG(8)")

    field = alpha.field
    frame_rows = list(alpha.rows) + list(beta.rows) + list(gamma.rows)
    coordinates = mat_inverse(field, frame_rows)
    u, v, w = [], [], []
    for d in delta.rows:
        c = [field.dot(d, [row[j] for row in coordinates]) for j in range(9)]
        u.append(_combine(field, c[0:3], alpha.rows))
        v.append(_combine(field, c[3:6], beta.rows))
        w.append(_combine(field, c[6:9], gamma.rows))
    columns = u + v + w
    frame_matrix = tuple(tuple(col[i] for col in columns) for i in range(9))
    frame_inverse = mat_inverse(field, frame_matrix)

    quadrics = tuple(m.substitute(frame_inverse) for m in canonical_minors(field))

    plane_system = []
    for r in enumerate_points(Subspace.whole(field, 2)):
        rows = [_combine(field, r.coords, (u[j], v[j], w[j])) for j in range(3)]
        plane_system.append(Subspace.from_rows(field, 8, rows))

    transversal_system = tuple(
        unique_transversal_plane(a, beta, gamma, delta) for a in enumerate_points(alpha)
    )
    logger.debug(f"Segre variety through four planes: {len(plane_system)} planes per system")
    return SegreVariety(
        field=field,
        frame_matrix=frame_matrix,
        frame_inverse=frame_inverse,
        quadrics=quadrics,
        plane_system=tuple(plane_system),
        transversal_system=transversal_system,
    )


def segre_point_sampler(segre: SegreVariety, field: FiniteField, rng: Rng):
    """Endless stream of (r, a, point) with point = T·(r ⊗ a), r and a uniform nonzero over `field`."""

    def nonzero() -> list[int]:
        while True:
            v = [rng.randbelow(field.size) for _ in range(3)]
            if any(v):
                return v

    while True:
        r, a = nonzero(), nonzero()
        yield r, a, segre.point_at(field, r, a)


# ============================================================================
# Sublines
# ============================================================================


class ConjugacyFrame(Protocol):
    def conjugate(self, x: ProjPoint, k: int = 1) -> ProjPoint: ...


@dataclass(frozen=True)
class SublineFrame:
    """
    F_q-subline b of a line ℓ of PG(2,q³).

    Points of ℓ are μ1·b1 + μ2·b2 for the echelon basis b1, b2 of ℓ. The
    matrix E maps subline coordinates s to μ, so b = E·PG(1,q), and the
    conjugacy map is μ ↦ D·μ^q with D = E·(E⁻¹)^σ.
    """

    line: Subspace
    e_matrix: Matrix
    d_matrix: Matrix
    points: tuple[ProjPoint, ...]

    @property
    def field(self) -> FiniteField:
        return self.line.field

    def line_coordinates(self, x: ProjPoint) -> Vector:
        if not self.line.extend(x.field).contains(x):
            raise NotCollinear(f"{x.coords} is not on the subline's line")
        return tuple(x.coords[c] for c in _pivots(self.line.rows))

    def conjugate(self, x: ProjPoint, k: int = 1) -> ProjPoint:
        field = x.field
        mu = self.line_coordinates(x)
        for _ in range(k):
            mu = mat_vec(field, self.d_matrix, [field.frob(c, 1) for c in mu])
        return ProjPoint.from_vector(field, _combine(field, mu, self.line.rows))

    def contains(self, x: ProjPoint) -> bool:
        return x in set(self.points)


def subline_through(p1: ProjPoint, p2: ProjPoint, p3: ProjPoint) -> SublineFrame:
    """
    The F_q-subline through three distinct collinear points.

    P3 = α·P1 + β·P2; with P1' = α·P1 and P2' = β·P2 the subline is
    {P1' + λ·P2' : λ ∈ GF(q)} ∪ {P2'}.
    """
    if len({p1, p2, p3}) < 3:
        raise NotDistinct("the three points must be distinct")
    line = span([p1, p2, p3])
    if line.dim != 1:
        raise NotCollinear("the three points are not collinear")
    field = line.field
    pivots = _pivots(line.rows)

    def mu(x: ProjPoint) -> list[int]:
        return [x.coords[c] for c in pivots]

    m = ((mu(p1)[0], mu(p2)[0]), (mu(p1)[1], mu(p2)[1]))
    alpha, beta = mat_vec(field, mat_inverse(field, m), mu(p3))
    e1 = [field.mul(alpha, x) for x in mu(p1)]
    e2 = [field.mul(beta, x) for x in mu(p2)]
    e_matrix = ((e1[0], e2[0]), (e1[1], e2[1]))
    d_matrix = mat_mul(field, e_matrix, mat_frob(field, mat_inverse(field, e_matrix), 1))

    v1 = _combine(field, e1, line.rows)
    v2 = _combine(field, e2, line.rows)
    add, mul = field.add, field.mul
    points = {ProjPoint.from_vector(field, v2)}
    for lam in field.tower.base.elements():
        points.add(ProjPoint.from_vector(field, [add(x, mul(lam, y)) for x, y in zip(v1, v2)]))
    return SublineFrame(
        line=line,
        e_matrix=e_matrix,
        d_matrix=d_matrix,
        points=tuple(sorted(points, key=lambda p: p.coords)),
    )


# ============================================================================
# Subplanes
# ============================================================================


@dataclass(frozen=True)
class SubplaneFrame:
    """
    F_q-subplane π = N·PG(2,q) of PG(2,q³).

    A = N⁻¹ maps π to PG(2,q); B = A⁻¹·A^σ and c_π(X) = B·X^q fixes π
    pointwise. B has cubic codes, so c_π also acts on PG(2,q⁶).
    """

    field: FiniteField
    a_matrix: Matrix
    n_matrix: Matrix
    b_matrix: Matrix
    points: tuple[ProjPoint, ...]

    def conjugate(self, x: ProjPoint, k: int = 1) -> ProjPoint:
        field = x.field
        coords = x.coords
        for _ in range(k):
            coords = mat_vec(field, self.b_matrix, [field.frob(c, 1) for c in coords])
        return ProjPoint.from_vector(field, coords)

    def to_frame(self, x: ProjPoint) -> ProjPoint:
        return ProjPoint.from_vector(x.field, mat_vec(x.field, self.a_matrix, x.coords))

    def from_frame(self, x: ProjPoint) -> ProjPoint:
        field = self.field if x.field.level < self.field.level else x.field
        return ProjPoint.from_vector(field, mat_vec(field, self.n_matrix, x.coords))

    def contains(self, x: ProjPoint) -> bool:
        base = self.field.tower.base
        return all(base.contains_code(c) for c in self.to_frame(x).coords)


def subplane_through(quadrangle: Sequence[ProjPoint]) -> SubplaneFrame:
    """
    The F_q-subplane through four points, no three collinear.

    N = M·diag(λ) where the columns of M are P1, P2, P3 and M·λ = P4, so N
    sends the standard frame to the quadrangle.
    """
    if len(quadrangle) != 4:
        raise DegenerateQuadrangle(f"a quadrangle has 4 points, got {len(quadrangle)}")
    for triple in itertools.combinations(quadrangle, 3):
        if span(list(triple)).dim != 2:
            raise DegenerateQuadrangle("three of the points are collinear")
    field = quadrangle[0].field
    p1, p2, p3, p4 = (p.coords for p in quadrangle)
    m = tuple(tuple(col[i] for col in (p1, p2, p3)) for i in range(3))
    lam = mat_vec(field, mat_inverse(field, m), p4)
    n_matrix = tuple(tuple(field.mul(m[i][j], lam[j]) for j in range(3)) for i in range(3))
    a_matrix = mat_inverse(field, n_matrix)
    b_matrix = mat_mul(field, n_matrix, mat_frob(field, a_matrix, 1))

    base = field.tower.base
    points = sorted(
        (ProjPoint.from_vector(field, mat_vec(field, n_matrix, p.coords)) for p in iter_points(Subspace.whole(base, 2))),
        key=lambda p: p.coords,
    )
    return SubplaneFrame(
        field=field,
        a_matrix=a_matrix,
        n_matrix=n_matrix,
        b_matrix=b_matrix,
        points=tuple(points),
    )


def orbit_size(frame: ConjugacyFrame, x: ProjPoint) -> int:
    """Length of the orbit of X under the conjugacy map (at most 6)."""
    current = frame.conjugate(x)
    size = 1
    while current != x:
        current = frame.conjugate(current)
        size += 1
        if size > 6:
            raise BoseConsistencyError(f"orbit of {x.coords} longer than 6")
    return size


# ============================================================================
# F_q-conics
# ============================================================================


@dataclass(frozen=True)
class FqConic:
    frame: SubplaneFrame
    form: HomogeneousForm
    points: tuple[ProjPoint, ...]
    cplus_form: HomogeneousForm
    cplus_unique: bool

    def handle(self) -> VarietyHandle:
        return VarietyHandle(self.cplus_form.field, 2, (self.cplus_form,))


def fq_conic(frame: SubplaneFrame, c: HomogeneousForm) -> FqConic:
    """
    C = N·{points of the conic c of PG(2,q)} and C⁺ defined by the form c∘A.

    Through q+1 ≤ 4 points a conic of PG(2,q³) is not unique, so the form
    route is the definition of C⁺; cplus_unique records when it agrees with
    the unique conic through C.
    """
    tower = frame.field.tower
    base = tower.base
    if c.field is not base or c.nvars != 3:
        raise DegenerateConic("an F_q-conic needs a ternary form over GF(q)")
    if not is_nondegenerate_conic(tower, c):
        raise DegenerateConic("the conic form is degenerate")

    conic_points = variety_points(VarietyHandle(base, 2, (c,)))
    points = tuple(sorted((frame.from_frame(p) for p in conic_points), key=lambda p: p.coords))
    cplus = c.extend(frame.field).substitute(frame.a_matrix)

    on_cplus = {p for p in frame.points if cplus.vanishes_at(p)}
    if on_cplus != set(points):
        raise BoseConsistencyError("π ∩ C⁺ differs from C")
    return FqConic(
        frame=frame,
        form=c,
        points=points,
        cplus_form=cplus,
        cplus_unique=tower.q >= 4,
    )


# ============================================================================
# Bracket planes
# ============================================================================


def bracket_plane(frame: ConjugacyFrame, boseframe: BoseFrame, x: ProjPoint) -> Subspace:
    """
    ⟨X, (X^(c²))^q, (X^c)^(q²)⟩ for X on Γ, and ⟨X, (X^(c⁵))^q, (X^(c⁴))^(q²)⟩
    for X on the sextic extension of Γ. X^c is the Γ-point of c(X̄).
    """
    if x.field.level == Level.BASE or not boseframe.gamma.extend(x.field).contains(x):
        raise NotOnGamma(f"{x.coords} is not a point of Γ")
    bar_x = gamma_coordinates(x)

    def conj(k: int) -> ProjPoint:
        return gamma_point(boseframe, frame.conjugate(bar_x, k))

    if x.field.level == Level.CUBIC:
        return span([x, conj(2).frobenius(1), conj(1).frobenius(2)])
    return span([x, conj(5).frobenius(1), conj(4).frobenius(2)])


def locate_bracket_plane(
    frame: ConjugacyFrame, boseframe: BoseFrame, p: ProjPoint
) -> Optional[tuple[ProjPoint, Subspace]]:
    """
    The bracket plane through a point of PG(8,q³), if any.

    P splits as X + Y + Z over Γ ⊕ Γ^q ⊕ Γ^(q²); the first nonzero part
    determines the only candidate X on Γ.
    """
    field = p.field
    if field.level != Level.CUBIC:
        raise NotOnGamma("bracket planes are located from GF(q³) points")
    g0, g1, g2 = boseframe.transversals
    coordinates = boseframe.transversal_coordinates
    c = [field.dot(p.coords, [row[j] for row in coordinates]) for j in range(9)]
    parts = [c[0:3], c[3:6], c[6:9]]
    if any(parts[0]):
        x = ProjPoint.from_vector(field, _combine(field, parts[0], g0.rows))
    elif any(parts[1]):
        w = ProjPoint.from_vector(field, _combine(field, parts[1], g1.rows)).frobenius(2)
        x = gamma_point(boseframe, frame.conjugate(gamma_coordinates(w), 1))
    else:
        w = ProjPoint.from_vector(field, _combine(field, parts[2], g2.rows)).frobenius(1)
        x = gamma_point(boseframe, frame.conjugate(gamma_coordinates(w), 2))
    plane = bracket_plane(frame, boseframe, x)
    if not plane.contains(p):
        return None
    return x, plane


# ============================================================================
# T-planes
# ============================================================================


def classify_tplane_meet(u: Subspace, w: Subspace, transversals: Sequence[Subspace]) -> str:
    """
    "equal", "empty", "tpoint" (a point on a transversal), "tline" (a line
    meeting two transversals) or "other".
    """
    if u == w:
        return "equal"
    common = meet(u, w)
    if common.is_empty:
        return "empty"
    if common.dim == 0:
        return "tpoint" if any(t.contains(common) for t in transversals) else "other"
    if common.dim == 1:
        touched = sum(1 for t in transversals if not meet(common, t).is_empty)
        return "tline" if touched >= 2 else "other"
    return "other"


# ============================================================================
# Scrolls
# ============================================================================


Homography = tuple[tuple[int, int], tuple[int, int]]


@dataclass(frozen=True)
class ParametrizedVariety:
    """
    Curve of PG(n,F) given by binary forms: the parameter (s, t) maps to
    Σ f_i(s, t)·row_i over the basis rows of `ambient`.
    """

    ambient: Subspace
    parametrization: tuple[HomogeneousForm, ...]

    def __post_init__(self):
        if len(self.parametrization) != self.ambient.dim + 1:
            raise ArityMismatch(
                f"{len(self.parametrization)} coordinate forms for a {self.ambient.dim}-space"
            )
        for form in self.parametrization:
            if form.nvars != 2:
                raise ArityMismatch(f"parametrizing forms take (s, t), got {form.nvars} variables")

    @property
    def field(self) -> FiniteField:
        return self.ambient.field

    def point(self, param: Sequence[int]) -> ProjPoint:
        values = [f.evaluate(param) for f in self.parametrization]
        vector = normalize(self.field, _combine(self.field, values, self.ambient.rows))
        if vector is None:
            raise KernelPoint(f"parameter {tuple(param)} maps to zero")
        return ProjPoint(self.field, vector)

    def points(self) -> list[ProjPoint]:
        return [self.point(t.coords) for t in enumerate_points(Subspace.whole(self.field, 1))]


def normal_rational_curve(ambient: Subspace) -> ParametrizedVariety:
    """(s^d, s^(d-1)·t, ..., t^d) in a d-space; a line for d = 1, a conic for d = 2."""
    d = ambient.dim
    field = ambient.field
    forms = tuple(HomogeneousForm.from_terms(field, 2, d, [((d - i, i), 1)]) for i in range(d + 1))
    return ParametrizedVariety(ambient, forms)


def _apply_homography(field: FiniteField, h: Homography, param: Sequence[int]) -> Vector:
    return mat_vec(field, h, param)


@dataclass(frozen=True)
class Scroll:
    """
    Scroll of type (r, d): the r-spaces Π_P spanned by ψ_0(P), ψ_1(φ_1(P)), ...,
    one per parameter P of PG(1,F).
    """

    bases: tuple[ParametrizedVariety, ...]
    homographies: tuple[Homography, ...]
    parameters: tuple[ProjPoint, ...]
    generators: tuple[Subspace, ...]

    @property
    def r(self) -> int:
        return len(self.bases) - 1

    @property
    def field(self) -> FiniteField:
        return self.bases[0].field

    @property
    def n(self) -> int:
        return self.bases[0].ambient.n

    @cached_property
    def pointset(self) -> tuple[ProjPoint, ...]:
        points = {p for g in self.generators for p in iter_points(g)}
        return tuple(sorted(points, key=lambda p: p.coords))

    def points(self, cap: int = DEFAULT_CAP) -> list[ProjPoint]:
        total = sum(g.point_count() for g in self.generators)
        if total > cap:
            raise TooLarge(total, cap)
        return list(self.pointset)

    def contains(self, p: ProjPoint) -> bool:
        return any(g.contains(p) for g in self.generators)

    def generator_of(self, param: ProjPoint) -> Subspace:
        return self.generators[self.parameters.index(param)]


def scroll_build(
    bases: Sequence[ParametrizedVariety], homographies: Optional[Sequence[Homography]] = None
) -> Scroll:
    """
    Raises:
        ArityMismatch: fewer than two bases, or not one homography per extra base
        DependentSubspaces: the base subspaces are not independent
    """
    if len(bases) < 2:
        raise ArityMismatch(f"a scroll needs at least two base curves, got {len(bases)}")
    field = bases[0].field
    identity: Homography = ((1, 0), (0, 1))
    homographies = tuple(homographies) if homographies is not None else (identity,) * (len(bases) - 1)
    if len(homographies) != len(bases) - 1:
        raise ArityMismatch(f"{len(homographies)} homographies for {len(bases)} base curves")
    for h in homographies:
        if rank(field, h) != 2:
            raise ArityMismatch("a homography needs a nonsingular 2×2 matrix")

    ambients = [b.ambient for b in bases]
    expected = sum(a.dim + 1 for a in ambients) - 1
    if span(ambients).dim != expected:
        raise DependentSubspaces(f"base subspaces span dim {span(ambients).dim}, expected {expected}")

    parameters = tuple(enumerate_points(Subspace.whole(field, 1)))
    generators = []
    for param in parameters:
        points = [bases[0].point(param.coords)]
        for base, h in zip(bases[1:], homographies):
            points.append(base.point(_apply_homography(field, h, param.coords)))
        generators.append(span(points))
    logger.info(f"Built scroll of type ({len(bases) - 1}, 1) with {len(generators)} generators")
    return Scroll(
        bases=tuple(bases),
        homographies=homographies,
        parameters=parameters,
        generators=tuple(generators),
    )


def _coordinate_subspace(field: FiniteField, n: int, indices: Sequence[int]) -> Subspace:
    return Subspace.from_rows(field, n, [tuple(1 if j == i else 0 for j in range(n + 1)) for i in indices])


def two_line_scroll(field: FiniteField) -> Scroll:
    """Lines x2 = x3 = 0 and x0 = x1 = 0 of PG(3,F) joined by the identity: the hyperbolic quadric."""
    return scroll_build(
        [
            normal_rational_curve(_coordinate_subspace(field, 3, (0, 1))),
            normal_rational_curve(_coordinate_subspace(field, 3, (2, 3))),
        ]
    )


def canonical_conic_scroll(field: FiniteField) -> Scroll:
    """Conics (r², rs, s²) in the planes ⟨e0,e1,e2⟩, ⟨e3,e4,e5⟩, ⟨e6,e7,e8⟩ of PG(8,F)."""
    return scroll_build(
        [normal_rational_curve(_coordinate_subspace(field, 8, range(3 * i, 3 * i + 3))) for i in range(3)]
    )


def hyperbolic_quadric_form(field: FiniteField) -> HomogeneousForm:
    """x0·x3 - x1·x2."""
    return HomogeneousForm.from_terms(field, 4, 2, [((1, 0, 0, 1), 1), ((0, 1, 1, 0), field.neg(1))])


def sigma_parametrization(field: FiniteField, y: Sequence[int]) -> ProjPoint:
    """
    (y0³, y0²y1, y0y1², y0²y2, y0y1y2, y1²y2, y0²y3, y0y1y3, y1²y3), normalized.

    Raises:
        KernelPoint: y is zero, (0,1,0,0) or (0,0,a,b) up to scalars
    """
    if len(y) != 4:
        raise ArityMismatch(f"σ takes four coordinates, got {len(y)}")
    mul = field.mul
    y0, y1, y2, y3 = y
    conic = (mul(y0, y0), mul(y0, y1), mul(y1, y1))
    vector = [mul(s, c) for s in (y0, y2, y3) for c in conic]
    normalized = normalize(field, vector)
    if normalized is None:
        raise KernelPoint(f"σ is undefined at {tuple(y)}")
    return ProjPoint(field, normalized)


def sigma_image(field: FiniteField) -> dict[ProjPoint, list[ProjPoint]]:
    """Fibres of σ over its image, for every admissible parameter point of PG(3,F)."""
    fibres: dict[ProjPoint, list[ProjPoint]] = {}
    for y in iter_points(Subspace.whole(field, 3)):
        try:
            image = sigma_parametrization(field, y.coords)
        except KernelPoint:
            continue
        fibres.setdefault(image, []).append(y)
    return fibres
