"""
Bose representation of PG(2,q³) in PG(8,q).

A point X̄ = (x, y, z) of PG(2,q³) becomes the plane ⟦X̄⟧ spanned over GF(q) by

    X_j = power-basis coefficients of τ^j·(x, y, z),   j = 0, 1, 2

(coordinate order x0,x1,x2, y0,y1,y2, z0,z1,z2). The extension of ⟦X̄⟧ meets the
transversal plane Γ = ⟨A0, A1, A2⟩ in x·A0 + y·A1 + z·A2, and ⟦X̄⟧ is the rational
part of ⟨X, X^q, X^(q²)⟩. The q⁶+q³+1 planes partition PG(8,q).
"""

import logging
from collections import Counter
from dataclasses import dataclass, field as dataclass_field
from functools import cached_property
from typing import Optional

from src.errors import BoseConsistencyError, NotALine, PointAtInfinity, TooLarge
from src.fields import FieldElem, FieldTower, Level, transversal_constants
from src.projgeom import (
    DEFAULT_CAP,
    Matrix,
    ProjPoint,
    Subspace,
    conjugate_span_rational,
    enumerate_points,
    iter_points,
    mat_inverse,
    projective_count,
    rational_points,
    span,
)

logger = logging.getLogger(__name__)


# ============================================================================
# Frame
# ============================================================================


@dataclass(eq=False)
class BoseFrame:
    """
    Transversal frame of the Bose spread.

    Attributes:
        tower: the field tower
        a: (a0, a1, a2) at the cubic level
        anchors: A0, A1, A2 in PG(8,q³)
        gamma: Γ = ⟨A0, A1, A2⟩ and its conjugates gamma_q, gamma_q2
    """

    tower: FieldTower
    a: tuple[FieldElem, FieldElem, FieldElem]
    anchors: tuple[ProjPoint, ProjPoint, ProjPoint]
    gamma: Subspace
    gamma_q: Subspace
    gamma_q2: Subspace
    cap: int = DEFAULT_CAP

    @property
    def transversals(self) -> tuple[Subspace, Subspace, Subspace]:
        return (self.gamma, self.gamma_q, self.gamma_q2)

    @cached_property
    def plane_points(self) -> list[ProjPoint]:
        """Points of PG(2,q³) in enumeration order."""
        return enumerate_points(Subspace.whole(self.tower.cubic, 2), self.cap)

    @cached_property
    def spread(self) -> list[Subspace]:
        planes = [_plane_from_coordinates(self, p) for p in self.plane_points]
        logger.info(f"Built Bose spread of {len(planes)} planes for q={self.tower.q}")
        return planes

    @cached_property
    def spread_index(self) -> dict[Subspace, ProjPoint]:
        return dict(zip(self.spread, self.plane_points))

    @cached_property
    def transversal_coordinates(self) -> Matrix:
        """Inverse of the basis Γ ⊕ Γ^q ⊕ Γ^(q²); P times it splits P over the three planes."""
        rows = [row for plane in self.transversals for row in plane.rows]
        return mat_inverse(self.tower.cubic, rows)

    def validate(self) -> tuple[bool, list[str]]:
        """Check the formulas for a0, a1, a2 and that the three transversal planes are in general position."""
        errors = []
        tower = self.tower
        tau = tower.tau
        tau_q = FieldElem(tower.cubic, tower.cubic.frob(tau.code, 1))
        tau_q2 = FieldElem(tower.cubic, tower.cubic.frob(tau.code, 2))
        a0, a1, a2 = self.a
        if a0 != -(tau_q * tau_q2):
            errors.append("a0 != -τ^q·τ^(q²)")
        if a1 != tau_q + tau_q2:
            errors.append("a1 != τ^q + τ^(q²)")
        if a2 != -tower.elem(Level.CUBIC, 1):
            errors.append("a2 != -1")

        g0, g1, g2 = self.transversals
        for name, (u, w) in {"Γ,Γ^q": (g0, g1), "Γ,Γ^q²": (g0, g2), "Γ^q,Γ^q²": (g1, g2)}.items():
            if span([u, w]).dim != 5:
                errors.append(f"{name} do not span a 5-space")
        if span([g0, g1, g2]).dim != 8:
            errors.append("transversals do not span PG(8,q³)")
        if not rational_points(g0).is_empty:
            errors.append("Γ has rational points")
        return (len(errors) == 0, errors)


@dataclass(frozen=True)
class PlanePointPair:
    bar_x: ProjPoint
    gamma_x: ProjPoint
    boseplane: Subspace


@dataclass
class SpreadReport:
    q: int
    modulus: tuple[int, int, int]
    plane_count: int
    point_count: int
    multiplicity_histogram: dict[int, int] = dataclass_field(default_factory=dict)
    regular: bool = False

    @property
    def partition(self) -> bool:
        return self.multiplicity_histogram == {1: self.point_count}

    @property
    def passed(self) -> bool:
        return self.partition and self.regular

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "modulus": list(self.modulus),
            "plane_count": self.plane_count,
            "point_count": self.point_count,
            "multiplicity_histogram": {str(k): v for k, v in sorted(self.multiplicity_histogram.items())},
            "regular": self.regular,
        }


# ============================================================================
# Operations
# ============================================================================


def build_frame(tower: FieldTower, cap: int = DEFAULT_CAP) -> BoseFrame:
    cubic = tower.cubic
    a = transversal_constants(tower)
    codes = [x.code for x in a]
    anchors = tuple(
        ProjPoint.from_vector(cubic, [0] * (3 * i) + codes + [0] * (6 - 3 * i))
        for i in range(3)
    )
    gamma = span(list(anchors))
    frame = BoseFrame(
        tower=tower,
        a=a,
        anchors=anchors,
        gamma=gamma,
        gamma_q=gamma.frobenius(1),
        gamma_q2=gamma.frobenius(2),
        cap=cap,
    )
    logger.info(f"Built Bose frame for q={tower.q}")
    return frame


def gamma_point(frame: BoseFrame, bar_x: ProjPoint) -> ProjPoint:
    """x·A0 + y·A1 + z·A2 for X̄ = (x, y, z); bar_x may live at the cubic or sextic level."""
    field = bar_x.field
    mul = field.mul
    a = [x.code for x in frame.a]
    coords = [mul(c, aj) for c in bar_x.coords for aj in a]
    return ProjPoint.from_vector(field, coords)


def gamma_coordinates(point: ProjPoint) -> ProjPoint:
    """Inverse of gamma_point on Γ: X̄ is read off the a2 = -1 slots."""
    return ProjPoint.from_vector(point.field, [point.coords[2], point.coords[5], point.coords[8]])


def _plane_rows(frame: BoseFrame, bar_x: ProjPoint) -> list[tuple[int, ...]]:
    cubic = frame.tower.cubic
    q = cubic.q
    rows = []
    for tau_j in (1, q, q * q):
        row = []
        for c in bar_x.coords:
            row.extend(cubic.coefficients(cubic.mul(tau_j, c)))
        rows.append(tuple(row))
    return rows


def _plane_from_coordinates(frame: BoseFrame, bar_x: ProjPoint) -> Subspace:
    return Subspace.from_rows(frame.tower.base, 8, _plane_rows(frame, bar_x))


def bose_plane(frame: BoseFrame, bar_x: ProjPoint, cross_check: bool = True) -> PlanePointPair:
    """
    The spread plane ⟦X̄⟧ and the point where its extension meets Γ.

    With cross_check the plane is also computed as the rational part of
    ⟨X, X^q, X^(q²)⟩ and the two routes must agree.
    """
    plane = _plane_from_coordinates(frame, bar_x)
    gamma_x = gamma_point(frame, bar_x)
    if cross_check:
        other = rational_points(span([gamma_x, gamma_x.frobenius(1), gamma_x.frobenius(2)]))
        if other != plane:
            raise BoseConsistencyError(f"Bose plane routes disagree at {bar_x.coords}")
    return PlanePointPair(bar_x=bar_x, gamma_x=gamma_x, boseplane=plane)


def bose_line(frame: BoseFrame, line: Subspace) -> Subspace:
    """The 5-space of PG(8,q) representing a line of PG(2,q³)."""
    if line.dim != 1 or line.n != 2:
        raise NotALine(f"expected a line of PG(2,q³), got dim {line.dim} in PG({line.n})")
    images = [gamma_point(frame, p) for p in line.points_basis()]
    line_gamma = span(images)
    extended = span([line_gamma, line_gamma.frobenius(1), line_gamma.frobenius(2)])
    return rational_points(extended)


def bose_line_plane_count(frame: BoseFrame, line: Subspace) -> int:
    """Number of spread planes inside bose_line(line); q³ + 1 for a dual-spread element."""
    space = bose_line(frame, line)
    return sum(1 for plane in frame.spread if space.contains(plane))


def verify_spread(frame: BoseFrame, cap: Optional[int] = None) -> SpreadReport:
    tower = frame.tower
    cap = frame.cap if cap is None else cap
    total = projective_count(tower.q, 8)
    if total > cap:
        raise TooLarge(total, cap)

    coverage: Counter = Counter()
    for plane in frame.spread:
        for point in iter_points(plane, cap):
            coverage[point.coords] += 1
    histogram = Counter(coverage.values())
    uncovered = total - len(coverage)
    if uncovered:
        histogram[0] = uncovered

    from_gamma = {conjugate_span_rational(gamma_point(frame, p)) for p in frame.plane_points}
    regular = from_gamma == set(frame.spread)

    report = SpreadReport(
        q=tower.q,
        modulus=tower.cubic_modulus,
        plane_count=len(frame.spread),
        point_count=total,
        multiplicity_histogram=dict(histogram),
        regular=regular,
    )
    logger.info(
        f"Spread check q={tower.q}: {report.plane_count} planes, "
        f"histogram {report.multiplicity_histogram}, regular={regular}"
    )
    return report


def bruck_bose_coords(frame: BoseFrame, bar_p: ProjPoint) -> ProjPoint:
    """Affine point (x, y, 1) ↦ (x0,x1,x2, y0,y1,y2, 1,0,0) in Σ6,q."""
    cubic = frame.tower.cubic
    x, y, z = bar_p.coords
    if z == 0:
        raise PointAtInfinity(f"{bar_p.coords} lies on the line z = 0")
    z_inv = cubic.inv(z)
    coords = (
        cubic.coefficients(cubic.mul(x, z_inv))
        + cubic.coefficients(cubic.mul(y, z_inv))
        + (1, 0, 0)
    )
    return ProjPoint(frame.tower.base, coords)


def affine_slice(frame: BoseFrame) -> Subspace:
    """Σ6,q: the 6-space x7 = x8 = 0 holding the Bruck-Bose affine points."""
    base = frame.tower.base
    rows = [tuple(1 if j == i else 0 for j in range(9)) for i in range(7)]
    return Subspace.from_rows(base, 8, rows)


def line_at_infinity_space(frame: BoseFrame) -> Subspace:
    """Σ∞: the 5-space x6 = x7 = x8 = 0, the Bose line of z = 0."""
    cubic = frame.tower.cubic
    z_zero = Subspace.from_rows(cubic, 2, [(1, 0, 0), (0, 1, 0)])
    return bose_line(frame, z_zero)
