"""
Recognition predicates, order/dimension sampling and the theorem suites.

Key responsibilities:
- CheckReport: named pass/fail record with counters and witnesses, nested
  per sub-check
- check_2regulus / check_segre_system: recognize the plane families that
  sublines and subplanes produce
- sample_order_dimension: random complementary subspaces against a finite
  pointset or a membership predicate
- run_suite: the seeded batteries behind `boselab <suite> verify`

Every random choice comes from Rng(seed).split(suite).split(check), so a
witness index together with the seed reproduces the failing object.
"""

import itertools
import logging
import time
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Iterator, Optional, Sequence

import galois

from src.bose import (
    BoseFrame,
    bose_line,
    bose_line_plane_count,
    bose_plane,
    bruck_bose_coords,
    affine_slice,
    build_frame,
    gamma_coordinates,
    gamma_point,
    line_at_infinity_space,
    verify_spread,
)
from src.errors import (
    DegenerateConic,
    DegeneratePlanes,
    NotPrime,
    PointOnTransversalLine,
    TooFewPlanes,
    UnknownSuite,
)
from src.fields import (
    FieldTower,
    FiniteField,
    build_tower,
    element_order,
    find_primitive_cubic,
)
from src.forms import (
    DEFAULT_REJECTION_BUDGET,
    HomogeneousForm,
    VarietyHandle,
    conic_to_quadrics,
    convention_regression,
    expand_form,
    extend_variety,
    extended_variety_handle,
    is_nondegenerate_conic,
    lifted_variety_handle,
    parse_form,
    random_conic,
    variety_points,
    verify_cone,
)
from src.projgeom import (
    DEFAULT_CAP,
    ProjPoint,
    Subspace,
    iter_points,
    meet,
    random_point,
    random_point_of,
    random_subspace,
    rank,
    rational_points,
    span,
)
from src.rng import Rng
from src.suite_search import SuiteSearch
from src.substructures import (
    SegreVariety,
    bracket_plane,
    canonical_conic_scroll,
    classify_tplane_meet,
    count_transversal_planes_through,
    fq_conic,
    hyperbolic_quadric_form,
    locate_bracket_plane,
    orbit_size,
    segre_from_four_planes,
    segre_point_sampler,
    sigma_image,
    subline_through,
    subplane_through,
    two_line_scroll,
    unique_transversal_plane,
)

logger = logging.getLogger(__name__)

HISTOGRAM_BUCKETS = 10


# ============================================================================
# Reports
# ============================================================================


@dataclass
class CheckReport:
    """
    Result of one check or of a group of checks.

    A report passes when it recorded no witness and every child passes.
    """

    name: str
    parameters: dict = dataclass_field(default_factory=dict)
    counters: dict = dataclass_field(default_factory=dict)
    witnesses: list[dict] = dataclass_field(default_factory=list)
    checks: list["CheckReport"] = dataclass_field(default_factory=list)
    timing_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.witnesses and all(c.passed for c in self.checks)

    def fail(self, witness: dict) -> None:
        self.witnesses.append(witness)

    def expect(self, condition: bool, witness: dict) -> bool:
        if not condition:
            self.fail(witness)
        return condition

    def to_dict(self) -> dict:
        data = {
            "name": self.name,
            "pass": self.passed,
            "counters": self.counters,
            "timing_ms": round(self.timing_ms, 3),
        }
        if self.witnesses:
            data["witness"] = self.witnesses[0]
        if self.checks:
            data["checks"] = [c.to_dict() for c in sorted(self.checks, key=lambda c: c.name)]
        return data


@contextmanager
def timed(report: CheckReport) -> Iterator[CheckReport]:
    start = time.perf_counter()
    try:
        yield report
    finally:
        report.timing_ms = (time.perf_counter() - start) * 1000.0


def _coords(p: ProjPoint) -> list[str]:
    return p.to_json()


# ============================================================================
# Recognition predicates
# ============================================================================


def check_2regulus(planes: Sequence[Subspace], name: str = "2regulus") -> CheckReport:
    """
    Pairwise disjoint, inside one 5-space, and for every point P of the first
    plane the line meet(⟨P, π2⟩, ⟨P, π3⟩) meets every plane.

    Raises:
        TooFewPlanes: fewer than three planes
    """
    if len(planes) < 3:
        raise TooFewPlanes(f"a 2-regulus check needs at least 3 planes, got {len(planes)}")
    report = CheckReport(name=name)
    with timed(report):
        report.counters = {"planes": len(planes), "points_tested": 0}
        for i, j in itertools.combinations(range(len(planes)), 2):
            if not meet(planes[i], planes[j]).is_empty:
                report.fail({"reason": "planes meet", "pair": [i, j]})
                return report
        ambient = span(list(planes))
        if not report.expect(ambient.dim == 5, {"reason": "span is not a 5-space", "span_dim": ambient.dim}):
            return report

        first, second, third = planes[0], planes[1], planes[2]
        for p in iter_points(first):
            report.counters["points_tested"] += 1
            line = meet(span([p, second]), span([p, third]))
            if line.dim != 1:
                report.fail({"reason": "no unique transversal line", "point": _coords(p), "meet_dim": line.dim})
                return report
            for k, plane in enumerate(planes):
                if meet(line, plane).is_empty:
                    report.fail({"reason": "transversal misses a plane", "point": _coords(p), "plane": k})
                    return report
    return report


def _first_spanning_quadruple(planes: Sequence[Subspace]) -> Optional[tuple[int, int, int, int]]:
    for quad in itertools.combinations(range(len(planes)), 4):
        if all(span([planes[i] for i in triple]).dim == 8 for triple in itertools.combinations(quad, 3)):
            return quad
    return None


def segre_of_planes(planes: Sequence[Subspace]) -> SegreVariety:
    """Segre variety through the first quadruple of `planes` whose triples all span PG(8)."""
    quad = _first_spanning_quadruple(planes)
    if quad is None:
        raise DegeneratePlanes("no four planes with every three spanning PG(8)")
    return segre_from_four_planes(*(planes[i] for i in quad))


def check_segre_system(planes: Sequence[Subspace], name: str = "segre_system") -> CheckReport:
    """
    Every plane lies in the system through the first spanning quadruple,
    and every point of every plane satisfies the nine minor quadrics.

    Raises:
        DegeneratePlanes: fewer than four planes, or no quadruple with every triple spanning
    """
    if len(planes) < 4:
        raise DegeneratePlanes(f"a Segre system check needs at least 4 planes, got {len(planes)}")
    quad = _first_spanning_quadruple(planes)
    if quad is None:
        raise DegeneratePlanes("no four planes with every three spanning PG(8)")
    report = CheckReport(name=name)
    with timed(report):
        segre = segre_from_four_planes(*(planes[i] for i in quad))
        system = set(segre.plane_system)
        handle = segre.handle()
        report.counters = {
            "planes": len(planes),
            "system_size": len(system),
            "quadruple": list(quad),
            "points_tested": 0,
        }
        for k, plane in enumerate(planes):
            if plane not in system:
                report.fail({"reason": "plane outside the system", "plane": k})
                return report
        for k, plane in enumerate(planes):
            for p in iter_points(plane):
                report.counters["points_tested"] += 1
                if not handle.contains(p):
                    report.fail({"reason": "point off the quadrics", "plane": k, "point": _coords(p)})
                    return report
    return report


def _meet_dimension(draw: Subspace, generator: Subspace) -> int:
    field = draw.field
    images = [[field.dot(form, row) for form in draw.annihilator] for row in generator.rows]
    return len(generator.rows) - rank(field, images) - 1


def _anchored_draw(generators: Sequence[Subspace], k: int, rng: Rng) -> Optional[Subspace]:
    for _ in range(64):
        chosen = rng.sample(list(generators), k + 1)
        draw = span([random_point_of(g, rng) for g in chosen])
        if draw.dim == k:
            return draw
    return None


def sample_order_dimension(
    membership: Optional[Callable[[ProjPoint], bool]],
    n: int,
    field: FiniteField,
    rng: Rng,
    samples: int,
    d: int,
    *,
    points: Optional[Sequence[ProjPoint]] = None,
    generators: Sequence[Subspace] = (),
    max_order: Optional[int] = None,
    anchored: bool = False,
    cap: int = DEFAULT_CAP,
    name: str = "order_dimension",
) -> CheckReport:
    """
    Histogram of hits between a dimension-d variety and random (n-d)-spaces.

    Hits are counted over `points` when the pointset is known, otherwise by
    enumerating each draw and asking `membership`. A draw is degenerate when
    it meets a generator in a line or more, or meets every generator;
    degenerate draws are counted and left out of the histogram. With
    anchored=True each draw is spanned by points on n-d+1 distinct generators.
    A non-degenerate draw above max_order is a failure.
    """
    k = n - d
    report = CheckReport(name=name, parameters={"n": n, "d": d, "samples": samples, "anchored": anchored})
    if anchored and len(generators) <= k + 1:
        logger.warning(f"{name}: anchored draws need more than {k + 1} generators, got {len(generators)}")
        report.fail({"reason": "too few generators for anchored draws", "generators": len(generators)})
        return report
    with timed(report):
        histogram: Counter = Counter()
        degenerate, skipped = 0, 0
        for index in range(samples):
            if anchored:
                draw = _anchored_draw(generators, k, rng)
                if draw is None:
                    skipped += 1
                    continue
            else:
                draw = random_subspace(field, n, k, rng)

            if generators:
                dims = [_meet_dimension(draw, g) for g in generators]
                if max(dims) >= 1 or all(x >= 0 for x in dims):
                    degenerate += 1
                    continue

            if points is not None:
                hits = sum(1 for p in points if draw.contains_vector(p.coords))
            else:
                hits = sum(1 for p in iter_points(draw, cap) if membership(p))

            bucket = str(hits) if hits <= HISTOGRAM_BUCKETS else "overflow"
            histogram[bucket] += 1
            if max_order is not None and hits > max_order and len(report.witnesses) == 0:
                report.fail({"reason": "hit count above the order", "index": index, "hits": hits, "draw": draw.to_json()})

        counted = {int(b): c for b, c in histogram.items() if b != "overflow"}
        max_hits = max(counted) if counted else None
        if histogram.get("overflow"):
            max_hits = HISTOGRAM_BUCKETS + 1
        report.counters = {
            "histogram": {b: histogram.get(b, 0) for b in [str(i) for i in range(HISTOGRAM_BUCKETS + 1)] + ["overflow"]},
            "degenerate": degenerate,
            "skipped": skipped,
            "nondegenerate": sum(histogram.values()),
            "max_hits": max_hits,
            "max_hits_frequency": histogram.get(str(max_hits), 0) if max_hits is not None else 0,
            "modal_hits": int(max(counted, key=lambda h: (counted[h], -h))) if counted else None,
        }
    logger.info(f"{name}: {report.counters['nondegenerate']} draws, max hits {report.counters['max_hits']}")
    return report


# ============================================================================
# Suite plumbing
# ============================================================================


@dataclass(frozen=True)
class SuiteParams:
    q: int = 2
    modulus: Optional[tuple[int, int, int]] = None
    seed: int = 1
    samples: int = 25
    cap: int = DEFAULT_CAP
    rejection_budget: int = DEFAULT_REJECTION_BUDGET
    order_samples: int = 2000
    form: Optional[str] = None


def tower_for(q: int, modulus: Optional[Sequence[int]] = None) -> FieldTower:
    """The tower for q, with the first primitive cubic when no modulus is given."""
    if q < 2 or not galois.is_prime_power(q):
        raise NotPrime(f"{q} is not a prime power")
    primes, exponents = galois.factors(q)
    p, e = int(primes[0]), int(exponents[0])
    if modulus is None:
        modulus = find_primitive_cubic(p, e)
    return build_tower(p, e, modulus)


class SuiteContext:
    """Tower, Bose frame and random streams shared by one suite run."""

    def __init__(self, suite: str, params: SuiteParams):
        self.suite = suite
        self.params = params
        self.tower = tower_for(params.q, params.modulus)
        self.rng = Rng(params.seed).split(suite)
        self._frame: Optional[BoseFrame] = None

    @property
    def frame(self) -> BoseFrame:
        if self._frame is None:
            self._frame = build_frame(self.tower, self.params.cap)
        return self._frame

    @property
    def q(self) -> int:
        return self.tower.q

    def stream(self, check: str) -> Rng:
        return self.rng.split(check)

    def check(self, name: str) -> CheckReport:
        return CheckReport(name=name)

    def conic(self, rng: Rng) -> HomogeneousForm:
        """The conic given with --form, or a random nondegenerate one."""
        if self.params.form is None:
            return random_conic(self.tower, rng)
        form = parse_form(self.params.form, self.tower.cubic)
        if form.degree != 2 or not is_nondegenerate_conic(self.tower, form):
            raise DegenerateConic(f"'{self.params.form}' is not a nondegenerate conic")
        return form


def random_subline_points(field: FiniteField, rng: Rng) -> tuple[ProjPoint, ProjPoint, ProjPoint]:
    line = random_subspace(field, 2, 1, rng)
    chosen: list[ProjPoint] = []
    while len(chosen) < 3:
        p = random_point_of(line, rng)
        if p not in chosen:
            chosen.append(p)
    return tuple(chosen)


def random_quadrangle(field: FiniteField, rng: Rng) -> list[ProjPoint]:
    while True:
        quad = [random_point(field, 2, rng) for _ in range(4)]
        if all(span(list(t)).dim == 2 for t in itertools.combinations(quad, 3)):
            return quad


def random_disjoint_plane(ambient: Subspace, avoid: Sequence[Subspace], rng: Rng) -> Subspace:
    while True:
        plane = span([random_point_of(ambient, rng) for _ in range(3)])
        if plane.dim == 2 and all(meet(plane, other).is_empty for other in avoid):
            return plane


def _bose_planes(frame: BoseFrame, points: Sequence[ProjPoint]) -> list[Subspace]:
    return [bose_plane(frame, p, cross_check=False).boseplane for p in points]


# ============================================================================
# Suites
# ============================================================================


def _suite_fields(ctx: SuiteContext) -> list[CheckReport]:
    tower, q = ctx.tower, ctx.q
    checks = []

    frame_check = ctx.check("transversal_identities")
    with timed(frame_check):
        ok, errors = ctx.frame.validate()
        frame_check.counters = {"errors": len(errors)}
        frame_check.expect(ok, {"errors": errors})
    checks.append(frame_check)

    order_check = ctx.check("tau_primitive")
    with timed(order_check):
        order = element_order(tower.tau)
        order_check.counters = {"order": order, "expected": q**3 - 1}
        order_check.expect(order == q**3 - 1, {"order": order})
    checks.append(order_check)

    frob_check = ctx.check("frobenius_orders")
    with timed(frob_check):
        cubic, sextic = tower.cubic, tower.sextic
        bad_cubic = next((a for a in cubic.elements() if cubic.frob(a, 3) != a), None)
        frob_check.expect(bad_cubic is None, {"level": "cubic", "element": bad_cubic})
        rng = ctx.stream("frobenius")
        tested = 0
        for index in range(ctx.params.samples):
            a, b = rng.randbelow(sextic.size), rng.randbelow(sextic.size)
            tested += 1
            if sextic.frob(a, 6) != a or sextic.frob(sextic.mul(a, b), 1) != sextic.mul(sextic.frob(a, 1), sextic.frob(b, 1)):
                frob_check.fail({"level": "sextic", "index": index, "elements": [a, b]})
                break
        frob_check.counters = {"cubic_elements": cubic.size, "sextic_samples": tested}
    checks.append(frob_check)

    convention = ctx.check("extension_convention")
    with timed(convention):
        counts = convention_regression(tower)
        convention.counters = counts
        convention.expect(
            counts["reduced_base"] == counts["whole_base"] == q * q + q + 1,
            {"reason": "base pointsets differ", "counts": counts},
        )
        convention.expect(
            counts["reduced_extended"] == (q + 1) * q**3 + 1 and counts["whole_extended"] == q**6 + q**3 + 1,
            {"reason": "unexpected extension counts", "counts": counts},
        )
    checks.append(convention)
    return checks


def _suite_spread(ctx: SuiteContext) -> list[CheckReport]:
    frame, q = ctx.frame, ctx.q
    checks = []

    partition = ctx.check("partition")
    with timed(partition):
        report = verify_spread(frame)
        partition.counters = report.to_dict()
        partition.expect(report.plane_count == q**6 + q**3 + 1, {"plane_count": report.plane_count})
        partition.expect(report.partition, {"histogram": report.to_dict()["multiplicity_histogram"]})
        partition.expect(report.regular, {"reason": "spread planes differ from the conjugate-span planes"})
    checks.append(partition)

    cross = ctx.check("plane_routes_agree")
    with timed(cross):
        rng = ctx.stream("routes")
        for index in range(ctx.params.samples):
            p = random_point(ctx.tower.cubic, 2, rng)
            pair = bose_plane(frame, p, cross_check=False)
            other = rational_points(span([pair.gamma_x, pair.gamma_x.frobenius(1), pair.gamma_x.frobenius(2)]))
            if not cross.expect(other == pair.boseplane, {"index": index, "point": _coords(p)}):
                break
        cross.counters = {"samples": ctx.params.samples}
    checks.append(cross)

    dual = ctx.check("dual_spread")
    with timed(dual):
        rng = ctx.stream("dual")
        lines = min(ctx.params.samples, 3)
        for index in range(lines):
            line = random_subspace(ctx.tower.cubic, 2, 1, rng)
            count = bose_line_plane_count(frame, line)
            if not dual.expect(count == q**3 + 1, {"index": index, "count": count}):
                break
        dual.counters = {"lines": lines, "expected_planes": q**3 + 1}
    checks.append(dual)

    bruck = ctx.check("bruck_bose")
    with timed(bruck):
        rng = ctx.stream("bruck_bose")
        slice6 = affine_slice(frame)
        infinity = line_at_infinity_space(frame)
        expected_infinity = Subspace.from_rows(
            ctx.tower.base, 8, [tuple(1 if j == i else 0 for j in range(9)) for i in range(6)]
        )
        bruck.expect(infinity == expected_infinity, {"reason": "Σ∞ is not x6 = x7 = x8 = 0"})
        cubic = ctx.tower.cubic
        for index in range(ctx.params.samples):
            p = ProjPoint.from_vector(cubic, (rng.randbelow(cubic.size), rng.randbelow(cubic.size), 1))
            image = bruck_bose_coords(frame, p)
            plane = bose_plane(frame, p, cross_check=False).boseplane
            ok = slice6.contains(image) and not infinity.contains(image) and plane.contains(image)
            if not bruck.expect(ok, {"index": index, "point": _coords(p)}):
                break
        bruck.counters = {"samples": ctx.params.samples}
    checks.append(bruck)
    return checks


def _suite_subline(ctx: SuiteContext) -> list[CheckReport]:
    frame, q = ctx.frame, ctx.q
    cubic = ctx.tower.cubic
    checks = []

    regulus = ctx.check("subline_2regulus")
    with timed(regulus):
        rng = ctx.stream("sublines")
        for index in range(ctx.params.samples):
            subline = subline_through(*random_subline_points(cubic, rng))
            planes = _bose_planes(frame, subline.points)
            sub = check_2regulus(planes)
            space = bose_line(frame, subline.line)
            if not sub.passed:
                regulus.fail({"index": index, "witness": sub.witnesses[0]})
                break
            if not all(space.contains(pl) for pl in planes):
                regulus.fail({"index": index, "reason": "plane outside the Bose 5-space"})
                break
        regulus.counters = {"sublines": ctx.params.samples, "planes_per_subline": q + 1}
    checks.append(regulus)

    cmap = ctx.check("subline_conjugacy")
    with timed(cmap):
        rng = ctx.stream("cmap")
        subline = subline_through(*random_subline_points(cubic, rng))
        fixed = all(subline.conjugate(p) == p for p in subline.points)
        line_points = list(iter_points(subline.line))
        order_three = all(subline.conjugate(p, 3) == p for p in line_points)
        moved = sum(1 for p in line_points if subline.conjugate(p) != p)
        cmap.counters = {"line_points": len(line_points), "moved": moved}
        cmap.expect(fixed, {"reason": "a subline point moved"})
        cmap.expect(order_three, {"reason": "c_b³ is not the identity"})
        cmap.expect(moved == len(line_points) - (q + 1), {"reason": "fixed points beyond the subline"})
    checks.append(cmap)

    control = ctx.check("regulus_negative_control")
    with timed(control):
        rng = ctx.stream("negative")
        controls = max(ctx.params.samples, 20)
        rejected = 0
        for index in range(controls):
            space = random_subspace(ctx.tower.base, 8, 5, rng)
            planes: list[Subspace] = []
            for _ in range(4):
                planes.append(random_disjoint_plane(space, planes, rng))
            if not check_2regulus(planes).passed:
                rejected += 1
        control.counters = {"controls": controls, "rejected": rejected}
        control.expect(rejected == controls, {"reason": "a random plane quadruple passed", "rejected": rejected})
    checks.append(control)

    if q == 2:
        extended = ctx.check("extended_regulus")
        with timed(extended):
            rng = ctx.stream("extended")
            subline = subline_through(*random_subline_points(cubic, rng))
            line_points = list(iter_points(subline.line))
            brackets = [bracket_plane(subline, frame, gamma_point(frame, p)) for p in line_points]
            space = bose_line(frame, subline.line).extend(cubic)
            sub = check_2regulus(brackets, name="extended_regulus")
            extended.counters = {"planes": len(brackets)}
            extended.expect(sub.passed, {"witness": sub.witnesses[0] if sub.witnesses else None})
            extended.expect(all(space.contains(b) for b in brackets), {"reason": "bracket plane outside Π_b★"})
        checks.append(extended)
    return checks


def _suite_subplane(ctx: SuiteContext) -> list[CheckReport]:
    frame, q, tower = ctx.frame, ctx.q, ctx.tower
    cubic = tower.cubic
    checks = []

    system = ctx.check("subplane_segre_system")
    with timed(system):
        rng = ctx.stream("subplanes")
        count = min(ctx.params.samples, 10)
        for index in range(count):
            sub = subplane_through(random_quadrangle(cubic, rng))
            planes = _bose_planes(frame, sub.points)
            result = check_segre_system(planes)
            if not result.passed:
                system.fail({"index": index, "witness": result.witnesses[0]})
                break
        system.counters = {"subplanes": count, "planes_per_subplane": q * q + q + 1}
    checks.append(system)

    orbits = ctx.check("conjugacy_orbits")
    with timed(orbits):
        rng = ctx.stream("orbits")
        sub = subplane_through(random_quadrangle(cubic, rng))
        histogram: Counter = Counter()
        for p in sub.points:
            size = orbit_size(sub, p)
            histogram[f"on_subplane:{size}"] += 1
            orbits.expect(size == 1, {"point": _coords(p), "orbit": size})
        drawn = 0
        while drawn < ctx.params.samples:
            p = random_point(cubic, 2, rng)
            if sub.contains(p):
                continue
            drawn += 1
            size = orbit_size(sub, p)
            histogram[f"cubic:{size}"] += 1
            orbits.expect(size == 3, {"point": _coords(p), "orbit": size})
        drawn = 0
        while drawn < ctx.params.samples:
            p = random_point(tower.sextic, 2, rng)
            if all(cubic.contains_code(c) for c in p.coords):
                continue
            drawn += 1
            size = orbit_size(sub, p)
            histogram[f"sextic:{size}"] += 1
            orbits.expect(size in (2, 6), {"point": _coords(p), "orbit": size})
        orbits.counters = {"histogram": dict(sorted(histogram.items()))}
    checks.append(orbits)

    if q <= 3:
        brackets = ctx.check("bracket_planes")
        with timed(brackets):
            rng = ctx.stream("brackets")
            sub = subplane_through(random_quadrangle(cubic, rng))
            segre = segre_of_planes(_bose_planes(frame, sub.points))
            extended = segre.handle(cubic)
            on_pi = sub.points[0]
            fixed = bracket_plane(sub, frame, gamma_point(frame, on_pi))
            brackets.expect(
                fixed == bose_plane(frame, on_pi, cross_check=False).boseplane.extend(cubic),
                {"reason": "bracket plane of a subplane point is not the extended Bose plane"},
            )
            tested = 0
            while tested < ctx.params.samples * 2:
                bar_x = random_point(cubic, 2, rng)
                if sub.contains(bar_x):
                    continue
                plane = bracket_plane(sub, frame, gamma_point(frame, bar_x))
                bad = next((p for p in iter_points(plane) if not extended.contains(p)), None)
                if not brackets.expect(bad is None, {"index": tested, "point": _coords(bar_x)}):
                    break
                if not brackets.expect(rational_points(plane).is_empty, {"index": tested, "reason": "rational point"}):
                    break
                tested += 1

            sextic = tower.sextic
            sextic_handle = segre.handle(sextic)
            sextic_tested = 0
            for _ in range(ctx.params.samples):
                bar_x = random_point(sextic, 2, rng)
                plane = bracket_plane(sub, frame, gamma_point(frame, bar_x))
                point = random_point_of(plane, rng)
                sextic_tested += 1
                if not brackets.expect(sextic_handle.contains(point), {"reason": "sextic bracket point off the Segre", "point": _coords(bar_x)}):
                    break
            brackets.counters = {"cubic_planes": tested, "sextic_points": sextic_tested}
        checks.append(brackets)

    if q == 2:
        unique = ctx.check("unique_transversal_plane")
        with timed(unique):
            rng = ctx.stream("transversal")
            base = tower.base
            alpha, beta, gamma = (
                Subspace.from_rows(base, 8, [tuple(1 if j == i else 0 for j in range(9)) for i in range(3 * k, 3 * k + 3)])
                for k in range(3)
            )
            count = min(ctx.params.samples, 20)
            examined = 0
            done = 0
            while done < count:
                p = random_point(base, 8, rng)
                try:
                    unique_transversal_plane(p, alpha, beta, gamma)
                except PointOnTransversalLine:
                    continue
                hits, examined = count_transversal_planes_through(p, alpha, beta, gamma)
                if not unique.expect(hits == 1, {"index": done, "point": _coords(p), "hits": hits}):
                    break
                done += 1
            unique.counters = {"points": done, "planes_per_point": examined}
        checks.append(unique)
    return checks


def _conic_points(conic: HomogeneousForm) -> list[ProjPoint]:
    return variety_points(VarietyHandle(conic.field, 2, (conic,)))


def _suite_conic(ctx: SuiteContext) -> list[CheckReport]:
    frame, q, tower = ctx.frame, ctx.q, ctx.tower
    cubic = tower.cubic
    checks = []

    if q <= 3:
        union = ctx.check("conic_bose_union")
        with timed(union):
            rng = ctx.stream("conics")
            count = 1 if ctx.params.form is not None else min(ctx.params.samples, 10)
            for index in range(count):
                conic = ctx.conic(rng)
                quadrics = conic_to_quadrics(tower, conic)
                points = set(variety_points(VarietyHandle.of(list(quadrics))))
                expected = {p for plane in _bose_planes(frame, _conic_points(conic)) for p in iter_points(plane)}
                ok = points == expected and len(points) == (q**3 + 1) * (q * q + q + 1)
                if not union.expect(ok, {"index": index, "found": len(points), "expected": len(expected)}):
                    break
            union.counters = {"conics": count, "expected_points": (q**3 + 1) * (q * q + q + 1)}
        checks.append(union)

    if ctx.params.form is not None:
        given = ctx.check("given_form")
        with timed(given):
            conic = ctx.conic(ctx.stream("given"))
            expanded = expand_form(tower, conic)
            given.counters = {
                "form": str(conic),
                "g": str(expanded.g),
                "f": [str(f) for f in expanded.f],
                "quadrics": len(conic_to_quadrics(tower, conic)),
            }
            given.expect(expanded.reconstruct() == expanded.g, {"reason": "G differs from f0 + tau f1 + tau^2 f2"})
        checks.append(given)

    linear = ctx.check("expansion_linearity")
    with timed(linear):
        rng = ctx.stream("linearity")
        for index in range(ctx.params.samples):
            f1, f2 = random_conic(tower, rng), random_conic(tower, rng)
            total = f1 + f2
            e1, e2, e12 = expand_form(tower, f1), expand_form(tower, f2), expand_form(tower, total)
            ok = all(e12.f[j] == e1.f[j] + e2.f[j] for j in range(3)) and e12.reconstruct() == e12.g
            if not linear.expect(ok, {"index": index}):
                break
        linear.counters = {"pairs": ctx.params.samples}
    checks.append(linear)

    degenerate = ctx.check("degenerate_conic_rejected")
    with timed(degenerate):
        square = HomogeneousForm.from_terms(cubic, 3, 2, [((2, 0, 0), 1)])
        try:
            conic_to_quadrics(tower, square)
            degenerate.fail({"reason": "x^2 accepted as a conic"})
        except DegenerateConic:
            pass
    checks.append(degenerate)

    if q == 2:
        curves = ctx.check("curve_bose_union")
        with timed(curves):
            rng = ctx.stream("curves")
            count = min(ctx.params.samples, 10)
            for index in range(count):
                degree = 1 + index % 3
                form = _random_curve(cubic, degree, rng)
                lifted = variety_points(lifted_variety_handle(expand_form(tower, form)))
                on_curve = [p for p in iter_points(Subspace.whole(cubic, 2)) if form.vanishes_at(p)]
                expected = {p for plane in _bose_planes(frame, on_curve) for p in iter_points(plane)}
                if not curves.expect(set(lifted) == expected, {"index": index, "degree": degree}):
                    break
            curves.counters = {"curves": count}
        checks.append(curves)
    return checks


def _random_curve(field: FiniteField, degree: int, rng: Rng) -> HomogeneousForm:
    monomials = [e for e in itertools.product(range(degree + 1), repeat=3) if sum(e) == degree]
    while True:
        form = HomogeneousForm.from_terms(field, 3, degree, [(m, rng.randbelow(field.size)) for m in monomials])
        if not form.is_zero():
            return form


def _suite_cone(ctx: SuiteContext) -> list[CheckReport]:
    frame, tower = ctx.frame, ctx.tower
    rng = ctx.stream("cone")
    conic = ctx.conic(rng)
    expanded = expand_form(tower, conic)
    conic_points = _conic_points(conic)
    base = [gamma_point(frame, p) for p in conic_points]
    vertex = span([frame.gamma_q, frame.gamma_q2])

    cone = ctx.check("cone_structure")
    with timed(cone):
        report = verify_cone(
            expanded.g, base, vertex, ctx.stream("cone_samples"), ctx.params.samples * 20, ctx.params.rejection_budget
        )
        cone.counters = dict(report.counters, checks=report.checks)
        for witness in report.witnesses:
            cone.fail(witness)
    checks = [cone]

    control = ctx.check("cone_wrong_base")
    with timed(control):
        conic_set = set(conic_points)
        while True:
            other = random_conic(tower, rng)
            other_points = _conic_points(other)
            if len(conic_set & set(other_points)) <= 2:
                break
        wrong = [gamma_point(frame, p) for p in other_points]
        report = verify_cone(expanded.g, wrong, vertex, ctx.stream("cone_control"), ctx.params.samples, ctx.params.rejection_budget)
        control.counters = dict(report.counters, shared_points=len(conic_set & set(other_points)))
        control.expect(not report.checks["projection_in_base"], {"reason": "wrong base accepted"})
    checks.append(control)
    return checks


def _suite_fqconic(ctx: SuiteContext) -> list[CheckReport]:
    frame, q, tower = ctx.frame, ctx.q, ctx.tower
    cubic, base = tower.cubic, tower.base
    rng = ctx.stream("fqconic")
    checks = []

    structure = ctx.check("fq_conic_structure")
    with timed(structure):
        count = min(ctx.params.samples, 10)
        for index in range(count):
            sub = subplane_through(random_quadrangle(cubic, rng))
            c = random_conic(tower, rng, field=base)
            conic = fq_conic(sub, c)
            cplus_points = _conic_points(conic.cplus_form)
            ok = len(conic.points) == q + 1 and len(cplus_points) == q**3 + 1
            if not structure.expect(ok, {"index": index, "points": len(conic.points), "cplus": len(cplus_points)}):
                break
        structure.counters = {"conics": count, "cplus_unique": q >= 4}
    checks.append(structure)

    sub = subplane_through(random_quadrangle(cubic, rng))
    conic = fq_conic(sub, random_conic(tower, rng, field=base))
    segre = segre_of_planes(_bose_planes(frame, sub.points))
    conic_quadrics = conic_to_quadrics(tower, conic.cplus_form)
    nine = VarietyHandle(base, 8, tuple(conic_quadrics) + segre.quadrics)

    if q <= 3:
        variety = ctx.check("fq_conic_variety")
        with timed(variety):
            points = set(variety_points(nine))
            expected = {p for plane in _bose_planes(frame, conic.points) for p in iter_points(plane)}
            variety.counters = {"points": len(points), "expected": (q + 1) * (q * q + q + 1)}
            variety.expect(points == expected and len(points) == (q + 1) * (q * q + q + 1), {"found": len(points)})
        checks.append(variety)

    extended = extend_variety(nine, cubic)
    cplus_on_gamma = [gamma_point(frame, p) for p in _conic_points(conic.cplus_form)]

    forward = ctx.check("bracket_planes_in_extension")
    with timed(forward):
        planes = cplus_on_gamma if q == 2 else rng.sample(cplus_on_gamma, min(len(cplus_on_gamma), ctx.params.samples))
        tested = 0
        for x in planes:
            plane = bracket_plane(sub, frame, x)
            pts = iter_points(plane) if q == 2 else (random_point_of(plane, rng) for _ in range(ctx.params.samples))
            bad = next((p for p in pts if not extended.contains(p)), None)
            tested += 1
            if not forward.expect(bad is None, {"x": _coords(x), "point": _coords(bad) if bad else None}):
                break
        forward.counters = {"planes": tested}
    checks.append(forward)

    backward = ctx.check("common_zeros_on_bracket_planes")
    with timed(backward):
        wanted = ctx.params.samples * 400
        budget = wanted * ctx.params.rejection_budget
        sampler = segre_point_sampler(segre, cubic, ctx.stream("segre_points"))
        conic_extended = VarietyHandle(cubic, 8, tuple(f.extend(cubic) for f in conic_quadrics))
        found, draws = 0, 0
        while found < wanted and draws < budget:
            draws += 1
            _, _, p = next(sampler)
            if not conic_extended.contains(p):
                continue
            found += 1
            located = locate_bracket_plane(sub, frame, p)
            on_cplus = located is not None and conic.cplus_form.vanishes_at(gamma_coordinates(located[0]))
            if not backward.expect(on_cplus, {"draw": draws, "point": _coords(p)}):
                break
        backward.counters = {"zeros": found, "draws": draws, "wanted": wanted}
        if found < wanted and not backward.witnesses:
            backward.fail({"reason": "sampling budget exhausted", "found": found})
    checks.append(backward)
    return checks


def _suite_extension(ctx: SuiteContext) -> list[CheckReport]:
    frame, q, tower = ctx.frame, ctx.q, ctx.tower
    cubic = tower.cubic
    rng = ctx.stream("extension")
    checks = []

    conic = random_conic(tower, rng)
    expanded = expand_form(tower, conic)
    lifted = extend_variety(lifted_variety_handle(expanded), cubic)
    conjugates = extended_variety_handle(expanded)

    agree = ctx.check("lifted_equals_conjugates")
    with timed(agree):
        random_points = ctx.params.samples * 400
        for index in range(random_points):
            p = random_point(cubic, 8, rng)
            if lifted.contains(p) != conjugates.contains(p):
                agree.fail({"index": index, "point": _coords(p)})
                break
        conic_gamma = [gamma_point(frame, p) for p in _conic_points(conic)]
        planes = min(ctx.params.samples, 30)
        bad_plane = None
        for index in range(planes):
            x, y, z = (rng.choice(conic_gamma) for _ in range(3))
            plane = span([x, y.frobenius(1), z.frobenius(2)])
            pts = iter_points(plane) if q == 2 else (random_point_of(plane, rng) for _ in range(ctx.params.samples))
            for p in pts:
                if not (lifted.contains(p) and conjugates.contains(p)):
                    bad_plane = index
                    break
            if bad_plane is not None:
                agree.fail({"plane": bad_plane, "reason": "T-plane point off the variety"})
                break
        agree.counters = {"random_points": random_points, "planes": planes}
    checks.append(agree)

    conj = ctx.check("conjugate_form_identity")
    with timed(conj):
        g = expanded.g
        gq = g.conjugate(1)
        base = tower.base
        for index in range(ctx.params.samples * 8):
            p = random_point(base, 8, rng)
            if not conj.expect(gq.evaluate(p.coords) == cubic.frob(g.evaluate(p.coords), 1), {"index": index}):
                break
        conj.expect(g.conjugate(3) == g, {"reason": "G^(q³) differs from G"})
        conj.counters = {"points": ctx.params.samples * 8}
    checks.append(conj)

    tplanes = ctx.check("tplane_meets")
    with timed(tplanes):
        transversals = frame.transversals
        histogram: Counter = Counter()

        def random_tplane() -> Subspace:
            while True:
                try:
                    return unique_transversal_plane(random_point(cubic, 8, rng), *transversals)
                except PointOnTransversalLine:
                    continue

        for index in range(ctx.params.samples * 8):
            kind = classify_tplane_meet(random_tplane(), random_tplane(), transversals)
            histogram[kind] += 1
            if kind == "other":
                tplanes.fail({"index": index})
                break
        tplanes.counters = {"histogram": dict(sorted(histogram.items()))}
    checks.append(tplanes)

    convention = ctx.check("extension_convention")
    with timed(convention):
        counts = convention_regression(tower)
        convention.counters = counts
        convention.expect(counts["reduced_base"] == counts["whole_base"], {"counts": counts})
        convention.expect(counts["reduced_extended"] != counts["whole_extended"], {"counts": counts})
    checks.append(convention)
    return checks


def _expect_six_hits(report: CheckReport, q: int) -> None:
    """Uniform draws must attain the order once the scroll has more than six generators."""
    if q + 1 > 6:
        report.expect(
            report.counters["histogram"]["6"] >= 1,
            {"reason": "no uniform draw attained six hits", "nondegenerate": report.counters["nondegenerate"]},
        )


def _suite_scroll(ctx: SuiteContext) -> list[CheckReport]:
    q, tower = ctx.q, ctx.tower
    base = tower.base
    checks = []

    quadric = ctx.check("two_line_scroll")
    with timed(quadric):
        scroll = two_line_scroll(base)
        expected = set(variety_points(VarietyHandle(base, 3, (hyperbolic_quadric_form(base),))))
        points = set(scroll.pointset)
        quadric.counters = {"points": len(points), "expected": (q + 1) ** 2}
        quadric.expect(points == expected and len(points) == (q + 1) ** 2, {"found": len(points)})
    checks.append(quadric)

    conic_scroll = canonical_conic_scroll(base)
    structure = ctx.check("conic_scroll")
    with timed(structure):
        generators = conic_scroll.generators
        disjoint = all(meet(a, b).is_empty for a, b in itertools.combinations(generators, 2))
        structure.counters = {"generators": len(generators), "points": len(conic_scroll.pointset)}
        structure.expect(len(generators) == q + 1 and disjoint, {"reason": "generators are not q+1 disjoint planes"})
        structure.expect(len(conic_scroll.pointset) == (q + 1) * (q * q + q + 1), {"points": len(conic_scroll.pointset)})
    checks.append(structure)

    sigma = ctx.check("sigma_parametrization")
    with timed(sigma):
        fibres = sigma_image(base)
        pointset = set(conic_scroll.pointset)
        outside = [p for p in fibres if p not in pointset]
        affine_images = {p for p, ys in fibres.items() if ys[0].coords[0] != 0}
        affine_scroll = {p for p in pointset if p.coords[0] != 0}
        injective = all(len([y for y in ys if y.coords[0] != 0]) <= 1 for ys in fibres.values())
        sigma.counters = {
            "image": len(fibres),
            "scroll_points": len(pointset),
            "affine_images": len(affine_images),
            "affine_scroll_points": len(affine_scroll),
        }
        sigma.expect(not outside, {"reason": "image off the scroll", "point": _coords(outside[0]) if outside else None})
        sigma.expect(affine_images == affine_scroll and len(affine_scroll) == q**3, {"reason": "y0 ≠ 0 chart is not onto x0 ≠ 0"})
        sigma.expect(injective, {"reason": "σ identifies two parameters with y0 ≠ 0"})
    checks.append(sigma)

    rng = ctx.stream("order")
    order_samples = ctx.params.order_samples
    plane = Subspace.from_rows(base, 8, [tuple(1 if j == i else 0 for j in range(9)) for i in range(3)])
    plane_points = list(iter_points(plane))
    plane_report = sample_order_dimension(
        None, 8, base, rng.split("plane"), max(order_samples // 10, 1), 2, points=plane_points, name="order_plane"
    )
    plane_report.expect(plane_report.counters["histogram"]["0"] == 0, {"reason": "a 6-space missed the plane"})
    plane_report.expect(plane_report.counters["modal_hits"] == 1, {"modal": plane_report.counters["modal_hits"]})
    checks.append(plane_report)

    two_line = two_line_scroll(base)
    quadric_report = sample_order_dimension(
        None, 3, base, rng.split("quadric"), max(order_samples // 4, 1), 2,
        points=two_line.pointset, generators=two_line.generators, max_order=2, name="order_quadric",
    )
    quadric_report.expect(quadric_report.counters["histogram"]["2"] >= 1, {"reason": "no line met the quadric twice"})
    checks.append(quadric_report)

    uniform = sample_order_dimension(
        None, 8, base, rng.split("uniform"), order_samples, 3,
        points=conic_scroll.pointset, generators=conic_scroll.generators, max_order=6, name="order_conic_scroll",
    )
    _expect_six_hits(uniform, q)
    checks.append(uniform)

    if q + 1 > 6:
        # every non-degenerate anchored draw has at least six hits; this only guards against more
        anchored = sample_order_dimension(
            None, 8, base, rng.split("anchored"), max(order_samples // 10, 1), 3,
            points=conic_scroll.pointset, generators=conic_scroll.generators, max_order=6,
            anchored=True, name="order_conic_scroll_anchored",
        )
        checks.append(anchored)
    return checks


SUITES: dict[str, tuple[str, Callable[[SuiteContext], list[CheckReport]]]] = {
    "fields": ("field tower arithmetic, primitive tau, Frobenius orders, transversal constants", _suite_fields),
    "spread": ("Bose spread partition and regularity, dual spread, Bruck-Bose slice", _suite_spread),
    "subline": ("Bose planes of Fq-sublines form a 2-regulus; conjugacy map; negative controls", _suite_subline),
    "subplane": ("Bose planes of Fq-subplanes form a Segre system; orbit sizes; bracket planes; unique transversal plane", _suite_subplane),
    "conic": ("conic quadrics of PG(8,q), Bose union of curves, expansion linearity", _suite_conic),
    "fqconic": ("Fq-conics in subplanes, nine-quadric variety, common zeros on bracket planes", _suite_fqconic),
    "cone": ("cone structure of V(G) with conic base and vertex spanned by the conjugate transversals", _suite_cone),
    "extension": ("variety extension by forms, conjugate forms, T-plane intersections", _suite_extension),
    "scroll": ("scrolls, hyperbolic quadric, sigma parametrization, order and dimension sampling", _suite_scroll),
}


def suite_catalog() -> dict[str, str]:
    return {name: description for name, (description, _) in SUITES.items()}


def suggest_suites(query: str, limit: int = 3) -> list[str]:
    return [hit["name"] for hit in SuiteSearch(suite_catalog()).search(query)[:limit]]


def run_suite(name: str, params: SuiteParams) -> CheckReport:
    """
    Raises:
        UnknownSuite: name is not one of SUITES (with fuzzy suggestions)
    """
    if name not in SUITES:
        raise UnknownSuite(name, suggest_suites(name))
    ctx = SuiteContext(name, params)
    report = CheckReport(
        name=name,
        parameters={
            **ctx.tower.describe(),
            "seed": params.seed,
            "samples": params.samples,
        },
    )
    logger.info(f"Running suite '{name}' for q={ctx.q}, seed={params.seed}")
    with timed(report):
        _, suite = SUITES[name]
        report.checks = suite(ctx)
    logger.info(f"Suite '{name}' {'passed' if report.passed else 'FAILED'} in {report.timing_ms:.0f} ms")
    return report


def run_order_dimension(params: SuiteParams, anchored: bool = False) -> CheckReport:
    """
    Order/dimension sampling of the canonical conic scroll alone.

    Uses the same random stream as the matching check of the scroll suite,
    so equal parameters give equal histograms.
    """
    ctx = SuiteContext("scroll", params)
    base = ctx.tower.base
    report = CheckReport(
        name="scroll",
        parameters={**ctx.tower.describe(), "seed": params.seed, "samples": params.order_samples},
    )
    with timed(report):
        conic_scroll = canonical_conic_scroll(base)
        stream = ctx.stream("order").split("anchored" if anchored else "uniform")
        check = sample_order_dimension(
            None, 8, base, stream, params.order_samples, 3,
            points=conic_scroll.pointset, generators=conic_scroll.generators, max_order=6,
            anchored=anchored, name="order_conic_scroll_anchored" if anchored else "order_conic_scroll",
        )
        if not anchored:
            _expect_six_hits(check, ctx.q)
        report.checks = [check]
    return report
