"""
Tests for substructures of PG(2,q³) and their images in PG(8,q)

Test Coverage:
- The unique plane through a point meeting three planes
- Segre variety through four planes
- Sublines and subplanes with their conjugacy maps
- F_q-conics and C⁺
- Bracket planes
- Scrolls and the birational parametrization of the conic scroll
"""

import pytest

from src.bose import bose_plane, gamma_point
from src.errors import (
    ArityMismatch,
    DegenerateConic,
    DegeneratePlanes,
    DegenerateQuadrangle,
    DependentSubspaces,
    KernelPoint,
    NotCollinear,
    NotDistinct,
    NotOnGamma,
    PointOnTransversalLine,
)
from src.forms import VarietyHandle, parse_form, variety_points
from src.harness import tower_for
from src.projgeom import ProjPoint, Subspace, random_point, span
from src.rng import Rng
from src.substructures import (
    bracket_plane,
    canonical_conic_scroll,
    canonical_minors,
    classify_tplane_meet,
    count_transversal_planes_through,
    fq_conic,
    hyperbolic_quadric_form,
    locate_bracket_plane,
    normal_rational_curve,
    orbit_size,
    scroll_build,
    segre_from_four_planes,
    segre_point_sampler,
    sigma_image,
    sigma_parametrization,
    subline_through,
    subplane_through,
    two_line_scroll,
    unique_transversal_plane,
)


def coordinate_space(field, n, indices):
    return Subspace.from_rows(field, n, [tuple(1 if j == i else 0 for j in range(n + 1)) for i in indices])


def block_planes(field):
    """α = ⟨e0,e1,e2⟩, β = ⟨e3,e4,e5⟩, γ = ⟨e6,e7,e8⟩ and the diagonal plane δ"""
    alpha, beta, gamma = (coordinate_space(field, 8, range(3 * i, 3 * i + 3)) for i in range(3))
    delta = Subspace.from_rows(
        field, 8, [tuple(1 if j % 3 == i else 0 for j in range(9)) for i in range(3)]
    )
    return alpha, beta, gamma, delta


def standard_frame(field):
    return [ProjPoint(field, c) for c in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)]]


# ============================================================================
# Transversal plane
# ============================================================================


class TestTransversalPlane:
    def test_block_point(self, tower2):
        base = tower2.base
        alpha, beta, gamma, _ = block_planes(base)
        p = ProjPoint(base, (1, 0, 0, 1, 0, 0, 1, 0, 0))
        plane = unique_transversal_plane(p, alpha, beta, gamma)
        assert plane == coordinate_space(base, 8, [0, 3, 6])

    def test_point_on_transversal_line(self, tower2):
        base = tower2.base
        alpha, beta, gamma, _ = block_planes(base)
        p = ProjPoint(base, (1, 0, 0, 1, 0, 0, 0, 0, 0))
        with pytest.raises(PointOnTransversalLine):
            unique_transversal_plane(p, alpha, beta, gamma)

    def test_exhaustive_count(self, tower2):
        """Exactly one of the planes through P in PG(8,2) meets all three"""
        base = tower2.base
        alpha, beta, gamma, _ = block_planes(base)
        p = ProjPoint(base, (1, 0, 0, 0, 1, 0, 0, 0, 1))
        assert count_transversal_planes_through(p, alpha, beta, gamma) == (1, 10795)

    @pytest.mark.slow
    @pytest.mark.timeout(1800)
    def test_exhaustive_count_random_points(self, tower2):
        """Twenty random points off the transversal lines each lie on exactly one such plane"""
        base = tower2.base
        alpha, beta, gamma, _ = block_planes(base)
        rng = Rng(11)
        tested = 0
        while tested < 20:
            p = random_point(base, 8, rng)
            if any(span([u, w]).contains(p) for u, w in [(alpha, beta), (alpha, gamma), (beta, gamma)]):
                continue
            assert count_transversal_planes_through(p, alpha, beta, gamma) == (1, 10795), p.coords
            tested += 1


# ============================================================================
# Segre variety
# ============================================================================


class TestSegre:
    def test_block_planes_give_canonical_minors(self, tower2):
        base = tower2.base
        segre = segre_from_four_planes(*block_planes(base))

        assert segre.quadrics == canonical_minors(base)
        assert len(segre.plane_system) == 7
        assert len(segre.transversal_system) == 7
        assert set(block_planes(base)) <= set(segre.plane_system)

    def test_point_count(self, tower2):
        """(q² + q + 1)² points"""
        segre = segre_from_four_planes(*block_planes(tower2.base))
        assert len(variety_points(segre.handle())) == 49

    def test_quadrics_vanish_on_both_systems(self, tower3):
        base = tower3.base
        rng = Rng(31)
        planes = block_planes(base)
        shifted = Subspace.from_rows(base, 8, [tuple((j % 3 == i) * (1, 2, 1)[j // 3] for j in range(9)) for i in range(3)])
        segre = segre_from_four_planes(planes[0], planes[1], planes[2], shifted)
        handle = segre.handle()
        for system in (segre.plane_system, segre.transversal_system):
            assert len(system) == 13
            for plane in system:
                for _ in range(3):
                    coeffs = [rng.randbelow(3) for _ in plane.rows]
                    vector = [sum(c * row[j] for c, row in zip(coeffs, plane.rows)) % 3 for j in range(9)]
                    assert handle.contains_vector(vector)

    def test_point_at(self, tower2):
        segre = segre_from_four_planes(*block_planes(tower2.base))
        p = segre.point_at(tower2.cubic, (1, 2, 0), (0, 1, 1))
        assert segre.contains_vector(p.coords, tower2.cubic)

    def test_point_sampler(self, tower2):
        """Sampled points over GF(q³) lie on the extended variety"""
        segre = segre_from_four_planes(*block_planes(tower2.base))
        sampler = segre_point_sampler(segre, tower2.cubic, Rng(6))
        for _ in range(20):
            r, a, point = next(sampler)
            assert any(r) and any(a)
            assert segre.contains_vector(point.coords, tower2.cubic)

    def test_degenerate(self, tower2):
        alpha, beta, gamma, _ = block_planes(tower2.base)
        with pytest.raises(DegeneratePlanes):
            segre_from_four_planes(alpha, beta, gamma, alpha)


# ============================================================================
# Sublines and subplanes
# ============================================================================


class TestSubline:
    def test_standard_subline(self, tower3):
        cubic = tower3.cubic
        frame = subline_through(ProjPoint(cubic, (1, 0, 0)), ProjPoint(cubic, (0, 1, 0)), ProjPoint(cubic, (1, 1, 0)))

        assert len(frame.points) == 4
        assert all(all(tower3.base.contains_code(c) for c in p.coords) for p in frame.points)
        for p in frame.points:
            assert frame.conjugate(p) == p
            assert orbit_size(frame, p) == 1

    def test_orbit_of_point_off_subline(self, tower3):
        cubic = tower3.cubic
        frame = subline_through(ProjPoint(cubic, (1, 0, 0)), ProjPoint(cubic, (0, 1, 0)), ProjPoint(cubic, (1, 1, 0)))
        x = ProjPoint(cubic, (1, tower3.tau.code, 0))
        assert not frame.contains(x)
        assert orbit_size(frame, x) == 3

    def test_random_subline_has_q_plus_1_points(self, tower2):
        rng = Rng(9)
        cubic = tower2.cubic
        p1, p2 = ProjPoint(cubic, (1, 0, 3)), ProjPoint(cubic, (0, 1, 5))
        lam = rng.randbelow(cubic.size - 1) + 1
        p3 = ProjPoint.from_vector(cubic, [cubic.add(x, cubic.mul(lam, y)) for x, y in zip(p1.coords, p2.coords)])
        frame = subline_through(p1, p2, p3)
        assert len(frame.points) == 3
        assert {p1, p2, p3} <= set(frame.points)
        assert all(frame.conjugate(p) == p for p in frame.points)

    def test_not_distinct(self, tower2):
        p = ProjPoint(tower2.cubic, (1, 0, 0))
        with pytest.raises(NotDistinct):
            subline_through(p, p, ProjPoint(tower2.cubic, (0, 1, 0)))

    def test_not_collinear(self, tower2):
        with pytest.raises(NotCollinear):
            subline_through(*standard_frame(tower2.cubic)[:3])

    def test_point_off_line(self, tower2):
        cubic = tower2.cubic
        frame = subline_through(ProjPoint(cubic, (1, 0, 0)), ProjPoint(cubic, (0, 1, 0)), ProjPoint(cubic, (1, 1, 0)))
        with pytest.raises(NotCollinear):
            frame.conjugate(ProjPoint(cubic, (0, 0, 1)))


class TestSubplane:
    def test_standard_frame(self, tower3):
        frame = subplane_through(standard_frame(tower3.cubic))

        assert frame.b_matrix == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
        assert len(frame.points) == 13
        assert frame.contains(ProjPoint(tower3.cubic, (1, 2, 0)))
        assert not frame.contains(ProjPoint(tower3.cubic, (1, tower3.tau.code, 0)))

    def test_orbit_sizes(self, tower3):
        frame = subplane_through(standard_frame(tower3.cubic))
        assert orbit_size(frame, ProjPoint(tower3.cubic, (1, 1, 1))) == 1
        assert orbit_size(frame, ProjPoint(tower3.cubic, (1, tower3.tau.code, 0))) == 3

    def test_sextic_orbits(self, tower2):
        """Points over GF(q⁶) have orbits of length 1, 2, 3 or 6"""
        frame = subplane_through(standard_frame(tower2.cubic))
        rng = Rng(4)
        for _ in range(20):
            assert orbit_size(frame, random_point(tower2.sextic, 2, rng)) in {1, 2, 3, 6}

    def test_random_quadrangle_is_fixed(self, tower2):
        rng = Rng(40)
        cubic = tower2.cubic
        while True:
            quadrangle = [random_point(cubic, 2, rng) for _ in range(4)]
            try:
                frame = subplane_through(quadrangle)
                break
            except DegenerateQuadrangle:
                continue
        assert len(frame.points) == 7
        assert all(frame.conjugate(p) == p for p in quadrangle)
        assert set(quadrangle) <= set(frame.points)

    def test_collinear_triple(self, tower2):
        cubic = tower2.cubic
        points = [ProjPoint(cubic, c) for c in [(1, 0, 0), (0, 1, 0), (1, 1, 0), (0, 0, 1)]]
        with pytest.raises(DegenerateQuadrangle):
            subplane_through(points)


# ============================================================================
# F_q-conics
# ============================================================================


class TestFqConic:
    def test_standard_frame(self, tower3):
        frame = subplane_through(standard_frame(tower3.cubic))
        c = parse_form("x*z:1, y^2:-1", tower3.base)
        conic = fq_conic(frame, c)

        assert len(conic.points) == 4
        assert conic.cplus_form == c.extend(tower3.cubic)
        assert not conic.cplus_unique
        assert len(variety_points(conic.handle())) == 28

    def test_random_frame(self, tower2):
        rng = Rng(2)
        cubic = tower2.cubic
        while True:
            try:
                frame = subplane_through([random_point(cubic, 2, rng) for _ in range(4)])
                break
            except DegenerateQuadrangle:
                continue
        conic = fq_conic(frame, parse_form("x*z:1, y^2:1", tower2.base))
        assert len(conic.points) == 3
        assert all(conic.cplus_form.vanishes_at(p) for p in conic.points)

    def test_form_over_cubic_rejected(self, tower3):
        frame = subplane_through(standard_frame(tower3.cubic))
        with pytest.raises(DegenerateConic):
            fq_conic(frame, parse_form("x*z:1, y^2:-1", tower3.cubic))

    def test_degenerate_rejected(self, tower3):
        frame = subplane_through(standard_frame(tower3.cubic))
        with pytest.raises(DegenerateConic):
            fq_conic(frame, parse_form("x^2:1", tower3.base))


# ============================================================================
# Bracket planes
# ============================================================================


class TestBracketPlane:
    def test_subplane_point_gives_bose_plane(self, frame2, tower2):
        """On the canonical subplane the conjugacy map is trivial"""
        subplane = subplane_through(standard_frame(tower2.cubic))
        bar_x = ProjPoint(tower2.cubic, (1, 1, 0))
        x = gamma_point(frame2, bar_x)
        plane = bracket_plane(subplane, frame2, x)
        assert plane == bose_plane(frame2, bar_x).boseplane.extend(tower2.cubic)

    def test_bracket_plane_is_a_plane(self, frame3, tower3):
        subplane = subplane_through(standard_frame(tower3.cubic))
        x = gamma_point(frame3, ProjPoint(tower3.cubic, (1, tower3.tau.code, 0)))
        assert bracket_plane(subplane, frame3, x).dim == 2

    def test_locate(self, frame2, tower2):
        subplane = subplane_through(standard_frame(tower2.cubic))
        x = gamma_point(frame2, ProjPoint(tower2.cubic, (1, tower2.tau.code, 1)))
        found = locate_bracket_plane(subplane, frame2, x)
        assert found is not None
        assert found[0] == x
        assert found[1] == bracket_plane(subplane, frame2, x)

    def test_not_on_gamma(self, frame2, tower2):
        subplane = subplane_through(standard_frame(tower2.cubic))
        e0 = ProjPoint(tower2.cubic, (1,) + (0,) * 8)
        with pytest.raises(NotOnGamma):
            bracket_plane(subplane, frame2, e0)

    def test_classify_meet(self, frame2):
        spread = frame2.spread
        assert classify_tplane_meet(spread[0], spread[0], frame2.transversals) == "equal"
        assert classify_tplane_meet(spread[0], spread[1], frame2.transversals) == "empty"


# ============================================================================
# Scrolls
# ============================================================================


class TestScroll:
    @pytest.mark.parametrize("q", [2, 3, 5])
    def test_two_line_scroll_is_hyperbolic_quadric(self, q):
        base = tower_for(q).base
        scroll = two_line_scroll(base)
        quadric = variety_points(VarietyHandle(base, 3, (hyperbolic_quadric_form(base),)))

        assert len(scroll.generators) == q + 1
        assert len(scroll.points()) == (q + 1) ** 2
        assert set(scroll.points()) == set(quadric)

    def test_canonical_conic_scroll(self, tower2):
        scroll = canonical_conic_scroll(tower2.base)

        assert scroll.r == 2
        assert scroll.n == 8
        assert len(scroll.generators) == 3
        assert all(g.dim == 2 for g in scroll.generators)
        assert len(scroll.points()) == 21

    def test_homography_changes_pairing(self, tower3):
        base = tower3.base
        lines = [
            normal_rational_curve(coordinate_space(base, 3, (0, 1))),
            normal_rational_curve(coordinate_space(base, 3, (2, 3))),
        ]
        swapped = scroll_build(lines, [((0, 1), (1, 0))])
        quadric = hyperbolic_quadric_form(base)
        assert len(swapped.points()) == 16
        assert not all(quadric.vanishes_at(p) for p in swapped.points())

    def test_dependent_bases(self, tower2):
        line = normal_rational_curve(coordinate_space(tower2.base, 3, (0, 1)))
        with pytest.raises(DependentSubspaces):
            scroll_build([line, line])

    def test_arity(self, tower2):
        line = normal_rational_curve(coordinate_space(tower2.base, 3, (0, 1)))
        with pytest.raises(ArityMismatch):
            scroll_build([line])


class TestSigma:
    def test_values(self, tower2):
        base = tower2.base
        assert sigma_parametrization(base, (1, 0, 0, 0)).coords == (1, 0, 0, 0, 0, 0, 0, 0, 0)
        assert sigma_parametrization(base, (1, 1, 1, 1)).coords == (1,) * 9

    def test_kernel(self, tower2):
        for y in [(0, 1, 0, 0), (0, 0, 1, 1), (0, 0, 0, 0)]:
            with pytest.raises(KernelPoint):
                sigma_parametrization(tower2.base, y)

    def test_arity(self, tower2):
        with pytest.raises(ArityMismatch):
            sigma_parametrization(tower2.base, (1, 0, 0))

    def test_image_lies_on_scroll(self, tower2):
        base = tower2.base
        scroll = canonical_conic_scroll(base)
        fibres = sigma_image(base)
        assert all(scroll.contains(p) for p in fibres)

    def test_chart_is_bijective(self, tower3):
        """y0 ≠ 0 maps one-to-one onto the scroll points with x0 ≠ 0"""
        base = tower3.base
        fibres = sigma_image(base)
        chart = {p: ys for p, ys in fibres.items() if p.coords[0]}
        on_scroll = [p for p in canonical_conic_scroll(base).points() if p.coords[0]]

        assert len(chart) == 27
        assert all(len(ys) == 1 and ys[0].coords[0] for ys in chart.values())
        assert set(chart) == set(on_scroll)
