"""
Tests for the Bose representation of PG(2,q³) in PG(8,q)

Test Coverage:
- Transversal frame
- Bose planes of single points, both computation routes
- Spread partition and regularity
- Lines of PG(2,q³) as 5-spaces
- Bruck-Bose affine coordinates
"""

import pytest

from src.bose import (
    affine_slice,
    bose_line,
    bose_line_plane_count,
    bose_plane,
    bruck_bose_coords,
    gamma_coordinates,
    gamma_point,
    line_at_infinity_space,
    verify_spread,
)
from src.errors import NotALine, PointAtInfinity, TooLarge
from src.projgeom import ProjPoint, Subspace, meet, random_point, span
from src.rng import Rng


def units(base, indices):
    return Subspace.from_rows(base, 8, [tuple(1 if j == i else 0 for j in range(9)) for i in indices])


# ============================================================================
# Frame
# ============================================================================


class TestFrame:
    def test_validate(self, frame2, frame3):
        for frame in (frame2, frame3):
            is_valid, errors = frame.validate()
            assert is_valid, errors

    def test_transversal_dimensions(self, frame3):
        assert [g.dim for g in frame3.transversals] == [2, 2, 2]
        assert meet(frame3.gamma, frame3.gamma_q2).is_empty

    def test_gamma_coordinates_invert_gamma_point(self, frame3, tower3):
        rng = Rng(21)
        for _ in range(20):
            bar_x = random_point(tower3.cubic, 2, rng)
            x = gamma_point(frame3, bar_x)
            assert frame3.gamma.contains(x)
            assert gamma_coordinates(x) == bar_x

    def test_gamma_point_at_sextic_level(self, frame2, tower2):
        bar_x = ProjPoint(tower2.cubic, (1, 2, 3)).extend(tower2.sextic)
        x = gamma_point(frame2, bar_x)
        assert frame2.gamma.extend(tower2.sextic).contains(x)


# ============================================================================
# Bose planes
# ============================================================================


class TestBosePlane:
    def test_first_unit_point(self, frame2, tower2):
        pair = bose_plane(frame2, ProjPoint(tower2.cubic, (1, 0, 0)))
        assert pair.boseplane == units(tower2.base, [0, 1, 2])
        assert pair.gamma_x == gamma_point(frame2, pair.bar_x)

    def test_second_unit_point(self, frame3, tower3):
        pair = bose_plane(frame3, ProjPoint(tower3.cubic, (0, 1, 0)))
        assert pair.boseplane == units(tower3.base, [3, 4, 5])

    def test_routes_agree_on_random_points(self, frame3, tower3):
        """cross_check raises if the coordinate and conjugate-span routes differ"""
        rng = Rng(3)
        for _ in range(15):
            pair = bose_plane(frame3, random_point(tower3.cubic, 2, rng))
            assert pair.boseplane.dim == 2
            assert pair.boseplane.field is tower3.base

    def test_extension_meets_gamma_in_gamma_point(self, frame2, tower2):
        bar_x = ProjPoint(tower2.cubic, (1, 2, 5))
        pair = bose_plane(frame2, bar_x)
        hit = meet(pair.boseplane.extend(tower2.cubic), frame2.gamma)
        assert hit.dim == 0
        assert hit.points_basis() == [pair.gamma_x]


# ============================================================================
# Spread
# ============================================================================


class TestSpread:
    def test_spread_q2(self, frame2):
        report = verify_spread(frame2)

        assert report.plane_count == 73
        assert report.point_count == 511
        assert report.multiplicity_histogram == {1: 511}
        assert report.partition
        assert report.regular
        assert report.passed

    @pytest.mark.slow
    @pytest.mark.timeout(600)
    def test_spread_q3(self, frame3):
        report = verify_spread(frame3)

        assert report.plane_count == 757
        assert report.point_count == 9841
        assert report.passed

    def test_report_dict(self, frame2):
        described = verify_spread(frame2).to_dict()
        assert described["modulus"] == [1, 1, 0]
        assert described["multiplicity_histogram"] == {"1": 511}

    def test_cap(self, frame2):
        with pytest.raises(TooLarge):
            verify_spread(frame2, cap=100)

    def test_spread_index(self, frame2, tower2):
        plane = units(tower2.base, [3, 4, 5])
        assert frame2.spread_index[plane] == ProjPoint(tower2.cubic, (0, 1, 0))


# ============================================================================
# Lines
# ============================================================================


class TestBoseLine:
    def test_line_at_infinity(self, frame2, tower2):
        """z = 0 becomes x6 = x7 = x8 = 0"""
        space = line_at_infinity_space(frame2)
        assert space == units(tower2.base, range(6))
        assert bose_line_plane_count(frame2, Subspace.from_rows(tower2.cubic, 2, [(1, 0, 0), (0, 1, 0)])) == 9

    def test_random_line_holds_q3_plus_1_planes(self, frame2, tower2):
        rng = Rng(17)
        line = span([random_point(tower2.cubic, 2, rng), random_point(tower2.cubic, 2, rng)])
        if line.dim == 1:
            assert bose_line(frame2, line).dim == 5
            assert bose_line_plane_count(frame2, line) == 9

    def test_not_a_line(self, frame2, tower2):
        with pytest.raises(NotALine):
            bose_line(frame2, Subspace.whole(tower2.cubic, 2))


# ============================================================================
# Bruck-Bose coordinates
# ============================================================================


class TestBruckBose:
    def test_origin(self, frame2, tower2):
        p = bruck_bose_coords(frame2, ProjPoint(tower2.cubic, (0, 0, 1)))
        assert p.coords == (0, 0, 0, 0, 0, 0, 1, 0, 0)

    def test_tau_one_one(self, frame2, tower2):
        p = bruck_bose_coords(frame2, ProjPoint(tower2.cubic, (tower2.tau.code, 1, 1)))
        assert p.coords == (0, 1, 0, 1, 0, 0, 1, 0, 0)

    def test_scaled_representative(self, frame3, tower3):
        """(2x, 2y, 2) and (x, y, 1) give the same affine point"""
        cubic = tower3.cubic
        p = ProjPoint.from_vector(cubic, (cubic.mul(2, 5), cubic.mul(2, 7), 2))
        assert bruck_bose_coords(frame3, p) == bruck_bose_coords(frame3, ProjPoint.from_vector(cubic, (5, 7, 1)))

    def test_point_at_infinity(self, frame2, tower2):
        with pytest.raises(PointAtInfinity):
            bruck_bose_coords(frame2, ProjPoint(tower2.cubic, (1, 0, 0)))

    def test_affine_points_in_affine_slice(self, frame2, tower2):
        rng = Rng(5)
        slice_ = affine_slice(frame2)
        for _ in range(10):
            bar_p = random_point(tower2.cubic, 2, rng)
            if bar_p.coords[2]:
                assert slice_.contains(bruck_bose_coords(frame2, bar_p))
