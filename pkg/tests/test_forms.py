"""
Tests for homogeneous forms and varieties

Test Coverage:
- Form text syntax and its errors
- Expansion F ↦ G = f0 + τ·f1 + τ²·f2
- Variety handles, restriction and extension
- Conics, nondegeneracy and the three quadrics
- Cone structure of V(G)
- Extension convention (handles keep their forms)
"""

import pytest

from src.bose import gamma_point
from src.errors import DegenerateConic, FormSyntaxError, NotHomogeneous, WrongArity
from src.forms import (
    HomogeneousForm,
    VarietyHandle,
    conic_to_quadrics,
    conjugate_form,
    convention_regression,
    expand_form,
    extend_variety,
    extended_variety_handle,
    format_form,
    is_nondegenerate_conic,
    lifted_variety_handle,
    parse_form,
    random_conic,
    restrict_to_subspace,
    variety_points,
    verify_cone,
)
from src.projgeom import Subspace, span
from src.rng import Rng


def line(field, n, i, j):
    rows = [tuple(1 if c == k else 0 for c in range(n + 1)) for k in (i, j)]
    return Subspace.from_rows(field, n, rows)


# ============================================================================
# Text syntax
# ============================================================================


class TestFormSyntax:
    def test_parse_conic(self, tower3):
        form = parse_form("x*z:1, y^2:-1", tower3.cubic)
        assert form.degree == 2
        assert form.coefficient((1, 0, 1)) == 1
        assert form.coefficient((0, 2, 0)) == 2

    def test_parse_format(self, tower2):
        form = parse_form("x*z:1, y^2:[0,1,0]", tower2.cubic)
        assert format_form(form) == "x*z:[1,0,0], y^2:[0,1,0]"
        assert parse_form(format_form(form), tower2.cubic) == form

    def test_like_terms_collect(self, tower3):
        form = parse_form("x^2:1, x*x:1, y^2:1", tower3.base)
        assert form.coefficient((2, 0, 0)) == 2

    def test_nine_variable_names(self, tower2):
        form = parse_form("x0*x8:1, x4^2:1", tower2.base, nvars=9)
        assert form.nvars == 9
        assert form.evaluate((1, 0, 0, 0, 1, 0, 0, 0, 0)) == 1

    def test_unknown_variable(self, tower2):
        with pytest.raises(FormSyntaxError):
            parse_form("x*w:1", tower2.cubic)

    def test_bad_coefficient(self, tower2):
        with pytest.raises(FormSyntaxError):
            parse_form("x^2:[1,2]", tower2.cubic)

    def test_empty_form(self, tower2):
        with pytest.raises(FormSyntaxError):
            parse_form("  ", tower2.cubic)

    def test_mixed_degrees(self, tower2):
        with pytest.raises(NotHomogeneous):
            parse_form("x^2:1, y:1", tower2.cubic)

    def test_wrong_arity(self, tower2):
        with pytest.raises(WrongArity):
            HomogeneousForm.from_terms(tower2.base, 3, 1, [((1, 0), 1)])


# ============================================================================
# Expansion
# ============================================================================


class TestExpansion:
    def test_linear_form(self, tower2):
        expanded = expand_form(tower2, parse_form("x:1", tower2.cubic))
        assert [format_form(f) for f in expanded.f] == ["x0:1", "x1:1", "x2:1"]

    def test_square_in_characteristic_two(self, tower2):
        """(x0 + τx1 + τ²x2)² = x0² + τ·x2² + τ²·(x1² + x2²) when τ³ = τ + 1"""
        f0, f1, f2 = expand_form(tower2, parse_form("x^2:1", tower2.cubic)).f
        assert format_form(f0) == "x0^2:1"
        assert format_form(f1) == "x2^2:1"
        assert format_form(f2) == "x1^2:1, x2^2:1"

    def test_reconstruct(self, tower3):
        rng = Rng(2)
        for _ in range(5):
            expanded = expand_form(tower3, random_conic(tower3, rng))
            assert expanded.reconstruct() == expanded.g

    def test_base_field_form(self, tower3):
        """F over GF(q) expands to f0 only"""
        expanded = expand_form(tower3, parse_form("x*y:1, z^2:1", tower3.base))
        assert not expanded.f[0].is_zero()
        assert expanded.f[1].is_zero() and expanded.f[2].is_zero()

    def test_not_ternary(self, tower2):
        with pytest.raises(WrongArity):
            expand_form(tower2, parse_form("x0*x1:1", tower2.cubic, nvars=4))

    def test_conjugate_form_vanishes_on_conjugate_points(self, tower3):
        """F(P) = 0 implies F^q(P^q) = 0, and three conjugations return F"""
        conic = parse_form("x*z:[0,1,0], y^2:-1", tower3.cubic)
        conjugated = conjugate_form(conic, 1)
        assert conjugate_form(conic, 3) == conic
        assert conjugated != conic
        for point in variety_points(VarietyHandle.of([conic])):
            assert conjugated.vanishes_at(point.frobenius(1))

    def test_conjugates(self, tower2):
        expanded = expand_form(tower2, parse_form("x*z:1, y^2:1", tower2.cubic))
        g, g_q, g_q2 = expanded.conjugates()
        assert g_q == g.conjugate(1)
        assert g_q2.conjugate(1) == g


# ============================================================================
# Varieties
# ============================================================================


class TestVarieties:
    def test_no_forms_is_whole_space(self, tower2):
        assert len(variety_points(VarietyHandle(tower2.base, 2))) == 7

    def test_restrict_to_line(self, tower3):
        """xz - y² on the line z = 0 is -y², a single point"""
        variety = VarietyHandle.of([parse_form("x*z:1, y^2:-1", tower3.base)])
        restricted = restrict_to_subspace(variety, line(tower3.base, 2, 0, 1))
        assert restricted.n == 1
        assert len(variety_points(restricted)) == 1

    def test_restrict_drops_zero_forms(self, tower3):
        variety = VarietyHandle.of([parse_form("x*z:1", tower3.base)])
        restricted = restrict_to_subspace(variety, line(tower3.base, 2, 0, 1))
        assert restricted.forms == ()
        assert restricted.dropped_zero_forms == 1

    def test_restrict_to_empty(self, tower3):
        with pytest.raises(ValueError):
            restrict_to_subspace(VarietyHandle(tower3.base, 2), Subspace.empty(tower3.base, 2))

    def test_extend_variety(self, tower2):
        variety = VarietyHandle.of([parse_form("x*y:1", tower2.base)])
        extended = extend_variety(variety, tower2.cubic)
        assert extended.field is tower2.cubic
        assert len(variety_points(extended)) == 2 * 9 - 1

    def test_domain(self, tower2):
        variety = VarietyHandle.of([parse_form("x:1", tower2.base)])
        assert len(variety_points(variety, domain=line(tower2.base, 2, 1, 2))) == 3


# ============================================================================
# Conics
# ============================================================================


class TestConics:
    def test_standard_conic_points(self, tower2):
        conic = parse_form("x*z:1, y^2:-1", tower2.cubic)
        assert is_nondegenerate_conic(tower2, conic)
        assert len(variety_points(VarietyHandle.of([conic]))) == 9

    def test_quadrics_cut_union_of_bose_planes(self, tower2):
        """9 planes of 7 points each, pairwise disjoint"""
        quadrics = conic_to_quadrics(tower2, parse_form("x*z:1, y^2:1", tower2.cubic))
        assert len(variety_points(VarietyHandle.of(list(quadrics)))) == 63

    def test_lifted_handle_matches_quadrics(self, tower2):
        conic = parse_form("x*z:1, y^2:1", tower2.cubic)
        assert lifted_variety_handle(expand_form(tower2, conic)).forms == conic_to_quadrics(tower2, conic)

    def test_degenerate_square(self, tower2, tower3):
        for tower in (tower2, tower3):
            square = parse_form("x^2:1", tower.cubic)
            assert not is_nondegenerate_conic(tower, square)
            with pytest.raises(DegenerateConic):
                conic_to_quadrics(tower, square)

    def test_degenerate_line_pair(self, tower3):
        assert not is_nondegenerate_conic(tower3, parse_form("x*y:1", tower3.cubic))

    def test_not_a_quadratic(self, tower2):
        assert not is_nondegenerate_conic(tower2, parse_form("x:1", tower2.cubic))

    def test_random_conics_are_nondegenerate(self, tower2):
        rng = Rng(14)
        for _ in range(10):
            conic = random_conic(tower2, rng)
            assert is_nondegenerate_conic(tower2, conic)
            assert len(variety_points(VarietyHandle.of([conic]))) == 9


# ============================================================================
# Cone
# ============================================================================


class TestCone:
    def _cone_inputs(self, frame, tower, text):
        conic = parse_form(text, tower.cubic)
        points = variety_points(VarietyHandle.of([conic]))
        base = [gamma_point(frame, p) for p in points]
        vertex = span([frame.gamma_q, frame.gamma_q2])
        return expand_form(tower, conic), base, vertex

    def test_cone_passes(self, frame2, tower2):
        expanded, base, vertex = self._cone_inputs(frame2, tower2, "x*z:1, y^2:1")
        report = verify_cone(expanded.g, base, vertex, Rng(1), samples=30)

        assert report.passed, report.witnesses
        assert report.counters["zeros_found"] == 30
        assert report.counters["line_failures"] == 0

    def test_wrong_base_is_caught(self, frame2, tower2):
        expanded, _, vertex = self._cone_inputs(frame2, tower2, "x*z:1, y^2:1")
        _, other_base, _ = self._cone_inputs(frame2, tower2, "x*y:1, z^2:1")
        report = verify_cone(expanded.g, other_base, vertex, Rng(1), samples=30)

        assert not report.checks["projection_in_base"]
        assert not report.passed

    def test_extended_handle(self, frame2, tower2):
        """V(G, G^q, G^(q²)) contains the Γ-points of the conic"""
        expanded, base, _ = self._cone_inputs(frame2, tower2, "x*z:1, y^2:1")
        handle = extended_variety_handle(expanded)
        assert all(handle.contains(x) for x in base)


# ============================================================================
# Extension convention
# ============================================================================


class TestConventionRegression:
    def test_counts_q2(self, tower2):
        assert convention_regression(tower2) == {
            "reduced_base": 7,
            "whole_base": 7,
            "reduced_extended": 25,
            "whole_extended": 73,
        }

    def test_counts_q3(self, tower3):
        """q + 1 = 4 lines through (0,0,1) over GF(27)"""
        counts = convention_regression(tower3)
        assert counts["reduced_base"] == counts["whole_base"] == 13
        assert counts["reduced_extended"] == 4 * 27 + 1
        assert counts["whole_extended"] == 27**2 + 27 + 1
