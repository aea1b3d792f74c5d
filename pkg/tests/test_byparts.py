from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from dfcalc.byparts import SBP_IDS, duality_closure, sbp, sbp_boundary_convention
from dfcalc.grid import DomainError, Grid, GridFunction

from helpers import poly, random_rational

HALF = Fr(1, 2)
SWEEP = [Fr(1, 4), Fr(1, 3), HALF, Fr(2, 3), Fr(3, 4)]
CAPUTO = ("SBP_CAPUTO_LEFT", "SBP_CAPUTO_RIGHT")
RL = ("SBP_RL_LEFT", "SBP_RL_RIGHT")


def pair(width, seed, base=0):
    g = Grid(Fr(base), width + 1)
    return random_rational(g, seed), random_rational(g, seed + 100)


class TestStatedForms:
    @pytest.mark.parametrize("theorem", CAPUTO)
    @pytest.mark.parametrize("alpha", SWEEP)
    @pytest.mark.parametrize("width", [3, 4, 8, 16])
    def test_caputo_theorems_hold(self, theorem, alpha, width):
        f, g = pair(width, width)
        rep = sbp(theorem, f, g, alpha)
        assert rep.deviation == 0 and rep.passed

    @pytest.mark.xfail(strict=True, reason="the RL formulas fail as written; see the repaired form")
    @pytest.mark.parametrize("theorem", RL)
    def test_rl_theorems_as_written(self, theorem):
        t = Grid.span(0, 4)
        rep = sbp(theorem, poly(t, [0, 1]), poly(t, [0, 0, 1]), HALF)
        assert rep.deviation == 0

    def test_rl_right_example_gap(self):
        t = Grid.span(0, 4)
        rep = sbp("SBP_RL_RIGHT", poly(t, [0, 1]), poly(t, [0, 0, 1]), HALF)
        assert rep.deviation == Fr(281, 16)

    def test_caputo_right_constant_f(self):
        f = GridFunction.constant(Grid.span(0, 8), 1, "exact")
        rep = sbp("SBP_CAPUTO_RIGHT", f, random_rational(f.grid, 3), HALF)
        assert rep.lhs == 0 and rep.deviation == 0

    def test_float(self):
        f, g = pair(10, 5)
        for theorem in CAPUTO:
            rep = sbp(theorem, f.to_float(), g.to_float(), 0.37)
            assert rep.passed


class TestRepairedForms:
    @pytest.mark.parametrize("theorem", SBP_IDS)
    @pytest.mark.parametrize("alpha", SWEEP)
    @pytest.mark.parametrize("width", [3, 8, 16])
    def test_all_hold(self, theorem, alpha, width):
        f, g = pair(width, 2 * width, base=-2)
        assert sbp(theorem, f, g, alpha, form="repaired").deviation == 0

    @settings(max_examples=30, deadline=None)
    @given(
        st.sampled_from(SBP_IDS),
        st.fractions(Fr(1, 20), Fr(19, 20), max_denominator=20),
        st.integers(3, 12),
        st.integers(0, 10_000),
    )
    def test_random(self, theorem, alpha, width, seed):
        f, g = pair(width, seed)
        assert sbp(theorem, f, g, alpha, form="repaired").deviation == 0

    @pytest.mark.parametrize("alpha", SWEEP)
    def test_proof_form_of_caputo_right(self, alpha):
        f, g = pair(8, 77)
        assert sbp("SBP_CAPUTO_RIGHT", f, g, alpha, form="proof").deviation == 0


class TestMutant:
    @pytest.mark.parametrize("theorem,form", [("SBP_CAPUTO_RIGHT", "stated"), ("SBP_RL_RIGHT", "repaired")])
    def test_off_by_one_detected(self, theorem, form):
        grid = Grid.span(0, 8)
        f = GridFunction.constant(grid, 1, "exact")
        g = poly(grid, [1, 2, 1])
        assert sbp(theorem, f, g, HALF, form=form).deviation == 0
        assert sbp(theorem, f, g, HALF, form=form, mutant=True).deviation != 0

    def test_left_theorems_have_no_mutant(self):
        f, g = pair(5, 1)
        with pytest.raises(ValueError):
            sbp("SBP_CAPUTO_LEFT", f, g, HALF, mutant=True)


class TestConventions:
    def test_values(self):
        g = random_rational(Grid.span(0, 6), 4)
        assert sbp_boundary_convention("SBP_CAPUTO_LEFT", g, HALF, 5) == g(5)
        assert sbp_boundary_convention("SBP_RL_LEFT", g, HALF, 0) == 0
        assert sbp_boundary_convention("SBP_CAPUTO_RIGHT", g, HALF, 1) == g(1)
        assert sbp_boundary_convention("SBP_RL_RIGHT", g, HALF, 6) == 0

    def test_wrong_endpoint(self):
        g = random_rational(Grid.span(0, 6), 4)
        with pytest.raises(ValueError):
            sbp_boundary_convention("SBP_RL_RIGHT", g, HALF, 5)


class TestDuality:
    @pytest.mark.parametrize("alpha", SWEEP)
    @pytest.mark.parametrize("width", [4, 8, 16])
    def test_closure(self, alpha, width):
        f, g = pair(width, width + 9, base=1)
        closure = duality_closure(f, g, alpha)
        assert closure.matches
        assert closure.right.deviation == 0


class TestErrors:
    def test_alpha_range(self):
        f, g = pair(5, 1)
        for alpha in (Fr(0), Fr(1), Fr(3, 2)):
            with pytest.raises(ValueError):
                sbp("SBP_CAPUTO_LEFT", f, g, alpha)

    def test_small_window(self):
        f, g = pair(2, 1)
        with pytest.raises(DomainError):
            sbp("SBP_CAPUTO_LEFT", f, g, HALF)

    def test_misaligned(self):
        f, _ = pair(5, 1)
        g = random_rational(Grid(HALF, 6), 2)
        with pytest.raises(DomainError):
            sbp("SBP_CAPUTO_LEFT", f, g, HALF)

    def test_proof_form_only_for_caputo_right(self):
        f, g = pair(5, 1)
        with pytest.raises(ValueError):
            sbp("SBP_RL_LEFT", f, g, HALF, form="proof")
