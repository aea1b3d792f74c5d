from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dfcalc.grid import DomainError, Grid, GridFunction, symmetric_dual
from dfcalc.operators import (
    OPERATOR_NAMES,
    OperatorSpec,
    apply,
    frac_diff_caputo,
    frac_diff_rl,
    frac_sum,
    int_diff,
    operator_matrix,
)

from helpers import expected_domain, poly, random_rational

HALF = Fr(1, 2)


def ones(a, b):
    return GridFunction.constant(Grid.span(a, b), 1, "exact")


def t_fn(a, b, backend="exact"):
    return poly(Grid.span(a, b), [0, 1], backend)


class TestFracSum:
    def test_order_one_is_cumulative(self):
        out = frac_sum(OperatorSpec("nabla", "left", "sum", 1, 0), ones(0, 5))
        assert out.grid == Grid(0, 6)
        assert list(out.values) == [0, 1, 2, 3, 4, 5]

    def test_nabla_left_half(self):
        out = frac_sum(OperatorSpec("nabla", "left", "sum", HALF, 0), ones(0, 5))
        assert out(2) == Fr(3, 2) and out(3) == Fr(15, 8)

    def test_nabla_left_half_gamma_oracle(self):
        # sum of 1 is (t-a)^{rising alpha} / Gamma(alpha+1)
        import math

        out = frac_sum(OperatorSpec("nabla", "left", "sum", 0.5, 0.0), ones(0, 8).to_float())
        for t in range(1, 9):
            ref = math.gamma(t + 0.5) / math.gamma(t) / math.gamma(1.5)
            assert out(float(t)) == pytest.approx(ref, rel=1e-13)

    def test_delta_left_half(self):
        out = frac_sum(OperatorSpec("delta", "left", "sum", HALF, 0), ones(0, 4))
        assert out.grid.base == HALF
        assert out(Fr(3, 2)) == Fr(3, 2)

    def test_rejects_nonpositive_order(self):
        with pytest.raises(ValueError):
            OperatorSpec("nabla", "left", "sum", 0, 0)

    def test_misaligned_anchor(self):
        with pytest.raises(DomainError):
            frac_sum(OperatorSpec("nabla", "left", "sum", HALF, HALF), ones(0, 4))


class TestIntDiff:
    def test_delta_square(self):
        out = int_diff("delta", False, 1, poly(Grid(0, 5), [0, 0, 1]))
        assert out.grid == Grid(0, 4) and list(out.values) == [1, 3, 5, 7]

    def test_nabla_two(self):
        out = int_diff("nabla", False, 2, poly(Grid(0, 5), [0, 0, 1]))
        assert out.grid == Grid(2, 3) and list(out.values) == [2, 2, 2]

    def test_signed(self):
        out = int_diff("delta", True, 1, t_fn(0, 3))
        assert list(out.values) == [-1, -1, -1]

    def test_too_small(self):
        with pytest.raises(DomainError):
            int_diff("delta", False, 3, ones(0, 2))


class TestRiemannLiouville:
    def test_nabla_left_half(self):
        out = frac_diff_rl(OperatorSpec("nabla", "left", "rl", HALF, 0), ones(0, 6))
        assert out(2) == HALF and out(3) == Fr(3, 8)

    def test_nabla_right_half(self):
        out = frac_diff_rl(OperatorSpec("nabla", "right", "rl", HALF, 4), ones(0, 4))
        assert out(2) == HALF

    def test_nabla_right_matches_dual_of_left(self):
        f = random_rational(Grid(0, 9), 5)
        right = frac_diff_rl(OperatorSpec("nabla", "right", "rl", Fr(2, 3)), f)
        left = frac_diff_rl(OperatorSpec("nabla", "left", "rl", Fr(2, 3)), symmetric_dual(f))
        for t in right.points():
            assert right(t) == left(-t)

    @pytest.mark.parametrize("n", [1, 2])
    def test_integer_order_is_integer_difference(self, n):
        f = random_rational(Grid(0, 7), n)
        outer = {
            ("delta", "left"): ("delta", False),
            ("delta", "right"): ("nabla", True),
            ("nabla", "left"): ("nabla", False),
            ("nabla", "right"): ("delta", True),
        }
        for (d, s), (od, signed) in outer.items():
            rl = frac_diff_rl(OperatorSpec(d, s, "rl", n), f)
            assert rl.equals(int_diff(od, signed, n, f)), (d, s)

    @pytest.mark.parametrize("direction,side", [("nabla", "left"), ("delta", "left"), ("nabla", "right"), ("delta", "right")])
    def test_continuous_as_alpha_approaches_n(self, direction, side):
        # the order-zero sum convention makes alpha -> n- continuous away from the window's first/last point
        f = random_rational(Grid(0, 8), 11).to_float()
        at_one = apply(OperatorSpec(direction, side, "rl", 1.0), f)
        near = apply(OperatorSpec(direction, side, "rl", 1 - 1e-9), f)
        # delta outputs live on alpha-shifted grids, so compare point k with point k
        assert at_one.grid.count == near.grid.count
        gap = np.abs(at_one.values - near.values)[1:-1]
        assert gap.max() < 1e-7


class TestCaputo:
    @pytest.mark.parametrize("alpha", [Fr(1, 4), HALF, Fr(1)])
    def test_constant_annihilated(self, alpha):
        out = frac_diff_caputo(OperatorSpec("nabla", "left", "caputo", alpha), GridFunction.constant(Grid(0, 6), 5, "exact"))
        assert all(v == 0 for v in out.values)

    def test_t_at_two(self):
        out = frac_diff_caputo(OperatorSpec("nabla", "left", "caputo", HALF, 0), t_fn(0, 4))
        assert out(2) == Fr(3, 2)

    @pytest.mark.parametrize("alpha", [Fr(3, 2), Fr(7, 4)])
    def test_kills_lower_degree(self, alpha):
        f = poly(Grid(0, 8), [3, -2])
        for name in OPERATOR_NAMES:
            if name.endswith("caputo"):
                out = apply(OperatorSpec.parse(name, alpha), f)
                assert all(v == 0 for v in out.values), name

    @pytest.mark.parametrize("alpha", [HALF, Fr(3, 2)])
    def test_delta_left_vs_nabla_left(self, alpha):
        f = random_rational(Grid(0, 10), 2)
        n = int(np.ceil(alpha))
        delta = apply(OperatorSpec("delta", "left", "caputo", alpha, 0), f)
        nabla = apply(OperatorSpec("nabla", "left", "caputo", alpha, n - 1), f)
        pts = [t for t in nabla.points() if t - alpha in delta.grid]
        assert len(pts) >= 3
        assert all(delta(t - alpha) == nabla(t) for t in pts)


class TestDomainLaw:
    @pytest.mark.parametrize("alpha", [HALF, Fr(3, 2)])
    @pytest.mark.parametrize("name", OPERATOR_NAMES)
    def test_output_window(self, name, alpha):
        a, b = Fr(2), Fr(12)
        out = apply(OperatorSpec.parse(name, alpha), random_rational(Grid.span(a, b), 3))
        assert (out.grid.base, out.grid.top) == expected_domain(name, a, b, alpha)


def _linear_case(name):
    return name, Fr(2, 3)


class TestLinearityAndMatrices:
    @settings(max_examples=25, deadline=None)
    @given(
        st.sampled_from(OPERATOR_NAMES),
        st.sampled_from([Fr(1, 3), HALF, Fr(5, 4), Fr(3, 2)]),
        st.fractions(-5, 5, max_denominator=6),
        st.fractions(-5, 5, max_denominator=6),
        st.integers(0, 1000),
    )
    def test_linearity_and_matrix_action(self, name, alpha, p, q, seed):
        grid = Grid(0, 9)
        f, g = random_rational(grid, seed), random_rational(grid, seed + 1)
        spec = OperatorSpec.parse(name, alpha)
        lhs = apply(spec, p * f + q * g)
        rhs = p * apply(spec, f) + q * apply(spec, g)
        assert lhs.equals(rhs)
        assert operator_matrix(spec, grid).apply(f).equals(apply(spec, f))

    def test_nabla_left_sum_matrix_order_one(self):
        m = operator_matrix(OperatorSpec("nabla", "left", "sum", 1, 0), Grid(0, 4))
        expected = [[0, 0, 0, 0], [0, 1, 0, 0], [0, 1, 1, 0], [0, 1, 1, 1]]
        assert m.entries.tolist() == expected

    def test_nabla_left_sum_matrix_half(self):
        m = operator_matrix(OperatorSpec("nabla", "left", "sum", HALF, 0), Grid(0, 4))
        assert m.entries.tolist() == [
            [0, 0, 0, 0],
            [0, 1, 0, 0],
            [0, HALF, 1, 0],
            [0, Fr(3, 8), HALF, 1],
        ]

    @pytest.mark.parametrize("direction,side,outer", [
        ("nabla", "left", ("nabla", False)),
        ("delta", "left", ("delta", False)),
        ("nabla", "right", ("delta", True)),
        ("delta", "right", ("nabla", True)),
    ])
    def test_rl_matrix_is_composition(self, direction, side, outer):
        alpha = Fr(3, 4)
        grid = Grid(0, 7)
        anchor = 0 if side == "left" else 6
        total = operator_matrix(OperatorSpec(direction, side, "rl", alpha, anchor), grid)
        inner = operator_matrix(OperatorSpec(direction, side, "sum", 1 - alpha, anchor), grid)
        diff = operator_matrix(OperatorSpec(outer[0], "left", "integer", 1, signed=outer[1]), inner.output_grid)
        composed = diff @ inner
        assert composed.output_grid == total.output_grid
        assert (composed.entries == total.entries).all()

    def test_composition_checks_grids(self):
        m = operator_matrix(OperatorSpec("nabla", "left", "sum", HALF, 0), Grid(0, 4))
        with pytest.raises(DomainError):
            m @ operator_matrix(OperatorSpec("nabla", "left", "sum", HALF, 0), Grid(0, 5))

    def test_float_matrix(self):
        grid = Grid(0.0, 6)
        f = random_rational(Grid(0, 6), 9).to_float()
        spec = OperatorSpec("delta", "right", "caputo", 0.3)
        assert np.allclose(operator_matrix(spec, grid).apply(f).values, apply(spec, f).values, rtol=1e-14, atol=1e-14)

    def test_csv_export(self):
        text = operator_matrix(OperatorSpec("nabla", "left", "sum", HALF, 0), Grid(0, 3)).to_csv()
        assert text.splitlines()[0] == "t,0,1,2"
        assert text.splitlines()[3] == "2,0,1/2,1"


class TestInitialValueProblems:
    @pytest.mark.parametrize("n", [1, 2])
    def test_delta_left(self, n):
        f = random_rational(Grid.span(0, 8), 21)
        u = frac_sum(OperatorSpec("delta", "left", "sum", n, 0), f)
        assert u.grid.base == n
        # zero initial values at a..a+n-1, then the sum
        ext = GridFunction(Grid(0, u.grid.count + n), [0] * n + list(u.values), "exact")
        assert int_diff("delta", False, n, ext).restrict(f.grid).equals(f)

    @pytest.mark.parametrize("n", [1, 2])
    def test_delta_right(self, n):
        f = random_rational(Grid.span(0, 8), 22)
        u = frac_sum(OperatorSpec("delta", "right", "sum", n, 8), f)
        assert u.grid.top == 8 - n
        ext = GridFunction(Grid(u.grid.base, u.grid.count + n), list(u.values) + [0] * n, "exact")
        assert int_diff("nabla", True, n, ext).restrict(f.grid).equals(f)

    @pytest.mark.parametrize("n", [1, 2])
    def test_nabla_left(self, n):
        f = random_rational(Grid.span(0, 8), 23)
        u = frac_sum(OperatorSpec("nabla", "left", "sum", n, 0), f)
        assert u(0) == 0
        ext = GridFunction(Grid(-n + 1, u.grid.count + n - 1), [0] * (n - 1) + list(u.values), "exact")
        assert int_diff("nabla", False, n, ext).restrict(Grid.span(1, 8)).equals(f.restrict(Grid.span(1, 8)))

    @pytest.mark.parametrize("n", [1, 2])
    def test_nabla_right(self, n):
        f = random_rational(Grid.span(0, 8), 24)
        u = frac_sum(OperatorSpec("nabla", "right", "sum", n, 8), f)
        assert u(8) == 0
        ext = GridFunction(Grid(0, u.grid.count + n - 1), list(u.values) + [0] * (n - 1), "exact")
        assert int_diff("delta", True, n, ext).restrict(Grid.span(0, 7)).equals(f.restrict(Grid.span(0, 7)))


class TestMirrorSmoke:
    def test_order_one_sums(self):
        f = random_rational(Grid(0, 6), 31)
        right = frac_sum(OperatorSpec("nabla", "right", "sum", 1, 6), f)
        left = frac_sum(OperatorSpec("nabla", "left", "sum", 1, -6), symmetric_dual(f))
        assert all(right(t) == left(-t) for t in right.points())


class TestParse:
    def test_names(self):
        assert len(OPERATOR_NAMES) == 12
        for name in OPERATOR_NAMES:
            assert OperatorSpec.parse(name, HALF).name == name

    def test_alias(self):
        assert OperatorSpec("nabla", "left", "riemann_liouville", HALF).flavor == "rl"

    def test_bad_name(self):
        with pytest.raises(ValueError):
            OperatorSpec.parse("nabla-left", HALF)
