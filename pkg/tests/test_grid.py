from fractions import Fraction as Fr
import io

import pytest
from hypothesis import given, strategies as st

from dfcalc.grid import DomainError, Grid, GridFunction, q_reflect, read_csv, restrict, symmetric_dual, write_csv
from dfcalc.scalars import format_scalar, parse_scalar

values = st.lists(st.fractions(max_denominator=50, min_value=-100, max_value=100), min_size=1, max_size=12)
bases = st.fractions(min_value=-10, max_value=10, max_denominator=4)


def gf(base, vals):
    return GridFunction(Grid(base, len(vals)), list(vals), "exact")


class TestGrid:
    def test_span_and_points(self):
        g = Grid.span(Fr(1, 2), Fr(7, 2))
        assert g.count == 4
        assert g.points() == [Fr(1, 2), Fr(3, 2), Fr(5, 2), Fr(7, 2)]

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            Grid(0, 0)

    def test_alignment(self):
        assert Grid(0, 3).aligned(Grid(5, 2))
        assert not Grid(0, 3).aligned(Grid(Fr(1, 2), 2))

    def test_intersect(self):
        assert Grid(0, 5).intersect(Grid(3, 5)) == Grid(3, 2)
        assert Grid(0, 2).intersect(Grid(5, 2)) is None
        with pytest.raises(DomainError):
            Grid(0, 2).intersect(Grid(Fr(1, 2), 2))


class TestSymmetricDual:
    def test_reversal(self):
        d = symmetric_dual(gf(0, [5, 6, 7, 8, 9]))
        assert d.grid == Grid(-4, 5)
        assert list(d.values) == [9, 8, 7, 6, 5]

    def test_constant(self):
        d = symmetric_dual(GridFunction.constant(Grid(2, 5), 3, "exact"))
        assert d.grid == Grid(-6, 5) and list(d.values) == [3] * 5

    def test_identity_function(self):
        f = GridFunction.from_callable(Grid(0, 4), lambda t: t)
        d = symmetric_dual(f)
        assert d.grid == Grid(-3, 4)
        assert list(d.values) == [3, 2, 1, 0]
        assert all(d(t) == -t for t in d.points())

    @given(bases, values)
    def test_involution_and_range(self, base, vals):
        f = gf(base, vals)
        d = symmetric_dual(f)
        assert d.grid.base == -f.grid.top and d.grid.top == -f.grid.base
        assert symmetric_dual(d).equals(f)
        assert sorted(d.values) == sorted(f.values)
        assert all(d(-t) == f(t) for t in f.points())


class TestQReflect:
    def test_reversal(self):
        assert list(q_reflect(gf(0, [1, 2, 3, 4, 5])).values) == [5, 4, 3, 2, 1]

    def test_constant_fixed(self):
        f = GridFunction.constant(Grid(0, 4), 7, "exact")
        assert q_reflect(f).equals(f)

    def test_t(self):
        f = GridFunction.from_callable(Grid(1, 3), lambda t: t)
        assert list(q_reflect(f).values) == [3, 2, 1]

    @given(bases, values)
    def test_is_dual_then_shift(self, base, vals):
        f = gf(base, vals)
        a, b = f.grid.base, f.grid.top
        assert q_reflect(f).equals(symmetric_dual(f).shift(a + b))
        assert q_reflect(q_reflect(f)).equals(f)


class TestRestrict:
    def test_middle(self):
        f = gf(0, [0, 1, 2, 3, 4, 5])
        assert list(restrict(f, Grid.span(2, 4)).values) == [2, 3, 4]

    def test_full(self):
        f = gf(0, [1, 2, 3])
        assert restrict(f, f.grid).equals(f)

    def test_half_grid(self):
        f = gf(Fr(1, 2), [7, 8, 9])
        assert list(restrict(f, Grid(Fr(3, 2), 2)).values) == [8, 9]

    def test_errors(self):
        f = gf(0, [1, 2, 3])
        with pytest.raises(DomainError):
            restrict(f, Grid(Fr(1, 2), 1))
        with pytest.raises(DomainError):
            restrict(f, Grid(2, 3))


class TestGridFunction:
    def test_backend_mismatch(self):
        f = gf(0, [1, 2])
        with pytest.raises(TypeError):
            f + f.to_float()

    def test_grid_mismatch(self):
        with pytest.raises(DomainError):
            gf(0, [1, 2]) + gf(1, [1, 2])

    def test_length_checked(self):
        with pytest.raises(DomainError):
            GridFunction(Grid(0, 3), [1, 2], "exact")


class TestCsv:
    @given(bases, values)
    def test_exact_round_trip(self, base, vals):
        f = gf(base, vals)
        text = write_csv(f)
        g = read_csv(io.StringIO(text), "exact")
        assert g.equals(f)
        assert write_csv(g) == text

    def test_rational_format(self):
        assert format_scalar(Fr(-6, 4)) == "-3/2"
        assert parse_scalar("0.125", "exact") == Fr(1, 8)
        assert parse_scalar("-3/2", "exact") == Fr(-3, 2)

    def test_float_round_trip(self):
        f = GridFunction(Grid(0.5, 3), [0.1, 1 / 3, -2e-17], "float")
        assert read_csv(io.StringIO(write_csv(f)), "float").equals(f)

    def test_bad_header(self):
        with pytest.raises(ValueError):
            read_csv(io.StringIO("x,y\n0,1\n"))

    def test_bad_step(self):
        with pytest.raises(DomainError):
            read_csv(io.StringIO("t,value\n0,1\n2,1\n"))
