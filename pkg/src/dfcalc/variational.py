"""Discrete variational problems whose Lagrangian sees a right nabla fractional difference.

Two variants on a window ``{a..b}`` with ``0 < alpha < 1``:

``mm``
    ``J(f) = sum_{t=a+1}^{b-1} L(t, f(t), (RL right difference of f)(t))``
``mmm``
    ``J(f) = sum_{t=a+1}^{b-1} L(t, f(t+1), (Caputo right difference of f)(t))``

:func:`el_residual` returns the Euler-Lagrange residual on the variant's
interior grid (``{a+1..b-1}`` for mm, ``{a+2..b-1}`` for mmm). The default
``form="derived"`` is what the first variation of ``J`` actually produces;
``form="stated"`` evaluates the textbook expressions literally. With
``L_1 = dL/du``, ``L_2 = dL/dv`` (zero outside ``{a+1..b-1}``) and ``D`` the RL
nabla-left difference anchored at ``a``:

=======  ===============================  =====================================
variant  derived                          stated
=======  ===============================  =====================================
mm       ``L_1(s) + (D L_2)(s)``          ``L_1(s) + (Caputo_a L_2(.+1))(s+1)``
mmm      ``L_1(s-1) + (D L_2)(s)``        ``L_1(s) + (D L_2)(s+1)``
=======  ===============================  =====================================
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .grid import DomainError, Grid, GridFunction, _integer_offset
from .kernels import kernel_coeffs
from .operators import OperatorSpec, apply, operator_matrix, _sum
from .scalars import Backend, as_array, backend_of, format_scalar, is_integer_value, parse_scalar, to_backend, zeros

__all__ = [
    "Lagrangian",
    "QuadraticLagrangian",
    "Boundary",
    "VariationalProblem",
    "SingularSystemError",
    "ConvergenceError",
    "BUILTIN_LAGRANGIANS",
    "builtin_lagrangian",
    "functional_value",
    "el_residual",
    "first_variation",
    "variation_via_residual",
    "boundary_report",
    "assemble_quadratic",
    "solve_quadratic",
    "brute_force_minimize",
    "load_problem",
    "problem_from_dict",
]


class SingularSystemError(ArithmeticError):
    """The assembled Euler-Lagrange system has no unique solution."""


class ConvergenceError(RuntimeError):
    """Descent stopped at its iteration cap before the gradient was small."""

    def __init__(self, message, iterate=None, grad_norm=None):
        super().__init__(message)
        self.iterate = iterate
        self.grad_norm = grad_norm


# -- Lagrangians --------------------------------------------------------------


class Lagrangian:
    """``L(t, u, v)`` with caller-supplied partials ``d_u`` and ``d_v``."""

    def __init__(self, value: Callable, d_u: Callable, d_v: Callable, name: str = "custom"):
        self.value = value
        self.d_u = d_u
        self.d_v = d_v
        self.name = name

    def __call__(self, t, u, v):
        return self.value(t, u, v)

    def self_check(self, points=None, samples: int = 20, seed: int = 0, tol: float = 1e-6, h: float = 1e-5) -> float:
        """Compare the partials with central differences of ``value`` in float; return the worst gap."""
        rng = random.Random(seed)
        if points is None:
            points = [float(rng.randint(0, 10)) for _ in range(samples)]
        worst = 0.0
        for t in points:
            u, v = rng.uniform(-2, 2), rng.uniform(-2, 2)
            fd_u = (float(self.value(t, u + h, v)) - float(self.value(t, u - h, v))) / (2 * h)
            fd_v = (float(self.value(t, u, v + h)) - float(self.value(t, u, v - h))) / (2 * h)
            for fd, exact in ((fd_u, float(self.d_u(t, u, v))), (fd_v, float(self.d_v(t, u, v)))):
                worst = max(worst, abs(fd - exact) / max(1.0, abs(exact)))
        if worst > tol:
            raise ValueError(f"Lagrangian {self.name!r}: partials disagree with finite differences by {worst:.3g}")
        return worst


class QuadraticLagrangian(Lagrangian):
    """``L = (w/2) (v - v_target)^2 + u g(t)``.

    ``g`` maps a grid point to a scalar (a callable, a dict or a GridFunction);
    ``v_target`` is a constant.
    """

    def __init__(self, g=0, v_target=0, weight=1, name: str = "quadratic"):
        self.g = g
        self.v_target = v_target
        self.weight = weight
        super().__init__(self._value, self._d_u, self._d_v, name)

    def g_at(self, t):
        g = self.g
        if isinstance(g, GridFunction):
            return g(t)
        if isinstance(g, dict):
            return g[t]
        if callable(g):
            return g(t)
        return g

    def _value(self, t, u, v):
        d = v - self.v_target
        return self.weight * d * d / 2 + u * self.g_at(t)

    def _d_u(self, t, u, v):
        return self.g_at(t)

    def _d_v(self, t, u, v):
        return self.weight * (v - self.v_target)


def _quartic() -> Lagrangian:
    return Lagrangian(
        lambda t, u, v: v * v / 2 + v**4 / 4 - u / 4,
        lambda t, u, v: Fraction(-1, 4) if isinstance(u, Fraction) else -0.25,
        lambda t, u, v: v + v**3,
        "quartic",
    )


BUILTIN_LAGRANGIANS: dict[str, Callable[[], Lagrangian]] = {
    "half_v_squared": lambda: QuadraticLagrangian(0, 0, name="half_v_squared"),
    "v_minus_one_squared": lambda: QuadraticLagrangian(0, 1, name="v_minus_one_squared"),
    "u": lambda: QuadraticLagrangian(1, 0, weight=0, name="u"),
    "quartic": _quartic,
}


def builtin_lagrangian(name: str) -> Lagrangian:
    try:
        return BUILTIN_LAGRANGIANS[name]()
    except KeyError:
        raise ValueError(f"unknown builtin Lagrangian {name!r}; known: {', '.join(BUILTIN_LAGRANGIANS)}") from None


# -- problems -----------------------------------------------------------------


@dataclass(frozen=True)
class Boundary:
    """``natural``; ``fixed`` (``f(a+1) = C``, ``f(b) = D``, mmm only); ``rl`` (``B``, mm only).

    ``rl`` constrains the order-(1 - alpha) right nabla sum of ``f`` at ``a + 1`` to ``B``.
    """

    kind: str = "natural"
    C: object = None
    D: object = None
    B: object = None

    def __post_init__(self):
        if self.kind not in ("natural", "fixed", "rl"):
            raise ValueError(f"boundary kind must be natural, fixed or rl, got {self.kind!r}")
        if self.kind == "fixed" and (self.C is None or self.D is None):
            raise ValueError("fixed boundary needs both C and D")
        if self.kind == "rl" and self.B is None:
            raise ValueError("rl boundary needs B")


@dataclass
class VariationalProblem:
    variant: str
    a: object
    b: object
    alpha: object
    lagrangian: Lagrangian
    boundary: Boundary = field(default_factory=Boundary)
    backend: Backend | str | None = None

    def __post_init__(self):
        if self.variant not in ("mm", "mmm"):
            raise ValueError(f"variant must be 'mm' or 'mmm', got {self.variant!r}")
        backend = self.backend
        if backend is None:
            backend = Backend.EXACT if all(backend_of(x) is Backend.EXACT for x in (self.a, self.b, self.alpha)) else Backend.FLOAT
        self.backend = Backend.of(backend)
        self.a = to_backend(self.a, self.backend)
        self.b = to_backend(self.b, self.backend)
        self.alpha = to_backend(self.alpha, self.backend)
        if not 0 < self.alpha < 1 or is_integer_value(self.alpha):
            raise ValueError(f"variational problems need 0 < alpha < 1, got {format_scalar(self.alpha)}")
        width = _integer_offset(self.b - self.a)
        if width is None:
            raise DomainError("a and b must differ by an integer")
        if width < 4:
            raise DomainError(f"need b - a >= 4, got {width}")
        if self.variant == "mm" and self.boundary.kind == "fixed":
            raise ValueError("fixed end values are the mmm boundary condition; mm takes natural or rl")
        if self.variant == "mmm" and self.boundary.kind == "rl":
            raise ValueError("the rl boundary condition belongs to mm; mmm takes fixed or natural")

    @property
    def grid(self) -> Grid:
        return Grid.span(self.a, self.b)

    @property
    def sum_grid(self) -> Grid:
        """Points ``t`` at which ``L`` is evaluated."""
        return Grid.span(self.a + 1, self.b - 1)

    @property
    def interior(self) -> Grid:
        return Grid.span(self.a + (1 if self.variant == "mm" else 2), self.b - 1)

    @property
    def nu(self):
        return 1 - self.alpha

    def v_spec(self) -> OperatorSpec:
        flavor = "rl" if self.variant == "mm" else "caputo"
        return OperatorSpec("nabla", "right", flavor, self.alpha, self.b)

    def check(self, f: GridFunction) -> GridFunction:
        if not f.grid.same_points(self.grid):
            raise DomainError(f"f must live on {self.grid.describe()}, got {f.grid.describe()}")
        if f.backend is not self.backend:
            raise TypeError(f"problem backend is {self.backend.value}, f is {f.backend.value}")
        return f

    def fixed_points(self) -> dict:
        """Points whose value is prescribed by the boundary data."""
        if self.boundary.kind == "fixed":
            return {self.a + 1: to_backend(self.boundary.C, self.backend), self.b: to_backend(self.boundary.D, self.backend)}
        return {}

    def inert_points(self) -> list:
        """Points of the window that never enter ``J``."""
        return [self.a, self.b] if self.variant == "mm" else [self.a]

    def free_points(self) -> list:
        fixed = self.fixed_points()
        inert = self.inert_points()
        return [t for t in self.grid.points() if t not in fixed and t not in inert]


def _zero(backend):
    return to_backend(0, backend)


def _slots(p: VariationalProblem, f: GridFunction):
    """``(t, u, v)`` for every ``t`` in ``{a+1..b-1}``."""
    v = apply(p.v_spec(), f)
    out = []
    for t in p.sum_grid.points():
        u = f(t) if p.variant == "mm" else f(t + 1)
        out.append((t, u, v(t)))
    return out


def functional_value(p: VariationalProblem, f: GridFunction):
    p.check(f)
    total = _zero(p.backend)
    for t, u, v in _slots(p, f):
        total += p.lagrangian(t, u, v)
    return total


def _partials(p: VariationalProblem, f: GridFunction):
    slots = _slots(p, f)
    l1 = GridFunction(p.sum_grid, [p.lagrangian.d_u(t, u, v) for t, u, v in slots], p.backend)
    l2 = GridFunction(p.sum_grid, [p.lagrangian.d_v(t, u, v) for t, u, v in slots], p.backend)
    return l1, l2


def _extend(g: GridFunction, hi) -> GridFunction:
    """Zero-extend ``g`` up to the point ``hi``."""
    extra = _integer_offset(hi - g.grid.top)
    if extra <= 0:
        return g
    vals = list(g.values) + [_zero(g.backend)] * extra
    return GridFunction(Grid(g.grid.base, g.grid.count + extra), vals, g.backend)


def _left_rl(p: VariationalProblem, h: GridFunction) -> GridFunction:
    return apply(OperatorSpec("nabla", "left", "rl", p.alpha, p.a), h)


def el_residual(p: VariationalProblem, f: GridFunction, form: str = "derived") -> GridFunction:
    """Euler-Lagrange residual on :attr:`VariationalProblem.interior`."""
    if form not in ("derived", "stated"):
        raise ValueError(f"form must be 'derived' or 'stated', got {form!r}")
    p.check(f)
    l1, l2 = _partials(p, f)
    a = p.a
    pts = p.interior.points()
    if p.variant == "mm":
        if form == "derived":
            d = _left_rl(p, l2)
            vals = [l1(s) + d(s) for s in pts]
        else:
            # L_2 shifted by one, zero outside its range, on {a..b}
            ext = _extend(l2, p.b + 1)
            shifted = GridFunction(Grid.span(a, p.b), ext.values, p.backend)
            cap = apply(OperatorSpec("nabla", "left", "caputo", p.alpha, a), shifted)
            vals = [l1(s) + cap(s + 1) for s in pts]
    else:
        d = _left_rl(p, _extend(l2, p.b))
        if form == "derived":
            vals = [l1(s - 1) + d(s) for s in pts]
        else:
            vals = [l1(s) + d(s + 1) for s in pts]
    return GridFunction(p.interior, vals, p.backend)


def _check_eta(p: VariationalProblem, eta: GridFunction):
    p.check(eta)
    for t in p.fixed_points():
        if eta(t) != 0:
            raise ValueError(f"eta must vanish at the fixed point {format_scalar(t)}")
    if p.boundary.kind == "rl":
        h = _sum(eta, p.nu, p.b, "nabla", "right")(p.a + 1)
        if h != 0:
            raise ValueError("eta must keep the rl boundary value: its right sum at a+1 must be 0")


def first_variation(p: VariationalProblem, f: GridFunction, eta: GridFunction):
    """``d/de J(f + e eta)`` at ``e = 0``, from the partials and the linearity of the difference."""
    p.check(f)
    _check_eta(p, eta)
    l1, l2 = _partials(p, f)
    dv = apply(p.v_spec(), eta)
    total = _zero(p.backend)
    for t in p.sum_grid.points():
        du = eta(t) if p.variant == "mm" else eta(t + 1)
        total += l1(t) * du + l2(t) * dv(t)
    return total


def variation_via_residual(p: VariationalProblem, f: GridFunction, eta: GridFunction):
    """``sum eta * residual`` plus the boundary terms left over by summation by parts.

    Returns ``(interior_part, boundary_part)``; their sum equals :func:`first_variation`.
    For mm the boundary part is always 0. For mmm it is
    ``eta(a+1) G(a+1) + eta(b) (L_1(b-1) - G(b-1))`` with ``G`` the
    order-(1 - alpha) left nabla sum of ``L_2``.
    """
    p.check(f)
    p.check(eta)
    res = el_residual(p, f)
    interior = _zero(p.backend)
    for s, r in res.items():
        interior += eta(s) * r
    if p.variant == "mm":
        return interior, _zero(p.backend)
    l1, l2 = _partials(p, f)
    big_g = _sum(l2, p.nu, p.a, "nabla", "left")
    boundary = eta(p.a + 1) * big_g(p.a + 1) + eta(p.b) * (l1(p.b - 1) - big_g(p.b - 1))
    return interior, boundary


def boundary_report(p: VariationalProblem, f: GridFunction) -> dict:
    """Boundary quantities of a candidate ``f``.

    mm/rl: the constrained value and its target. mmm: the two natural
    conditions as usually written (``G(a+1)``, ``G(b)``) next to the two that
    stationarity in ``f(a+1)``, ``f(b)`` actually requires
    (``G(a+1)``, ``L_1(b-1) - G(b-1)``).
    """
    p.check(f)
    out = {"kind": p.boundary.kind}
    if p.variant == "mm":
        h = _sum(f, p.nu, p.b, "nabla", "right")(p.a + 1)
        out["right_sum_at_a_plus_1"] = h
        if p.boundary.kind == "rl":
            out["B"] = to_backend(p.boundary.B, p.backend)
        return out
    l1, l2 = _partials(p, f)
    big_g = _sum(_extend(l2, p.b), p.nu, p.a, "nabla", "left")
    out["stated_natural"] = {"G(a+1)": big_g(p.a + 1), "G(b)": big_g(p.b)}
    out["derived_natural"] = {"G(a+1)": big_g(p.a + 1), "L1(b-1)-G(b-1)": l1(p.b - 1) - big_g(p.b - 1)}
    if p.boundary.kind == "fixed":
        out["f(a+1)"] = f(p.a + 1)
        out["f(b)"] = f(p.b)
    return out


# -- the quadratic solver -----------------------------------------------------


def _solve_exact(mat, rhs):
    """Gauss-Jordan elimination over Fractions."""
    n = len(rhs)
    aug = [[Fraction(x) for x in row] + [Fraction(r)] for row, r in zip(mat, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularSystemError(f"matrix is singular (no pivot in column {col})")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        piv = aug[col][col]
        row_c = [x / piv for x in aug[col]]
        aug[col] = row_c
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], row_c)]
    return [aug[r][n] for r in range(n)]


def _solve_float(mat, rhs):
    mat = np.asarray(mat, dtype=np.float64)
    if np.linalg.matrix_rank(mat) < mat.shape[0] or np.linalg.cond(mat) > 1e13:
        raise SingularSystemError(f"matrix is singular or nearly so (condition {np.linalg.cond(mat):.3g})")
    return list(np.linalg.solve(mat, np.asarray(rhs, dtype=np.float64)))


@dataclass
class LinearSystem:
    """``matrix @ x = rhs``; ``unknowns`` labels the columns (grid points, then ``"lambda"``)."""

    matrix: list
    rhs: list
    unknowns: list
    backend: Backend

    def residual(self, x) -> list:
        return [sum((m * v for m, v in zip(row, x)), _zero(self.backend)) - r for row, r in zip(self.matrix, self.rhs)]


def assemble_quadratic(p: VariationalProblem) -> LinearSystem:
    """Linear Euler-Lagrange system of a :class:`QuadraticLagrangian` problem (derived form).

    Unknowns are ``f`` on ``{a..b}`` (plus a multiplier for the rl constraint).
    Points that never enter ``J`` are pinned to 0.
    """
    lag = p.lagrangian
    if not isinstance(lag, QuadraticLagrangian):
        raise TypeError("solve_quadratic needs a QuadraticLagrangian")
    be = p.backend
    grid = p.grid
    w = to_backend(lag.weight, be)
    vt = to_backend(lag.v_target, be)
    npts = grid.count

    # v on {a+1..b-1} as a matrix acting on f over {a..b}
    v_mat = operator_matrix(p.v_spec(), grid, be).restrict_rows(p.sum_grid)
    # L_2 = w (v - vt) zero-extended to {a+1..b}; D = RL left difference of it
    d_grid = p.sum_grid if p.variant == "mm" else Grid.span(p.a + 1, p.b)
    d_mat = operator_matrix(lambda h: _left_rl(p, h), d_grid, be)
    k = p.sum_grid.count
    pad = d_grid.count - k
    l2_mat = np.concatenate([v_mat.entries * w, np.array([[_zero(be)] * npts] * pad, dtype=v_mat.entries.dtype).reshape(pad, npts)])
    l2_const = [-w * vt] * k + [_zero(be)] * pad
    dl2 = d_mat.entries.dot(l2_mat)
    dl2_const = list(d_mat.entries.dot(np.array(l2_const, dtype=d_mat.entries.dtype)))

    rows, rhs = [], []
    for s in p.interior.points():
        i = d_mat.output_grid.index(s)
        l1 = to_backend(lag.g_at(s if p.variant == "mm" else s - 1), be)
        rows.append(list(dl2[i]))
        rhs.append(-(l1 + dl2_const[i]))

    unknowns = grid.points()
    one = to_backend(1, be)

    def unit(t):
        r = [_zero(be)] * npts
        r[grid.index(t)] = one
        return r

    for t in p.inert_points():
        rows.append(unit(t))
        rhs.append(_zero(be))
    for t, val in p.fixed_points().items():
        rows.append(unit(t))
        rhs.append(val)
    if p.variant == "mmm" and p.boundary.kind == "natural":
        # stationarity in f(a+1) and f(b): G(a+1) = 0 and L_1(b-1) - G(b-1) = 0,
        # G = order-(1 - alpha) left nabla sum of L_2
        g_mat = operator_matrix(lambda h: _sum(h, p.nu, p.a, "nabla", "left"), d_grid, be)
        gl2 = g_mat.entries.dot(l2_mat)
        gl2_const = list(g_mat.entries.dot(np.array(l2_const, dtype=g_mat.entries.dtype)))
        ia = g_mat.output_grid.index(p.a + 1)
        rows.append(list(gl2[ia]))
        rhs.append(-gl2_const[ia])
        ib = g_mat.output_grid.index(p.b - 1)
        rows.append([-x for x in gl2[ib]])
        rhs.append(gl2_const[ib] - to_backend(lag.g_at(p.b - 1), be))
    if p.boundary.kind == "rl":
        # KKT: residual(s) = lambda * d(constraint)/d f(s); constraint row itself
        c = kernel_coeffs(p.nu, npts)
        weights = [_zero(be)] * npts
        for t in Grid.span(p.a + 1, p.b - 1).points():
            weights[grid.index(t)] = to_backend(c[_integer_offset(t - p.a - 1)], be)
        for r_idx, s in enumerate(p.interior.points()):
            rows[r_idx].append(-weights[grid.index(s)])
        for r_idx in range(p.interior.count, len(rows)):
            rows[r_idx].append(_zero(be))
        rows.append(weights + [_zero(be)])
        rhs.append(to_backend(p.boundary.B, be))
        unknowns = unknowns + ["lambda"]
    return LinearSystem(rows, rhs, unknowns, be)


def solve_quadratic(p: VariationalProblem, return_system: bool = False):
    """Solve the Euler-Lagrange system of a quadratic problem; returns ``f`` on ``{a..b}``."""
    system = assemble_quadratic(p)
    if len(system.matrix) != len(system.unknowns):
        raise SingularSystemError(f"{len(system.matrix)} equations for {len(system.unknowns)} unknowns")
    try:
        x = _solve_exact(system.matrix, system.rhs) if p.backend is Backend.EXACT else _solve_float(system.matrix, system.rhs)
    except SingularSystemError as exc:
        raise SingularSystemError(
            f"{p.variant}/{p.boundary.kind} system singular at alpha={format_scalar(p.alpha)} on {p.grid.describe()}: {exc}"
        ) from None
    f = GridFunction(p.grid, x[: p.grid.count], p.backend)
    return (f, system, x) if return_system else f


# -- descent oracle -----------------------------------------------------------


def _indicator(p: VariationalProblem, t) -> GridFunction:
    vals = zeros(p.grid.count, p.backend)
    vals[p.grid.index(t)] = to_backend(1, p.backend)
    return GridFunction(p.grid, vals, p.backend)


def brute_force_minimize(
    p: VariationalProblem,
    initial: GridFunction | None = None,
    iters: int = 10_000,
    grad_tol: float = 1e-8,
    armijo: float = 1e-4,
    history: list | None = None,
) -> GridFunction:
    """Backtracking gradient descent on the free values of ``f`` (float backend, small windows).

    The gradient is the first variation along indicator directions. Under the
    rl boundary the gradient is projected onto the constraint plane and the
    start is projected onto the constraint. Raises :class:`ConvergenceError`
    if the gradient is still above ``grad_tol`` after ``iters`` steps.
    """
    if p.backend is not Backend.FLOAT:
        raise ValueError("brute_force_minimize runs in the float backend")
    if p.grid.count > 12:
        raise ValueError(f"the descent oracle is meant for windows of at most 12 points, got {p.grid.count}")
    grid = p.grid
    x = np.zeros(grid.count) if initial is None else np.array(p.check(initial).values, dtype=np.float64)
    for t in p.inert_points():
        x[grid.index(t)] = 0.0
    for t, val in p.fixed_points().items():
        x[grid.index(t)] = float(val)
    free = [grid.index(t) for t in p.free_points()]
    directions = [_indicator(p, t) for t in p.free_points()]

    constraint = None
    if p.boundary.kind == "rl":
        c = kernel_coeffs(float(p.nu), grid.count)
        constraint = np.zeros(grid.count)
        for t in Grid.span(p.a + 1, p.b - 1).points():
            constraint[grid.index(t)] = c[_integer_offset(t - p.a - 1)]
        gap = float(p.boundary.B) - constraint @ x
        x = x + gap * constraint / (constraint @ constraint)

    def fn(vec):
        return float(functional_value(p, GridFunction(grid, vec, Backend.FLOAT)))

    def grad(vec):
        f = GridFunction(grid, vec, Backend.FLOAT)
        l1, l2 = _partials(p, f)
        g = np.zeros(grid.count)
        for idx, eta in zip(free, directions):
            dv = apply(p.v_spec(), eta)
            total = 0.0
            for t in p.sum_grid.points():
                du = eta(t) if p.variant == "mm" else eta(t + 1)
                total += l1(t) * du + l2(t) * dv(t)
            g[idx] = total
        if constraint is not None:
            g = g - (g @ constraint) / (constraint @ constraint) * constraint
        return g

    value = fn(x)
    if history is not None:
        history.append(value)
    gnorm = math.inf
    for _ in range(iters):
        g = grad(x)
        gnorm = float(np.max(np.abs(g))) if len(g) else 0.0
        if gnorm <= grad_tol:
            return GridFunction(grid, x, Backend.FLOAT)
        step, sq = 1.0, float(g @ g)
        while True:
            trial = x - step * g
            tv = fn(trial)
            if tv <= value - armijo * step * sq:
                break
            step /= 2
            if step < 1e-20:
                raise ConvergenceError(f"line search failed (gradient norm {gnorm:.3g})", GridFunction(grid, x, Backend.FLOAT), gnorm)
        x, value = trial, tv
        if history is not None:
            history.append(value)
    g = grad(x)
    gnorm = float(np.max(np.abs(g))) if len(g) else 0.0
    if gnorm <= grad_tol:
        return GridFunction(grid, x, Backend.FLOAT)
    raise ConvergenceError(
        f"no convergence after {iters} iterations (gradient norm {gnorm:.3g})", GridFunction(grid, x, Backend.FLOAT), gnorm
    )


# -- problem files ------------------------------------------------------------


def problem_from_dict(data: dict, backend=None) -> VariationalProblem:
    """Build a problem from the JSON layout described in the README."""
    backend = Backend.of(backend or data.get("backend", "exact"))

    def num(x):
        return parse_scalar(str(x), backend)

    try:
        variant = data["variant"]
        a, b, alpha = num(data["a"]), num(data["b"]), num(data["alpha"])
        lag_spec = data["lagrangian"]
    except KeyError as exc:
        raise ValueError(f"problem JSON is missing {exc.args[0]!r}") from None
    form = lag_spec.get("form")
    if form == "quadratic":
        grid = Grid.span(a, b)
        g_vals = lag_spec.get("g", [0] * grid.count)
        if len(g_vals) != grid.count:
            raise ValueError(f"'g' must list {grid.count} values (t = a..b), got {len(g_vals)}")
        g = GridFunction(grid, as_array([num(v) for v in g_vals], backend), backend)
        lag = QuadraticLagrangian(g, num(lag_spec.get("v_target", 0)), num(lag_spec.get("weight", 1)))
    elif form == "builtin":
        lag = builtin_lagrangian(lag_spec.get("name", ""))
    else:
        raise ValueError(f"lagrangian form must be 'quadratic' or 'builtin', got {form!r}")
    bnd = dict(data.get("boundary", {"kind": "natural"}))
    kind = bnd.pop("kind", "natural")
    bnd = {k: num(v) for k, v in bnd.items()}
    return VariationalProblem(variant, a, b, alpha, lag, Boundary(kind, **bnd), backend)


def load_problem(source, backend=None) -> VariationalProblem:
    if hasattr(source, "read"):
        return problem_from_dict(json.load(source), backend)
    with open(source) as fh:
        return problem_from_dict(json.load(fh), backend)
