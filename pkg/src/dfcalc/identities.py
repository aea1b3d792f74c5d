"""Two-sided checks of the duality, shifting and commutation identities.

Each check evaluates both sides independently through :mod:`dfcalc.operators`,
re-expresses them as functions of the same free variable ``t`` (undoing the
``t -> -t`` reflection and the ``+-alpha`` jumps), intersects the two output
grids with the identity's stated range of ``t`` and compares values there.
Nothing is zero-padded: an empty overlap is an error.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .grid import DomainError, Grid, _integer_offset, GridFunction, restrict, symmetric_dual
from .kernels import FracOrder, kernel_coeffs
from .operators import OperatorSpec, _sum, apply, int_diff
from .scalars import Backend, format_scalar, is_integer_value, to_backend

__all__ = [
    "IDENTITY_IDS",
    "COMMUTATION_IDS",
    "ANY_ORDER_IDS",
    "IdentityReport",
    "FunctionFamily",
    "check_identity",
    "run_suite",
    "default_family",
    "default_grids",
    "DEFAULT_ALPHAS",
    "FLOAT_TOL",
    "REPORT_SCHEMA",
    "reports_to_json",
]

FLOAT_TOL = 1e-10

IDENTITY_IDS = (
    "SUM_DUAL_NABLA",
    "SUM_DUAL_DELTA",
    "INT_DUAL_1",
    "INT_DUAL_N",
    "RL_DUAL_NABLA",
    "RL_DUAL_DELTA",
    "CAPUTO_DUAL_NABLA",
    "CAPUTO_DUAL_DELTA",
    "SHIFT_LEFT_I",
    "SHIFT_LEFT_II",
    "SHIFT_RIGHT_I",
    "SHIFT_RIGHT_II",
    "CAPUTO_SHIFT_L",
    "CAPUTO_SHIFT_R",
    "COMM_ATO",
    "COMM_TD",
    "COMM_AtT",
    "COMM_RN",
    "COMM_LNG",
    "COMM_RNG",
)
COMMUTATION_IDS = ("COMM_ATO", "COMM_TD", "COMM_AtT", "COMM_RN", "COMM_LNG", "COMM_RNG")
# these also hold for negative non-integer orders (acting as RL differences)
ANY_ORDER_IDS = ("COMM_AtT", "COMM_RN", "COMM_LNG", "COMM_RNG")

DEFAULT_ALPHAS = tuple(Fraction(*q) for q in ((1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (5, 4), (3, 2)))


# -- reports ------------------------------------------------------------------


@dataclass
class IdentityReport:
    identity_id: str
    alpha: object
    grid: Grid
    backend: Backend
    points_checked: int
    max_abs_deviation: object
    scaled_deviation: float
    exact_pass: bool | None
    passed: bool
    function: str = ""
    params: dict = field(default_factory=dict)
    error: str | None = None

    def to_json(self) -> dict:
        return {
            "identity": self.identity_id,
            "alpha": format_scalar(self.alpha),
            "base": format_scalar(self.grid.base),
            "count": self.grid.count,
            "points_checked": self.points_checked,
            "max_dev": None if self.max_abs_deviation is None else format_scalar(self.max_abs_deviation),
            "exact_pass": self.exact_pass,
            "pass": self.passed,
            "backend": self.backend.value,
            "function": self.function,
            "error": self.error,
        }


REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "array",
    "items": {
        "type": "object",
        "required": ["identity", "alpha", "base", "count", "points_checked", "max_dev", "exact_pass", "pass"],
        "properties": {
            "identity": {"type": "string"},
            "alpha": {"type": "string"},
            "base": {"type": "string"},
            "count": {"type": "integer", "minimum": 1},
            "points_checked": {"type": "integer", "minimum": 0},
            "max_dev": {"type": ["string", "null"]},
            "exact_pass": {"type": ["boolean", "null"]},
            "pass": {"type": "boolean"},
            "backend": {"enum": ["exact", "float"]},
            "function": {"type": "string"},
            "error": {"type": ["string", "null"]},
        },
    },
}


def reports_to_json(reports: Sequence[IdentityReport], indent: int | None = 2) -> str:
    return json.dumps([r.to_json() for r in reports], indent=indent)


# -- helpers ------------------------------------------------------------------


def _op(direction, side, flavor, alpha, anchor, f):
    return apply(OperatorSpec(direction, side, flavor, alpha, anchor), f)


def _nabla_any(f: GridFunction, order, anchor, side: str) -> GridFunction:
    """Nabla sum of any real order: order > 0 sums, order < 0 is the RL difference of order -order."""
    if order > 0:
        return _op("nabla", side, "sum", order, anchor, f)
    if order < 0:
        return _op("nabla", side, "rl", -order, anchor, f)
    return _sum(f, order, anchor, "nabla", side)


def _at_shift(g: GridFunction, delta) -> GridFunction:
    """``t -> g(t + delta)``."""
    return g.shift(-delta)


def _at_reflection(g: GridFunction, offset) -> GridFunction:
    """``t -> g(offset - t)``."""
    return symmetric_dual(g).shift(offset)


def _kernel_at(nu, m: int, backend: Backend):
    if m < 0:
        return to_backend(0, backend)
    return kernel_coeffs(nu, m)[m]


def _minus_boundary(g: GridFunction, term: Callable, include: bool) -> GridFunction:
    """``g(t) - term(t)`` (or ``g`` itself when the boundary term is switched off)."""
    if not include:
        return g
    vals = [v - term(t) for t, v in g.items()]
    return GridFunction(g.grid, vals, g.backend)


def _offset(t, origin) -> int:
    k = _integer_offset(t - origin)
    if k is None:
        raise DomainError(f"{format_scalar(t)} is not aligned with {format_scalar(origin)}")
    return k


# -- the identities -----------------------------------------------------------
# Each returns a list of (lhs, rhs, t-range) triples; the t-range may be None.


def _sum_dual_nabla(f, alpha, a, b, fs, prm):
    lhs = _op("nabla", "left", "sum", alpha, a, f)
    rhs = _at_reflection(_op("nabla", "right", "sum", alpha, -a, fs), 0)
    return [(lhs, rhs, Grid.span(a + 1, b))]


def _sum_dual_delta(f, alpha, a, b, fs, prm):
    lhs = _at_shift(_op("delta", "left", "sum", alpha, a, f), alpha)
    rhs = _at_reflection(_op("delta", "right", "sum", alpha, -a, fs), -alpha)
    return [(lhs, rhs, Grid.span(a, b))]


def _int_dual_1(f, alpha, a, b, fs, prm):
    out = []
    for inner, outer in (("nabla", "delta"), ("delta", "nabla")):
        lhs = -symmetric_dual(int_diff(inner, False, 1, f))
        rhs = int_diff(outer, False, 1, fs)
        out.append((lhs, rhs, None))
    return out


def _int_dual_n(f, alpha, a, b, fs, prm):
    n = int(prm.get("n", 2))
    out = []
    for inner, outer in (("nabla", "delta"), ("delta", "nabla")):
        lhs = symmetric_dual(int_diff(inner, False, n, f))
        rhs = int_diff(outer, True, n, fs)
        out.append((lhs, rhs, None))
    return out


def _rl_dual_nabla(f, alpha, a, b, fs, prm):
    n = FracOrder(alpha).n
    lhs = _op("nabla", "left", "rl", alpha, a, f)
    rhs = _at_reflection(_op("nabla", "right", "rl", alpha, -a, fs), 0)
    return [(lhs, rhs, Grid.span(a + n, b))]


def _rl_dual_delta(f, alpha, a, b, fs, prm):
    n = FracOrder(alpha).n
    lhs = _at_shift(_op("delta", "left", "rl", alpha, a, f), -alpha)
    rhs = _at_reflection(_op("delta", "right", "rl", alpha, -a, fs), alpha)
    return [(lhs, rhs, Grid.span(a + n, b))]


def _caputo_dual_nabla(f, alpha, a, b, fs, prm):
    n = FracOrder(alpha).n
    shifted = a + (n - 1)
    lhs = _op("nabla", "left", "caputo", alpha, shifted, f)
    rhs = _at_reflection(_op("nabla", "right", "caputo", alpha, -shifted, fs), 0)
    return [(lhs, rhs, None)]


def _caputo_dual_delta(f, alpha, a, b, fs, prm):
    n = FracOrder(alpha).n
    lhs = _at_shift(_op("delta", "left", "caputo", alpha, a, f), -alpha)
    rhs = _at_reflection(_op("delta", "right", "caputo", alpha, -a, fs), alpha)
    return [(lhs, rhs, Grid.span(a + n, b))]


def _shift_left_i(f, alpha, a, b, fs, prm):
    n = FracOrder(alpha).n
    lhs = _at_shift(_op("delta", "left", "rl", alpha, a, f), -alpha)
    rhs = _op("nabla", "left", "rl", alpha, a - 1, f)
    return [(lhs, rhs, Grid.span(a + n, b))]


def _shift_left_ii(f, alpha, a, b, fs, prm):
    lhs = _at_shift(_op("delta", "left", "sum", alpha, a, f), alpha)
    rhs = _op("nabla", "left", "sum", alpha, a - 1, f)
    return [(lhs, rhs, Grid.span(a, b))]


def _shift_right_i(f, alpha, a, b, fs, prm):
    # right nabla side ends at b + 1, mirroring a - 1 on the left
    n = FracOrder(alpha).n
    lhs = _at_shift(_op("delta", "right", "rl", alpha, b, f), alpha)
    rhs = _op("nabla", "right", "rl", alpha, b + 1, f)
    return [(lhs, rhs, Grid.span(a, b - n))]


def _shift_right_ii(f, alpha, a, b, fs, prm):
    lhs = _at_shift(_op("delta", "right", "sum", alpha, b, f), -alpha)
    rhs = _op("nabla", "right", "sum", alpha, b + 1, f)
    return [(lhs, rhs, Grid.span(a, b))]


def _caputo_shift_l(f, alpha, a, b, fs, prm):
    n = FracOrder(alpha).n
    lhs = _at_shift(_op("delta", "left", "caputo", alpha, a, f), -alpha)
    rhs = _op("nabla", "left", "caputo", alpha, a + (n - 1), f)
    return [(lhs, rhs, Grid.span(a + n, b))]


def _caputo_shift_r(f, alpha, a, b, fs, prm):
    n = FracOrder(alpha).n
    lhs = _at_shift(_op("delta", "right", "caputo", alpha, b, f), alpha)
    rhs = _op("nabla", "right", "caputo", alpha, b - (n - 1), f)
    return [(lhs, rhs, Grid.span(a, b - n))]


def _comm_ato(f, alpha, a, b, fs, prm):
    fa = f(a)
    lhs = _op("delta", "left", "sum", alpha, a, int_diff("delta", False, 1, f))
    inner = int_diff("delta", False, 1, _op("delta", "left", "sum", alpha, a, f))
    rhs = _minus_boundary(
        inner, lambda t: _kernel_at(alpha, _offset(t, a + alpha) + 1, f.backend) * fa, prm["include_boundary"]
    )
    return [(lhs, rhs, None)]


def _comm_td(f, alpha, a, b, fs, prm):
    fb = f(b)
    lhs = _op("delta", "right", "sum", alpha, b, int_diff("nabla", True, 1, f))
    inner = int_diff("nabla", True, 1, _op("delta", "right", "sum", alpha, b, f))
    rhs = _minus_boundary(
        inner, lambda t: _kernel_at(alpha, _offset(b - alpha, t) + 1, f.backend) * fb, prm["include_boundary"]
    )
    return [(lhs, rhs, None)]


def _comm_att(f, alpha, a, b, fs, prm):
    fa = f(a)
    lhs = _nabla_any(int_diff("nabla", False, 1, f), alpha, a, "left")
    inner = int_diff("nabla", False, 1, _nabla_any(f, alpha, a, "left"))
    rhs = _minus_boundary(
        inner, lambda t: _kernel_at(alpha, _offset(t, a) - 1, f.backend) * fa, prm["include_boundary"]
    )
    return [(lhs, rhs, None)]


def _comm_rn(f, alpha, a, b, fs, prm):
    fb = f(b)
    lhs = _nabla_any(int_diff("delta", True, 1, f), alpha, b, "right")
    inner = int_diff("delta", True, 1, _nabla_any(f, alpha, b, "right"))
    rhs = _minus_boundary(
        inner, lambda t: _kernel_at(alpha, _offset(b, t) - 1, f.backend) * fb, prm["include_boundary"]
    )
    return [(lhs, rhs, None)]


def _comm_lng(f, alpha, a, b, fs, prm):
    p = int(prm.get("p", 2))
    if p < 1:
        raise ValueError(f"p must be a positive integer, got {p}")
    start = a + (p - 1)
    diffs = [f(start) if k == 0 else int_diff("nabla", False, k, f)(start) for k in range(p)]
    lhs = _nabla_any(int_diff("nabla", False, p, f), alpha, start, "left")
    inner = int_diff("nabla", False, p, _nabla_any(f, alpha, start, "left"))

    def term(t):
        m = _offset(t, start) - 1
        return sum((_kernel_at(alpha - p + k + 1, m, f.backend) * diffs[k] for k in range(p)), to_backend(0, f.backend))

    return [(lhs, _minus_boundary(inner, term, prm["include_boundary"]), None)]


def _comm_rng(f, alpha, a, b, fs, prm):
    p = int(prm.get("p", 2))
    if p < 1:
        raise ValueError(f"p must be a positive integer, got {p}")
    end = b - (p - 1)
    diffs = [f(end) if k == 0 else int_diff("delta", True, k, f)(end) for k in range(p)]
    lhs = _nabla_any(int_diff("delta", True, p, f), alpha, end, "right")
    inner = int_diff("delta", True, p, _nabla_any(f, alpha, end, "right"))

    def term(t):
        m = _offset(end, t) - 1
        return sum((_kernel_at(alpha - p + k + 1, m, f.backend) * diffs[k] for k in range(p)), to_backend(0, f.backend))

    return [(lhs, _minus_boundary(inner, term, prm["include_boundary"]), None)]


_SIDES = {
    "SUM_DUAL_NABLA": _sum_dual_nabla,
    "SUM_DUAL_DELTA": _sum_dual_delta,
    "INT_DUAL_1": _int_dual_1,
    "INT_DUAL_N": _int_dual_n,
    "RL_DUAL_NABLA": _rl_dual_nabla,
    "RL_DUAL_DELTA": _rl_dual_delta,
    "CAPUTO_DUAL_NABLA": _caputo_dual_nabla,
    "CAPUTO_DUAL_DELTA": _caputo_dual_delta,
    "SHIFT_LEFT_I": _shift_left_i,
    "SHIFT_LEFT_II": _shift_left_ii,
    "SHIFT_RIGHT_I": _shift_right_i,
    "SHIFT_RIGHT_II": _shift_right_ii,
    "CAPUTO_SHIFT_L": _caputo_shift_l,
    "CAPUTO_SHIFT_R": _caputo_shift_r,
    "COMM_ATO": _comm_ato,
    "COMM_TD": _comm_td,
    "COMM_AtT": _comm_att,
    "COMM_RN": _comm_rn,
    "COMM_LNG": _comm_lng,
    "COMM_RNG": _comm_rng,
}


def _compare(pairs, backend: Backend):
    """Max |lhs - rhs| and the largest magnitude seen, over every common point."""
    zero = to_backend(0, backend)
    count, dev, scale = 0, zero, zero
    for lhs, rhs, window in pairs:
        common = lhs.grid.intersect(rhs.grid)
        if common is not None and window is not None:
            common = common.intersect(window)
        if common is None:
            continue
        lv = restrict(lhs, common).values
        rv = restrict(rhs, common).values
        count += common.count
        for x, y in zip(lv, rv):
            dev = max(dev, abs(x - y))
            scale = max(scale, abs(x), abs(y))
    return count, dev, scale


def check_identity(
    identity_id: str,
    f: GridFunction,
    alpha,
    *,
    p: int = 2,
    n: int = 2,
    include_boundary: bool = True,
    tol: float = FLOAT_TOL,
    function: str = "",
) -> IdentityReport:
    """Evaluate both sides of ``identity_id`` for ``f`` on its grid ``{a..b}``.

    ``p`` is the difference order of COMM_LNG / COMM_RNG, ``n`` the order of
    INT_DUAL_N. ``include_boundary=False`` drops the boundary term of the
    commutation identities (which should then fail).
    """
    if identity_id not in _SIDES:
        raise ValueError(f"unknown identity {identity_id!r}; expected one of {', '.join(IDENTITY_IDS)}")
    backend = f.backend
    alpha = to_backend(alpha, backend)
    if identity_id in ANY_ORDER_IDS:
        if alpha <= 0 and is_integer_value(alpha):
            raise ValueError(f"{identity_id} needs a positive or non-integer order, got {format_scalar(alpha)}")
    elif not alpha > 0:
        raise ValueError(f"{identity_id} needs alpha > 0, got {format_scalar(alpha)}")
    a, b = f.grid.base, f.grid.top
    prm = {"p": p, "n": n, "include_boundary": include_boundary}
    pairs = _SIDES[identity_id](f, alpha, a, b, symmetric_dual(f), prm)
    count, dev, scale = _compare(pairs, backend)
    if count == 0:
        raise DomainError(f"{identity_id}: the two sides share no points on {f.grid.describe()}")
    scaled = float(dev) / max(1.0, float(scale))
    if backend is Backend.EXACT:
        exact_pass, passed = dev == 0, dev == 0
    else:
        exact_pass, passed = None, scaled <= tol
    used = {k: prm[k] for k in (("p",) if identity_id in ("COMM_LNG", "COMM_RNG") else ("n",) if identity_id == "INT_DUAL_N" else ())}
    if identity_id in COMMUTATION_IDS:
        used["include_boundary"] = include_boundary
    return IdentityReport(
        identity_id, alpha, f.grid, backend, count, dev, scaled, exact_pass, passed, function, used
    )


# -- suites -------------------------------------------------------------------


@dataclass(frozen=True)
class FunctionFamily:
    """A named recipe producing a GridFunction on any grid."""

    name: str
    make: Callable[[Grid, Backend], GridFunction]

    def __call__(self, grid: Grid, backend) -> GridFunction:
        return self.make(grid, Backend.of(backend))


def _poly(power: int) -> Callable:
    def make(grid, backend):
        return GridFunction.from_callable(grid, lambda t: t**power, backend)

    return make


def _random_rational(seed: int) -> Callable:
    def make(grid, backend):
        rng = random.Random(seed * 7919 + grid.count)
        vals = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(grid.count)]
        if backend is Backend.FLOAT:
            return GridFunction(grid, np.array([float(v) for v in vals]), backend)
        return GridFunction(grid, vals, backend)

    return make


def default_family(seed: int = 0) -> list[FunctionFamily]:
    return [
        FunctionFamily("one", _poly(0)),
        FunctionFamily("t", _poly(1)),
        FunctionFamily("t^2", _poly(2)),
        FunctionFamily(f"random[{seed}]", _random_rational(seed)),
    ]


def default_grids(backend="exact", a=0, widths=(4, 8, 16)) -> list[Grid]:
    """Windows ``{a..a+w}``; float grids get a float base."""
    backend = Backend.of(backend)
    base = to_backend(a, backend)
    return [Grid(base, w + 1) for w in widths]


def run_suite(
    f_family: Sequence[FunctionFamily] | None = None,
    alphas: Sequence | None = None,
    grids: Sequence[Grid] | None = None,
    *,
    identities: Sequence[str] | None = None,
    backend="exact",
    tol: float = FLOAT_TOL,
    p: int = 2,
    n: int = 2,
) -> list[IdentityReport]:
    """Every identity x function x alpha x grid; failures become reports, not exceptions.

    Results are sorted by identity, alpha, grid and function name.
    """
    backend = Backend.of(backend)
    f_family = default_family() if f_family is None else list(f_family)
    alphas = DEFAULT_ALPHAS if alphas is None else list(alphas)
    grids = default_grids(backend) if grids is None else list(grids)
    identities = IDENTITY_IDS if identities is None else list(identities)
    for name, seq in (("function family", f_family), ("alpha list", alphas), ("grid list", grids), ("identity list", identities)):
        if not seq:
            raise ValueError(f"run_suite needs a nonempty {name}")
    unknown = [i for i in identities if i not in _SIDES]
    if unknown:
        raise ValueError(f"unknown identities: {', '.join(unknown)}")
    alphas = [to_backend(al, backend) for al in alphas]

    reports = []
    for ident in identities:
        for alpha in alphas:
            for grid in grids:
                for fam in f_family:
                    f = fam(grid, backend)
                    try:
                        rep = check_identity(ident, f, alpha, p=p, n=n, tol=tol, function=fam.name)
                    except (ArithmeticError, ValueError) as exc:
                        rep = IdentityReport(
                            ident, alpha, grid, backend, 0, None, float("nan"), False if backend is Backend.EXACT else None,
                            False, fam.name, {}, f"{type(exc).__name__}: {exc}",
                        )
                    reports.append(rep)
    order = {ident: k for k, ident in enumerate(sorted(identities))}
    reports.sort(key=lambda r: (order[r.identity_id], float(r.alpha), float(r.grid.base), r.grid.count, r.function))
    return reports
