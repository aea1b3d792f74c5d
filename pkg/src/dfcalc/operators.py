"""Fractional sums, Riemann-Liouville and Caputo differences, integer differences.

Every operator here is a finite convolution with the kernel ``c_m(nu)`` from
:mod:`dfcalc.kernels`; only the anchoring and the placement of the output grid
differ between the four (direction, side) pairs. For ``f`` on ``{a..b}``:

=================  ======================  ==============================
operator           output grid             value
=================  ======================  ==============================
delta-left sum     ``{A+nu .. b+nu}``      ``sum_j c_{k-j} f(A+j)`` at ``A+nu+k``
delta-right sum    ``{a-nu .. B-nu}``      ``sum_m c_{k-m} f(B-m)`` at ``B-nu-k``
nabla-left sum     ``{A .. b}``            ``sum_{s=A+1}^t c_{t-s} f(s)``
nabla-right sum    ``{a .. B}``            ``sum_{s=t}^{B-1} c_{s-t} f(s)``
=================  ======================  ==============================

The nabla sums are 0 at their anchor (empty sum). An order-0 sum is the
identity, so differences of integer order reduce to integer differences.
"""
from __future__ import annotations

import io
import csv
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _accel
from .grid import DomainError, Grid, GridFunction, _integer_offset, restrict
from .kernels import FracOrder, kernel_coeffs
from .scalars import Backend, format_scalar, is_integer_value, to_backend, zeros

__all__ = [
    "OperatorSpec",
    "OperatorMatrix",
    "frac_sum",
    "int_diff",
    "frac_diff_rl",
    "frac_diff_caputo",
    "apply",
    "operator_matrix",
    "OPERATOR_NAMES",
]

DIRECTIONS = ("delta", "nabla")
SIDES = ("left", "right")
FLAVORS = ("sum", "rl", "caputo", "integer")
_FLAVOR_ALIASES = {"riemann_liouville": "rl", "riemann-liouville": "rl"}

OPERATOR_NAMES = tuple(
    f"{d}-{s}-{fl}" for d in DIRECTIONS for s in SIDES for fl in ("sum", "rl", "caputo")
)


@dataclass(frozen=True)
class OperatorSpec:
    """Which operator to apply.

    ``order`` is alpha (> 0) for sum/rl/caputo and the integer ``p`` for
    flavor ``integer``. ``anchor`` is ``a`` for left operators and ``b`` for
    right ones; None means "the input grid's own endpoint" (for Caputo nabla
    operators the default is the shifted anchor ``a + n - 1`` / ``b - n + 1``).
    ``signed`` only matters for integer differences (multiply by ``(-1)^p``).
    """

    direction: str
    side: str
    flavor: str
    order: object
    anchor: object = None
    signed: bool = False

    def __post_init__(self):
        flavor = _FLAVOR_ALIASES.get(self.flavor, self.flavor)
        object.__setattr__(self, "flavor", flavor)
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}, got {self.direction!r}")
        if self.side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}, got {self.side!r}")
        if flavor not in FLAVORS:
            raise ValueError(f"flavor must be one of {FLAVORS}, got {self.flavor!r}")
        if flavor == "integer":
            if not is_integer_value(self.order) or self.order < 0:
                raise ValueError(f"integer difference order must be a nonnegative integer, got {self.order}")
        elif not self.order > 0:
            raise ValueError(f"order must be positive, got {self.order}")

    @classmethod
    def parse(cls, name: str, order, anchor=None) -> "OperatorSpec":
        """Build from a CLI-style name such as ``nabla-left-caputo``."""
        parts = name.strip().lower().split("-")
        if len(parts) != 3:
            raise ValueError(f"operator name must look like 'nabla-left-sum', got {name!r}")
        return cls(parts[0], parts[1], parts[2], order, anchor)

    @property
    def name(self) -> str:
        return f"{self.direction}-{self.side}-{self.flavor}"

    @property
    def frac_order(self) -> FracOrder:
        return FracOrder(self.order)


# -- kernels and convolution -------------------------------------------------


def _coeffs(nu, count: int, backend: Backend):
    if backend is Backend.EXACT:
        return kernel_coeffs(to_backend(nu, backend), max(count - 1, 0))
    return kernel_coeffs(float(nu), max(count - 1, 0))


def _convolve(c, x, backend: Backend) -> np.ndarray:
    """``y[k] = sum_{j<=k} c[k-j] x[j]``."""
    n = len(x)
    if backend is Backend.FLOAT:
        return _accel.causal_convolve(np.asarray(c[:n], dtype=np.float64), x)
    out = zeros(n, backend)
    for k in range(n):
        acc = Fraction(0)
        for j in range(k + 1):
            cj = c[k - j]
            if cj:
                acc += cj * x[j]
        out[k] = acc
    return out


def _anchor_value(anchor, backend: Backend):
    if anchor is None:
        return None
    return to_backend(anchor, backend)


def _order_value(order, backend: Backend):
    return to_backend(order, backend)


def _require_aligned(f: GridFunction, anchor, what: str) -> int:
    """Integer offset of ``anchor`` from the grid base; raises when misaligned."""
    k = _integer_offset(anchor - f.grid.base)
    if k is None:
        raise DomainError(f"{what} anchor {format_scalar(anchor)} is not aligned with {f.grid.describe()}")
    return k


def _sum(f: GridFunction, nu, anchor, direction: str, side: str) -> GridFunction:
    """Fractional sum of order ``nu >= 0`` (0 is the identity on the anchored window)."""
    backend = f.backend
    nu = _order_value(nu, backend)
    anchor = _anchor_value(anchor, backend)
    k = _require_aligned(f, anchor, f"{direction}-{side} sum")
    n_pts = f.grid.count
    vals = f.values
    if direction == "delta":
        if not 0 <= k < n_pts:
            raise DomainError(f"delta-{side} anchor {format_scalar(anchor)} must be a point of {f.grid.describe()}")
        if side == "left":
            x = vals[k:]
        else:
            x = vals[: k + 1][::-1]
        if nu == 0:
            sub = Grid(anchor, len(x)) if side == "left" else Grid(f.grid.base, len(x))
            return restrict(f, sub)
        y = _convolve(_coeffs(nu, len(x), backend), x, backend)
        if side == "left":
            return GridFunction(Grid(anchor + nu, len(y)), y, backend)
        return GridFunction(Grid(anchor - nu - (len(y) - 1), len(y)), y[::-1], backend)

    if side == "left":
        if not -1 <= k <= n_pts - 1:
            raise DomainError(
                f"nabla-left anchor {format_scalar(anchor)} must lie in [base-1, top] of {f.grid.describe()}"
            )
        if nu == 0:
            return restrict(f, Grid.span(max(anchor, f.grid.base), f.grid.top))
        x = vals[k + 1 :]
        y = _convolve(_coeffs(nu, len(x), backend), x, backend)
        out = zeros(len(y) + 1, backend)
        out[1:] = y
        return GridFunction(Grid(anchor, len(out)), out, backend)

    if not 0 <= k <= n_pts:
        raise DomainError(
            f"nabla-right anchor {format_scalar(anchor)} must lie in [base, top+1] of {f.grid.describe()}"
        )
    if nu == 0:
        return restrict(f, Grid.span(f.grid.base, min(anchor, f.grid.top)))
    x = vals[:k][::-1]
    y = _convolve(_coeffs(nu, len(x), backend), x, backend)
    out = zeros(len(y) + 1, backend)
    out[:-1] = y[::-1]
    return GridFunction(Grid(f.grid.base, len(out)), out, backend)


# -- public operators ---------------------------------------------------------


def _default_anchor(spec: OperatorSpec, f: GridFunction):
    if spec.anchor is not None:
        return _anchor_value(spec.anchor, f.backend)
    if spec.flavor == "caputo" and spec.direction == "nabla":
        n = spec.frac_order.n
        return f.grid.base + (n - 1) if spec.side == "left" else f.grid.top - (n - 1)
    return f.grid.base if spec.side == "left" else f.grid.top


def frac_sum(spec: OperatorSpec, f: GridFunction) -> GridFunction:
    """Fractional sum of order ``spec.order`` (> 0)."""
    if spec.flavor != "sum":
        raise ValueError(f"frac_sum needs flavor 'sum', got {spec.flavor!r}")
    return _sum(f, spec.order, _default_anchor(spec, f), spec.direction, spec.side)


def int_diff(direction: str, signed: bool, p: int, f: GridFunction) -> GridFunction:
    """``Delta^p`` (drops the top p points) or ``nabla^p`` (drops the bottom p).

    ``signed`` multiplies by ``(-1)^p``, giving the operators written with a
    circled minus.
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    p = int(p)
    if p < 0:
        raise ValueError("difference order must be >= 0")
    if f.grid.count <= p:
        raise DomainError(f"order-{p} difference needs more than {p} points, grid is {f.grid.describe()}")
    vals = f.values
    for _ in range(p):
        vals = vals[1:] - vals[:-1]
    if signed and p % 2:
        vals = -vals
    base = f.grid.base if direction == "delta" else f.grid.base + p
    return GridFunction(Grid(base, f.grid.count - p), vals, f.backend)


def frac_diff_rl(spec: OperatorSpec, f: GridFunction) -> GridFunction:
    """Riemann-Liouville difference: integer difference of order n after a sum of order n - alpha."""
    order = spec.frac_order
    backend = f.backend
    alpha = _order_value(spec.order, backend)
    n = order.n
    inner = n - alpha
    anchor = _default_anchor(spec, f)
    g = _sum(f, inner, anchor, spec.direction, spec.side)
    if spec.direction == "delta":
        outer = ("delta", False) if spec.side == "left" else ("nabla", True)
    else:
        outer = ("nabla", False) if spec.side == "left" else ("delta", True)
    return int_diff(outer[0], outer[1], n, g)


def frac_diff_caputo(spec: OperatorSpec, f: GridFunction) -> GridFunction:
    """Caputo difference: sum of order n - alpha applied to the order-n integer difference.

    Nabla variants drop the anchor point itself (where the sum is empty).
    """
    order = spec.frac_order
    backend = f.backend
    alpha = _order_value(spec.order, backend)
    n = order.n
    inner = n - alpha
    anchor = _default_anchor(spec, f)
    if spec.direction == "delta":
        g = int_diff("delta", False, n, f) if spec.side == "left" else int_diff("nabla", True, n, f)
        return _sum(g, inner, anchor, "delta", spec.side)
    g = int_diff("nabla", False, n, f) if spec.side == "left" else int_diff("delta", True, n, f)
    h = _sum(g, inner, anchor, "nabla", spec.side)
    if spec.side == "left":
        lo = anchor + 1
        if lo > h.grid.top:
            raise DomainError(f"nabla-left Caputo at anchor {format_scalar(anchor)} leaves no output points")
        return restrict(h, Grid.span(max(lo, h.grid.base), h.grid.top))
    hi = anchor - 1
    if hi < h.grid.base:
        raise DomainError(f"nabla-right Caputo at anchor {format_scalar(anchor)} leaves no output points")
    return restrict(h, Grid.span(h.grid.base, min(hi, h.grid.top)))


def apply(spec: OperatorSpec, f: GridFunction) -> GridFunction:
    if spec.flavor == "sum":
        return frac_sum(spec, f)
    if spec.flavor == "rl":
        return frac_diff_rl(spec, f)
    if spec.flavor == "caputo":
        return frac_diff_caputo(spec, f)
    return int_diff(spec.direction, spec.signed, int(spec.order), f)


# -- dense matrices -----------------------------------------------------------


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense matrix of a linear grid operator; rows are output points, columns input points."""

    input_grid: Grid
    output_grid: Grid
    entries: np.ndarray
    backend: Backend

    def __post_init__(self):
        if self.entries.shape != (self.output_grid.count, self.input_grid.count):
            raise ValueError(
                f"entries shape {self.entries.shape} does not match "
                f"{self.output_grid.count}x{self.input_grid.count}"
            )

    @property
    def shape(self):
        return self.entries.shape

    def apply(self, f: GridFunction) -> GridFunction:
        if not f.grid.same_points(self.input_grid):
            raise DomainError(f"matrix expects {self.input_grid.describe()}, got {f.grid.describe()}")
        if f.backend is not self.backend:
            raise TypeError(f"backend mismatch: matrix {self.backend.value}, function {f.backend.value}")
        return GridFunction(self.output_grid, self.entries.dot(f.values), self.backend)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        """``self @ other`` is "apply other, then self"."""
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        if not other.output_grid.same_points(self.input_grid):
            raise DomainError(
                f"cannot compose: {other.output_grid.describe()} feeds {self.input_grid.describe()}"
            )
        return OperatorMatrix(other.input_grid, self.output_grid, self.entries.dot(other.entries), self.backend)

    def restrict_rows(self, rows: Grid) -> "OperatorMatrix":
        start = self.output_grid.index(rows.base)
        self.output_grid.index(rows.top)
        return OperatorMatrix(self.input_grid, rows, self.entries[start : start + rows.count], self.backend)

    def to_csv(self, target=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t"] + [format_scalar(s) for s in self.input_grid.points()])
        for t, row in zip(self.output_grid.points(), self.entries):
            writer.writerow([format_scalar(t)] + [format_scalar(v) for v in row])
        text = buf.getvalue()
        if target is not None:
            with open(target, "w", newline="") as fh:
                fh.write(text)
        return text


def operator_matrix(spec, input_grid: Grid, backend=None) -> OperatorMatrix:
    """Matrix of ``spec`` (an :class:`OperatorSpec` or any linear callable on GridFunctions).

    Built column by column from the operator's action on basis indicators.
    """
    backend = Backend.of(backend or input_grid.backend)
    op = spec if callable(spec) else (lambda f: apply(spec, f))
    if backend is Backend.FLOAT and not isinstance(input_grid.base, float):
        input_grid = Grid(float(input_grid.base), input_grid.count)
    one = Fraction(1) if backend is Backend.EXACT else 1.0
    columns, out_grid = [], None
    for j in range(input_grid.count):
        e = zeros(input_grid.count, backend)
        e[j] = one
        col = op(GridFunction(input_grid, e, backend))
        if out_grid is None:
            out_grid = col.grid
        elif not col.grid.same_points(out_grid):
            raise DomainError("operator output grid depends on the input values")
        columns.append(col.values)
    entries = np.empty((out_grid.count, input_grid.count), dtype=object if backend is Backend.EXACT else np.float64)
    for j, col in enumerate(columns):
        entries[:, j] = col
    return OperatorMatrix(input_grid, out_grid, entries, backend)
