"""Unit-step grids with real base points, functions on them, and the two reflections."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from .scalars import (
    POINT_TOL,
    Backend,
    as_array,
    backend_of,
    format_scalar,
    parse_scalar,
    to_backend,
)

__all__ = [
    "DomainError",
    "Grid",
    "GridFunction",
    "symmetric_dual",
    "q_reflect",
    "restrict",
    "read_csv",
    "write_csv",
]


class DomainError(ValueError):
    """Grid misalignment, out-of-range points, or an empty window."""


def _integer_offset(delta) -> int | None:
    """``delta`` as an int if it is one (to tolerance for floats), else None."""
    if isinstance(delta, Fraction):
        return int(delta) if delta.denominator == 1 else None
    if isinstance(delta, (int, np.integer)):
        return int(delta)
    r = round(float(delta))
    return r if abs(float(delta) - r) <= POINT_TOL else None


@dataclass(frozen=True)
class Grid:
    """The points ``base, base + 1, ..., base + count - 1``."""

    base: Fraction | float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise DomainError(f"grid needs at least one point, got count={self.count}")
        if isinstance(self.base, (int, np.integer)):
            object.__setattr__(self, "base", Fraction(int(self.base)))
        elif isinstance(self.base, float) and not math.isfinite(self.base):
            raise DomainError("grid base must be finite")

    @classmethod
    def span(cls, lo, hi) -> "Grid":
        """The grid ``{lo, lo + 1, ..., hi}``; ``hi - lo`` must be a nonnegative integer."""
        k = _integer_offset(hi - lo)
        if k is None or k < 0:
            raise DomainError(f"cannot span {lo}..{hi} with unit steps")
        return cls(lo, k + 1)

    @property
    def top(self):
        return self.base + (self.count - 1)

    @property
    def backend(self) -> Backend:
        return backend_of(self.base)

    def points(self) -> list:
        return [self.base + k for k in range(self.count)]

    def __iter__(self):
        return iter(self.points())

    def __len__(self):
        return self.count

    def aligned(self, other: "Grid") -> bool:
        return _integer_offset(other.base - self.base) is not None

    def offset(self, point) -> int | None:
        """Index of ``point`` in this grid, or None when not a grid point."""
        k = _integer_offset(point - self.base)
        if k is None or not 0 <= k < self.count:
            return None
        return k

    def index(self, point) -> int:
        k = self.offset(point)
        if k is None:
            raise DomainError(f"point {point} is not on grid {self.describe()}")
        return k

    def __contains__(self, point) -> bool:
        return self.offset(point) is not None

    def same_points(self, other: "Grid") -> bool:
        return self.count == other.count and _integer_offset(other.base - self.base) == 0

    def intersect(self, other: "Grid") -> "Grid | None":
        if not self.aligned(other):
            raise DomainError(f"grids {self.describe()} and {other.describe()} are not aligned")
        shift = _integer_offset(other.base - self.base)
        lo = max(0, shift)
        hi = min(self.count - 1, shift + other.count - 1)
        if hi < lo:
            return None
        return Grid(self.base + lo, hi - lo + 1)

    def shifted(self, delta) -> "Grid":
        return Grid(self.base + delta, self.count)

    def describe(self) -> str:
        return f"{{{format_scalar(self.base)}..{format_scalar(self.top)}}}"


@dataclass(frozen=True, eq=False)
class GridFunction:
    """One scalar per grid point; values are Fractions (exact) or float64 (float)."""

    grid: Grid
    values: np.ndarray
    backend: Backend = field(default=None)

    def __post_init__(self):
        backend = self.backend
        if backend is None:
            if isinstance(self.values, np.ndarray) and self.values.dtype != object:
                backend = Backend.FLOAT
            else:
                backend = Backend.EXACT if all(backend_of(v) is Backend.EXACT for v in self.values) else Backend.FLOAT
        backend = Backend.of(backend)
        if backend is Backend.FLOAT:
            values = np.array(self.values, dtype=np.float64)
        elif isinstance(self.values, np.ndarray) and all(isinstance(v, Fraction) for v in self.values):
            values = self.values.copy()
        else:
            values = as_array(self.values, backend)
        if values.ndim != 1 or len(values) != self.grid.count:
            raise DomainError(f"{len(values)} values for a grid of {self.grid.count} points")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "backend", backend)

    @classmethod
    def from_callable(cls, grid: Grid, fn: Callable, backend=None) -> "GridFunction":
        backend = Backend.of(backend or grid.backend)
        return cls(grid, as_array([fn(t) for t in grid.points()], backend), backend)

    @classmethod
    def constant(cls, grid: Grid, value, backend=None) -> "GridFunction":
        return cls.from_callable(grid, lambda _t: value, backend)

    def __call__(self, t):
        return self.values[self.grid.index(t)]

    def __len__(self):
        return self.grid.count

    def points(self) -> list:
        return self.grid.points()

    def items(self) -> Iterable:
        return zip(self.grid.points(), self.values)

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.grid, values, self.backend)

    def shift(self, delta) -> "GridFunction":
        """Same values, every point moved by ``delta``: ``(shift f)(t) = f(t - delta)``."""
        return GridFunction(self.grid.shifted(delta), self.values, self.backend)

    def restrict(self, sub: Grid) -> "GridFunction":
        return restrict(self, sub)

    def _check_binary(self, other: "GridFunction"):
        if self.backend is not other.backend:
            raise TypeError(f"backend mismatch: {self.backend.value} vs {other.backend.value}")
        if not self.grid.same_points(other.grid):
            raise DomainError(f"grid mismatch: {self.grid.describe()} vs {other.grid.describe()}")

    def __add__(self, other):
        if isinstance(other, GridFunction):
            self._check_binary(other)
            return self.with_values(self.values + other.values)
        return self.with_values(self.values + to_backend(other, self.backend))

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            self._check_binary(other)
            return self.with_values(self.values - other.values)
        return self.with_values(self.values - to_backend(other, self.backend))

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            self._check_binary(other)
            return self.with_values(self.values * other.values)
        return self.with_values(self.values * to_backend(other, self.backend))

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)

    def equals(self, other: "GridFunction") -> bool:
        """Exact equality of grids and values (bit-exact for floats)."""
        return (
            self.backend is other.backend
            and self.grid.same_points(other.grid)
            and all(x == y for x, y in zip(self.values, other.values))
        )

    def to_float(self) -> "GridFunction":
        grid = Grid(float(self.grid.base), self.grid.count)
        return GridFunction(grid, np.array([float(v) for v in self.values]), Backend.FLOAT)

    def __repr__(self):
        vals = ", ".join(format_scalar(v) for v in self.values)
        return f"GridFunction({self.grid.describe()}, [{vals}])"


def symmetric_dual(f: GridFunction) -> GridFunction:
    """``f*(t) = f(-t)``: a function on ``[a, b]`` becomes one on ``[-b, -a]``."""
    grid = Grid(-f.grid.top, f.grid.count)
    return GridFunction(grid, f.values[::-1], f.backend)


def q_reflect(f: GridFunction) -> GridFunction:
    """``(Qf)(t) = f(a + b - t)`` on the same window ``[a, b]``."""
    return GridFunction(f.grid, f.values[::-1], f.backend)


def restrict(f: GridFunction, sub: Grid) -> GridFunction:
    if not f.grid.aligned(sub):
        raise DomainError(f"{sub.describe()} is not aligned with {f.grid.describe()}")
    start = f.grid.offset(sub.base)
    if start is None or f.grid.offset(sub.top) is None:
        raise DomainError(f"{sub.describe()} is not inside {f.grid.describe()}")
    return GridFunction(sub, f.values[start : start + sub.count], f.backend)


def read_csv(source, backend="exact") -> GridFunction:
    """Read a ``t,value`` CSV (header required) from a path or a file object."""
    backend = Backend.of(backend)
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, newline="") as fh:
            return read_csv(fh, backend)
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or [h.strip().lower() for h in header] != ["t", "value"]:
        raise ValueError(f"expected header 't,value', got {header!r}")
    ts, vals = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise ValueError(f"line {lineno}: expected 2 columns, got {len(row)}")
        ts.append(parse_scalar(row[0], backend))
        vals.append(parse_scalar(row[1], backend))
    if not ts:
        raise ValueError("CSV has no data rows")
    grid = Grid(ts[0], len(ts))
    for k, t in enumerate(ts):
        if grid.offset(t) != k:
            raise DomainError(f"t values must step by 1; row {k} has t={format_scalar(t)}")
    return GridFunction(grid, as_array(vals, backend), backend)


def write_csv(f: GridFunction, target=None) -> str:
    """Write ``f`` as ``t,value`` CSV; returns the text and writes it to ``target`` if given."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "value"])
    for t, v in f.items():
        writer.writerow([format_scalar(t), format_scalar(v)])
    text = buf.getvalue()
    if target is not None:
        if hasattr(target, "write"):
            target.write(text)
        else:
            with open(target, "w", newline="") as fh:
                fh.write(text)
    return text
