"""Scalar backends: exact rationals (``Fraction``) and IEEE doubles."""
from __future__ import annotations

import enum
import math
from fractions import Fraction
from numbers import Rational

import numpy as np

__all__ = [
    "Backend",
    "parse_scalar",
    "format_scalar",
    "to_backend",
    "is_integer_value",
    "is_nonpositive_integer",
    "backend_of",
    "zeros",
    "as_array",
]

# float point coincidence tolerance for grid bookkeeping
POINT_TOL = 1e-9


class Backend(str, enum.Enum):
    EXACT = "exact"
    FLOAT = "float"

    @classmethod
    def of(cls, value) -> "Backend":
        return cls(value) if not isinstance(value, cls) else value


def backend_of(x) -> Backend:
    """Exact for ints and rationals, float for everything else."""
    if isinstance(x, (bool, np.bool_)):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, np.integer, Rational)):
        return Backend.EXACT
    return Backend.FLOAT


def parse_scalar(text: str, backend) -> Fraction | float:
    """Parse ``"p/q"`` or a decimal literal into the backend's scalar type.

    >>> parse_scalar("3/6", "exact")
    Fraction(1, 2)
    >>> parse_scalar("0.25", "exact")
    Fraction(1, 4)
    """
    backend = Backend.of(backend)
    s = str(text).strip()
    if not s:
        raise ValueError("empty scalar")
    if backend is Backend.EXACT:
        low = s.lower()
        if any(tok in low for tok in ("nan", "inf")):
            raise ValueError(f"not a finite rational: {s!r}")
        return Fraction(s)
    if "/" in s:
        return float(Fraction(s))
    return float(s)


def format_scalar(x) -> str:
    """``p/q`` (or ``p``) for rationals, shortest round-trip repr for floats."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, Fraction):
        return str(x)
    return repr(float(x))


def to_backend(x, backend):
    backend = Backend.of(backend)
    if backend is Backend.EXACT:
        if isinstance(x, float):
            raise TypeError(f"float {x!r} cannot enter the exact backend; pass a Fraction or 'p/q'")
        if isinstance(x, str):
            return parse_scalar(x, backend)
        return Fraction(x)
    if isinstance(x, str):
        return parse_scalar(x, backend)
    return float(x)


def is_integer_value(x) -> bool:
    if isinstance(x, Fraction):
        return x.denominator == 1
    if isinstance(x, (int, np.integer)):
        return True
    xf = float(x)
    return math.isfinite(xf) and xf == math.floor(xf)


def is_nonpositive_integer(x) -> bool:
    return is_integer_value(x) and x <= 0


def zeros(n: int, backend) -> np.ndarray:
    if Backend.of(backend) is Backend.EXACT:
        out = np.empty(n, dtype=object)
        out[:] = [Fraction(0)] * n
        return out
    return np.zeros(n, dtype=np.float64)


def as_array(values, backend) -> np.ndarray:
    """Coerce a sequence into the backend's array form (object of Fraction / float64)."""
    backend = Backend.of(backend)
    if backend is Backend.EXACT:
        seq = [to_backend(v, backend) for v in values]
        out = np.empty(len(seq), dtype=object)
        out[:] = seq
        return out
    return np.array([to_backend(v, backend) for v in values], dtype=np.float64)
