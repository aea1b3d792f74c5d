"""Factorial functions and the generalized-binomial kernel shared by all fractional sums.

Every fractional sum in this package is a finite convolution with

    c_m(nu) = Gamma(m + nu) / (Gamma(m + 1) Gamma(nu)),

computed by the ratio recurrence ``c_0 = 1, c_m = c_{m-1} (m + nu - 1) / m``.
The recurrence is exact for rational ``nu`` and avoids evaluating Gamma at
large arguments. Gamma itself is only used by the factorial functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _accel
from .scalars import Backend, backend_of, is_integer_value, is_nonpositive_integer

__all__ = [
    "PoleError",
    "UndefinedFormError",
    "FracOrder",
    "GammaMonomial",
    "KernelSequence",
    "gamma_exact",
    "falling_factorial",
    "rising_factorial",
    "kernel_sequence",
    "kernel_coeffs",
]


class PoleError(ArithmeticError):
    """A Gamma function was evaluated at a nonpositive integer with no zero convention to fall back on."""


class UndefinedFormError(PoleError):
    """Pole over pole, or an argument outside a definition's domain."""


@dataclass(frozen=True)
class FracOrder:
    """Order ``alpha > 0`` with ``n = [alpha] + 1`` (so ``n - 1 < alpha <= n``)."""

    alpha: Fraction | float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"fractional order must be positive, got {self.alpha}")

    @property
    def n(self) -> int:
        return int(math.ceil(self.alpha))

    @property
    def inner(self):
        """Order ``n - alpha`` of the sum inside RL and Caputo differences."""
        return self.n - self.alpha

    @property
    def is_integer(self) -> bool:
        return is_integer_value(self.alpha)


class GammaMonomial:
    """Exact value ``coef * prod Gamma(b_i) ** e_i`` with rational bases in (0, 1).

    Any Gamma at a rational non-pole argument reduces to one of these through the
    functional equation, so ratios like ``Gamma(t + 1) / Gamma(t + 1 - alpha)``
    are exact objects and algebraic identities between them can be decided
    by equality.
    """

    __slots__ = ("coef", "factors")

    def __init__(self, coef, factors=()):
        self.coef = Fraction(coef)
        merged: dict[Fraction, int] = {}
        if self.coef != 0:
            for base, exp in factors:
                merged[base] = merged.get(base, 0) + exp
        self.factors = tuple(sorted((b, e) for b, e in merged.items() if e != 0))

    def __repr__(self):
        parts = [str(self.coef)] + [f"Gamma({b})^{e}" for b, e in self.factors]
        return "GammaMonomial(" + " * ".join(parts) + ")"

    def simplify(self):
        """Collapse to a plain ``Fraction`` when no Gamma factors remain."""
        return self.coef if not self.factors else self

    @staticmethod
    def _lift(x) -> "GammaMonomial":
        if isinstance(x, GammaMonomial):
            return x
        if isinstance(x, (int, Fraction)):
            return GammaMonomial(x)
        return NotImplemented

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return GammaMonomial(self.coef * other.coef, self.factors + other.factors)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if other.coef == 0:
            raise ZeroDivisionError("GammaMonomial division by zero")
        inv = tuple((b, -e) for b, e in other.factors)
        return GammaMonomial(self.coef / other.coef, self.factors + inv)

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other / self

    def __neg__(self):
        return GammaMonomial(-self.coef, self.factors)

    def _combine(self, other, sign):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if other.coef == 0:
            return GammaMonomial(self.coef, self.factors)
        if self.coef == 0:
            return GammaMonomial(sign * other.coef, other.factors)
        if self.factors != other.factors:
            raise ValueError(f"cannot add incommensurable Gamma monomials {self!r} and {other!r}")
        return GammaMonomial(self.coef + sign * other.coef, self.factors)

    def __add__(self, other):
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return (-self)._combine(other, 1)

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        if self.coef == 0 or other.coef == 0:
            return self.coef == other.coef
        return self.coef == other.coef and self.factors == other.factors

    def __hash__(self):
        return hash((self.coef, self.factors))

    def __float__(self):
        log_mag = sum(e * math.lgamma(float(b)) for b, e in self.factors)
        return float(self.coef) * math.exp(log_mag)

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return GammaMonomial(self.coef**k, tuple((b, e * k) for b, e in self.factors))


def gamma_exact(x) -> GammaMonomial:
    """Gamma at a rational non-pole point, reduced to a base in (0, 1]."""
    x = Fraction(x)
    if is_nonpositive_integer(x):
        raise PoleError(f"Gamma has a pole at {x}")
    base = x - math.ceil(x) + 1  # in (0, 1]
    shift = int(x - base)
    coef = Fraction(1)
    if shift >= 0:
        for j in range(shift):
            coef *= base + j
    else:
        for j in range(1, -shift + 1):
            coef /= base - j
    if base == 1:
        return GammaMonomial(coef)
    return GammaMonomial(coef, ((base, 1),))


def _gamma_float(x: float) -> float:
    if x > 0:
        return math.exp(math.lgamma(x)) if x > 170 else math.gamma(x)
    sign = -1.0 if int(math.floor(-x)) % 2 == 0 else 1.0
    return sign * math.exp(math.lgamma(x))


def _gamma_ratio(num, den, exact: bool):
    """Gamma(num) / Gamma(den) with the zero-at-denominator-pole convention."""
    num_pole = is_nonpositive_integer(num)
    den_pole = is_nonpositive_integer(den)
    if num_pole and den_pole:
        raise UndefinedFormError(f"Gamma({num}) / Gamma({den}) is pole over pole")
    if num_pole:
        raise PoleError(f"Gamma({num}) / Gamma({den}) is unbounded")
    if den_pole:
        return Fraction(0) if exact else 0.0
    if exact:
        return (gamma_exact(num) / gamma_exact(den)).simplify()
    num_f, den_f = float(num), float(den)
    if max(abs(num_f), abs(den_f)) < 170:
        return math.gamma(num_f) / math.gamma(den_f)
    mag = math.exp(math.lgamma(num_f) - math.lgamma(den_f))
    return math.copysign(1.0, _gamma_float(num_f)) * math.copysign(1.0, _gamma_float(den_f)) * mag


def _is_exact(*xs) -> bool:
    return all(backend_of(x) is Backend.EXACT for x in xs)


def falling_factorial(t, alpha):
    """``t^(alpha) = Gamma(t + 1) / Gamma(t + 1 - alpha)``.

    Zero when only the denominator sits on a pole; :class:`UndefinedFormError`
    when both do. Nonnegative integer orders use the finite product. Rational
    inputs give exact results (a :class:`GammaMonomial` when Gamma factors
    survive), anything else gives a float.
    """
    exact = _is_exact(t, alpha)
    if exact:
        t, alpha = Fraction(t), Fraction(alpha)
    if is_integer_value(alpha) and alpha >= 0:
        out = Fraction(1) if exact else 1.0
        for j in range(int(alpha)):
            out *= t - j
        return out
    return _gamma_ratio(t + 1, t + 1 - alpha, exact)


def rising_factorial(t, alpha):
    """``t^{alpha bar} = Gamma(t + alpha) / Gamma(t)``, with ``0^{alpha bar} = 0``."""
    exact = _is_exact(t, alpha)
    if exact:
        t, alpha = Fraction(t), Fraction(alpha)
    if t == 0:
        return Fraction(0) if exact else 0.0
    if is_nonpositive_integer(t):
        raise UndefinedFormError(f"rising factorial undefined at t={t}")
    if is_integer_value(alpha) and alpha >= 0:
        out = Fraction(1) if exact else 1.0
        for k in range(int(alpha)):
            out *= t + k
        return out
    return _gamma_ratio(t + alpha, t, exact)


def kernel_coeffs(nu, m_max: int):
    """Unchecked recurrence ``c_0..c_{m_max}`` for any real ``nu``.

    At ``nu`` a nonpositive integer ``-j`` this is the finite binomial row
    ``(-1)^m C(j, m)`` (the analytic continuation), e.g. ``[1, 0, 0, ...]`` at 0.
    Returns a list of Fractions for rational ``nu``, a float array otherwise.
    """
    if m_max < 0:
        raise ValueError("m_max must be >= 0")
    if backend_of(nu) is Backend.EXACT:
        nu = Fraction(nu)
        out = [Fraction(1)]
        for m in range(1, m_max + 1):
            out.append(out[-1] * (m + nu - 1) / m)
        return out
    return _accel.kernel_coeffs(float(nu), m_max)


@dataclass(frozen=True)
class KernelSequence:
    alpha: Fraction | float
    coeffs: tuple

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, m):
        return self.coeffs[m]

    def as_array(self) -> np.ndarray:
        if isinstance(self.coeffs[0], Fraction):
            out = np.empty(len(self.coeffs), dtype=object)
            out[:] = list(self.coeffs)
            return out
        return np.asarray(self.coeffs, dtype=np.float64)


def kernel_sequence(alpha, m_max: int) -> KernelSequence:
    """Kernel weights ``c_0..c_M`` of order ``alpha``.

    >>> kernel_sequence(Fraction(1, 2), 3).coeffs
    (Fraction(1, 1), Fraction(1, 2), Fraction(3, 8), Fraction(5, 16))
    """
    if is_nonpositive_integer(alpha):
        raise ValueError(f"kernel order must not be a nonpositive integer, got {alpha}")
    coeffs = kernel_coeffs(alpha, m_max)
    if isinstance(coeffs, np.ndarray):
        coeffs = tuple(float(c) for c in coeffs)
    return KernelSequence(alpha, tuple(coeffs))
