"""Summation by parts for nabla fractional differences of order 0 < alpha < 1.

``sbp`` evaluates a left-hand side, a boundary part ``F(s)|_x^y = F(y) - F(x)``
and a sum part for one of four formulas, on ``f, g`` given over ``{a..b}``.
Two forms are available:

``stated``
    the formulas exactly as usually written. SBP_CAPUTO_LEFT and
    SBP_CAPUTO_RIGHT hold in this form; SBP_RL_LEFT and SBP_RL_RIGHT do not.
``repaired``
    SBP_RL_LEFT with the right Caputo difference anchored at ``b - 1``;
    SBP_RL_RIGHT with ``f(s + 1)`` on the left and the Caputo difference
    anchored at ``a + 1`` (the form obtained by reflecting SBP_RL_LEFT).
    The two Caputo formulas are unchanged.
``proof``
    SBP_CAPUTO_RIGHT only, with the last sum written as
    ``sum_{s=a+2}^{b} f(s) (nabla_a^alpha g)(s)``. Equal to the stated form.

``mutant=True`` moves the evaluation point of the Riemann-Liouville factor by
one (only for the two right-hand formulas) so the test suite can check that an
off-by-one is detected.
"""
from __future__ import annotations

from dataclasses import dataclass

from .grid import DomainError, GridFunction, symmetric_dual
from .operators import OperatorSpec, apply, _sum
from .scalars import Backend, format_scalar, to_backend

__all__ = [
    "SBP_IDS",
    "SBP_FORMS",
    "SbpReport",
    "DualityClosure",
    "sbp",
    "sbp_boundary_convention",
    "duality_closure",
]

SBP_IDS = ("SBP_CAPUTO_LEFT", "SBP_RL_LEFT", "SBP_CAPUTO_RIGHT", "SBP_RL_RIGHT")
SBP_FORMS = ("stated", "repaired", "proof")
FLOAT_TOL = 1e-10


@dataclass
class SbpReport:
    theorem_id: str
    form: str
    alpha: object
    a: object
    b: object
    backend: Backend
    lhs: object
    rhs_boundary: object
    rhs_sum: object
    deviation: object
    passed: bool
    mutant: bool = False

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem_id,
            "form": self.form,
            "alpha": format_scalar(self.alpha),
            "a": format_scalar(self.a),
            "b": format_scalar(self.b),
            "lhs": format_scalar(self.lhs),
            "rhs_boundary": format_scalar(self.rhs_boundary),
            "rhs_sum": format_scalar(self.rhs_sum),
            "deviation": format_scalar(self.deviation),
            "pass": self.passed,
            "mutant": self.mutant,
        }


def _check_inputs(f: GridFunction, g: GridFunction, alpha):
    if f.backend is not g.backend:
        raise TypeError(f"backend mismatch: {f.backend.value} vs {g.backend.value}")
    if not f.grid.same_points(g.grid):
        raise DomainError(f"f on {f.grid.describe()} and g on {g.grid.describe()} must share a window")
    alpha = to_backend(alpha, f.backend)
    if not 0 < alpha < 1:
        raise ValueError(f"summation by parts needs 0 < alpha < 1, got {format_scalar(alpha)}")
    if f.grid.count < 4:
        raise DomainError(f"summation by parts needs b - a >= 3, got {f.grid.describe()}")
    return alpha, f.grid.base, f.grid.top


def _nabla(side, flavor, order, anchor, h):
    return apply(OperatorSpec("nabla", side, flavor, order, anchor), h)


def _total(terms, backend):
    acc = to_backend(0, backend)
    for x in terms:
        acc += x
    return acc


def _span(lo, hi):
    k = int(round(float(hi - lo)))
    return [lo + j for j in range(k + 1)]


def sbp(theorem_id: str, f: GridFunction, g: GridFunction, alpha, form: str = "stated", mutant: bool = False) -> SbpReport:
    """Both sides of a summation-by-parts formula on the common window of ``f`` and ``g``."""
    if theorem_id not in SBP_IDS:
        raise ValueError(f"unknown theorem {theorem_id!r}; expected one of {', '.join(SBP_IDS)}")
    if form not in SBP_FORMS:
        raise ValueError(f"form must be one of {SBP_FORMS}, got {form!r}")
    if form == "proof" and theorem_id != "SBP_CAPUTO_RIGHT":
        raise ValueError("the 'proof' form only exists for SBP_CAPUTO_RIGHT")
    if mutant and theorem_id not in ("SBP_CAPUTO_RIGHT", "SBP_RL_RIGHT"):
        raise ValueError("the off-by-one mutant is defined for SBP_CAPUTO_RIGHT and SBP_RL_RIGHT only")
    alpha, a, b = _check_inputs(f, g, alpha)
    backend = f.backend
    nu = 1 - alpha
    inner = _span(a + 1, b - 1)
    shift = -1 if mutant else 0

    if theorem_id == "SBP_CAPUTO_LEFT":
        cap = _nabla("left", "caputo", alpha, a, f)
        big_g = _nabla("right", "sum", nu, b, g)
        rl = _nabla("right", "rl", alpha, b, g)
        lhs = _total((g(s) * cap(s) for s in inner), backend)
        boundary = f(b - 1) * big_g(b - 1) - f(a) * big_g(a)
        rest = _total((f(s - 1) * rl(s - 1) for s in inner), backend)
    elif theorem_id == "SBP_RL_LEFT":
        big_g = _nabla("left", "sum", nu, a, g)
        rl = _nabla("left", "rl", alpha, a, g)
        cap = _nabla("right", "caputo", alpha, b if form == "stated" else b - 1, f)
        lhs = _total((f(s - 1) * rl(s) for s in inner), backend)
        boundary = f(b - 1) * big_g(b - 1) - f(a) * big_g(a)
        rest = _total((g(s + 1) * cap(s) for s in _span(a, b - 2)), backend)
    elif theorem_id == "SBP_CAPUTO_RIGHT":
        cap = _nabla("right", "caputo", alpha, b, f)
        big_g = _nabla("left", "sum", nu, a, g)
        rl = _nabla("left", "rl", alpha, a, g)
        lhs = _total((g(s) * cap(s) for s in inner), backend)
        boundary = f(a + 1) * big_g(a + 1) - f(b) * big_g(b)
        if form == "proof":
            rest = _total((f(s) * rl(s + shift) for s in _span(a + 2, b)), backend)
        else:
            rest = _total((f(s + 1) * rl(s + 1 + shift) for s in inner), backend)
    else:
        big_h = _nabla("right", "sum", nu, b, g)
        rl = _nabla("right", "rl", alpha, b, g)
        boundary = f(a + 1) * big_h(a + 1) - f(b) * big_h(b)
        if form == "stated":
            cap = _nabla("left", "caputo", alpha, a, f)
            lhs = _total((f(s - 1) * rl(s + shift) for s in inner), backend)
        else:
            cap = _nabla("left", "caputo", alpha, a + 1, f)
            lhs = _total((f(s + 1) * rl(s + shift) for s in inner), backend)
        rest = _total((g(s) * cap(s + 1) for s in inner), backend)

    deviation = abs(lhs - (boundary + rest))
    if backend is Backend.EXACT:
        passed = deviation == 0
    else:
        scale = max(1.0, abs(float(lhs)), abs(float(boundary)), abs(float(rest)))
        passed = float(deviation) / scale <= FLOAT_TOL
    return SbpReport(theorem_id, form, alpha, a, b, backend, lhs, boundary, rest, deviation, passed, mutant)


_CONVENTION = {
    # theorem: (side of the order-(1 - alpha) sum, endpoint as offset from a or b, expected value)
    "SBP_CAPUTO_LEFT": ("right", ("b", -1), "g"),
    "SBP_RL_LEFT": ("left", ("a", 0), "zero"),
    "SBP_CAPUTO_RIGHT": ("left", ("a", 1), "g"),
    "SBP_RL_RIGHT": ("right", ("b", 0), "zero"),
}


def sbp_boundary_convention(theorem_id: str, g: GridFunction, alpha, endpoint):
    """The convention value of the order-(1 - alpha) sum of ``g`` at a formula's endpoint.

    Confirms it against the operator evaluation and returns it.
    """
    if theorem_id not in _CONVENTION:
        raise ValueError(f"unknown theorem {theorem_id!r}")
    side, (ref, off), kind = _CONVENTION[theorem_id]
    a, b = g.grid.base, g.grid.top
    point = (a if ref == "a" else b) + off
    endpoint = to_backend(endpoint, g.backend)
    if endpoint != point:
        raise ValueError(
            f"{theorem_id} fixes its convention at {ref}{off:+d} = {format_scalar(point)}, not {format_scalar(endpoint)}"
        )
    alpha = to_backend(alpha, g.backend)
    anchor = a if side == "left" else b
    value = _sum(g, 1 - alpha, anchor, "nabla", side)(point)
    expected = g(point) if kind == "g" else to_backend(0, g.backend)
    if value != expected:
        raise AssertionError(f"{theorem_id}: operator gives {format_scalar(value)} at {format_scalar(point)}, convention {format_scalar(expected)}")
    return expected


@dataclass
class DualityClosure:
    right: SbpReport
    left_of_duals: SbpReport

    @property
    def matches(self) -> bool:
        r, l = self.right, self.left_of_duals
        return r.lhs == l.lhs and r.rhs_boundary == l.rhs_boundary and r.rhs_sum == l.rhs_sum


def duality_closure(f: GridFunction, g: GridFunction, alpha) -> DualityClosure:
    """SBP_CAPUTO_RIGHT on ``(f, g)`` next to SBP_CAPUTO_LEFT on ``(f*, g*)`` over ``{-b..-a}``."""
    right = sbp("SBP_CAPUTO_RIGHT", f, g, alpha)
    left = sbp("SBP_CAPUTO_LEFT", symmetric_dual(f), symmetric_dual(g), alpha)
    return DualityClosure(right, left)
