"""Shared test fixtures: sample functions and the operator domain table."""
from fractions import Fraction as Fr
import math
import random

from dfcalc import Grid, GridFunction


def poly(grid: Grid, coeffs, backend="exact") -> GridFunction:
    return GridFunction.from_callable(grid, lambda t: sum(c * t**k for k, c in enumerate(coeffs)), backend)


def random_rational(grid: Grid, seed: int) -> GridFunction:
    rng = random.Random(seed)
    return GridFunction(grid, [Fr(rng.randint(-20, 20), rng.randint(1, 9)) for _ in range(grid.count)], "exact")


def expected_domain(name: str, a, b, alpha):
    """Output window ``(lo, hi)`` of operator ``name`` on input ``{a..b}`` with default anchors."""
    n = math.ceil(alpha)
    direction, side, flavor = name.split("-")
    if flavor == "sum":
        table = {
            ("delta", "left"): (a + alpha, b + alpha),
            ("delta", "right"): (a - alpha, b - alpha),
            ("nabla", "left"): (a, b),
            ("nabla", "right"): (a, b),
        }
    else:
        # RL and Caputo share their output windows
        table = {
            ("delta", "left"): (a + (n - alpha), b - alpha),
            ("delta", "right"): (a + alpha, b - (n - alpha)),
            ("nabla", "left"): (a + n, b),
            ("nabla", "right"): (a, b - n),
        }
    return table[(direction, side)]
