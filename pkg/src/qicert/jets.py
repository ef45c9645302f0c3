"""Evaluation and Taylor-jet differentiation of expressions.

A jet at an anchor x collects (f(x), f'(x), ..., f^(m)(x)).  Sides select the
one-sided derivative at kinks of abs/min/max; smooth expressions give the
same jet for every side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .expr import Expression

SIDE_CODES = {"right": kernels.SIDE_RIGHT, "left": kernels.SIDE_LEFT, "two-sided": kernels.SIDE_BOTH}

_FACTORIALS = np.array([math.factorial(k) for k in range(32)], dtype=np.float64)


@dataclass(frozen=True)
class Jet:
    """Derivatives of an expression at one anchor, coefficients[k] = f^(k)."""

    anchor: float
    order: int
    side: str
    coefficients: np.ndarray = field(repr=False)

    @property
    def value(self) -> float:
        return float(self.coefficients[0])


def _side_code(side: str) -> int:
    try:
        return SIDE_CODES[side]
    except KeyError:
        raise ValueError(f"side must be one of {sorted(SIDE_CODES)}, got {side!r}") from None


def jet_grid(
    expr: Expression,
    xs: np.ndarray,
    order: int,
    side: str = "two-sided",
    backend: str | None = None,
) -> np.ndarray:
    """Derivative table of shape (order+1, len(xs)); row k holds f^(k)."""
    coeffs = kernels.run_tape(expr.tape(), np.atleast_1d(xs), order, _side_code(side), backend)
    if order >= len(_FACTORIALS):
        scale = np.array([math.factorial(k) for k in range(order + 1)], dtype=np.float64)
    else:
        scale = _FACTORIALS[: order + 1]
    return coeffs * scale[:, None]


def jet(expr: Expression, x: float, order: int, side: str = "two-sided") -> Jet:
    table = jet_grid(expr, np.array([float(x)]), order, side)
    return Jet(anchor=float(x), order=order, side=side, coefficients=table[:, 0].copy())


def eval_grid(expr: Expression, xs: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Pointwise values at an array of points (order-0 jets)."""
    return kernels.run_tape(expr.tape(), np.atleast_1d(xs), 0, kernels.SIDE_BOTH, backend)[0]


def evaluate(expr: Expression, x: float) -> float:
    return float(eval_grid(expr, np.array([float(x)]))[0])
