"""Hypothesis validation: sign conditions, monotonicity, extrema, partitions.

Checks sample a Chebyshev-spaced grid (endpoints included) and refine around
the worst point with a golden-section search.  Derivatives follow the
one-sided convention of the instance: with the right-derivative convention,
jets are right-sided on [a, b) and left-sided at b; the left-derivative
convention mirrors this.  Grid scanning is a heuristic, not a rigorous
global optimizer; the families exercised here are piecewise-smooth and mild.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArityMismatch, NonPositiveBase
from .expr import Expression, Interval, const, product
from .jets import eval_grid, jet_grid

DEFAULT_GRID_SIZE = 1025
DEFAULT_HYP_TOL = 1e-9

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_GOLDEN_ITERS = 80


@dataclass(frozen=True)
class ConditionReport:
    condition_id: str
    passed: bool
    worst_margin: float
    worst_point: float
    grid_size: int


@dataclass(frozen=True)
class PartitionSpec:
    """Partition of {1..n} into I and its complement J."""

    n: int
    I: frozenset

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("partition needs n >= 2")
        if not all(isinstance(i, int) and 1 <= i <= self.n for i in self.I):
            raise ValueError(f"I must be a subset of 1..{self.n}, got {sorted(self.I)}")

    @classmethod
    def from_indices(cls, n: int, indices) -> "PartitionSpec":
        return cls(n=n, I=frozenset(int(i) for i in indices))

    @property
    def J(self) -> frozenset:
        return frozenset(range(1, self.n + 1)) - self.I

    def lower_J(self, k: int) -> list:
        """{j in J : j >= k+1}, sorted."""
        return sorted(j for j in self.J if j >= k + 1)

    def upper_J(self, k: int) -> list:
        """{j in J : j <= k+1}, sorted."""
        return sorted(j for j in self.J if j <= k + 1)


def chebyshev_grid(interval: Interval, size: int) -> np.ndarray:
    if size < 2 or interval.a == interval.b:
        return np.array([interval.a, interval.b]) if interval.a != interval.b else np.array([interval.a])
    mid = interval.midpoint()
    half = 0.5 * interval.width
    angles = np.pi * np.arange(size) / (size - 1)
    xs = mid - half * np.cos(angles)
    xs[0], xs[-1] = interval.a, interval.b
    return xs


def golden_min(fn, lo: float, hi: float, iters: int = _GOLDEN_ITERS):
    """Golden-section minimization of a scalar function on [lo, hi]."""
    a, b = lo, hi
    h = b - a
    if h <= 0:
        return lo, fn(lo)
    c = b - _INV_PHI * h
    d = a + _INV_PHI * h
    yc, yd = fn(c), fn(d)
    for _ in range(iters):
        if yc < yd:
            b, d, yd = d, c, yc
            h = b - a
            c = b - _INV_PHI * h
            yc = fn(c)
        else:
            a, c, yc = c, d, yd
            h = b - a
            d = a + _INV_PHI * h
            yd = fn(d)
    return (c, yc) if yc < yd else (d, yd)


def scan_minimum(fn_vec, interval: Interval, grid_size: int, refine: bool = True):
    """Minimum of a vectorized function: grid scan plus local refinement."""
    xs = chebyshev_grid(interval, grid_size)
    vals = np.asarray(fn_vec(xs), dtype=np.float64)
    if np.isnan(vals).all():
        return math.nan, float(interval.a)
    idx = int(np.nanargmin(vals))
    best_x, best_v = float(xs[idx]), float(vals[idx])
    if refine and len(xs) > 1:
        lo = float(xs[max(idx - 1, 0)])
        hi = float(xs[min(idx + 1, len(xs) - 1)])
        if hi > lo:
            rx, rv = golden_min(lambda x: float(fn_vec(np.array([x]))[0]), lo, hi)
            if rv < best_v:
                best_x, best_v = float(rx), float(rv)
    return best_v, best_x


def grid_condition(
    condition_id: str,
    margin_fn,
    interval: Interval,
    tol: float = DEFAULT_HYP_TOL,
    grid_size: int = DEFAULT_GRID_SIZE,
    strict: bool = False,
) -> ConditionReport:
    """Report on ``margin_fn >= 0`` over the interval (``> 0`` when strict)."""
    worst, point = scan_minimum(margin_fn, interval, grid_size)
    passed = worst > tol if strict else worst >= -tol
    if math.isnan(worst):
        passed = False
    return ConditionReport(condition_id, bool(passed), worst, point, grid_size)


def pointwise_condition(condition_id: str, margin: float, point: float, tol: float, strict: bool = False) -> ConditionReport:
    passed = margin > tol if strict else margin >= -tol
    if math.isnan(margin):
        passed = False
    return ConditionReport(condition_id, bool(passed), float(margin), float(point), 1)


def onesided_derivative(
    expr: Expression,
    xs: np.ndarray,
    order: int,
    interval: Interval,
    side: str = "right",
) -> np.ndarray:
    """Derivative of the given order at each point, under the side convention."""
    if side not in ("right", "left"):
        raise ValueError(f"side convention must be 'right' or 'left', got {side!r}")
    main = side
    rows = jet_grid(expr, xs, order, main)[order]
    if expr.tape().has_kinks:
        flip_at = interval.b if side == "right" else interval.a
        other = "left" if side == "right" else "right"
        mask = xs == flip_at
        if mask.any():
            rows = rows.copy()
            rows[mask] = jet_grid(expr, xs[mask], order, other)[order]
    return rows


def check_sign(
    expr: Expression,
    derivative_order: int,
    interval: Interval,
    sign: str,
    side: str = "right",
    tol: float = DEFAULT_HYP_TOL,
    grid_size: int = DEFAULT_GRID_SIZE,
    condition_id: str | None = None,
) -> ConditionReport:
    """Check a sign condition on a derivative over the closed interval.

    ``sign`` is one of nonneg, nonpos, strict-pos; the worst margin is the
    minimum of the signed quantity that must stay >= 0 (or > 0).
    """
    if sign not in ("nonneg", "nonpos", "strict-pos"):
        raise ValueError(f"unknown sign requirement {sign!r}")
    flip = -1.0 if sign == "nonpos" else 1.0

    def margin(xs):
        return flip * onesided_derivative(expr, xs, derivative_order, interval, side)

    cid = condition_id or f"sign_d{derivative_order}_{sign}"
    return grid_condition(cid, margin, interval, tol, grid_size, strict=(sign == "strict-pos"))


def check_monotone(
    expr: Expression,
    interval: Interval,
    direction: str,
    side: str = "right",
    tol: float = DEFAULT_HYP_TOL,
    grid_size: int = DEFAULT_GRID_SIZE,
    condition_id: str | None = None,
    value_order: int = 0,
) -> ConditionReport:
    """Monotonicity via the one-sided derivative, cross-checked by grid slopes.

    ``value_order`` > 0 checks monotonicity of that derivative instead of the
    function itself (e.g. 1 for an increasing first derivative).
    """
    if direction not in ("increasing", "decreasing"):
        raise ValueError(f"unknown direction {direction!r}")
    flip = 1.0 if direction == "increasing" else -1.0

    def margin(xs):
        return flip * onesided_derivative(expr, xs, value_order + 1, interval, side)

    cid = condition_id or f"monotone_{direction}"
    report = grid_condition(cid, margin, interval, tol, grid_size)

    # pairwise slopes of the values catch kink artifacts the jets sit on;
    # cushion differences by a few ulps so that rounding wobble across the
    # tiny end-of-grid gaps cannot fail a genuinely monotone function
    xs = chebyshev_grid(interval, grid_size)
    if len(xs) > 1:
        vals = onesided_derivative(expr, xs, value_order, interval, side) if value_order else eval_grid(expr, xs)
        eps = np.finfo(np.float64).eps
        cushion = 8.0 * eps * np.maximum(np.abs(vals[:-1]), np.abs(vals[1:]))
        slopes = (flip * np.diff(vals) + cushion) / np.diff(xs)
        i = int(np.argmin(slopes))
        slope_worst = float(slopes[i])
        if slope_worst < report.worst_margin:
            passed = slope_worst >= -tol
            report = ConditionReport(cid, bool(passed), slope_worst, float(xs[i]), grid_size)
    return report


def extremum(
    expr_or_fn,
    interval: Interval,
    kind: str,
    grid_size: int = DEFAULT_GRID_SIZE,
):
    """Infimum or supremum (value, argpoint) over the closed interval."""
    if kind not in ("inf", "sup"):
        raise ValueError(f"kind must be 'inf' or 'sup', got {kind!r}")
    if isinstance(expr_or_fn, Expression):
        fn = lambda xs: eval_grid(expr_or_fn, xs)
    else:
        fn = expr_or_fn
    if kind == "inf":
        value, point = scan_minimum(fn, interval, grid_size)
        return value, point
    value, point = scan_minimum(lambda xs: -np.asarray(fn(xs)), interval, grid_size)
    return -value, point


# ---------------------------------------------------------------------------
# Partition conditions


def weighted_product(factors) -> Expression:
    """Product of expr**exponent pairs; exponent 0 factors drop out."""
    parts = []
    for expr, exponent in factors:
        exponent = int(exponent)
        if exponent == 0:
            continue
        parts.append(expr if exponent == 1 else expr.pow(exponent))
    return product(parts) if parts else const(1.0)


def _guard_negative_exponents(
    factors, interval: Interval, side: str, tol: float, grid_size: int
):
    for expr, exponent in factors:
        if exponent < 0:
            rep = check_sign(expr, 0, interval, "strict-pos", side, tol, grid_size)
            if not rep.passed:
                raise NonPositiveBase(
                    f"negative exponent {exponent} on a function not strictly positive "
                    f"(worst value {rep.worst_margin} at x={rep.worst_point})"
                )


def check_partition_conditions(
    g: Expression,
    h_list,
    partition: PartitionSpec,
    interval: Interval,
    side: str = "right",
    tol: float = DEFAULT_HYP_TOL,
    grid_size: int = DEFAULT_GRID_SIZE,
) -> list:
    """The three monotonicity conditions tying the weights to the partition.

    Returns one report for (i), one per k = 1..n-1 for (ii) and one per
    k = 0..n-2 for (iii); empty products are the constant 1 and pass.
    """
    n = partition.n
    if len(h_list) != n:
        raise ArityMismatch(f"expected {n} weight functions, got {len(h_list)}")
    h = {i: h_list[i - 1] for i in range(1, n + 1)}

    reports = []
    first = g * product(h[i] for i in sorted(partition.I))
    reports.append(
        check_monotone(first, interval, "increasing", side, tol, grid_size, "partition_i")
    )
    for k in range(1, n):
        factors = [(h[i], i) for i in sorted(partition.I)]
        factors += [(h[j], j - k) for j in partition.lower_J(k)]
        _guard_negative_exponents(factors, interval, side, tol, grid_size)
        expr = weighted_product(factors)
        reports.append(
            check_monotone(expr, interval, "decreasing", side, tol, grid_size, f"partition_ii_k{k}")
        )
    for k in range(0, n - 1):
        factors = [(h[j], k + 1 - j) for j in partition.upper_J(k)]
        _guard_negative_exponents(factors, interval, side, tol, grid_size)
        expr = weighted_product(factors)
        reports.append(
            check_monotone(expr, interval, "increasing", side, tol, grid_size, f"partition_iii_k{k}")
        )
    return reports


def check_partition_shortcut(
    g: Expression,
    h_list,
    partition: PartitionSpec,
    interval: Interval,
    side: str = "right",
    tol: float = DEFAULT_HYP_TOL,
    grid_size: int = DEFAULT_GRID_SIZE,
) -> ConditionReport:
    """Sufficient condition: h_1 h_2^2 ... h_n^n decreasing, and every h_j
    with j in J increasing and strictly positive.  Passing implies the
    (ii)/(iii) conditions pass."""
    n = partition.n
    if len(h_list) != n:
        raise ArityMismatch(f"expected {n} weight functions, got {len(h_list)}")
    stacked = weighted_product((h_list[i - 1], i) for i in range(1, n + 1))
    parts = [check_monotone(stacked, interval, "decreasing", side, tol, grid_size, "shortcut_stack")]
    for j in sorted(partition.J):
        parts.append(
            check_monotone(h_list[j - 1], interval, "increasing", side, tol, grid_size, f"shortcut_h{j}_incr")
        )
        parts.append(
            check_sign(h_list[j - 1], 0, interval, "strict-pos", side, tol, grid_size, f"shortcut_h{j}_pos")
        )
    worst = min(parts, key=lambda r: r.worst_margin)
    return ConditionReport(
        "partition_shortcut",
        all(r.passed for r in parts),
        worst.worst_margin,
        worst.worst_point,
        grid_size,
    )


def check_growth(case_id: str, instance, tol: float = DEFAULT_HYP_TOL, grid_size: int = DEFAULT_GRID_SIZE) -> ConditionReport:
    """Growth condition of the given catalog case for this instance."""
    from . import catalog

    return catalog.growth_report(case_id, instance, tol=tol, grid_size=grid_size)
