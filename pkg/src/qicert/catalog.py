"""Catalog of verifiable integral-inequality cases.

Each case bundles its hypothesis checks, constant computations and the
left/right-hand sides of the inequality.  Evaluation first validates every
hypothesis on the instance; only when all of them pass are the two sides
computed with error-controlled quadrature and compared:

    certified  margin exceeds the summed quadrature error bounds
    tight      margin within the error band (genuine equality cases)
    indeterminate  quadrature failed to converge, or the margin is negative
    hypotheses_failed  at least one hypothesis check failed

Chained statements are split into links, each carrying its own numbers; a
case passes only if every link does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .conditions import (
    DEFAULT_GRID_SIZE,
    DEFAULT_HYP_TOL,
    ConditionReport,
    PartitionSpec,
    check_monotone,
    check_partition_conditions,
    check_sign,
    extremum,
    grid_condition,
    pointwise_condition,
    scan_minimum,
)
from .errors import DegenerateScaling, DomainError, InvalidParams, UnknownCase
from .expr import Expression, Interval, Log, const, parse, serialize
from .jets import eval_grid, jet_grid
from .quadrature import integrate

E_CONST = math.e


@dataclass(frozen=True)
class Config:
    """Tolerances and grid sizes shared by all checks and evaluations."""

    quad_tol: float = 1e-10
    hyp_tol: float = DEFAULT_HYP_TOL
    verdict_tol: float = 1e-9
    grid_size: int = DEFAULT_GRID_SIZE
    max_panels: int = 10_000


DEFAULT_CONFIG = Config()


@dataclass(frozen=True)
class CaseInstance:
    case_id: str
    interval: Interval
    params: dict
    functions: dict
    side: str = "right"


@dataclass(frozen=True)
class ConstantsBundle:
    M: float | None = None
    m: tuple | None = None
    A: float | None = None
    C: float | None = None
    K: float | None = None
    L: float | None = None
    beta: float | None = None
    g_supnorm: float | None = None


@dataclass(frozen=True)
class LinkResult:
    label: str
    lhs: float
    rhs: float
    lhs_error: float
    rhs_error: float
    margin: float
    verdict: str


@dataclass(frozen=True)
class VerificationResult:
    case_id: str
    lhs: float
    rhs: float
    lhs_error: float
    rhs_error: float
    margin: float
    verdict: str
    constants: ConstantsBundle
    hypothesis_reports: tuple
    links: tuple

    @property
    def passed(self) -> bool:
        return self.verdict in ("certified", "tight")


@dataclass(frozen=True)
class ScaledRoute:
    corollary_id: str
    base_case: str
    base_instance: CaseInstance
    factor: float
    divisor: float


@dataclass(frozen=True)
class LimitScanRow:
    n: int
    s_n: float
    c_n: float
    lower_lhs: float
    lower_rhs: float
    upper_lhs: float
    upper_rhs: float
    lower_holds: bool
    upper_holds: bool


@dataclass(frozen=True)
class LimitScanResult:
    hypothesis_reports: tuple
    rows: tuple

    @property
    def hypotheses_passed(self) -> bool:
        return all(r.passed for r in self.hypothesis_reports)


# ---------------------------------------------------------------------------
# small helpers


def _fn(expr: Expression):
    return lambda xs: eval_grid(expr, xs)


def _dfn(expr: Expression, order: int, side: str):
    jside = "right" if side == "right" else "left"
    return lambda xs: jet_grid(expr, xs, order, jside)[order]


def _endpoint_deriv(expr: Expression, interval: Interval, point: float, order: int) -> float:
    # interior-limit derivative: right-sided at a, left-sided at b
    side = "right" if point == interval.a else "left"
    return float(jet_grid(expr, np.array([point]), order, side)[order, 0])


def _value_at(expr: Expression, x: float) -> float:
    return float(eval_grid(expr, np.array([x]))[0])


def _pow_err(value: float, err: float, p: float) -> float:
    """Bound for |t^p - value^p| over |t - value| <= err (nonnegative base)."""
    if err == 0.0:
        return 0.0
    v = abs(value)
    hi = (v + err) ** p - v ** p
    lo = v ** p - max(v - err, 0.0) ** p
    return max(hi, lo)


def _integral(fn, interval: Interval, cfg: Config):
    """Integral with magnitude-aware absolute tolerance.

    Requests quad_tol in absolute terms for O(1) integrals and relative
    quad_tol for large ones, so huge-power integrands stay convergent.
    """
    if interval.a == interval.b:
        return 0.0, 0.0, True
    from .quadrature import coarse_abs_estimate

    rough = coarse_abs_estimate(fn, interval)
    tol = cfg.quad_tol * max(1.0, rough)
    res = integrate(fn, interval, tol, cfg.max_panels)
    return res.value, res.abs_error_estimate, res.converged


def _mk_link(label, lhs, lhs_err, rhs, rhs_err, cfg, converged=True) -> LinkResult:
    margin = rhs - lhs
    band = lhs_err + rhs_err + cfg.verdict_tol
    if not converged or math.isnan(margin):
        verdict = "indeterminate"
    elif margin > band:
        verdict = "certified"
    elif margin >= -band:
        verdict = "tight"
    else:
        # the inequality appears violated; never claim certified or tight
        verdict = "indeterminate"
    return LinkResult(label, float(lhs), float(rhs), float(lhs_err), float(rhs_err), float(margin), verdict)


def _safe(cid: str, interval: Interval, thunk) -> ConditionReport:
    try:
        return thunk()
    except DomainError:
        return ConditionReport(cid, False, float("-inf"), interval.a, 0)


def _sign(inst, cfg, expr, order, sign, cid, strictly=False):
    return _safe(
        cid,
        inst.interval,
        lambda: check_sign(
            expr, order, inst.interval, sign, inst.side, cfg.hyp_tol, cfg.grid_size, cid
        ),
    )


def _mono(inst, cfg, expr, direction, cid, value_order=0):
    return _safe(
        cid,
        inst.interval,
        lambda: check_monotone(
            expr, inst.interval, direction, inst.side, cfg.hyp_tol, cfg.grid_size, cid, value_order
        ),
    )


def _deriv_signs(inst, cfg, expr, orders, label, sign="nonneg"):
    return [_sign(inst, cfg, expr, i, sign, f"{label}_d{i}_{sign}") for i in orders]


def _param_n(inst) -> int:
    return int(inst.params["n"])


def _param_alpha(inst) -> float:
    return float(inst.params["alpha"])


# ---------------------------------------------------------------------------
# growth conditions: (condition id, lhs_fn, rhs_fn, pointwise_at_a)


def _growth_qi(inst):
    n = _param_n(inst)
    f = inst.functions["f"]
    return ("growth_top_derivative", _dfn(f, n, inst.side), lambda xs: np.full(len(xs), math.factorial(n), dtype=float), False)


def _growth_prop1(inst):
    n, alpha = _param_n(inst), _param_alpha(inst)
    f = inst.functions["f"]
    hs = [inst.functions[f"h_{i}"] for i in range(1, n + 1)]
    fd = _dfn(f, n - 1, inst.side)
    f0 = _fn(f)

    def lhs(xs):
        base = f0(xs)
        if np.any(base <= 0.0):
            raise DomainError("growth condition needs strictly positive f")
        return (n + 1 - alpha) * fd(xs) * np.power(base, n * (1.0 - alpha))

    def rhs(xs):
        out = np.full(len(xs), float(math.factorial(n)))
        for i, h in enumerate(hs, start=1):
            out = out * eval_grid(h, xs) ** i
        return out

    return ("growth_weighted", lhs, rhs, False)


def _growth_fghp(inst):
    n, alpha = _param_n(inst), _param_alpha(inst)
    nu = int(inst.params["nu"])
    f, h, p = inst.functions["f"], inst.functions["h"], inst.functions["p"]
    fd = _dfn(f, n - 1, inst.side)
    f0, h0, p0 = _fn(f), _fn(h), _fn(p)

    def lhs(xs):
        base = f0(xs)
        if np.any(base <= 0.0):
            raise DomainError("growth condition needs strictly positive f")
        return (n + 1 - alpha) * fd(xs) * np.power(base, n * (1.0 - alpha))

    def rhs(xs):
        return math.factorial(n) * h0(xs) * p0(xs) ** nu

    return ("growth_weighted", lhs, rhs, False)


def _growth_prop2(inst):
    n = _param_n(inst)
    f, h = inst.functions["f"], inst.functions["h"]

    def lhs(xs):
        fa = eval_grid(f, xs)
        fpa = jet_grid(f, xs, 1, "right")[1]
        return fa ** (n + 1) * fpa ** n * eval_grid(h, xs)

    def rhs(xs):
        return np.full(len(xs), math.factorial(n) / (n + 1) ** (n - 1))

    return ("growth_at_left_endpoint", lhs, rhs, True)


def _growth_alpha1(inst):
    n, alpha = _param_n(inst), _param_alpha(inst)
    f, g = inst.functions["f"], inst.functions["g"]
    fd = _dfn(f, n - 1, inst.side)
    f0, g0 = _fn(f), _fn(g)

    def lhs(xs):
        gv = g0(xs)
        if np.any(gv <= 0.0):
            raise DomainError("growth condition needs strictly positive g")
        return np.power(gv, alpha - n) * fd(xs)

    def rhs(xs):
        return (math.factorial(n) / (n - 1)) * f0(xs)

    return ("growth_weighted", lhs, rhs, False)


def _growth_alpha2(inst):
    n, alpha = _param_n(inst), _param_alpha(inst)
    f, g = inst.functions["f"], inst.functions["g"]
    fd = _dfn(f, n - 1, inst.side)
    f0 = _fn(f)
    sup_g, _ = extremum(g, inst.interval, "sup")

    def rhs(xs):
        return (math.factorial(n) / (n - 1)) * f0(xs) * sup_g ** (n - alpha)

    return ("growth_supnorm", fd, rhs, False)


def _growth_fgh(inst):
    n = _param_n(inst)
    l = int(inst.params["l"])
    f, g, h = inst.functions["f"], inst.functions["g"], inst.functions["h"]
    fd = _dfn(f, n - 1, inst.side)
    f0, g0, h0 = _fn(f), _fn(g), _fn(h)

    def rhs(xs):
        return (math.factorial(n) / (n - 1)) * f0(xs) * g0(xs) ** (n - l) * h0(xs) ** n

    return ("growth_weighted", fd, rhs, False)


def _growth_fgh1(inst):
    n = _param_n(inst)
    f, g = inst.functions["f"], inst.functions["g"]
    fd = _dfn(f, n - 1, inst.side)
    f0, g0 = _fn(f), _fn(g)

    def lhs(xs):
        return fd(xs) * g0(xs)

    def rhs(xs):
        return (math.factorial(n) / (n - 1)) * f0(xs)

    return ("growth_weighted", lhs, rhs, False)


def _growth_x_minus_a(inst):
    n = _param_n(inst)
    k = int(inst.params["k"])
    f, h = inst.functions["f"], inst.functions["h"]
    a = inst.interval.a
    fd = _dfn(f, k, inst.side)
    h0 = _fn(h)
    coeff = math.factorial(n - 1) / math.factorial(n - k - 1)

    def rhs(xs):
        return np.power(xs - a, n - k - 1) * h0(xs) * coeff

    return ("growth_shifted_power", fd, rhs, False)


# ---------------------------------------------------------------------------
# hypothesis lists


def _endpoint_signs_report(inst, cfg, expr, orders, cid):
    a = inst.interval.a
    table = jet_grid(expr, np.array([a]), max(orders), "right")[:, 0]
    margin = float(min(table[i] for i in orders))
    return pointwise_condition(cid, margin, a, cfg.hyp_tol)


def _hyps_qi(inst, cfg):
    n = _param_n(inst)
    f = inst.functions["f"]
    reports = [
        _safe(
            "initial_derivatives_nonneg",
            inst.interval,
            lambda: _endpoint_signs_report(inst, cfg, f, range(n), "initial_derivatives_nonneg"),
        )
    ]
    reports.append(_growth_check(inst, cfg, _growth_qi))
    return reports


def _growth_check(inst, cfg, builder) -> ConditionReport:
    def run():
        cid, lhs_fn, rhs_fn, pointwise = builder(inst)
        if pointwise:
            a = inst.interval.a
            xs = np.array([a])
            margin = float(lhs_fn(xs)[0] - rhs_fn(xs)[0])
            return pointwise_condition(cid, margin, a, cfg.hyp_tol)
        return grid_condition(
            cid, lambda xs: lhs_fn(xs) - rhs_fn(xs), inst.interval, cfg.hyp_tol, cfg.grid_size
        )

    return _safe("growth", inst.interval, run)


def _hyps_prop1(inst, cfg):
    n = _param_n(inst)
    f, g = inst.functions["f"], inst.functions["g"]
    hs = [inst.functions[f"h_{i}"] for i in range(1, n + 1)]
    reports = [_sign(inst, cfg, f, 0, "strict-pos", "f_strictly_positive")]
    reports += _deriv_signs(inst, cfg, f, range(1, n), "f")
    reports.append(_sign(inst, cfg, g, 0, "nonneg", "g_nonneg"))
    for i, h in enumerate(hs, start=1):
        reports.append(_sign(inst, cfg, h, 0, "nonneg", f"h_{i}_nonneg"))
    part = PartitionSpec.from_indices(n, inst.params.get("partition_I", ()))
    reports += _safe_partition(inst, cfg, g, hs, part)
    reports.append(_growth_check(inst, cfg, _growth_prop1))
    return reports


def _safe_partition(inst, cfg, g, hs, part):
    try:
        return check_partition_conditions(
            g, hs, part, inst.interval, inst.side, cfg.hyp_tol, cfg.grid_size
        )
    except DomainError:
        return [ConditionReport("partition", False, float("-inf"), inst.interval.a, 0)]


def _hyps_fghp(inst, cfg):
    n = _param_n(inst)
    f, g, h, p = (inst.functions[s] for s in ("f", "g", "h", "p"))
    reports = [_sign(inst, cfg, f, 0, "strict-pos", "f_strictly_positive")]
    reports += _deriv_signs(inst, cfg, f, range(1, n), "f")
    reports.append(_sign(inst, cfg, g, 0, "nonneg", "g_nonneg"))
    reports.append(_sign(inst, cfg, h, 0, "nonneg", "h_nonneg"))
    reports.append(_sign(inst, cfg, p, 0, "nonneg", "p_nonneg"))
    reports.append(_mono(inst, cfg, p, "decreasing", "p_decreasing"))
    reports.append(_mono(inst, cfg, h, "increasing", "h_increasing"))
    reports.append(_mono(inst, cfg, g * p, "increasing", "gp_increasing"))
    reports.append(_growth_check(inst, cfg, _growth_fghp))
    return reports


def _hyps_fg1(inst, cfg):
    n = _param_n(inst)
    f, g = inst.functions["f"], inst.functions["g"]
    reports = [_sign(inst, cfg, f, 0, "strict-pos", "f_strictly_positive")]
    reports += _deriv_signs(inst, cfg, f, range(1, n), "f")
    reports.append(_sign(inst, cfg, g, 0, "nonneg", "g_nonneg"))
    reports.append(_mono(inst, cfg, g, "increasing", "g_increasing"))
    return reports


def _hyps_fg2(inst, cfg):
    n = _param_n(inst)
    f, g = inst.functions["f"], inst.functions["g"]
    reports = [_sign(inst, cfg, f, 0, "strict-pos", "f_strictly_positive")]
    reports += _deriv_signs(inst, cfg, f, range(1, n + 1), "f")
    reports.append(_sign(inst, cfg, g, 0, "nonneg", "g_nonneg"))
    reports.append(_mono(inst, cfg, g, "increasing", "g_increasing"))
    return reports


def _hyps_fh(inst, cfg):
    n = _param_n(inst)
    f, h = inst.functions["f"], inst.functions["h"]
    reports = [_sign(inst, cfg, f, 0, "strict-pos", "f_strictly_positive")]
    reports += _deriv_signs(inst, cfg, f, range(1, n - 1), "f")
    reports.append(_sign(inst, cfg, f, n - 1, "strict-pos", "f_top_minus_one_strictly_positive"))
    reports.append(_sign(inst, cfg, f, n, "nonpos", "f_top_nonpos"))
    reports.append(_sign(inst, cfg, h, 0, "nonneg", "h_nonneg"))
    reports.append(_sign(inst, cfg, const(1.0) - h, 0, "nonneg", "h_at_most_one"))
    reports.append(_mono(inst, cfg, h, "increasing", "h_increasing"))
    return reports


def _hyps_fg3(inst, cfg):
    n = _param_n(inst)
    f, g = inst.functions["f"], inst.functions["g"]
    reports = [_sign(inst, cfg, f, 0, "strict-pos", "f_strictly_positive")]
    reports += _deriv_signs(inst, cfg, f, range(1, n + 1), "f")
    reports.append(_sign(inst, cfg, g, 0, "nonneg", "g_nonneg"))
    reports.append(_mono(inst, cfg, g, "increasing", "g_increasing"))
    return reports


def _hyps_prop2(inst, cfg):
    f, g, h = inst.functions["f"], inst.functions["g"], inst.functions["h"]
    reports = [
        _sign(inst, cfg, f, 0, "strict-pos", "f_strictly_positive"),
        _sign(inst, cfg, f, 1, "nonneg", "f_d1_nonneg"),
        _sign(inst, cfg, f, 2, "nonneg", "f_d2_nonneg"),
        _sign(inst, cfg, g, 0, "nonneg", "g_nonneg"),
        _mono(inst, cfg, g, "increasing", "g_increasing"),
        _sign(inst, cfg, h, 0, "nonneg", "h_nonneg"),
        _mono(inst, cfg, h, "increasing", "h_increasing"),
        _growth_check(inst, cfg, _growth_prop2),
    ]
    return reports


def _fprime_at_a_positive(inst, cfg):
    f = inst.functions["f"]
    margin = _endpoint_deriv(f, inst.interval, inst.interval.a, 1)
    return pointwise_condition("f_d1_at_a_strictly_positive", margin, inst.interval.a, cfg.hyp_tol, strict=True)


def _hyps_g_over_f(inst, cfg):
    f, g = inst.functions["f"], inst.functions["g"]
    return [
        _sign(inst, cfg, f, 0, "strict-pos", "f_strictly_positive"),
        _safe("f_d1_at_a_strictly_positive", inst.interval, lambda: _fprime_at_a_positive(inst, cfg)),
        _sign(inst, cfg, f, 2, "nonneg", "f_d2_nonneg"),
        _sign(inst, cfg, g, 0, "nonneg", "g_nonneg"),
        _mono(inst, cfg, g, "increasing", "g_increasing"),
    ]


def _hyps_lemma_1_over_e(inst, cfg):
    f, g = inst.functions["f"], inst.functions["g"]
    return [
        _sign(inst, cfg, f, 0, "strict-pos", "f_strictly_positive"),
        _mono(inst, cfg, f, "increasing", "f_d1_increasing", value_order=1),
        _safe("f_d1_at_a_strictly_positive", inst.interval, lambda: _fprime_at_a_positive(inst, cfg)),
        _sign(inst, cfg, g, 0, "nonneg", "g_nonneg"),
        _mono(inst, cfg, g, "increasing", "g_increasing"),
    ]


def _hyps_lemma_exp(inst, cfg):
    return []


def _log_convex_report(inst, cfg):
    f = inst.functions["f"]
    logf = Expression(Log(f.root))
    return _sign(inst, cfg, logf, 2, "nonneg", "log_f_convex")


def _hyps_log12(inst, cfg, convex: bool):
    reports = _hyps_g_over_f_f_only(inst, cfg)
    if convex:
        reports.append(_log_convex_report(inst, cfg))
    return reports


def _hyps_g_over_f_f_only(inst, cfg):
    f = inst.functions["f"]
    return [
        _sign(inst, cfg, f, 0, "strict-pos", "f_strictly_positive"),
        _safe("f_d1_at_a_strictly_positive", inst.interval, lambda: _fprime_at_a_positive(inst, cfg)),
        _sign(inst, cfg, f, 2, "nonneg", "f_d2_nonneg"),
    ]


def _hyps_log3(inst, cfg):
    f = inst.functions["f"]
    return [
        _sign(inst, cfg, f, 0, "strict-pos", "f_strictly_positive"),
        _sign(inst, cfg, f, 1, "strict-pos", "f_d1_strictly_positive"),
        _log_convex_report(inst, cfg),
    ]


def _hyps_alpha1(inst, cfg):
    n = _param_n(inst)
    f, g = inst.functions["f"], inst.functions["g"]
    reports = _deriv_signs(inst, cfg, f, range(0, n - 1), "f")
    reports.append(_sign(inst, cfg, g, 0, "strict-pos", "g_strictly_positive"))
    reports.append(_mono(inst, cfg, g, "increasing", "g_increasing"))
    reports.append(_growth_check(inst, cfg, _growth_alpha1))
    return reports


def _hyps_cor_alpha1(inst, cfg):
    n = _param_n(inst)
    f = inst.functions["f"]
    reports = _deriv_signs(inst, cfg, f, range(0, n - 1), "f")
    reports.append(_sign(inst, cfg, f, n - 1, "strict-pos", "f_top_minus_one_strictly_positive"))
    return reports


def _hyps_alpha2(inst, cfg):
    n = _param_n(inst)
    f, g = inst.functions["f"], inst.functions["g"]
    reports = _deriv_signs(inst, cfg, f, range(0, n - 1), "f")
    reports.append(_sign(inst, cfg, g, 0, "strict-pos", "g_strictly_positive"))
    reports.append(_mono(inst, cfg, g, "increasing", "g_increasing"))
    reports.append(_growth_check(inst, cfg, _growth_alpha2))
    return reports


def _hyps_fgh(inst, cfg):
    n = _param_n(inst)
    f, g, h = inst.functions["f"], inst.functions["g"], inst.functions["h"]
    reports = _deriv_signs(inst, cfg, f, range(0, n - 1), "f")
    reports.append(_sign(inst, cfg, g, 0, "nonneg", "g_nonneg"))
    reports.append(_sign(inst, cfg, h, 0, "nonneg", "h_nonneg"))
    reports.append(_mono(inst, cfg, g, "increasing", "g_increasing"))
    reports.append(_mono(inst, cfg, h, "decreasing", "h_decreasing"))
    reports.append(_mono(inst, cfg, g * h, "decreasing", "gh_decreasing"))
    reports.append(_growth_check(inst, cfg, _growth_fgh))
    return reports


def _hyps_fgh1(inst, cfg):
    n = _param_n(inst)
    f, g = inst.functions["f"], inst.functions["g"]
    reports = _deriv_signs(inst, cfg, f, range(0, n - 1), "f")
    reports.append(_sign(inst, cfg, g, 0, "strict-pos", "g_strictly_positive"))
    reports.append(_mono(inst, cfg, g, "increasing", "g_increasing"))
    reports.append(_growth_check(inst, cfg, _growth_fgh1))
    return reports


def _ratio_increasing_report(inst, cfg):
    n = _param_n(inst)
    f = inst.functions["f"]
    jside = "right" if inst.side == "right" else "left"

    def margin(xs):
        rows = jet_grid(f, xs, n, jside)
        den = rows[n - 1]
        if np.any(den == 0.0):
            raise DomainError("ratio check needs nonvanishing f^(n-1)")
        return (rows[1] * rows[n - 1] - rows[0] * rows[n]) / den ** 2

    return grid_condition("f_over_top_minus_one_increasing", margin, inst.interval, cfg.hyp_tol, cfg.grid_size)


def _hyps_fgh2(inst, cfg):
    n = _param_n(inst)
    f = inst.functions["f"]
    reports = [_sign(inst, cfg, f, 0, "strict-pos", "f_strictly_positive")]
    reports += _deriv_signs(inst, cfg, f, range(1, n - 1), "f")
    reports.append(_sign(inst, cfg, f, n - 1, "strict-pos", "f_top_minus_one_strictly_positive"))
    reports.append(
        _safe("f_over_top_minus_one_increasing", inst.interval, lambda: _ratio_increasing_report(inst, cfg))
    )
    return reports


def _hyps_x_minus_a(inst, cfg):
    k = int(inst.params["k"])
    f, g, h = inst.functions["f"], inst.functions["g"], inst.functions["h"]
    reports = _deriv_signs(inst, cfg, f, range(0, k), "f")
    reports.append(_sign(inst, cfg, g, 0, "nonneg", "g_nonneg"))
    reports.append(_mono(inst, cfg, g, "increasing", "g_increasing"))
    reports.append(_sign(inst, cfg, h, 0, "strict-pos", "h_strictly_positive"))
    reports.append(_mono(inst, cfg, h, "increasing", "h_increasing"))
    reports.append(_growth_check(inst, cfg, _growth_x_minus_a))
    return reports


# ---------------------------------------------------------------------------
# constants


def _k_constant(inst, power_a: float) -> float:
    """K-style endpoint constant: f(a)^power_a for alpha >= 0, split across
    both endpoints for alpha < 0."""
    alpha = _param_alpha(inst)
    f = inst.functions["f"]
    fa = _value_at(f, inst.interval.a)
    if alpha >= 0:
        return fa ** power_a
    fb = _value_at(f, inst.interval.b)
    if fb <= 0.0:
        raise DomainError("endpoint constant needs f(b) > 0 for negative alpha")
    return fa ** (power_a - alpha) * fb ** alpha


def _consts_prop1(inst, cfg):
    n = _param_n(inst)
    g = inst.functions["g"]
    hs = [inst.functions[f"h_{i}"] for i in range(1, n + 1)]
    K = _k_constant(inst, n + 1)
    M, _ = extremum(g, inst.interval, "inf", cfg.grid_size)
    ms = tuple(extremum(h, inst.interval, "inf", cfg.grid_size)[0] for h in hs)
    return ConstantsBundle(K=K, M=M, m=ms)


def _consts_fghp(inst, cfg):
    K = _k_constant(inst, _param_n(inst) + 1)
    M, _ = extremum(inst.functions["g"], inst.interval, "inf", cfg.grid_size)
    return ConstantsBundle(K=K, M=M)


def _consts_fg1(inst, cfg):
    n, alpha = _param_n(inst), _param_alpha(inst)
    f = inst.functions["f"]
    K = _k_constant(inst, n + 1)
    jside = "right" if inst.side == "right" else "left"

    def afun(xs):
        rows = jet_grid(f, xs, n - 1, jside)
        base = rows[0]
        if np.any(base <= 0.0):
            raise DomainError("A needs strictly positive f")
        return rows[n - 1] * np.power(base, n * (1.0 - alpha))

    A, _ = extremum(afun, inst.interval, "inf", cfg.grid_size)
    return ConstantsBundle(K=K, A=A)


def _consts_fg2(inst, cfg):
    alpha = _param_alpha(inst)
    f = inst.functions["f"]
    K = _k_constant(inst, _param_n(inst) + 1)
    C = _value_at(f, inst.interval.a if alpha <= 1 else inst.interval.b)
    return ConstantsBundle(K=K, C=C)


def _consts_fg3(inst, cfg):
    n, alpha = _param_n(inst), _param_alpha(inst)
    beta = n * (1.0 - alpha) + alpha
    L = _k_constant(inst, n * beta + 1)
    return ConstantsBundle(L=L, beta=beta)


def _consts_alpha2(inst, cfg):
    alpha = _param_alpha(inst)
    g = inst.functions["g"]
    # g is increasing by hypothesis, so its sup-norm sits at b
    gb = _value_at(g, inst.interval.b)
    ga = _value_at(g, inst.interval.a)
    if alpha >= 0:
        K = ga ** alpha
    else:
        if gb <= 0.0:
            raise DomainError("K needs g(b) > 0 for negative alpha")
        K = gb ** alpha
    return ConstantsBundle(K=K, g_supnorm=gb)


def _consts_cor_alpha1(inst, cfg):
    n = _param_n(inst)
    f = inst.functions["f"]
    jside = "right" if inst.side == "right" else "left"

    def ratio(xs):
        rows = jet_grid(f, xs, n - 1, jside)
        den = rows[n - 1]
        if np.any(den <= 0.0):
            raise DomainError("A needs strictly positive f^(n-1)")
        return rows[0] / den

    A, _ = extremum(ratio, inst.interval, "sup", cfg.grid_size)
    return ConstantsBundle(A=A)


def _consts_none(inst, cfg):
    return ConstantsBundle()


# ---------------------------------------------------------------------------
# links (lhs/rhs evaluation)


def _links_qi(inst, consts, cfg):
    n = _param_n(inst)
    f = inst.functions["f"]
    I1, e1, c1 = _integral(_fn(f), inst.interval, cfg)
    f0 = _fn(f)
    I2, e2, c2 = _integral(lambda xs: f0(xs) ** (n + 2), inst.interval, cfg)
    lhs = I1 ** (n + 1)
    return (_mk_link("main", lhs, _pow_err(I1, e1, n + 1), I2, e2, cfg, c1 and c2),)


def _links_prop1(inst, consts, cfg):
    n, alpha = _param_n(inst), _param_alpha(inst)
    f, g = inst.functions["f"], inst.functions["g"]
    hs = [inst.functions[f"h_{i}"] for i in range(1, n + 1)]
    f0, g0 = _fn(f), _fn(g)
    hv = [_fn(h) for h in hs]

    def integrand1(xs):
        out = np.power(f0(xs), alpha) * g0(xs)
        for h in hv:
            out = out * h(xs)
        return out

    def integrand2(xs):
        out = f0(xs) ** (n + 1) * g0(xs) ** n
        for i, h in enumerate(hv, start=1):
            if n - i:
                out = out * h(xs) ** (n - i)
        return out

    I1, e1, c1 = _integral(integrand1, inst.interval, cfg)
    I2, e2, c2 = _integral(integrand2, inst.interval, cfg)
    prod_m = 1.0
    for i, mi in enumerate(consts.m, start=1):
        prod_m *= mi ** (n - i)
    term1 = inst.interval.width * consts.K * consts.M ** n * prod_m
    lhs = term1 + I1 ** n
    return (_mk_link("main", lhs, _pow_err(I1, e1, n), I2, e2, cfg, c1 and c2),)


def _links_fghp(inst, consts, cfg):
    n, alpha = _param_n(inst), _param_alpha(inst)
    nu = int(inst.params["nu"])
    f, g, h, p = (inst.functions[s] for s in ("f", "g", "h", "p"))
    f0, g0, h0, p0 = _fn(f), _fn(g), _fn(h), _fn(p)
    I1, e1, c1 = _integral(lambda xs: np.power(f0(xs), alpha) * g0(xs) * h0(xs) * p0(xs), inst.interval, cfg)
    I2, e2, c2 = _integral(
        lambda xs: f0(xs) ** (n + 1) * g0(xs) ** n * h0(xs) ** (n - 1) * p0(xs) ** (n - nu),
        inst.interval,
        cfg,
    )
    ha = _value_at(h, inst.interval.a)
    pb = _value_at(p, inst.interval.b)
    term1 = inst.interval.width * consts.K * consts.M ** n * ha ** (n - 1) * pb ** (n - nu)
    return (_mk_link("main", term1 + I1 ** n, _pow_err(I1, e1, n), I2, e2, cfg, c1 and c2),)


def _links_fg1(inst, consts, cfg):
    n, alpha = _param_n(inst), _param_alpha(inst)
    f, g = inst.functions["f"], inst.functions["g"]
    f0, g0 = _fn(f), _fn(g)
    I1, e1, c1 = _integral(lambda xs: np.power(f0(xs), alpha) * g0(xs), inst.interval, cfg)
    I2, e2, c2 = _integral(lambda xs: f0(xs) ** (n + 1) * g0(xs) ** n, inst.interval, cfg)
    ga = _value_at(g, inst.interval.a)
    coeff = (n + 1 - alpha) * consts.A / math.factorial(n)
    lhs = inst.interval.width * consts.K * ga ** n + coeff * I1 ** n
    return (_mk_link("main", lhs, abs(coeff) * _pow_err(I1, e1, n), I2, e2, cfg, c1 and c2),)


def _links_fg2(inst, consts, cfg):
    n, alpha = _param_n(inst), _param_alpha(inst)
    f, g = inst.functions["f"], inst.functions["g"]
    f0, g0 = _fn(f), _fn(g)
    fd = _dfn(f, n - 1, inst.side)
    I1, e1, c1 = _integral(lambda xs: np.power(f0(xs), alpha) * g0(xs) * fd(xs), inst.interval, cfg)
    I2, e2, c2 = _integral(lambda xs: f0(xs) ** (n + 1) * g0(xs) ** n * fd(xs) ** (n - 1), inst.interval, cfg)
    ga = _value_at(g, inst.interval.a)
    fda = _endpoint_deriv(f, inst.interval, inst.interval.a, n - 1)
    coeff = (n + 1 - alpha) * consts.C ** (n * (1.0 - alpha)) / math.factorial(n)
    lhs = inst.interval.width * consts.K * ga ** n * fda ** (n - 1) + coeff * I1 ** n
    return (_mk_link("main", lhs, abs(coeff) * _pow_err(I1, e1, n), I2, e2, cfg, c1 and c2),)


def _links_fh(inst, consts, cfg):
    n, alpha = _param_n(inst), _param_alpha(inst)
    f, h = inst.functions["f"], inst.functions["h"]
    f0, h0 = _fn(f), _fn(h)
    fd = _dfn(f, n - 1, inst.side)

    def integrand2(xs):
        den = fd(xs)
        if np.any(den == 0.0):
            raise DomainError("integrand needs nonvanishing f^(n-1)")
        return f0(xs) ** (n + 1) * h0(xs) ** (n - 1) / den

    I1, e1, c1 = _integral(lambda xs: np.power(f0(xs), alpha) * h0(xs), inst.interval, cfg)
    I2, e2, c2 = _integral(integrand2, inst.interval, cfg)
    ha = _value_at(h, inst.interval.a)
    fda = _endpoint_deriv(f, inst.interval, inst.interval.a, n - 1)
    coeff = (n + 1 - alpha) * consts.C ** (n * (1.0 - alpha)) / math.factorial(n)
    lhs = inst.interval.width * consts.K * ha ** (n - 1) / fda + coeff * I1 ** n
    return (_mk_link("main", lhs, abs(coeff) * _pow_err(I1, e1, n), I2, e2, cfg, c1 and c2),)


def _links_fg3(inst, consts, cfg):
    n = _param_n(inst)
    beta = consts.beta
    alpha = _param_alpha(inst)
    f, g = inst.functions["f"], inst.functions["g"]
    f0, g0 = _fn(f), _fn(g)
    fd = _dfn(f, n - 1, inst.side)
    I1, e1, c1 = _integral(lambda xs: np.power(f0(xs), beta) * g0(xs) * fd(xs), inst.interval, cfg)
    I2, e2, c2 = _integral(
        lambda xs: np.power(f0(xs), n * beta + 1) * g0(xs) ** n * fd(xs) ** (n - 1), inst.interval, cfg
    )
    ga = _value_at(g, inst.interval.a)
    fda = _endpoint_deriv(f, inst.interval, inst.interval.a, n - 1)
    coeff = (n + 1 - alpha) / math.factorial(n)
    lhs = inst.interval.width * consts.L * ga ** n * fda ** (n - 1) + coeff * I1 ** n
    return (_mk_link("main", lhs, coeff * _pow_err(I1, e1, n), I2, e2, cfg, c1 and c2),)


def _links_prop2(inst, consts, cfg):
    n = _param_n(inst)
    f, g, h = inst.functions["f"], inst.functions["g"], inst.functions["h"]
    f0, g0, h0 = _fn(f), _fn(g), _fn(h)
    I1, e1, c1 = _integral(lambda xs: g0(xs) / f0(xs), inst.interval, cfg)
    I2, e2, c2 = _integral(lambda xs: f0(xs) ** n * g0(xs) ** (n + 1) * h0(xs), inst.interval, cfg)
    a, b = inst.interval.a, inst.interval.b
    term1 = (
        inst.interval.width
        * _value_at(f, a) ** (n + 1)
        * _value_at(g, a) ** (n + 1)
        * _value_at(h, a)
        / _value_at(f, b)
    )
    lhs = term1 + I1 ** (n + 1)
    return (_mk_link("main", lhs, _pow_err(I1, e1, n + 1), I2, e2, cfg, c1 and c2),)


def _links_g_over_f(inst, consts, cfg):
    n = _param_n(inst)
    f, g = inst.functions["f"], inst.functions["g"]
    f0, g0 = _fn(f), _fn(g)
    I1, e1, c1 = _integral(lambda xs: g0(xs) / f0(xs), inst.interval, cfg)
    I2, e2, c2 = _integral(lambda xs: f0(xs) ** n * g0(xs) ** (n + 1), inst.interval, cfg)
    a, b = inst.interval.a, inst.interval.b
    fa = _value_at(f, a)
    fpa = _endpoint_deriv(f, inst.interval, a, 1)
    coeff = fpa ** n * (n + 1) ** (n - 1) / math.factorial(n)
    lhs = inst.interval.width * _value_at(g, a) ** (n + 1) / _value_at(f, b) + coeff * I1 ** (n + 1)
    rhs = I2 / fa ** (n + 1)
    return (
        _mk_link(
            "main", lhs, coeff * _pow_err(I1, e1, n + 1), rhs, e2 / fa ** (n + 1), cfg, c1 and c2
        ),
    )


def limit_factor(n: int) -> float:
    """(n!/(n+1)^(n-1))^(1/(n+1)), the factor converging to 1/e."""
    return math.exp((math.lgamma(n + 1) - (n - 1) * math.log(n + 1)) / (n + 1))


def _limit_links_for_n(inst, cfg, n: int):
    f, g = inst.functions["f"], inst.functions["g"]
    f0, g0 = _fn(f), _fn(g)
    a, b = inst.interval.a, inst.interval.b
    T, eT, cT = _integral(lambda xs: f0(xs) ** n * g0(xs) ** (n + 1), inst.interval, cfg)
    L, eL, cL = _integral(lambda xs: g0(xs) / f0(xs), inst.interval, cfg)
    p = 1.0 / (n + 1)
    s_n = max(T, 0.0) ** p
    s_err = _pow_err(max(T, 0.0), eT, p)
    c_n = limit_factor(n)
    upper_rhs = inst.interval.width ** p * _value_at(f, b) ** (n * p) * _value_at(g, b)
    fa = _value_at(f, a)
    fpa = _endpoint_deriv(f, inst.interval, a, 1)
    lower_rhs = s_n * c_n / (fa * fpa ** (n * p))
    lower_rhs_err = s_err * c_n / (fa * fpa ** (n * p))
    upper = _mk_link("upper", s_n, s_err, upper_rhs, 0.0, cfg, cT)
    lower = _mk_link("lower", L, eL, lower_rhs, lower_rhs_err, cfg, cT and cL)
    return s_n, c_n, lower, upper


def _links_limit_scan(inst, consts, cfg):
    n = _param_n(inst)
    _, _, lower, upper = _limit_links_for_n(inst, cfg, n)
    return (upper, lower)


def _links_lemma_1_over_e(inst, consts, cfg):
    f, g = inst.functions["f"], inst.functions["g"]
    f0, g0 = _fn(f), _fn(g)
    I1, e1, c1 = _integral(lambda xs: g0(xs) / f0(xs), inst.interval, cfg)
    a, b = inst.interval.a, inst.interval.b
    fa, fb = _value_at(f, a), _value_at(f, b)
    gb = _value_at(g, b)
    fpa = _endpoint_deriv(f, inst.interval, a, 1)
    mid = (gb / fpa) * math.log(fb / fa)
    top = fb * gb / (E_CONST * fa * fpa)
    return (
        _mk_link("log_bound", I1, e1, mid, 0.0, cfg, c1),
        _mk_link("one_over_e_bound", mid, 0.0, top, 0.0, cfg, True),
    )


def _links_lemma_exp(inst, consts, cfg):
    def margin(xs):
        return np.exp(xs) - np.power(xs, E_CONST)

    _, point = scan_minimum(margin, inst.interval, cfg.grid_size)
    lhs = point ** E_CONST
    rhs = math.exp(point)
    return (_mk_link("power_vs_exponential", lhs, 0.0, rhs, 0.0, cfg, True),)


def _links_log1(inst, consts, cfg):
    n = _param_n(inst)
    f = inst.functions["f"]
    a, b = inst.interval.a, inst.interval.b
    fa, fb = _value_at(f, a), _value_at(f, b)
    fpa = _endpoint_deriv(f, inst.interval, a, 1)
    fpb = _endpoint_deriv(f, inst.interval, b, 1)
    lhs = math.log(fb / fa) ** (n + 1) + math.factorial(n) * inst.interval.width / (n + 1) ** (
        n - 1
    ) * fpa / fb
    rhs = (
        math.factorial(n)
        / (n + 1) ** n
        * (fpb / fpa) ** n
        * (fb ** (n + 1) / fa ** (n + 1) - 1.0)
    )
    return (_mk_link("main", lhs, 0.0, rhs, 0.0, cfg, True),)


def _links_log2(inst, consts, cfg):
    n = _param_n(inst)
    f = inst.functions["f"]
    a, b = inst.interval.a, inst.interval.b
    fa, fb = _value_at(f, a), _value_at(f, b)
    fpa = _endpoint_deriv(f, inst.interval, a, 1)
    fpb = _endpoint_deriv(f, inst.interval, b, 1)
    lhs = (1.0 - fa / fb) ** (n + 1)
    rhs = (
        math.factorial(n)
        / (n + 1) ** (n - 1)
        * ((fpb / fpa) ** n * math.log(fb / fa) - inst.interval.width * fpa / fb)
    )
    return (_mk_link("main", lhs, 0.0, rhs, 0.0, cfg, True),)


def _links_log3(inst, consts, cfg):
    f = inst.functions["f"]
    a, b = inst.interval.a, inst.interval.b
    fa, fb = _value_at(f, a), _value_at(f, b)
    fpa = _endpoint_deriv(f, inst.interval, a, 1)
    fpb = _endpoint_deriv(f, inst.interval, b, 1)
    lhs = 1.0 - fa / fb
    mid = (fpb * fa) / (fb * fpa) * math.log(fb / fa)
    top = fpb / (E_CONST * fpa)
    return (
        _mk_link("ratio_bound", lhs, 0.0, mid, 0.0, cfg, True),
        _mk_link("one_over_e_bound", mid, 0.0, top, 0.0, cfg, True),
    )


def _links_alpha1(inst, consts, cfg):
    n, alpha = _param_n(inst), _param_alpha(inst)
    f, g = inst.functions["f"], inst.functions["g"]
    f0, g0 = _fn(f), _fn(g)
    I1, e1, c1 = _integral(lambda xs: f0(xs) * g0(xs), inst.interval, cfg)
    I2, e2, c2 = _integral(lambda xs: f0(xs) ** n * np.power(g0(xs), alpha), inst.interval, cfg)
    a = inst.interval.a
    lhs = inst.interval.width * _value_at(f, a) ** n * _value_at(g, a) ** alpha + I1 ** n
    return (_mk_link("main", lhs, _pow_err(I1, e1, n), I2, e2, cfg, c1 and c2),)


def _links_cor_alpha1(inst, consts, cfg):
    n = _param_n(inst)
    f = inst.functions["f"]
    f0 = _fn(f)
    I1, e1, c1 = _integral(f0, inst.interval, cfg)
    I2, e2, c2 = _integral(lambda xs: f0(xs) ** n, inst.interval, cfg)
    a = inst.interval.a
    coeff = (n - 1) / (math.factorial(n) * consts.A)
    lhs = inst.interval.width * _value_at(f, a) ** n + coeff * I1 ** n
    return (_mk_link("main", lhs, coeff * _pow_err(I1, e1, n), I2, e2, cfg, c1 and c2),)


def _links_alpha2(inst, consts, cfg):
    n, alpha = _param_n(inst), _param_alpha(inst)
    f, g = inst.functions["f"], inst.functions["g"]
    f0, g0 = _fn(f), _fn(g)
    I1, e1, c1 = _integral(lambda xs: f0(xs) * g0(xs), inst.interval, cfg)
    I2, e2, c2 = _integral(lambda xs: f0(xs) ** n * np.power(g0(xs), alpha), inst.interval, cfg)
    lhs = inst.interval.width * _value_at(f, inst.interval.a) ** n * consts.K + I1 ** n
    return (_mk_link("main", lhs, _pow_err(I1, e1, n), I2, e2, cfg, c1 and c2),)


def _links_fgh(inst, consts, cfg):
    n = _param_n(inst)
    l = int(inst.params["l"])
    f, g, h = inst.functions["f"], inst.functions["g"], inst.functions["h"]
    f0, g0, h0 = _fn(f), _fn(g), _fn(h)
    I1, e1, c1 = _integral(lambda xs: f0(xs) * g0(xs) * h0(xs), inst.interval, cfg)
    I2, e2, c2 = _integral(lambda xs: f0(xs) ** n * g0(xs) ** l, inst.interval, cfg)
    a = inst.interval.a
    lhs = inst.interval.width * _value_at(f, a) ** n * _value_at(g, a) ** l + I1 ** n
    return (_mk_link("main", lhs, _pow_err(I1, e1, n), I2, e2, cfg, c1 and c2),)


def _links_fgh1(inst, consts, cfg):
    n = _param_n(inst)
    f, g = inst.functions["f"], inst.functions["g"]
    f0, g0 = _fn(f), _fn(g)
    I1, e1, c1 = _integral(f0, inst.interval, cfg)
    I2, e2, c2 = _integral(lambda xs: f0(xs) ** n * g0(xs), inst.interval, cfg)
    a = inst.interval.a
    lhs = inst.interval.width * _value_at(f, a) ** n * _value_at(g, a) + I1 ** n
    return (_mk_link("main", lhs, _pow_err(I1, e1, n), I2, e2, cfg, c1 and c2),)


def _links_fgh2(inst, consts, cfg):
    n = _param_n(inst)
    f = inst.functions["f"]
    f0 = _fn(f)
    fd = _dfn(f, n - 1, inst.side)

    def integrand2(xs):
        den = fd(xs)
        if np.any(den == 0.0):
            raise DomainError("integrand needs nonvanishing f^(n-1)")
        return f0(xs) ** (n + 1) / den

    I1, e1, c1 = _integral(f0, inst.interval, cfg)
    I2, e2, c2 = _integral(integrand2, inst.interval, cfg)
    a = inst.interval.a
    fda = _endpoint_deriv(f, inst.interval, a, n - 1)
    coeff = (n - 1) / math.factorial(n)
    lhs = inst.interval.width * _value_at(f, a) ** (n + 1) / fda + coeff * I1 ** n
    return (_mk_link("main", lhs, coeff * _pow_err(I1, e1, n), I2, e2, cfg, c1 and c2),)


def _links_x_minus_a(inst, consts, cfg):
    n = _param_n(inst)
    f, g, h = inst.functions["f"], inst.functions["g"], inst.functions["h"]
    f0, g0, h0 = _fn(f), _fn(g), _fn(h)
    I1, e1, c1 = _integral(lambda xs: f0(xs) * g0(xs) * h0(xs), inst.interval, cfg)
    I2, e2, c2 = _integral(
        lambda xs: f0(xs) ** (n + 1) * g0(xs) ** n * h0(xs) ** (n - 1), inst.interval, cfg
    )
    a = inst.interval.a
    term1 = (
        inst.interval.width
        * _value_at(f, a) ** (n + 1)
        * _value_at(g, a) ** n
        * _value_at(h, a) ** (n - 1)
    )
    lhs = term1 + I1 ** n
    return (_mk_link("main", lhs, _pow_err(I1, e1, n), I2, e2, cfg, c1 and c2),)


# ---------------------------------------------------------------------------
# validation


def _need_int(params, key, low, high=None):
    if key not in params:
        raise InvalidParams(f"missing parameter {key!r}")
    value = params[key]
    if int(value) != value:
        raise InvalidParams(f"parameter {key!r} must be an integer, got {value!r}")
    value = int(value)
    if value < low or (high is not None and value > high):
        bound = f"{low}..{high}" if high is not None else f">= {low}"
        raise InvalidParams(f"parameter {key!r} must be {bound}, got {value}")
    return value


def _need_alpha(params, bound=None, strict_low=None):
    if "alpha" not in params:
        raise InvalidParams("missing parameter 'alpha'")
    alpha = float(params["alpha"])
    if bound is not None and alpha > bound + 1e-12:
        raise InvalidParams(f"alpha must be <= {bound}, got {alpha}")
    if strict_low is not None and alpha <= strict_low:
        raise InvalidParams(f"alpha must be > {strict_low}, got {alpha}")
    return alpha


def _make_validator(case_id, min_n=None, needs_alpha=None, extra=None):
    def validate(inst: CaseInstance):
        params = inst.params
        n = None
        if min_n is not None:
            n = _need_int(params, "n", min_n)
        if needs_alpha == "ratio":
            _need_alpha(params, bound=n / (n - 1))
        elif needs_alpha == "leq1":
            _need_alpha(params, bound=1.0)
        elif needs_alpha == "gt_n":
            _need_alpha(params, strict_low=float(n))
        elif needs_alpha == "leq_n":
            _need_alpha(params, bound=float(n))
        if extra is not None:
            extra(inst, n)

    return validate


def _extra_fghp(inst, n):
    _need_int(inst.params, "nu", 2, n)


def _extra_fgh(inst, n):
    _need_int(inst.params, "l", 1, n)


def _extra_x_minus_a(inst, n):
    _need_int(inst.params, "k", 1, n - 1)


def _extra_prop1(inst, n):
    indices = inst.params.get("partition_I", ())
    PartitionSpec.from_indices(n, indices)


def _extra_lemma_exp(inst, n):
    if inst.interval.a <= 0.0:
        raise InvalidParams("lemma_exp needs an interval within (0, inf)")


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class CaseDef:
    case_id: str
    summary: str
    slots: object  # callable(params) -> tuple of slot names
    validate: object
    hypotheses: object
    constants: object
    links: object
    growth: object = None
    rescale_slot: str | None = None
    rescale_power: object = None  # callable(params) -> homogeneity exponent


def _slots_fixed(*names):
    return lambda params: tuple(names)


def _slots_prop1(params):
    n = int(params.get("n", 0))
    return ("f", "g") + tuple(f"h_{i}" for i in range(1, n + 1))


_CASES: dict = {}


def _register(cd: CaseDef):
    _CASES[cd.case_id] = cd


_register(CaseDef(
    "qi_original",
    "(int f)^(n+1) <= int f^(n+2) when f^(0..n-1)(a) >= 0 and f^(n) >= n!",
    _slots_fixed("f"),
    _make_validator("qi_original", min_n=1),
    _hyps_qi,
    _consts_none,
    _links_qi,
    growth=_growth_qi,
    rescale_slot="f",
    rescale_power=lambda params: 1.0,
))

_register(CaseDef(
    "prop1_general",
    "partitioned-weight inequality: (b-a)KM^n prod m_i^(n-i) + (int f^a g prod h_i)^n <= int f^(n+1) g^n prod h_i^(n-i)",
    _slots_prop1,
    _make_validator("prop1_general", min_n=2, needs_alpha="ratio", extra=_extra_prop1),
    _hyps_prop1,
    _consts_prop1,
    _links_prop1,
    growth=_growth_prop1,
    rescale_slot="f",
    rescale_power=lambda params: params["n"] * (1.0 - params["alpha"]) + 1.0,
))

_register(CaseDef(
    "cor_fghp",
    "three-weight form with increasing h, decreasing p and exponent nu",
    _slots_fixed("f", "g", "h", "p"),
    _make_validator("cor_fghp", min_n=2, needs_alpha="ratio", extra=_extra_fghp),
    _hyps_fghp,
    _consts_fghp,
    _links_fghp,
    growth=_growth_fghp,
    rescale_slot="f",
    rescale_power=lambda params: params["n"] * (1.0 - params["alpha"]) + 1.0,
))

_register(CaseDef(
    "cor_fg1",
    "two-weight bound with A = inf f^(n-1) f^(n(1-alpha))",
    _slots_fixed("f", "g"),
    _make_validator("cor_fg1", min_n=2, needs_alpha="ratio"),
    _hyps_fg1,
    _consts_fg1,
    _links_fg1,
))

_register(CaseDef(
    "cor_fg2",
    "bound with an f^(n-1) weight and endpoint constant C",
    _slots_fixed("f", "g"),
    _make_validator("cor_fg2", min_n=2, needs_alpha="ratio"),
    _hyps_fg2,
    _consts_fg2,
    _links_fg2,
))

_register(CaseDef(
    "cor_fh",
    "bound for int f^(n+1) h^(n-1) / f^(n-1) under a concave top derivative",
    _slots_fixed("f", "h"),
    _make_validator("cor_fh", min_n=2, needs_alpha="ratio"),
    _hyps_fh,
    _consts_fg2,
    _links_fh,
))

_register(CaseDef(
    "cor_fg3",
    "bound with exponent beta = n(1-alpha)+alpha and constant L",
    _slots_fixed("f", "g"),
    _make_validator("cor_fg3", min_n=2, needs_alpha="leq1"),
    _hyps_fg3,
    _consts_fg3,
    _links_fg3,
))

_register(CaseDef(
    "prop2_g_over_f",
    "reciprocal form: (b-a)f^(n+1)(a)g^(n+1)(a)h(a)/f(b) + (int g/f)^(n+1) <= int f^n g^(n+1) h",
    _slots_fixed("f", "g", "h"),
    _make_validator("prop2_g_over_f", min_n=1),
    _hyps_prop2,
    _consts_none,
    _links_prop2,
    growth=_growth_prop2,
    rescale_slot="f",
    rescale_power=lambda params: 2.0 * params["n"] + 1.0,
))

_register(CaseDef(
    "cor_g_over_f",
    "self-scaled reciprocal form with factor (n+1)^(n-1)/n!",
    _slots_fixed("f", "g"),
    _make_validator("cor_g_over_f", min_n=1),
    _hyps_g_over_f,
    _consts_none,
    _links_g_over_f,
))

_register(CaseDef(
    "cor_limit_scan",
    "finite-n bracketing of (int f^n g^(n+1))^(1/(n+1)) between int g/f and f(b)g(b) scales",
    _slots_fixed("f", "g"),
    _make_validator("cor_limit_scan", min_n=1),
    _hyps_g_over_f,
    _consts_none,
    _links_limit_scan,
))

_register(CaseDef(
    "lemma_1_over_e",
    "int g/f <= g(b)/f'(a) log(f(b)/f(a)) <= f(b)g(b)/(e f(a) f'(a))",
    _slots_fixed("f", "g"),
    _make_validator("lemma_1_over_e"),
    _hyps_lemma_1_over_e,
    _consts_none,
    _links_lemma_1_over_e,
))

_register(CaseDef(
    "lemma_exp",
    "x^e <= e^x on (0, inf), equality exactly at x = e",
    _slots_fixed(),
    _make_validator("lemma_exp", extra=_extra_lemma_exp),
    _hyps_lemma_exp,
    _consts_none,
    _links_lemma_exp,
))

_register(CaseDef(
    "cor_log1",
    "(log(f(b)/f(a)))^(n+1) bounded via endpoint derivative ratios",
    _slots_fixed("f"),
    _make_validator("cor_log1", min_n=1),
    lambda inst, cfg: _hyps_log12(inst, cfg, convex=False),
    _consts_none,
    _links_log1,
))

_register(CaseDef(
    "cor_log2",
    "(1 - f(a)/f(b))^(n+1) bound for log-convex f",
    _slots_fixed("f"),
    _make_validator("cor_log2", min_n=1),
    lambda inst, cfg: _hyps_log12(inst, cfg, convex=True),
    _consts_none,
    _links_log2,
))

_register(CaseDef(
    "cor_log3",
    "1 - f(a)/f(b) <= (f'(b)f(a))/(f(b)f'(a)) log(f(b)/f(a)) <= f'(b)/(e f'(a))",
    _slots_fixed("f"),
    _make_validator("cor_log3"),
    _hyps_log3,
    _consts_none,
    _links_log3,
))

_register(CaseDef(
    "prop_alpha1",
    "same-exponent form (int fg)^n vs int f^n g^alpha for alpha > n",
    _slots_fixed("f", "g"),
    _make_validator("prop_alpha1", min_n=2, needs_alpha="gt_n"),
    _hyps_alpha1,
    _consts_none,
    _links_alpha1,
    growth=_growth_alpha1,
    rescale_slot="g",
    rescale_power=lambda params: params["alpha"] - params["n"],
))

_register(CaseDef(
    "cor_alpha1",
    "(b-a)f^n(a) + (n-1)/(n! A) (int f)^n <= int f^n with A = sup f/f^(n-1)",
    _slots_fixed("f"),
    _make_validator("cor_alpha1", min_n=2),
    _hyps_cor_alpha1,
    _consts_cor_alpha1,
    _links_cor_alpha1,
))

_register(CaseDef(
    "prop_alpha2",
    "same-exponent form for alpha <= n with a sup-norm growth condition",
    _slots_fixed("f", "g"),
    _make_validator("prop_alpha2", min_n=2, needs_alpha="leq_n"),
    _hyps_alpha2,
    _consts_alpha2,
    _links_alpha2,
    growth=_growth_alpha2,
    rescale_slot="g",
    rescale_power=lambda params: -(params["n"] - params["alpha"]),
))

_register(CaseDef(
    "prop_fgh",
    "(int fgh)^n vs int f^n g^l with decreasing h and gh",
    _slots_fixed("f", "g", "h"),
    _make_validator("prop_fgh", min_n=2, extra=_extra_fgh),
    _hyps_fgh,
    _consts_none,
    _links_fgh,
    growth=_growth_fgh,
    rescale_slot="h",
    rescale_power=lambda params: -float(params["n"]),
))

_register(CaseDef(
    "cor_fgh1",
    "(int f)^n vs int f^n g for strictly positive increasing g",
    _slots_fixed("f", "g"),
    _make_validator("cor_fgh1", min_n=2),
    _hyps_fgh1,
    _consts_none,
    _links_fgh1,
    growth=_growth_fgh1,
    rescale_slot="g",
    rescale_power=lambda params: 1.0,
))

_register(CaseDef(
    "cor_fgh2",
    "(int f)^n vs int f^(n+1)/f^(n-1) when f/f^(n-1) increases",
    _slots_fixed("f"),
    _make_validator("cor_fgh2", min_n=2),
    _hyps_fgh2,
    _consts_none,
    _links_fgh2,
))

_register(CaseDef(
    "prop_x_minus_a",
    "(int fgh)^n vs int f^(n+1) g^n h^(n-1) under an (x-a)-power growth bound",
    _slots_fixed("f", "g", "h"),
    _make_validator("prop_x_minus_a", min_n=2, extra=_extra_x_minus_a),
    _hyps_x_minus_a,
    _consts_none,
    _links_x_minus_a,
    growth=_growth_x_minus_a,
    rescale_slot="f",
    rescale_power=lambda params: 1.0,
))

CASE_IDS = tuple(_CASES.keys())

_SEVERITY = {"certified": 0, "tight": 1, "indeterminate": 2}


def _case(case_id: str) -> CaseDef:
    try:
        return _CASES[case_id]
    except KeyError:
        raise UnknownCase(f"unknown case id {case_id!r}") from None


def case_summaries() -> list:
    return [(cd.case_id, cd.summary) for cd in _CASES.values()]


def validate_instance(inst: CaseInstance):
    cd = _case(inst.case_id)
    cd.validate(inst)
    if inst.side not in ("right", "left"):
        raise InvalidParams(f"side must be 'right' or 'left', got {inst.side!r}")
    missing = [s for s in cd.slots(inst.params) if s not in inst.functions]
    if missing:
        raise InvalidParams(f"missing function slots: {', '.join(missing)}")


def compute_constants(case_id: str, inst: CaseInstance, cfg: Config = DEFAULT_CONFIG) -> ConstantsBundle:
    cd = _case(case_id)
    validate_instance(replace(inst, case_id=case_id))
    return cd.constants(inst, cfg)


def growth_report(
    case_id: str,
    inst: CaseInstance,
    tol: float = DEFAULT_HYP_TOL,
    grid_size: int = DEFAULT_GRID_SIZE,
) -> ConditionReport:
    cd = _case(case_id)
    if cd.growth is None:
        return ConditionReport("growth_none", True, float("inf"), inst.interval.a, 0)
    cfg = Config(hyp_tol=tol, grid_size=grid_size)
    return _growth_check(inst, cfg, cd.growth)


def evaluate_case(inst: CaseInstance, cfg: Config = DEFAULT_CONFIG) -> VerificationResult:
    """Check all hypotheses, then evaluate and compare both sides."""
    validate_instance(inst)
    cd = _case(inst.case_id)
    reports = tuple(cd.hypotheses(inst, cfg))
    if not all(r.passed for r in reports):
        nan = float("nan")
        return VerificationResult(
            inst.case_id, nan, nan, nan, nan, nan, "hypotheses_failed",
            ConstantsBundle(), reports, (),
        )
    constants = cd.constants(inst, cfg)
    links = tuple(cd.links(inst, constants, cfg))
    verdict = max((link.verdict for link in links), key=lambda v: _SEVERITY[v])
    binding = min(links, key=lambda L: L.margin - (L.lhs_error + L.rhs_error))
    return VerificationResult(
        inst.case_id,
        binding.lhs,
        binding.rhs,
        binding.lhs_error,
        binding.rhs_error,
        binding.margin,
        verdict,
        constants,
        reports,
        links,
    )


# ---------------------------------------------------------------------------
# scaling routes


_SCALED_BASES = {
    "cor_fg1": "prop1_general",
    "cor_g_over_f": "prop2_g_over_f",
    "cor_alpha1": "prop_alpha1",
}


def derive_scaled_case(base_case: str, inst: CaseInstance, cfg: Config = DEFAULT_CONFIG) -> ScaledRoute:
    """Build the transformed instance whose base-case evaluation reproduces
    the corollary after dividing both sides by the returned divisor."""
    expected = _SCALED_BASES.get(inst.case_id)
    if expected is None:
        raise UnknownCase(f"no scaling route for case {inst.case_id!r}")
    if base_case != expected:
        raise InvalidParams(f"case {inst.case_id!r} scales through {expected!r}, not {base_case!r}")
    validate_instance(inst)

    if inst.case_id == "cor_fg1":
        n, alpha = _param_n(inst), _param_alpha(inst)
        denom = n * (1.0 - alpha) + 1.0
        if abs(denom) < 1e-9:
            raise DegenerateScaling(f"scaling exponent denominator n(1-alpha)+1 vanishes at alpha={alpha}")
        A = _consts_fg1(inst, cfg).A
        base_coeff = (n + 1 - alpha) * A / math.factorial(n)
        if not base_coeff > 0.0:
            raise DegenerateScaling(f"scaling needs (n+1-alpha)A/n! > 0, got {base_coeff}")
        c = base_coeff ** (-1.0 / denom)
        one = const(1.0)
        functions = {"f": const(c) * inst.functions["f"], "g": inst.functions["g"]}
        functions.update({f"h_{i}": one for i in range(1, n + 1)})
        base = CaseInstance(
            "prop1_general",
            inst.interval,
            {"n": n, "alpha": alpha, "partition_I": (2,)},
            functions,
            inst.side,
        )
        return ScaledRoute(inst.case_id, expected, base, c, c ** (n + 1))

    if inst.case_id == "cor_g_over_f":
        n = _param_n(inst)
        f = inst.functions["f"]
        fa = _value_at(f, inst.interval.a)
        fpa = _endpoint_deriv(f, inst.interval, inst.interval.a, 1)
        if fa <= 0.0 or fpa <= 0.0:
            raise DegenerateScaling("scaling needs f(a) > 0 and f'(a) > 0")
        c = (math.factorial(n) / ((n + 1) ** (n - 1) * fa ** (n + 1) * fpa ** n)) ** (
            1.0 / (2 * n + 1)
        )
        base = CaseInstance(
            "prop2_g_over_f",
            inst.interval,
            {"n": n},
            {"f": const(c) * f, "g": inst.functions["g"], "h": const(1.0)},
            inst.side,
        )
        return ScaledRoute(inst.case_id, expected, base, c, c ** n * fa ** (n + 1))

    # cor_alpha1
    n = _param_n(inst)
    A = _consts_cor_alpha1(inst, cfg).A
    if not A > 0.0:
        raise DegenerateScaling("scaling needs A = sup f/f^(n-1) > 0")
    gamma = (math.factorial(n) * A / (n - 1)) ** (1.0 / n)
    base = CaseInstance(
        "prop_alpha1",
        inst.interval,
        {"n": n, "alpha": 2.0 * n},
        {"f": inst.functions["f"], "g": const(gamma)},
        inst.side,
    )
    return ScaledRoute(inst.case_id, expected, base, gamma, gamma ** (2 * n))


def limit_scan(inst: CaseInstance, n_max: int, cfg: Config = DEFAULT_CONFIG) -> LimitScanResult:
    """Finite-n records of both bracketing links for n = 1..n_max."""
    if n_max < 1:
        raise InvalidParams("n_max must be >= 1")
    base = replace(inst, case_id="cor_limit_scan", params={"n": 1, **inst.params})
    validate_instance(base)
    reports = tuple(_hyps_g_over_f(base, cfg))
    rows = []
    if all(r.passed for r in reports):
        for n in range(1, n_max + 1):
            s_n, c_n, lower, upper = _limit_links_for_n(base, cfg, n)
            rows.append(
                LimitScanRow(
                    n=n,
                    s_n=s_n,
                    c_n=c_n,
                    lower_lhs=lower.lhs,
                    lower_rhs=lower.rhs,
                    upper_lhs=upper.lhs,
                    upper_rhs=upper.rhs,
                    lower_holds=lower.verdict in ("certified", "tight"),
                    upper_holds=upper.verdict in ("certified", "tight"),
                )
            )
    return LimitScanResult(reports, tuple(rows))


# ---------------------------------------------------------------------------
# instance files


def instance_to_dict(inst: CaseInstance) -> dict:
    data = {"case_id": inst.case_id, "a": inst.interval.a, "b": inst.interval.b}
    for key in ("n", "nu", "l", "k"):
        if key in inst.params:
            data[key] = int(inst.params[key])
    if "alpha" in inst.params:
        data["alpha"] = float(inst.params["alpha"])
    if "partition_I" in inst.params:
        data["partition_I"] = [int(i) for i in inst.params["partition_I"]]
    data["side"] = inst.side
    data["functions"] = {name: serialize(expr) for name, expr in inst.functions.items()}
    return data


def instance_from_dict(data: dict) -> CaseInstance:
    try:
        case_id = data["case_id"]
        interval = Interval(float(data["a"]), float(data["b"]))
    except KeyError as ex:
        raise InvalidParams(f"instance file missing field {ex.args[0]!r}") from None
    params = {}
    for key in ("n", "nu", "l", "k"):
        if data.get(key) is not None:
            params[key] = int(data[key])
    if data.get("alpha") is not None:
        params["alpha"] = float(data["alpha"])
    if data.get("partition_I") is not None:
        params["partition_I"] = tuple(int(i) for i in data["partition_I"])
    functions = {name: parse(text) for name, text in (data.get("functions") or {}).items()}
    return CaseInstance(case_id, interval, params, functions, data.get("side", "right"))
