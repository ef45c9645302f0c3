"""Tape interpreters propagating truncated Taylor series.

Registers hold normalized coefficients u_k = f^(k)(x)/k! for every anchor in
the input array.  Two interpreters implement identical arithmetic: a
vectorized numpy one and a numba-compiled one.  ``QICERT_BACKEND`` selects
(numpy | numba); the default is numba when importable, numpy otherwise.

Series recurrences (w = result, u/v = operands, k >= 1):

    mul:  w_k = sum_{j<=k} u_j v_{k-j}
    div:  w_k = (u_k - sum_{j<k} w_j v_{k-j}) / v_0
    exp:  w_k = (1/k) sum_{j=1..k} j u_j w_{k-j}
    log:  w_k = (u_k - (1/k) sum_{j=1..k-1} j w_j u_{k-j}) / u_0
    pow:  w_k = (1/(k u_0)) sum_{j=1..k} (j (r+1) - k) u_j w_{k-j}

abs/min/max select a branch per point.  At a tie the sign of the first
nonzero series coefficient of the difference decides, adjusted for the
requested side (left side flips the sign of odd-order terms).  A two-sided
request where the sides disagree is a genuine kink and is reported as such.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import DomainError, NonDifferentiable
from .tape import (
    OP_ABS,
    OP_ADD,
    OP_CONST,
    OP_DIV,
    OP_EXP,
    OP_LOG,
    OP_MAX,
    OP_MIN,
    OP_MUL,
    OP_NEG,
    OP_POWR,
    OP_SUB,
    OP_VAR,
    Tape,
)

SIDE_RIGHT = 1
SIDE_LEFT = -1
SIDE_BOTH = 0

STATUS_OK = 0
STATUS_DIV_ZERO = 1
STATUS_LOG_DOMAIN = 2
STATUS_POW_DOMAIN = 3
STATUS_NONDIFF = 4

_resolved_backend: str | None = None

try:
    import numba

    _HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    _HAS_NUMBA = False


def active_backend() -> str:
    """Resolve the backend once: env override first, then availability."""
    global _resolved_backend
    if _resolved_backend is None:
        requested = os.environ.get("QICERT_BACKEND", "").strip().lower()
        if requested == "numpy":
            _resolved_backend = "numpy"
        elif requested == "numba":
            if not _HAS_NUMBA:
                raise ImportError("QICERT_BACKEND=numba but numba is not importable")
            _resolved_backend = "numba"
        elif requested:
            raise ValueError(f"unknown QICERT_BACKEND {requested!r}")
        else:
            _resolved_backend = "numba" if _HAS_NUMBA else "numpy"
    return _resolved_backend


# ---------------------------------------------------------------------------
# numpy interpreter


def _tie_signs(d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Right/left asymptotic signs of a series that vanishes at order 0.

    Returns per-point signs in {-1, 0, +1}; 0 means the series is zero up to
    the truncation order.
    """
    m1, npts = d.shape
    if m1 == 1:
        zero = np.zeros(npts)
        return zero, zero
    tail = d[1:]
    nonzero = tail != 0.0
    has = nonzero.any(axis=0)
    first = nonzero.argmax(axis=0)
    sr = np.where(has, np.sign(tail[first, np.arange(npts)]), 0.0)
    # first is j-1 for the true order j; odd j flips the sign on the left
    sl = np.where(first % 2 == 0, -sr, sr)
    return sr, sl


def _run_numpy(tape: Tape, xs: np.ndarray, m1: int, side: int):
    n = len(tape.ops)
    npts = xs.shape[0]
    R = np.zeros((n, m1, npts))
    ops, arg1, arg2, cv = tape.ops, tape.arg1, tape.arg2, tape.consts
    with np.errstate(all="ignore"):
        for i in range(n):
            op = ops[i]
            if op == OP_CONST:
                R[i, 0] = cv[i]
            elif op == OP_VAR:
                R[i, 0] = xs
                if m1 > 1:
                    R[i, 1] = 1.0
            elif op == OP_NEG:
                np.negative(R[arg1[i]], out=R[i])
            elif op == OP_ADD:
                np.add(R[arg1[i]], R[arg2[i]], out=R[i])
            elif op == OP_SUB:
                np.subtract(R[arg1[i]], R[arg2[i]], out=R[i])
            elif op == OP_MUL:
                u, v = R[arg1[i]], R[arg2[i]]
                w = R[i]
                for k in range(m1):
                    acc = u[0] * v[k]
                    for j in range(1, k + 1):
                        acc += u[j] * v[k - j]
                    w[k] = acc
            elif op == OP_DIV:
                u, v = R[arg1[i]], R[arg2[i]]
                if np.any(v[0] == 0.0):
                    p = int(np.argmax(v[0] == 0.0))
                    return R, STATUS_DIV_ZERO, i, p
                w = R[i]
                w[0] = u[0] / v[0]
                for k in range(1, m1):
                    acc = u[k].copy()
                    for j in range(k):
                        acc -= w[j] * v[k - j]
                    w[k] = acc / v[0]
            elif op == OP_EXP:
                u = R[arg1[i]]
                w = R[i]
                w[0] = np.exp(u[0])
                for k in range(1, m1):
                    acc = 1.0 * u[1] * w[k - 1]
                    for j in range(2, k + 1):
                        acc += j * u[j] * w[k - j]
                    w[k] = acc / k
            elif op == OP_LOG:
                u = R[arg1[i]]
                if np.any(u[0] <= 0.0):
                    p = int(np.argmax(u[0] <= 0.0))
                    return R, STATUS_LOG_DOMAIN, i, p
                w = R[i]
                w[0] = np.log(u[0])
                for k in range(1, m1):
                    acc = u[k].copy()
                    for j in range(1, k):
                        acc -= (j / k) * w[j] * u[k - j]
                    w[k] = acc / u[0]
            elif op == OP_POWR:
                u = R[arg1[i]]
                if np.any(u[0] <= 0.0):
                    p = int(np.argmax(u[0] <= 0.0))
                    return R, STATUS_POW_DOMAIN, i, p
                r = cv[i]
                w = R[i]
                w[0] = u[0] ** r
                for k in range(1, m1):
                    acc = (1.0 * (r + 1.0) - k) * u[1] * w[k - 1]
                    for j in range(2, k + 1):
                        acc += (j * (r + 1.0) - k) * u[j] * w[k - j]
                    w[k] = acc / (k * u[0])
            elif op == OP_ABS:
                u = R[arg1[i]]
                sigma = np.sign(u[0])
                tie = u[0] == 0.0
                if m1 > 1 and tie.any():
                    sr, sl = _tie_signs(u)
                    if side == SIDE_RIGHT:
                        tsig = sr
                    elif side == SIDE_LEFT:
                        tsig = sl
                    else:
                        bad = tie & (sr != sl)
                        if bad.any():
                            return R, STATUS_NONDIFF, i, int(np.argmax(bad))
                        tsig = sr
                    sigma = np.where(tie, tsig, sigma)
                R[i] = sigma * u
            elif op == OP_MIN or op == OP_MAX:
                u, v = R[arg1[i]], R[arg2[i]]
                d = u - v
                if op == OP_MIN:
                    pick_u = d[0] < 0.0
                else:
                    pick_u = d[0] > 0.0
                tie = d[0] == 0.0
                pick_u = pick_u | tie
                if m1 > 1 and tie.any():
                    sr, sl = _tie_signs(d)
                    if op == OP_MIN:
                        pick_r, pick_l = sr < 0.0, sl < 0.0
                    else:
                        pick_r, pick_l = sr > 0.0, sl > 0.0
                    if side == SIDE_RIGHT:
                        tpick = pick_r
                    elif side == SIDE_LEFT:
                        tpick = pick_l
                    else:
                        bad = tie & (pick_r != pick_l) & (sr != 0.0)
                        if bad.any():
                            return R, STATUS_NONDIFF, i, int(np.argmax(bad))
                        tpick = pick_r
                    # series equal up to truncation: either branch works, keep u
                    tpick = tpick | (tie & (sr == 0.0))
                    pick_u = np.where(tie, tpick, pick_u)
                R[i] = np.where(pick_u, u, v)
    return R, STATUS_OK, -1, -1


# ---------------------------------------------------------------------------
# numba interpreter (same arithmetic, per-point loops)

if _HAS_NUMBA:

    @numba.njit(cache=True, nogil=True)
    def _tie_sign_point(d, m1, p, side):
        """Asymptotic sign of series column p; returns (sign, ok_two_sided)."""
        j = 0
        for k in range(1, m1):
            if d[k, p] != 0.0:
                j = k
                break
        if j == 0:
            return 0.0, True
        sr = 1.0 if d[j, p] > 0.0 else -1.0
        sl = sr if j % 2 == 0 else -sr
        if side == 1:
            return sr, True
        if side == -1:
            return sl, True
        return sr, sr == sl

    @numba.njit(cache=True, nogil=True)
    def _run_jit(ops, arg1, arg2, cv, xs, m1, side):
        n = ops.shape[0]
        npts = xs.shape[0]
        R = np.zeros((n, m1, npts))
        for i in range(n):
            op = ops[i]
            if op == OP_CONST:
                c = cv[i]
                for p in range(npts):
                    R[i, 0, p] = c
            elif op == OP_VAR:
                for p in range(npts):
                    R[i, 0, p] = xs[p]
                if m1 > 1:
                    for p in range(npts):
                        R[i, 1, p] = 1.0
            elif op == OP_NEG:
                a = arg1[i]
                for k in range(m1):
                    for p in range(npts):
                        R[i, k, p] = -R[a, k, p]
            elif op == OP_ADD:
                a, b = arg1[i], arg2[i]
                for k in range(m1):
                    for p in range(npts):
                        R[i, k, p] = R[a, k, p] + R[b, k, p]
            elif op == OP_SUB:
                a, b = arg1[i], arg2[i]
                for k in range(m1):
                    for p in range(npts):
                        R[i, k, p] = R[a, k, p] - R[b, k, p]
            elif op == OP_MUL:
                a, b = arg1[i], arg2[i]
                for k in range(m1):
                    for p in range(npts):
                        acc = R[a, 0, p] * R[b, k, p]
                        for j in range(1, k + 1):
                            acc += R[a, j, p] * R[b, k - j, p]
                        R[i, k, p] = acc
            elif op == OP_DIV:
                a, b = arg1[i], arg2[i]
                for p in range(npts):
                    if R[b, 0, p] == 0.0:
                        return R, STATUS_DIV_ZERO, i, p
                for p in range(npts):
                    R[i, 0, p] = R[a, 0, p] / R[b, 0, p]
                for k in range(1, m1):
                    for p in range(npts):
                        acc = R[a, k, p]
                        for j in range(k):
                            acc -= R[i, j, p] * R[b, k - j, p]
                        R[i, k, p] = acc / R[b, 0, p]
            elif op == OP_EXP:
                a = arg1[i]
                for p in range(npts):
                    R[i, 0, p] = np.exp(R[a, 0, p])
                for k in range(1, m1):
                    for p in range(npts):
                        acc = 1.0 * R[a, 1, p] * R[i, k - 1, p]
                        for j in range(2, k + 1):
                            acc += j * R[a, j, p] * R[i, k - j, p]
                        R[i, k, p] = acc / k
            elif op == OP_LOG:
                a = arg1[i]
                for p in range(npts):
                    if R[a, 0, p] <= 0.0:
                        return R, STATUS_LOG_DOMAIN, i, p
                for p in range(npts):
                    R[i, 0, p] = np.log(R[a, 0, p])
                for k in range(1, m1):
                    for p in range(npts):
                        acc = R[a, k, p]
                        for j in range(1, k):
                            acc -= (j / k) * R[i, j, p] * R[a, k - j, p]
                        R[i, k, p] = acc / R[a, 0, p]
            elif op == OP_POWR:
                a = arg1[i]
                r = cv[i]
                for p in range(npts):
                    if R[a, 0, p] <= 0.0:
                        return R, STATUS_POW_DOMAIN, i, p
                for p in range(npts):
                    R[i, 0, p] = R[a, 0, p] ** r
                for k in range(1, m1):
                    for p in range(npts):
                        acc = (1.0 * (r + 1.0) - k) * R[a, 1, p] * R[i, k - 1, p]
                        for j in range(2, k + 1):
                            acc += (j * (r + 1.0) - k) * R[a, j, p] * R[i, k - j, p]
                        R[i, k, p] = acc / (k * R[a, 0, p])
            elif op == OP_ABS:
                a = arg1[i]
                for p in range(npts):
                    u0 = R[a, 0, p]
                    if u0 > 0.0:
                        sigma = 1.0
                    elif u0 < 0.0:
                        sigma = -1.0
                    elif m1 > 1:
                        sigma, ok = _tie_sign_point(R[a], m1, p, side)
                        if not ok:
                            return R, STATUS_NONDIFF, i, p
                    else:
                        sigma = 0.0
                    for k in range(m1):
                        R[i, k, p] = sigma * R[a, k, p]
            elif op == OP_MIN or op == OP_MAX:
                a, b = arg1[i], arg2[i]
                for p in range(npts):
                    d0 = R[a, 0, p] - R[b, 0, p]
                    if d0 != 0.0:
                        if op == OP_MIN:
                            pick_u = d0 < 0.0
                        else:
                            pick_u = d0 > 0.0
                    elif m1 > 1:
                        sr = 0.0
                        j = 0
                        for k in range(1, m1):
                            dk = R[a, k, p] - R[b, k, p]
                            if dk != 0.0:
                                sr = 1.0 if dk > 0.0 else -1.0
                                j = k
                                break
                        if sr == 0.0:
                            pick_u = True
                        else:
                            sl = sr if j % 2 == 0 else -sr
                            if op == OP_MIN:
                                pick_r, pick_l = sr < 0.0, sl < 0.0
                            else:
                                pick_r, pick_l = sr > 0.0, sl > 0.0
                            if side == 1:
                                pick_u = pick_r
                            elif side == -1:
                                pick_u = pick_l
                            elif pick_r == pick_l:
                                pick_u = pick_r
                            else:
                                return R, STATUS_NONDIFF, i, p
                    else:
                        pick_u = True
                    src = a if pick_u else b
                    for k in range(m1):
                        R[i, k, p] = R[src, k, p]
        return R, STATUS_OK, -1, -1


_OP_NAMES = {
    OP_DIV: "division",
    OP_LOG: "log",
    OP_POWR: "pow",
    OP_ABS: "abs",
    OP_MIN: "min",
    OP_MAX: "max",
}


def _raise_status(tape: Tape, xs: np.ndarray, status: int, instr: int, point: int):
    where = f"at x={xs[point]!r}" if 0 <= point < xs.shape[0] else ""
    name = _OP_NAMES.get(int(tape.ops[instr]), "operation") if instr >= 0 else "operation"
    if status == STATUS_DIV_ZERO:
        raise DomainError(f"division by zero {where}")
    if status == STATUS_LOG_DOMAIN:
        raise DomainError(f"log of nonpositive value {where}")
    if status == STATUS_POW_DOMAIN:
        raise DomainError(f"pow with real exponent needs a strictly positive base {where}")
    if status == STATUS_NONDIFF:
        raise NonDifferentiable(
            f"two-sided jet requested at a kink of {name} {where}; use a one-sided jet"
        )
    raise RuntimeError(f"unexpected kernel status {status}")


def run_tape(tape: Tape, xs: np.ndarray, order: int, side: int, backend: str | None = None) -> np.ndarray:
    """Normalized series coefficients of the tape output, shape (order+1, len(xs))."""
    if order < 0:
        raise ValueError("order must be >= 0")
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    if backend is None:
        backend = active_backend()
    m1 = order + 1
    if backend == "numba":
        R, status, instr, point = _run_jit(
            tape.ops, tape.arg1, tape.arg2, tape.consts, xs, m1, side
        )
    else:
        R, status, instr, point = _run_numpy(tape, xs, m1, side)
    if status != STATUS_OK:
        _raise_status(tape, xs, status, instr, point)
    return R[tape.out]
