"""Weight maps of the mean and Aluthge transforms on weighted shifts, spectral
radius and mean limit of unilateral shifts, and the exp/log bridge between them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..binomial import binomial_pmf
from ..errors import InputError, NotUnilateral, Unbounded
from .expr import BinOp, Call, Const, substitute_shift
from .weights import ExplicitList, Expression, Periodic, WeightSequence

DEFAULT_SCHEDULE = (0,) + tuple(2**k for k in range(15))
DEFAULT_RADIUS_N = 2**16


def default_i_max(n: int) -> int:
    return 10 * n + 1000


def _require_unilateral(alpha: WeightSequence) -> None:
    if alpha.bilateral:
        raise NotUnilateral("only unilateral shifts have a spectral radius / mean limit here")


def _pairwise(alpha: WeightSequence, combine, ast_combine) -> WeightSequence:
    if isinstance(alpha, Periodic):
        v = np.array(alpha.values)
        return Periodic(tuple(combine(v, np.roll(v, -1))), alpha.bilateral, alpha.declared_sup)
    if isinstance(alpha, ExplicitList):
        v = np.array(alpha.values + (alpha.tail,))
        return ExplicitList(tuple(combine(v[:-1], v[1:])), alpha.limit, alpha.declared_sup)
    if isinstance(alpha, Expression):
        ast = ast_combine(alpha.ast, substitute_shift(alpha.ast, 1))
        return Expression(ast, bilateral=alpha.bilateral, declared_sup=alpha.declared_sup,
                          validate=False)
    raise TypeError(f"unsupported weight sequence {type(alpha).__name__}")


def shift_mean_weights(alpha: WeightSequence) -> WeightSequence:
    """Weights of the mean transform: ``(a_i + a_{i+1}) / 2``."""
    return _pairwise(alpha, lambda a, b: 0.5 * (a + b),
                     lambda a, b: BinOp("/", BinOp("+", a, b), Const(2.0)))


def shift_aluthge_weights(alpha: WeightSequence) -> WeightSequence:
    """Weights of the Aluthge transform: ``sqrt(a_i a_{i+1})``."""
    return _pairwise(alpha, lambda a, b: np.sqrt(a * b),
                     lambda a, b: Call("sqrt", BinOp("*", a, b)))


def shift_exp_weights(alpha: WeightSequence) -> WeightSequence:
    """The sequence ``exp(a_i)``."""
    sup = None if alpha.declared_sup is None else math.exp(alpha.declared_sup)
    if isinstance(alpha, Periodic):
        return Periodic(tuple(np.exp(alpha.values)), alpha.bilateral, sup)
    if isinstance(alpha, ExplicitList):
        limit = None if alpha.limit is None else math.exp(alpha.limit)
        return ExplicitList(tuple(np.exp(alpha.values)), limit, sup)
    return Expression(Call("exp", alpha.ast), bilateral=alpha.bilateral, declared_sup=sup)


def binomial_average(values: np.ndarray, n: int, count: int) -> np.ndarray:
    """``out[i] = sum_j C(n,j) 2^-n values[i + j]`` for ``i < count``.

    Terms are accumulated largest weight first; ``values`` needs ``count + n`` entries.
    """
    offsets, weights = binomial_pmf(n)
    out = np.zeros(count)
    for j, w in zip(offsets, weights):
        out += w * values[j:j + count]
    return out


def periodic_mean_iterate(alpha: Periodic, n: int) -> np.ndarray:
    """One period of the n-th mean-iterate weights.

    The binomial weights are folded modulo the period first, so the result is
    a convex combination of ``period`` values however large ``n`` is.
    """
    p = alpha.period
    offsets, weights = binomial_pmf(n)
    folded = np.zeros(p)
    np.add.at(folded, np.asarray(offsets) % p, weights)
    folded /= folded.sum()
    vals = np.array(alpha.values)
    return np.array([float(np.dot(folded, np.roll(vals, -i))) for i in range(p)])


def shift_mean_iterate_weights(alpha: WeightSequence, n: int, i_range) -> np.ndarray:
    """Weights of the n-th mean iterate at the indices in ``i_range``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    idx = np.asarray(list(i_range) if isinstance(i_range, range) else i_range, dtype=np.int64)
    if idx.size == 0:
        return np.zeros(0)
    lo, hi = int(idx.min()), int(idx.max())
    base = alpha.window(lo, hi + n + 1)
    dense = binomial_average(base, n, hi - lo + 1)
    return dense[idx - lo]


def shift_aluthge_iterate_weights(beta: WeightSequence, n: int, i_range) -> np.ndarray:
    """Weights of the n-th Aluthge iterate by n rounds of pairwise geometric means."""
    idx = np.asarray(list(i_range) if isinstance(i_range, range) else i_range, dtype=np.int64)
    lo, hi = int(idx.min()), int(idx.max())
    vals = beta.window(lo, hi + n + 1)
    for _ in range(n):
        vals = np.sqrt(vals[:-1] * vals[1:])
    return vals[idx - lo]


@dataclass(frozen=True)
class SupEstimate:
    value: float
    at_boundary: bool


def _iterate_sups(alpha: WeightSequence, schedule, i_max: int) -> list[SupEstimate]:
    """``sup_i`` of the n-th mean-iterate weights for each n in ``schedule``."""
    n_last = max(schedule)
    if isinstance(alpha, Periodic):
        return [SupEstimate(float(periodic_mean_iterate(alpha, n).max()), False)
                for n in schedule]
    if isinstance(alpha, ExplicitList):
        size = len(alpha.values)
        vals = alpha.window(0, size + n_last + 1)
        return [SupEstimate(max(float(binomial_average(vals, n, size).max()), alpha.tail), False)
                for n in schedule]
    vals = alpha.window(0, i_max + n_last + 1)
    out = []
    for n in schedule:
        avg = binomial_average(vals, n, i_max + 1)
        k = int(np.argmax(avg))
        out.append(SupEstimate(float(avg[k]), k == i_max))
    return out


@dataclass(frozen=True)
class ShiftMeanLimit:
    value: float
    trace: list[tuple[int, float]]
    boundary_warning: bool = False


def shift_mean_limit(alpha: WeightSequence, n_schedule=DEFAULT_SCHEDULE,
                     i_max: int | None = None) -> ShiftMeanLimit:
    """Mean limit of a unilateral shift as the sup of the iterate weights.

    The sup over the infinite index set is exact for periodic and explicit
    sequences; expressions are scanned on ``[0, i_max]`` and flagged when the
    sup sits on ``i_max``.
    """
    _require_unilateral(alpha)
    schedule = sorted(set(int(n) for n in n_schedule))
    if not schedule or schedule[0] < 0:
        raise ValueError("schedule must contain non-negative integers")
    if i_max is None:
        i_max = default_i_max(schedule[-1])
    sups = _iterate_sups(alpha, schedule, i_max)
    trace = [(n, s.value) for n, s in zip(schedule, sups)]
    return ShiftMeanLimit(trace[-1][1], trace, any(s.at_boundary for s in sups))


@dataclass(frozen=True)
class ShiftRadius:
    value: float
    estimate: float
    closed_form: float | None
    diagnostics: list[tuple[int, float]] = field(default_factory=list)


def _log_radius(seq: WeightSequence, log_weights, n_max: int, i_max: int | None):
    """Log spectral radius from window sums of log-weights.

    Returns ``(closed_form, estimate, diagnostics)`` in log scale. The
    estimate is ``(a_n - a_m) / (n - m)`` with ``a_n`` the best n-window sum
    and ``m ~ n/2``; it shares the limit of ``a_n / n`` but cancels the
    constant offset that makes the plain ratio converge like ``log(n) / n``.
    """
    closed = None
    grain = 1
    if isinstance(seq, Periodic):
        grain = seq.period
        closed = float(np.mean(log_weights(np.arange(seq.period))))
        starts = seq.period
    elif isinstance(seq, ExplicitList):
        closed = float(log_weights(np.array([len(seq.values)]))[0])
        starts = len(seq.values) + 1
    else:
        starts = (default_i_max(n_max) if i_max is None else i_max) + 1
    n = max(grain, (n_max // grain) * grain)
    csum = np.concatenate([[0.0], np.cumsum(log_weights(np.arange(starts + n)))])

    def best(length):
        return float(np.max(csum[length:length + starts] - csum[:starts]))

    half = (n // grain // 2) * grain
    estimate = (best(n) - best(half)) / (n - half) if half > 0 else best(n) / n
    diag_n = sorted({2**k for k in range(int(math.log2(n)) + 1)} | {n})
    diagnostics = [(k, best(k) / k) for k in diag_n]
    return closed, estimate, diagnostics


def shift_spectral_radius(alpha: WeightSequence, n_max: int = DEFAULT_RADIUS_N,
                          i_max: int | None = None) -> ShiftRadius:
    """Spectral radius ``lim_n (sup_k a_k ... a_{k+n-1})^(1/n)`` in log space.

    Periodic sequences return the geometric mean of one period and explicit
    lists their tail value; expressions return the accelerated estimate.
    ``diagnostics`` lists ``(n, (sup_k prod)^(1/n))``.
    """
    _require_unilateral(alpha)
    if n_max < 1:
        raise ValueError("n_max must be positive")
    closed, est, diag = _log_radius(alpha, alpha.log_evaluate, n_max, i_max)
    value = math.exp(closed) if closed is not None else math.exp(est)
    return ShiftRadius(value, math.exp(est), None if closed is None else math.exp(closed),
                       [(k, math.exp(v)) for k, v in diag])


def _check_bounded(alpha: WeightSequence, i_max: int) -> None:
    if not isinstance(alpha, Expression) or alpha.declared_sup is not None:
        return
    vals = alpha.window(0, i_max + 1)
    head = float(vals[: max(1, i_max // 10) + 1].max())
    if float(vals.max()) > head * (1.0 + 1e-3):
        raise Unbounded(f"expr:{alpha.source} keeps growing on [0, {i_max}]; declare a sup")


@dataclass(frozen=True)
class BridgeReport:
    mean_limit: float
    log_r_exp: float
    r_alpha: float
    gap: float
    tolerance: float
    inequality_holds: bool
    identity_holds: bool


def exp_log_bridge(alpha: WeightSequence, n_schedule=DEFAULT_SCHEDULE, i_max: int | None = None,
                   n_max: int = DEFAULT_RADIUS_N, tol: float = 1e-6) -> BridgeReport:
    """Compare the mean limit of ``W_a`` with ``log r(W_exp(a))`` and ``r(W_a)``.

    ``log r(W_exp(a))`` is computed from window sums of ``a`` itself, so no
    exponential is ever formed. The identity tolerance is ``tol`` plus the
    last observed movement of both estimates, doubled.
    """
    _require_unilateral(alpha)
    schedule = sorted(set(int(n) for n in n_schedule))
    if i_max is None:
        i_max = default_i_max(schedule[-1])
    _check_bounded(alpha, i_max)
    ml = shift_mean_limit(alpha, schedule, i_max)
    closed, est, diag = _log_radius(alpha, alpha.evaluate, n_max, i_max)
    log_r_exp = closed if closed is not None else est
    r_alpha = shift_spectral_radius(alpha, n_max, i_max).value
    drift = abs(ml.trace[-1][1] - ml.trace[-2][1]) if len(ml.trace) > 1 else 0.0
    if closed is None and len(diag) > 1:
        drift += abs(diag[-1][1] - diag[-2][1])
    # along a doubling schedule an O(1/n) error leaves about twice the last step
    tolerance = tol + 2.0 * drift
    gap = abs(ml.value - log_r_exp)
    return BridgeReport(ml.value, log_r_exp, r_alpha, gap, tolerance,
                        r_alpha <= log_r_exp + tol, gap <= tolerance)


def truncated_shift_matrix(alpha: WeightSequence, dim: int) -> np.ndarray:
    """``dim x dim`` compression with subdiagonal ``(a_0, ..., a_{dim-2})``."""
    _require_unilateral(alpha)
    if dim < 2:
        raise InputError("truncation needs dim >= 2")
    return np.diag(alpha.window(0, dim - 1).astype(np.complex128), -1)


def bilateral_extremes(alpha: WeightSequence, radius: int) -> tuple[float, float]:
    """``(min, max)`` of the weights over ``|n| <= radius`` (``0..radius`` if unilateral)."""
    lo = -radius if alpha.bilateral else 0
    vals = alpha.window(lo, radius + 1)
    return float(vals.min()), float(vals.max())
