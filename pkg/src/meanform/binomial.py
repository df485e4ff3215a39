"""Binomial(n, 1/2) weights used by every closed-form mean iterate."""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

EXACT_LIMIT = 62
# above this the big-integer walk gets slow and log-gamma takes over
BIGINT_LIMIT = 2**20
# mass beyond 12 standard deviations is below 1e-30
SIGMA_CUTOFF = 12.0


@lru_cache(maxsize=64)
def binomial_pmf(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Offsets ``j`` and weights ``C(n, j) / 2^n``, largest weight first.

    Results are cached and read-only. Up to ``2^20`` every weight is an exact integer ratio rounded once; past
    ``n = 62`` only ``|j - n/2| <= 12 sigma`` is kept. Beyond ``2^20`` the
    window comes from log-gamma and is renormalized.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n <= EXACT_LIMIT:
        j = np.arange(n + 1)
        w = np.array([math.comb(n, k) / 2**n for k in range(n + 1)])
    else:
        half_width = SIGMA_CUTOFF * math.sqrt(n) / 2.0
        lo = max(0, math.floor(n / 2 - half_width))
        hi = min(n, math.ceil(n / 2 + half_width))
        j = np.arange(lo, hi + 1)
        if n <= BIGINT_LIMIT:
            denom = 1 << n
            c = math.comb(n, lo)
            vals = []
            for k in range(lo, hi + 1):
                vals.append(c / denom)
                c = c * (n - k) // (k + 1)
            w = np.array(vals)
        else:
            base = math.lgamma(n + 1) - n * math.log(2.0)
            logw = np.array([base - math.lgamma(k + 1) - math.lgamma(n - k + 1) for k in j])
            w = np.exp(logw)
            w /= w.sum()
    order = np.argsort(-w, kind="stable")
    j, w = j[order], w[order]
    # cached and shared between callers
    j.flags.writeable = False
    w.flags.writeable = False
    return j, w
