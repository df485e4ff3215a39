"""Seeded random ensembles. Every generator takes a ``numpy.random.Generator``."""
from __future__ import annotations

import numpy as np

from ..classes import is_partial_isometry
from ..linalg import adjoint, min_singular_value
from ..shifts import ExplicitList, Expression, Periodic

RESAMPLE_CAP = 50


class GeneratorError(RuntimeError):
    """A degenerate draw survived the resampling cap."""


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for ``(seed, trial)``; order of evaluation is irrelevant."""
    return np.random.default_rng(np.random.SeedSequence([seed & (2**64 - 1), trial]))


def random_matrix(rng, d):
    return (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)


def random_vector(rng, d):
    return (rng.standard_normal(d) + 1j * rng.standard_normal(d)) / np.sqrt(2.0)


def random_unitary(rng, d):
    q, r = np.linalg.qr(random_matrix(rng, d))
    ph = np.diag(r) / np.abs(np.diag(r))
    u = q * ph
    assert np.linalg.norm(adjoint(u) @ u - np.eye(d), 2) <= 1e-12
    return u


def random_partial_isometry(rng, d, rank=None):
    """``U_k W_k^*`` from the first ``k`` columns of two random unitaries."""
    k = int(rng.integers(0, d + 1)) if rank is None else rank
    u, w = random_unitary(rng, d), random_unitary(rng, d)
    v = u[:, :k] @ adjoint(w[:, :k])
    if not is_partial_isometry(v):
        raise GeneratorError("partial isometry failed its own predicate")
    return v


def random_psd(rng, d):
    g = random_matrix(rng, d)
    return g @ adjoint(g)


def random_invertible(rng, d, floor=0.05):
    for _ in range(RESAMPLE_CAP):
        t = random_matrix(rng, d)
        if min_singular_value(t) >= floor:
            return t
    raise GeneratorError(f"no draw with sigma_min >= {floor} after {RESAMPLE_CAP} tries")


def random_rank_deficient(rng, d, rank=None):
    k = int(rng.integers(0, d)) if rank is None else rank
    return random_matrix(rng, d)[:, :k] @ random_matrix(rng, d)[:k, :]


def random_kernel_aligned(rng, d):
    """``Q diag(B, 0) Q^*`` with invertible ``B``, so ``N(T) = N(T*)``."""
    k = int(rng.integers(1, d + 1))
    q = random_unitary(rng, d)
    core = np.zeros((d, d), dtype=np.complex128)
    core[:k, :k] = random_invertible(rng, k, floor=0.05)
    return q @ core @ adjoint(q)


def random_normal(rng, d):
    q = random_unitary(rng, d)
    return (q * random_vector(rng, d)) @ adjoint(q)


def random_mixed(rng, d):
    """Dense Gaussian, rank-deficient or kernel-aligned, chosen at random."""
    kind = rng.integers(0, 3)
    if kind == 0:
        return random_matrix(rng, d)
    if kind == 1:
        return random_rank_deficient(rng, d)
    return random_kernel_aligned(rng, d)


def random_periodic_weights(rng):
    p = int(rng.integers(1, 9))
    return Periodic(tuple(rng.uniform(0.1, 4.0, size=p)))


# templates produce strictly positive rules for the parameter ranges drawn below
_TEMPLATES = (
    "{a}+{b}*(-1)^i",
    "{a}+{b}/(i+1)",
    "{a}+{b}*exp(-{c}*i)",
    "{a}+{b}*(-1)^i/(i+1)",
    "{a}*({a}+{b}*(-1)^i)/({a}+{b}/(i+1))",
    "sqrt({a}^2+{b}*(-1)^i/(i+2))",
)


def random_expression_weights(rng):
    a = round(float(rng.uniform(1.0, 3.0)), 3)
    b = round(float(rng.uniform(0.05, 0.9)) * a, 3)
    c = round(float(rng.uniform(0.1, 2.0)), 3)
    tpl = _TEMPLATES[int(rng.integers(len(_TEMPLATES)))]
    return Expression.parse(tpl.format(a=a, b=b, c=c))


def random_weight_rule(rng):
    if rng.random() < 0.5:
        return random_periodic_weights(rng)
    return random_expression_weights(rng)


def random_convergent_weights(rng):
    """Rules converging to a known limit; returns ``(sequence, limit)``."""
    limit = round(float(rng.uniform(0.5, 3.0)), 3)
    b = round(float(rng.uniform(0.1, 0.9)) * limit, 3)
    c = round(float(rng.uniform(0.2, 2.0)), 3)
    tpl = ("{L}+{b}/(i+1)", "{L}+{b}*exp(-{c}*i)", "{L}+{b}*(-1)^i/(i+1)",
           "{L}-{b}/(i+1)^2")[int(rng.integers(4))]
    return Expression.parse(tpl.format(L=limit, b=b, c=c)), limit


def random_increasing_weights(rng):
    """Non-decreasing bounded rules; returns ``(sequence, sup)``."""
    if rng.random() < 0.5:
        steps = rng.uniform(0.0, 0.5, size=int(rng.integers(1, 12)))
        vals = tuple(float(v) for v in 0.2 + np.cumsum(steps))
        seq = ExplicitList(vals)
        return seq, seq.sup
    top = round(float(rng.uniform(1.0, 4.0)), 3)
    b = round(float(rng.uniform(0.1, 0.9)) * top, 3)
    c = round(float(rng.uniform(0.05, 1.0)), 3)
    tpl = ("{s}-{b}*exp(-{c}*i)", "{s}-{b}/(i+1)^4", "{s}-{b}*0.5^i")[int(rng.integers(3))]
    return Expression.parse(tpl.format(s=top, b=b, c=c), declared_sup=top), top


def random_rank_one_pair(rng, d):
    for _ in range(RESAMPLE_CAP):
        x, y = random_vector(rng, d), random_vector(rng, d)
        if np.linalg.norm(x) > 1e-3 and np.linalg.norm(y) > 1e-3:
            return x, y
    raise GeneratorError("rank-one pair kept drawing a near-zero vector")
