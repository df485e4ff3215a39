"""Canonical polar decomposition, the mean and Aluthge transforms, and their iterates."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .binomial import binomial_pmf
from .errors import KernelInclusionViolated, NotPartialIsometry, ZeroVector
from .linalg import adjoint, as_cmatrix, operator_norm

MAX_POLAR_DIM = 200


def default_rank_tol(norm: float) -> float:
    return 1e-10 * max(1.0, norm)


@dataclass(frozen=True)
class PolarParts:
    """``T = V P`` with ``P = |T|`` and ``V`` the partial isometry with ``N(V) = N(T)``.

    ``singular_values`` and ``right_vectors`` diagonalize the modulus,
    ``P = W diag(s) W^*``, so fractional powers of ``P`` are exact on its kernel.
    """

    isometry_part: np.ndarray
    modulus: np.ndarray
    numerical_rank: int
    rank_tol: float
    singular_values: np.ndarray = field(repr=False)
    right_vectors: np.ndarray = field(repr=False)

    def modulus_power(self, p: float) -> np.ndarray:
        if p == 0.0:
            return np.eye(self.modulus.shape[0], dtype=np.complex128)
        s = np.where(self.singular_values > self.rank_tol, self.singular_values, 0.0)
        w = self.right_vectors
        out = (w * s**p) @ adjoint(w)
        return 0.5 * (out + adjoint(out))


def canonical_polar(t, rank_tol=None) -> PolarParts:
    """Canonical polar decomposition of a square matrix.

    Singular values at or below ``rank_tol`` (default ``1e-10 max(1, ||T||)``)
    are treated as zero, which fixes the shared kernel of ``T``, ``V`` and ``P``.
    """
    m = as_cmatrix(t, square=True)
    if m.shape[0] > MAX_POLAR_DIM:
        raise ValueError(f"polar decomposition limited to dim <= {MAX_POLAR_DIM}")
    u, s, wh = np.linalg.svd(m)
    w = adjoint(wh)
    if rank_tol is None:
        rank_tol = default_rank_tol(float(s[0]))
    rank = int(np.count_nonzero(s > rank_tol))
    v = u[:, :rank] @ wh[:rank, :]
    s_kept = np.where(s > rank_tol, s, 0.0)
    p = (w * s_kept) @ wh
    p = 0.5 * (p + adjoint(p))
    return PolarParts(v, p, rank, float(rank_tol), s, w)


def _parts(t, parts):
    return parts if parts is not None else canonical_polar(t)


def mean_transform(t, parts: PolarParts | None = None) -> np.ndarray:
    """``(V P + P V) / 2`` from the canonical polar decomposition."""
    pp = _parts(t, parts)
    v, p = pp.isometry_part, pp.modulus
    return 0.5 * (v @ p + p @ v)


def aluthge_transform(t, lam: float = 0.5, parts: PolarParts | None = None) -> np.ndarray:
    """``P^lam V P^(1-lam)``; ``lam = 1/2`` is the classical Aluthge transform."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    pp = _parts(t, parts)
    return pp.modulus_power(lam) @ pp.isometry_part @ pp.modulus_power(1.0 - lam)


def maximal_polar_mean(unitary, modulus) -> np.ndarray:
    """``(U P + P U) / 2`` for a caller-supplied (possibly non-canonical) factor.

    Exists to exhibit that the transform depends on the polar factor chosen;
    nothing else in the package uses it.
    """
    u = as_cmatrix(unitary, square=True)
    p = as_cmatrix(modulus, square=True)
    return 0.5 * (u @ p + p @ u)


@dataclass(frozen=True)
class IterateStep:
    n: int
    norm: float
    numerical_radius: float
    step_distance: float
    is_quasinormal: bool


@dataclass
class IterateTrace:
    steps: list[IterateStep]
    converged: bool
    limit_estimate: float
    snapshots: list[np.ndarray] | None = None


def _quasinormal_residual(m: np.ndarray) -> float:
    g = adjoint(m) @ m
    return operator_norm(m @ g - g @ m)


def mean_iterates(t, n_max: int = 10_000, stop_tol: float = 1e-10,
                  keep_snapshots: bool = False, radius_points: int = 360) -> IterateTrace:
    """Iterate the mean transform, recording norm, numerical radius and step size.

    Stops after ``n_max`` applications, or earlier once consecutive norms or
    consecutive iterates differ by less than ``stop_tol``.
    """
    from .numrange import numerical_radius

    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    cur = as_cmatrix(t, square=True)
    qtol = 1e-8

    def record(n, m, dist):
        nrm = operator_norm(m)
        return IterateStep(
            n, nrm, numerical_radius(m, radius_points), dist,
            _quasinormal_residual(m) <= qtol * (1.0 + nrm) ** 3,
        )

    steps = [record(0, cur, math.nan)]
    snaps = [cur] if keep_snapshots else None
    converged = False
    for n in range(1, n_max + 1):
        nxt = mean_transform(cur)
        dist = operator_norm(nxt - cur)
        step = record(n, nxt, dist)
        steps.append(step)
        if snaps is not None:
            snaps.append(nxt)
        cur = nxt
        if abs(steps[-2].norm - step.norm) < stop_tol or dist < stop_tol:
            converged = True
            break
    return IterateTrace(steps, converged, steps[-1].norm, snaps)


@dataclass(frozen=True)
class MeanLimit:
    value: float
    converged: bool
    iterations: int


def mean_limit_estimate(t, n_max: int = 10_000, stop_tol: float = 1e-10) -> MeanLimit:
    """Last norm of the mean iterates, an upper estimate of the mean limit.

    Same stopping rule as :func:`mean_iterates` but skips the per-step
    diagnostics, so long runs stay cheap.
    """
    cur = as_cmatrix(t, square=True)
    prev_norm = operator_norm(cur)
    for n in range(1, n_max + 1):
        nxt = mean_transform(cur)
        nrm = operator_norm(nxt)
        dist = operator_norm(nxt - cur)
        cur = nxt
        if abs(prev_norm - nrm) < stop_tol or dist < stop_tol:
            return MeanLimit(nrm, True, n)
        prev_norm = nrm
    return MeanLimit(prev_norm, False, n_max)


def binomial_iterate(t, n: int, tol: float = 1e-8) -> np.ndarray:
    """Closed form of the n-th mean iterate, valid when ``N(T*)`` lies in ``N(T)``.

    ``2^-n V sum_j C(n, j) (V*)^j P V^j``, with weights from :func:`binomial_pmf`.
    """
    from .classes import kernel_inclusion_check

    if n < 0:
        raise ValueError("n must be non-negative")
    m = as_cmatrix(t, square=True)
    if not kernel_inclusion_check(m, tol).holds:
        raise KernelInclusionViolated("N(T*) is not contained in N(T)")
    parts = canonical_polar(m)
    v, p = parts.isometry_part, parts.modulus
    vh = adjoint(v)
    offsets, weights = binomial_pmf(n)
    coeff = dict(zip(offsets.tolist(), weights.tolist()))
    acc = np.zeros_like(p)
    term = p
    for j in range(int(offsets.max()) + 1):
        if j in coeff:
            acc += coeff[j] * term
        term = vh @ term @ v
    return v @ acc


def rank_one_mean_iterate(x, y, n: int) -> np.ndarray:
    """n-th mean iterate of ``x (x) y`` (the map ``u -> <u, y> x``), in closed form."""
    x = np.asarray(x, dtype=np.complex128).ravel()
    y = np.asarray(y, dtype=np.complex128).ravel()
    if not np.any(x) or not np.any(y):
        raise ZeroVector("rank-one factors must be nonzero")
    c = np.vdot(y, x) / np.vdot(y, y).real
    scale = 2.0**-n
    a = scale * x + (1.0 - scale) * c * y
    return np.outer(a, y.conj())


def rank_one_aluthge(x, y) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128).ravel()
    y = np.asarray(y, dtype=np.complex128).ravel()
    if not np.any(x) or not np.any(y):
        raise ZeroVector("rank-one factors must be nonzero")
    c = np.vdot(y, x) / np.vdot(y, y).real
    return c * np.outer(y, y.conj())


def partial_isometry_mean(v, tol: float = 1e-8) -> np.ndarray:
    """``(I + V*V) V / 2``, the mean transform of a partial isometry."""
    from .classes import is_partial_isometry

    m = as_cmatrix(v, square=True)
    if not is_partial_isometry(m, tol):
        raise NotPartialIsometry("V V* V differs from V beyond tolerance")
    eye = np.eye(m.shape[0], dtype=np.complex128)
    return 0.5 * (eye + adjoint(m) @ m) @ m
