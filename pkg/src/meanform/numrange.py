"""Spectral radius, numerical range and numerical radius."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import NoConvergence, NotPSD
from .linalg import (
    MAX_GENERAL_EIG_DIM,
    adjoint,
    as_cmatrix,
    eigenvalues_general,
    operator_norm,
    psd_power,
    top_eigpairs,
)
from .polar import canonical_polar


def spectral_radius(t) -> float:
    """Eigenvalue route up to dim 64, Gelfand squaring above."""
    m = as_cmatrix(t, square=True)
    if m.shape[0] <= MAX_GENERAL_EIG_DIM:
        return float(np.max(np.abs(eigenvalues_general(m))))
    return gelfand_spectral_radius(m)


def gelfand_spectral_radius(t, rtol: float = 1e-8, max_squarings: int = 40,
                            history: list | None = None) -> float:
    """``lim ||T^(2^k)||^(2^-k)`` by repeated squaring.

    Each squaring works on a copy renormalized to unit norm; the discarded
    scale is carried as a log so nothing over- or underflows.
    """
    a = as_cmatrix(t, square=True)
    log_scale = 0.0
    prev = None
    est = math.nan
    for k in range(max_squarings + 1):
        nrm = operator_norm(a)
        if nrm == 0.0:
            if history is not None:
                history.append(0.0)
            return 0.0
        est = math.exp((math.log(nrm) + log_scale) / 2.0**k)
        if history is not None:
            history.append(est)
        if prev is not None and abs(est - prev) <= rtol * max(est, prev):
            return est
        prev = est
        a = a / nrm
        log_scale = 2.0 * (log_scale + math.log(nrm))
        a = a @ a
    raise NoConvergence(f"Gelfand iteration unsettled after {max_squarings} squarings",
                        residual=est)


def _rotated_hermitian_parts(m: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    rot = np.exp(-1j * thetas)[:, None, None]
    h = rot * m[None, :, :]
    return 0.5 * (h + np.conj(np.swapaxes(h, 1, 2)))


@dataclass(frozen=True)
class NumRangeBoundary:
    thetas: np.ndarray
    supports: np.ndarray
    points: np.ndarray
    num_radius: float

    def samples(self):
        return list(zip(self.thetas.tolist(), self.supports.tolist(), self.points.tolist()))


def numerical_range_boundary(t, m: int = 360) -> NumRangeBoundary:
    """Sample the boundary of ``W(T)`` by the rotation method.

    For each angle the top eigenvector ``x`` of ``Re(e^{-i theta} T)`` gives
    the boundary point ``<T x, x>``; the samples span an inner polygon of W(T).
    """
    if m < 8:
        raise ValueError("need at least 8 boundary samples")
    a = as_cmatrix(t, square=True)
    thetas = 2.0 * np.pi * np.arange(m) / m
    lam, x = top_eigpairs(_rotated_hermitian_parts(a, thetas))
    points = np.einsum("ki,ij,kj->k", x.conj(), a, x)
    return NumRangeBoundary(thetas, lam, points, float(np.max(np.abs(points))))


def _support(a: np.ndarray, theta: float) -> float:
    h = np.exp(-1j * theta) * a
    return float(np.linalg.eigvalsh(0.5 * (h + adjoint(h)))[-1])


def numerical_radius(t, m: int = 360, refine: bool = True, candidates: int = 4) -> float:
    """``w(T) = max_theta lambda_max(Re(e^{-i theta} T))``.

    The grid maximum is a lower bound; with ``refine`` the best few grid
    angles are polished by bounded Brent search on the neighbouring cells.
    """
    a = as_cmatrix(t, square=True)
    thetas = 2.0 * np.pi * np.arange(m) / m
    sup = np.linalg.eigvalsh(_rotated_hermitian_parts(a, thetas))[:, -1]
    best = float(sup.max())
    if not refine or best <= 0.0:
        return max(best, 0.0)
    step = 2.0 * np.pi / m
    # local maxima of the periodic grid, strongest first
    peaks = np.flatnonzero((sup >= np.roll(sup, 1)) & (sup >= np.roll(sup, -1)))
    peaks = peaks[np.argsort(-sup[peaks])][:candidates]
    for k in peaks:
        c = thetas[k]
        res = minimize_scalar(lambda th: -_support(a, th), bounds=(c - step, c + step),
                              method="bounded", options={"xatol": 1e-13})
        best = max(best, -float(res.fun))
    return best


def default_lambda_grid(t, points: int = 64) -> np.ndarray:
    r = 2.0 * operator_norm(t)
    circle = r * np.exp(2j * np.pi * np.arange(points) / points)
    return np.concatenate([circle, [0.0]])


def closure_margins(t, mus, lambda_grid=None) -> np.ndarray:
    """``min_lambda (||T - lambda I|| - |mu - lambda|)`` for each ``mu``.

    Non-negative margins are necessary for membership in the closure of W(T).
    """
    a = as_cmatrix(t, square=True)
    grid = default_lambda_grid(a) if lambda_grid is None else np.asarray(lambda_grid, complex)
    if grid.size == 0:
        raise ValueError("lambda grid must be nonempty")
    # one batched SVD over the whole grid
    shifted = a[None, :, :] - grid[:, None, None] * np.eye(a.shape[0])[None, :, :]
    radii = np.linalg.svd(shifted, compute_uv=False)[:, 0]
    mus = np.atleast_1d(np.asarray(mus, dtype=complex))
    gaps = radii[None, :] - np.abs(mus[:, None] - grid[None, :])
    return gaps.min(axis=1)


@dataclass(frozen=True)
class ClosureVerdict:
    inside: bool
    margin: float
    borderline: bool


def closure_verdict(t, mu, lambda_grid=None, tol: float = 1e-8) -> ClosureVerdict:
    """Membership verdict with its margin; ``borderline`` when ``|margin| <= 10 tol``.

    A borderline verdict may flip with a finer lambda grid.
    """
    margin = float(closure_margins(t, [mu], lambda_grid)[0])
    return ClosureVerdict(margin >= -tol, margin, abs(margin) <= 10.0 * tol)


def in_closure_numrange(t, mu, lambda_grid=None, tol: float = 1e-8) -> bool:
    """Disk-intersection test: ``|mu - lambda| <= ||T - lambda I|| + tol`` on the grid."""
    return bool(closure_margins(t, [mu], lambda_grid)[0] >= -tol)


@dataclass(frozen=True)
class InequalitySides:
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


def support_inequality_check(t, lam: complex) -> InequalitySides:
    """``||P V - lambda I||`` against ``||T - lambda I||`` (canonical polar factors)."""
    a = as_cmatrix(t, square=True)
    parts = canonical_polar(a)
    eye = np.eye(a.shape[0])
    lhs = operator_norm(parts.modulus @ parts.isometry_part - lam * eye)
    return InequalitySides(lhs, operator_norm(a - lam * eye))


def msy_inequality_check(a, b, x, alpha: float, m: int = 720) -> InequalitySides:
    """``w(A^1/2 X B^1/2)`` against ``w((A^a X B^(1-a) + A^(1-a) X B^a) / 2)``.

    Both sides are returned as computed. With ``A = B`` the left side never
    exceeded the right in testing; for independent ``A`` and ``B`` it does
    for a few percent of random draws, including ``a`` in ``{0, 1}``.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    a, b, x = (as_cmatrix(z, square=True) for z in (a, b, x))
    for name, z in (("A", a), ("B", b)):
        if np.linalg.eigvalsh(0.5 * (z + adjoint(z)))[0] < -1e-8 * (1.0 + operator_norm(z)):
            raise NotPSD(f"{name} is not positive semidefinite")
    left = psd_power(a, 0.5) @ x @ psd_power(b, 0.5)
    right = 0.5 * (psd_power(a, alpha) @ x @ psd_power(b, 1.0 - alpha)
                   + psd_power(a, 1.0 - alpha) @ x @ psd_power(b, alpha))
    return InequalitySides(numerical_radius(left, m), numerical_radius(right, m))
