"""Dense complex linear algebra kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; :func:`as_cmatrix`
is the single entry point that validates shape and finiteness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionTooLarge, InputError, NoConvergence, NotHermitian, NotPSD

MAX_GENERAL_EIG_DIM = 64


def as_cmatrix(a, square=False) -> np.ndarray:
    """Return ``a`` as a finite 2-D complex128 array (copy only if needed)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise InputError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix has non-finite entries")
    if square and m.shape[0] != m.shape[1]:
        raise InputError(f"expected a square matrix, got shape {m.shape}")
    return m


def adjoint(a: np.ndarray) -> np.ndarray:
    return a.conj().T


@dataclass(frozen=True)
class HermEig:
    """Spectral decomposition ``A = vectors @ diag(values) @ vectors^*``."""

    values: np.ndarray
    vectors: np.ndarray

    def reassemble(self) -> np.ndarray:
        q = self.vectors
        return (q * self.values) @ adjoint(q)


def operator_norm(a) -> float:
    """Largest singular value."""
    m = as_cmatrix(a)
    return float(np.linalg.norm(m, 2))


def _check_hermitian(a: np.ndarray) -> None:
    if a.shape[0] != a.shape[1]:
        raise NotHermitian(f"matrix is not square: {a.shape}")
    scale = 1.0 + np.linalg.norm(a, 2)
    skew = np.linalg.norm(a - adjoint(a), 2)
    if skew > 1e-12 * scale:
        raise NotHermitian(f"||A - A*|| = {skew:.3e} exceeds 1e-12*(1+||A||)")


def _jacobi_pair(a, p, q):
    # 2x2 unitary that zeroes a[p, q]: a phase to make the pivot real, then a
    # real symmetric Schur rotation.
    apq = a[p, q]
    mag = abs(apq)
    phase = apq / mag
    tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    s = t * c
    return np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])


def jacobi_eigh(a, tol=1e-13, max_sweeps=60) -> HermEig:
    """Cyclic two-sided Jacobi for a complex Hermitian matrix.

    Sweeps until ``off(A) <= tol * ||A||_F``. Raises :class:`NoConvergence`
    with the final off-diagonal norm if ``max_sweeps`` is exhausted.
    """
    work = as_cmatrix(a, square=True).copy()
    _check_hermitian(work)
    work = 0.5 * (work + adjoint(work))
    n = work.shape[0]
    vecs = np.eye(n, dtype=np.complex128)
    frob = np.linalg.norm(work)
    target = tol * frob

    mask = ~np.eye(n, dtype=bool)

    def off():
        # direct sum; frob^2 - sum(diag^2) cancels catastrophically near convergence
        return float(np.linalg.norm(work[mask]))

    for _ in range(max_sweeps):
        if off() <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(work[p, q]) <= 1e-300:
                    continue
                g = _jacobi_pair(work, p, q)
                idx = [p, q]
                work[:, idx] = work[:, idx] @ g
                work[idx, :] = adjoint(g) @ work[idx, :]
                work[p, q] = work[q, p] = 0.0
                vecs[:, idx] = vecs[:, idx] @ g
        # frob is invariant under unitary similarity; recompute to shed drift
        frob = np.linalg.norm(work)
    else:
        if off() > target:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps", residual=off())

    values = np.diag(work).real.copy()
    order = np.argsort(values, kind="stable")
    return HermEig(values[order], vecs[:, order])


def hermitian_eig(a, method="lapack") -> HermEig:
    """Eigendecomposition of a Hermitian matrix with ascending eigenvalues.

    ``method="jacobi"`` uses :func:`jacobi_eigh`; the default delegates to
    LAPACK ``zheevd``, which is orders of magnitude faster in Python.
    """
    m = as_cmatrix(a, square=True)
    if method == "jacobi":
        return jacobi_eigh(m)
    if method != "lapack":
        raise ValueError(f"unknown method {method!r}")
    _check_hermitian(m)
    w, v = np.linalg.eigh(0.5 * (m + adjoint(m)))
    return HermEig(w, v)


def psd_power(a, p: float) -> np.ndarray:
    """``A^p`` for positive semidefinite ``A`` and ``p`` in [0, 1].

    Eigenvalues down to ``-1e-10 ||A||`` are clamped to zero; anything below
    ``-1e-8 ||A||`` raises :class:`NotPSD`. ``p = 0`` returns the identity.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"exponent must lie in [0, 1], got {p}")
    m = as_cmatrix(a, square=True)
    if p == 0.0:
        return np.eye(m.shape[0], dtype=np.complex128)
    eig = hermitian_eig(m)
    scale = max(abs(eig.values[0]), abs(eig.values[-1]))
    if eig.values[0] < -1e-8 * scale:
        raise NotPSD(f"minimum eigenvalue {eig.values[0]:.3e} is negative")
    lam = np.where(eig.values < 1e-10 * scale, 0.0, eig.values)
    lam = np.clip(lam, 0.0, None)
    out = (eig.vectors * lam**p) @ adjoint(eig.vectors)
    return 0.5 * (out + adjoint(out))


def eigenvalues_general(a) -> np.ndarray:
    """All eigenvalues (with algebraic multiplicity) of a square matrix of dim <= 64."""
    m = as_cmatrix(a, square=True)
    if m.shape[0] > MAX_GENERAL_EIG_DIM:
        raise DimensionTooLarge(
            f"general eigenvalues limited to dim <= {MAX_GENERAL_EIG_DIM}, got {m.shape[0]}"
        )
    try:
        return np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc


def top_eigpairs(stack: np.ndarray):
    """Largest eigenpair of each Hermitian matrix in a ``(k, n, n)`` stack."""
    w, v = np.linalg.eigh(stack)
    return w[:, -1], v[:, :, -1]


def min_singular_value(a) -> float:
    return float(np.linalg.svd(as_cmatrix(a), compute_uv=False)[-1])
