"""Tolerance-based predicates for quasinormal, p-hyponormal and related classes.

Every residual is normalized by ``(1 + ||T||)^k`` with ``k`` the homogeneity
degree of the expression being tested, so one tolerance works at all scales.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import adjoint, as_cmatrix, operator_norm, psd_power
from .polar import canonical_polar, default_rank_tol

DEFAULT_TOL = 1e-8


def quasinormal_residual(t) -> float:
    m = as_cmatrix(t, square=True)
    g = adjoint(m) @ m
    return operator_norm(m @ g - g @ m)


def is_quasinormal(t, tol: float = DEFAULT_TOL, with_residual: bool = False):
    """``T`` commutes with ``T*T`` up to ``tol (1 + ||T||)^3``."""
    m = as_cmatrix(t, square=True)
    res = quasinormal_residual(m)
    ok = res <= tol * (1.0 + operator_norm(m)) ** 3
    return (ok, res) if with_residual else ok


def is_normal(t, tol: float = DEFAULT_TOL, with_residual: bool = False):
    m = as_cmatrix(t, square=True)
    res = operator_norm(adjoint(m) @ m - m @ adjoint(m))
    ok = res <= tol * (1.0 + operator_norm(m)) ** 2
    return (ok, res) if with_residual else ok


def is_p_hyponormal(t, p: float = 1.0, tol: float = DEFAULT_TOL, with_residual: bool = False):
    """``(T*T)^p >= (TT*)^p``; the witness is the least eigenvalue of the difference."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    m = as_cmatrix(t, square=True)
    diff = psd_power(adjoint(m) @ m, p) - psd_power(m @ adjoint(m), p)
    witness = float(np.linalg.eigvalsh(0.5 * (diff + adjoint(diff)))[0])
    ok = witness >= -tol * (1.0 + operator_norm(m)) ** (2 * p)
    return (ok, witness) if with_residual else ok


def is_partial_isometry(v, tol: float = DEFAULT_TOL, with_residual: bool = False):
    m = as_cmatrix(v, square=True)
    res = operator_norm(m @ adjoint(m) @ m - m)
    ok = res <= tol * (1.0 + operator_norm(m))
    return (ok, res) if with_residual else ok


def null_space(a, rank_tol=None) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical null space of ``a``."""
    m = as_cmatrix(a)
    _, s, wh = np.linalg.svd(m)
    if rank_tol is None:
        rank_tol = default_rank_tol(float(s[0]))
    rank = int(np.count_nonzero(s > rank_tol))
    return adjoint(wh[rank:, :])


@dataclass(frozen=True)
class KernelInclusion:
    holds: bool
    lemma_consistent: bool
    residuals: dict = field(default_factory=dict)


def kernel_inclusion_check(t, tol: float = DEFAULT_TOL) -> KernelInclusion:
    """Test ``N(T*) in N(T)`` together with its two equivalent reformulations.

    The inclusion itself maps a basis of ``N(T*)`` through ``P = |T|``; the
    other conditions are ``V V* P = P V V* = P`` and ``V V* V* = V*``.
    """
    m = as_cmatrix(t, square=True)
    parts = canonical_polar(m)
    v, p = parts.isometry_part, parts.modulus
    scale = 1.0 + operator_norm(m)
    z = null_space(adjoint(m), parts.rank_tol)
    incl = operator_norm(p @ z) if z.shape[1] else 0.0
    vv = v @ adjoint(v)
    comm = max(operator_norm(vv @ p - p), operator_norm(p @ vv - p))
    quasi = operator_norm(vv @ adjoint(v) - adjoint(v))
    c1 = incl <= tol * scale
    c2 = comm <= tol * scale
    c3 = quasi <= tol
    return KernelInclusion(
        holds=c1,
        lemma_consistent=(c1 == c2 == c3),
        residuals={"inclusion": incl, "projection_commutes": comm, "adjoint_quasinormal": quasi},
    )


@dataclass(frozen=True)
class ClassReport:
    normal: bool
    quasinormal: bool
    hyponormal: bool
    semi_hyponormal: bool
    partial_isometry: bool
    witnesses: dict

    @property
    def consistent(self) -> bool:
        """normal => quasinormal => hyponormal => semi-hyponormal."""
        chain = [self.normal, self.quasinormal, self.hyponormal, self.semi_hyponormal]
        return all(b or not a for a, b in zip(chain, chain[1:]))


def classify(t, tol: float = DEFAULT_TOL) -> ClassReport:
    m = as_cmatrix(t, square=True)
    normal, r_n = is_normal(m, tol, with_residual=True)
    quasi, r_q = is_quasinormal(m, tol, with_residual=True)
    hypo, w_1 = is_p_hyponormal(m, 1.0, tol, with_residual=True)
    semi, w_half = is_p_hyponormal(m, 0.5, tol, with_residual=True)
    piso, r_p = is_partial_isometry(m, tol, with_residual=True)
    return ClassReport(
        normal, quasi, hypo, semi, piso,
        {"normal": r_n, "quasinormal": r_q, "hyponormal": w_1,
         "semi_hyponormal": w_half, "partial_isometry": r_p},
    )
