import math

import numpy as np
import pytest

from meanform.binomial import binomial_pmf
from meanform.errors import KernelInclusionViolated, NotPartialIsometry, ZeroVector
from meanform.linalg import operator_norm
from meanform.polar import (
    aluthge_transform,
    binomial_iterate,
    canonical_polar,
    mean_iterates,
    mean_limit_estimate,
    mean_transform,
    partial_isometry_mean,
    rank_one_aluthge,
    rank_one_mean_iterate,
)
from meanform.verify import generators as gen

NIL = np.array([[0, 1], [0, 0]], dtype=complex)
RANK_ONE = np.array([[1, 1], [0, 0]], dtype=complex)


def test_polar_examples():
    p = canonical_polar(NIL)
    assert np.abs(p.isometry_part - NIL).max() <= 1e-12
    assert np.abs(p.modulus - np.diag([0, 1])).max() <= 1e-12
    p = canonical_polar(np.eye(3))
    assert np.allclose(p.isometry_part, np.eye(3)) and np.allclose(p.modulus, np.eye(3))
    p = canonical_polar(np.diag([2.0, -3.0]))
    assert np.allclose(p.modulus, np.diag([2, 3])) and np.allclose(p.isometry_part, np.diag([1, -1]))


def test_polar_invariants(rng):
    for k in range(300):
        d = int(rng.integers(2, 9))
        t = gen.random_rank_deficient(rng, d) if k % 2 else gen.random_matrix(rng, d)
        p = canonical_polar(t)
        v, m = p.isometry_part, p.modulus
        assert operator_norm(v @ m - t) <= 1e-10 * (1 + operator_norm(t))
        proj = v.conj().T @ v
        assert operator_norm(proj @ proj - proj) <= 1e-9
        assert operator_norm(m - m.conj().T) <= 1e-10
        assert np.linalg.eigvalsh(m)[0] >= -1e-10
        ranks = {np.linalg.matrix_rank(x, tol=p.rank_tol) for x in (t, v, m)}
        assert ranks == {p.numerical_rank}


def test_mean_transform_examples():
    assert np.allclose(mean_transform(NIL), NIL / 2, atol=1e-15)
    assert np.allclose(mean_transform(np.diag([1.0, 2.0])), np.diag([1, 2]))
    # x = (1,0), y = (1,1): oracle from the rank-one closed form at n = 1
    assert np.allclose(mean_transform(RANK_ONE), [[0.75, 0.75], [0.25, 0.25]], atol=1e-14)
    assert np.allclose(rank_one_mean_iterate([1, 0], [1, 1], 1), [[0.75, 0.75], [0.25, 0.25]])


def test_aluthge_examples():
    assert np.allclose(aluthge_transform(np.diag([1.0, 2.0])), np.diag([1, 2]))
    assert np.abs(aluthge_transform(NIL)).max() <= 1e-15
    assert np.allclose(aluthge_transform(RANK_ONE), 0.5 * np.ones((2, 2)), atol=1e-14)
    assert np.allclose(rank_one_aluthge([1, 0], [1, 1]), 0.5 * np.ones((2, 2)))
    t = np.diag([1.0, 4.0]) @ np.array([[0, 1], [1, 0]])
    assert np.allclose(aluthge_transform(t, 0.0), t)
    assert np.allclose(aluthge_transform(t, 1.0), canonical_polar(t).modulus @ canonical_polar(t).isometry_part)


def test_iterates_nilpotent():
    tr = mean_iterates(NIL, n_max=20, stop_tol=1e-10, keep_snapshots=True)
    for n, snap in enumerate(tr.snapshots):
        assert np.allclose(snap, NIL / 2**n, atol=1e-15)
    assert math.isnan(tr.steps[0].step_distance)
    assert tr.limit_estimate <= 2**-19


def test_iterates_quasinormal_fixed():
    tr = mean_iterates(np.diag([1.0, 2.0]), n_max=50, keep_snapshots=True)
    assert tr.converged and len(tr.steps) == 2
    assert all(np.allclose(s, np.diag([1, 2])) for s in tr.snapshots)
    assert tr.steps[-1].is_quasinormal


def test_iterates_rank_one_decay():
    tr = mean_iterates(RANK_ONE, n_max=60, keep_snapshots=True)
    assert np.allclose(tr.snapshots[-1], 0.5 * np.ones((2, 2)), atol=1e-9)
    dists = [s.step_distance for s in tr.steps[1:20]]
    ratios = np.array(dists[1:]) / np.array(dists[:-1])
    assert np.allclose(ratios, 0.5, atol=1e-6)


def test_iterate_norms_non_increasing(rng):
    for _ in range(30):
        tr = mean_iterates(gen.random_matrix(rng, 4), n_max=40, radius_points=90)
        norms = [s.norm for s in tr.steps]
        assert all(b <= a + 1e-10 for a, b in zip(norms, norms[1:]))
        if tr.converged:
            assert tr.limit_estimate == norms[-1]


def test_mean_limit_examples():
    ml = mean_limit_estimate(np.diag([1.0, 2.0]))
    assert ml.converged and ml.value == pytest.approx(2.0)
    assert mean_limit_estimate(NIL, stop_tol=1e-10).value <= 2e-10
    assert mean_limit_estimate(RANK_ONE).value == pytest.approx(1.0, abs=1e-8)


def test_mean_limit_not_converged_reported():
    ml = mean_limit_estimate(RANK_ONE, n_max=3)
    assert not ml.converged and ml.iterations == 3


def test_binomial_pmf_exact_and_large():
    j, w = binomial_pmf(5)
    assert dict(zip(j.tolist(), w.tolist())) == {k: math.comb(5, k) / 32 for k in range(6)}
    for n in (63, 1000, 2**14):
        j, w = binomial_pmf(n)
        assert abs(w.sum() - 1) <= 1e-15
        assert abs(w[j % 2 == 0].sum() - 0.5) <= 1e-15
        k = n // 2 + 3
        assert w[j == k][0] == pytest.approx(math.comb(n, k) / 2**n, rel=1e-15)
    assert not binomial_pmf(70)[1].flags.writeable


def test_binomial_iterate_examples(rng):
    t = gen.random_invertible(rng, 4)
    assert np.allclose(binomial_iterate(t, 0), t, atol=1e-13)
    assert operator_norm(binomial_iterate(t, 1) - mean_transform(t)) <= 1e-11
    t = gen.random_invertible(rng, 6)
    snap = mean_iterates(t, n_max=5, stop_tol=0, keep_snapshots=True).snapshots[5]
    assert operator_norm(binomial_iterate(t, 5) - snap) <= 1e-10
    with pytest.raises(KernelInclusionViolated):
        binomial_iterate(NIL, 2)


def test_binomial_iterate_kernel_aligned(rng):
    for _ in range(20):
        t = gen.random_kernel_aligned(rng, 5)
        cur = t
        for n in range(8):
            assert operator_norm(binomial_iterate(t, n) - cur) <= 1e-9 * (1 + operator_norm(t))
            cur = mean_transform(cur)


def test_rank_one_closed_form(rng):
    x, y = gen.random_rank_one_pair(rng, 5)
    assert np.allclose(rank_one_mean_iterate(x, y, 0), np.outer(x, y.conj()))
    inner = np.vdot(y, x)
    delta = rank_one_aluthge(x, y)
    const = (np.linalg.norm(x) + abs(inner) / np.linalg.norm(y)) * np.linalg.norm(y)
    for n in (10, 30, 50):
        assert operator_norm(rank_one_mean_iterate(x, y, n) - delta) <= 2.0**-n * const + 1e-15
    with pytest.raises(ZeroVector):
        rank_one_mean_iterate(np.zeros(3), y[:3], 1)


def test_partial_isometry_mean_examples(rng):
    u = gen.random_unitary(rng, 4)
    assert np.allclose(partial_isometry_mean(u), u)
    assert np.allclose(partial_isometry_mean(NIL), NIL / 2)
    shift = np.diag([1.0, 1.0], -1)
    out = partial_isometry_mean(shift)
    assert np.allclose(np.diag(out, -1), [1.0, 0.5])
    assert np.allclose(out, mean_transform(shift), atol=1e-10)
    with pytest.raises(NotPartialIsometry):
        partial_isometry_mean(np.diag([0.5, 1.0]))


def test_equivariance_and_homogeneity(rng):
    for _ in range(100):
        d = int(rng.integers(2, 7))
        t, u = gen.random_matrix(rng, d), gen.random_unitary(rng, d)
        c = complex(*rng.standard_normal(2))
        hat = mean_transform(t)
        s = 1e-9 * (1 + operator_norm(t))
        assert operator_norm(mean_transform(c * t) - c * hat) <= s * (1 + abs(c))
        assert operator_norm(mean_transform(u @ t @ u.conj().T) - u @ hat @ u.conj().T) <= s
        assert operator_norm(mean_transform(t.conj()) - hat.conj()) <= s
    assert np.allclose(mean_transform(np.eye(4)), np.eye(4))
