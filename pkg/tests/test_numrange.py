import numpy as np
import pytest

from meanform.errors import NotPSD
from meanform.linalg import operator_norm
from meanform.numrange import (
    closure_verdict,
    gelfand_spectral_radius,
    in_closure_numrange,
    msy_inequality_check,
    numerical_radius,
    numerical_range_boundary,
    spectral_radius,
    support_inequality_check,
)
from meanform.polar import mean_transform
from meanform.verify import generators as gen

NIL = np.array([[0, 1], [0, 0]], dtype=complex)


def _rand_unit(rng, n, d):
    x = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _abs_form(t, x):
    return np.abs(np.einsum("ki,ij,kj->k", x.conj(), t, x))


def brute_force_radius(t, rng, samples=10**6, chunk=10**5, polish=0):
    """Max of |<Tx, x>| over random unit vectors.

    With ``polish`` the best samples are improved by random-perturbation hill
    climbing, which still only evaluates ``|<Tx, x>|``.
    """
    d = t.shape[0]
    pool, vals = [], []
    for _ in range(samples // chunk):
        x = _rand_unit(rng, chunk, d)
        v = _abs_form(t, x)
        top = np.argsort(v)[-32:]
        pool.append(x[top])
        vals.append(v[top])
    x, v = np.concatenate(pool), np.concatenate(vals)
    step = 0.1
    for _ in range(polish):
        y = x + step * _rand_unit(rng, len(x), d)
        y /= np.linalg.norm(y, axis=1, keepdims=True)
        vy = _abs_form(t, y)
        better = vy > v
        x[better], v[better] = y[better], vy[better]
        step = max(step * 0.995, 1e-6)
    return float(v.max())


def test_spectral_radius_examples(rng):
    assert spectral_radius(np.diag([1.0, 2.0])) == pytest.approx(2.0)
    assert spectral_radius(NIL) == 0.0
    t = gen.random_matrix(rng, 6)
    assert gelfand_spectral_radius(t) == pytest.approx(spectral_radius(t), abs=1e-6)


def test_spectral_radius_large_dim_uses_gelfand(rng):
    q = gen.random_unitary(rng, 70)
    d = np.linspace(0.1, 1.5, 70)
    t = (q * d) @ q.conj().T
    assert spectral_radius(t) == pytest.approx(1.5, rel=1e-6)


def test_boundary_examples(rng):
    b = numerical_range_boundary(np.diag([0.0, 1.0]), 360)
    assert np.all(np.abs(b.points.imag) <= 1e-12)
    assert np.all((b.points.real >= -1e-12) & (b.points.real <= 1 + 1e-12))
    assert b.num_radius == pytest.approx(1.0)
    b = numerical_range_boundary(NIL, 360)
    assert np.allclose(np.abs(b.points), 0.5, atol=1e-12)
    assert b.num_radius == pytest.approx(0.5, abs=1e-6)
    assert brute_force_radius(NIL, rng) == pytest.approx(0.5, abs=2e-3)


def test_boundary_invariants(rng):
    for _ in range(50):
        t = gen.random_matrix(rng, int(rng.integers(2, 6)))
        b = numerical_range_boundary(t, 180)
        proj = (np.exp(-1j * b.thetas) * b.points).real
        assert np.allclose(proj, b.supports, atol=1e-9)
        assert b.num_radius == pytest.approx(np.abs(b.points).max())
        assert len(b.samples()) == 180


def test_numerical_radius_against_sampling(rng):
    for _ in range(5):
        t = gen.random_matrix(rng, int(rng.integers(2, 5)))
        w = numerical_radius(t)
        assert brute_force_radius(t, rng, samples=2 * 10**5) <= w + 1e-12
        assert brute_force_radius(t, rng, polish=3000) == pytest.approx(w, abs=2e-3)


def test_radius_sandwich(rng):
    for _ in range(200):
        t = gen.random_matrix(rng, int(rng.integers(2, 7)))
        w = numerical_radius(t)
        assert spectral_radius(t) <= w + 1e-10 and w <= operator_norm(t) + 1e-10
        assert numerical_radius(mean_transform(t)) <= w + 1e-8 * (1 + operator_norm(t))


def test_closure_examples(rng):
    assert in_closure_numrange(NIL, 0.0)
    assert not in_closure_numrange(np.diag([0.0, 1.0]), 1.1)
    t = gen.random_matrix(rng, 4)
    assert all(in_closure_numrange(t, mu, tol=1e-8) for mu in numerical_range_boundary(t).points)
    v = closure_verdict(np.diag([0.0, 1.0]), 1.0 + 1e-9)
    assert v.borderline


def test_support_inequality_examples(rng):
    t = gen.random_matrix(rng, 4)
    s = support_inequality_check(t, 0)
    assert s.lhs <= s.rhs + 1e-9
    n = gen.random_normal(rng, 4)
    s = support_inequality_check(n, 0)
    assert s.lhs == pytest.approx(s.rhs, abs=1e-10)
    s = support_inequality_check(NIL, 1)
    assert s.lhs <= s.rhs + 1e-9
    s = support_inequality_check(np.diag([1.0, 2.0]), 1)
    assert s.lhs == pytest.approx(1.0) and s.rhs == pytest.approx(1.0)


def test_msy_examples(rng):
    a, b, x = gen.random_psd(rng, 3), gen.random_psd(rng, 3), gen.random_matrix(rng, 3)
    s = msy_inequality_check(a, b, x, 0.5)
    assert s.lhs == s.rhs
    s = msy_inequality_check(np.eye(3), np.eye(3), x, 0.3)
    assert s.lhs == pytest.approx(numerical_radius(x)) and s.rhs == pytest.approx(s.lhs)
    with pytest.raises(NotPSD):
        msy_inequality_check(-np.eye(2), np.eye(2), np.eye(2), 0.2)


def test_msy_equal_factors(rng):
    # the form used for w(Aluthge(T)) <= w(mean(T)): A = B = |T|
    for _ in range(300):
        d = int(rng.integers(2, 5))
        a, x = gen.random_psd(rng, d), gen.random_matrix(rng, d)
        s = msy_inequality_check(a, a, x, float(rng.choice([0, 0.25, 0.5, 0.75, 1])))
        assert s.lhs <= s.rhs + 1e-7


def test_msy_distinct_factors_random(rng):
    # stated for independent positive A, B; expected to fail, see the decisions log
    bad = []
    for _ in range(200):
        a, b, x = gen.random_psd(rng, 3), gen.random_psd(rng, 3), gen.random_matrix(rng, 3)
        alpha = float(rng.choice([0, 0.25, 0.5, 0.75, 1]))
        s = msy_inequality_check(a, b, x, alpha)
        if s.lhs > s.rhs + 1e-7:
            bad.append((alpha, s.lhs - s.rhs))
    assert not bad, f"{len(bad)} of 200 random (A, B, X) violate it: {bad}"
