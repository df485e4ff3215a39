import numpy as np
import pytest

from meanform.classes import (
    classify,
    is_normal,
    is_p_hyponormal,
    is_partial_isometry,
    is_quasinormal,
    kernel_inclusion_check,
)
from meanform.linalg import operator_norm
from meanform.polar import mean_transform
from meanform.shifts import Periodic, truncated_shift_matrix
from meanform.verify import generators as gen

NIL = np.array([[0, 1], [0, 0]], dtype=complex)


def test_quasinormal_examples():
    assert is_quasinormal(np.diag([1.0, 2.0]))
    ok, res = is_quasinormal(NIL, with_residual=True)
    assert not ok and res == pytest.approx(1.0)
    assert is_quasinormal(2 * np.array([[0, -1], [1, 0]]))


def test_p_hyponormal_examples(rng):
    n = gen.random_normal(rng, 4)
    for p in (0.25, 0.5, 1.0):
        assert is_p_hyponormal(n, p)
    ok, w = is_p_hyponormal(NIL, 0.5, with_residual=True)
    assert not ok and w == pytest.approx(-1.0)
    shift = truncated_shift_matrix(Periodic((1.0, 2.0)), 3)
    ok, w = is_p_hyponormal(shift, 1.0, with_residual=True)
    assert not ok and w == pytest.approx(-4.0)
    diff = shift.conj().T @ shift - shift @ shift.conj().T
    assert np.allclose(np.diag(diff).real, [1, 3, -4])


def test_partial_isometry_examples(rng):
    assert is_partial_isometry(gen.random_unitary(rng, 3))
    assert is_partial_isometry(NIL)
    assert not is_partial_isometry(np.diag([0.5, 1.0]))


def test_kernel_inclusion_examples(rng):
    assert kernel_inclusion_check(gen.random_invertible(rng, 4)).holds
    assert not kernel_inclusion_check(NIL).holds
    x = np.array([1.0, 1.0])
    ki = kernel_inclusion_check(np.outer(x, x))
    assert ki.holds and ki.lemma_consistent


def test_lemma_equivalence_ensemble(rng):
    bad = 0
    for _ in range(500):
        t = gen.random_mixed(rng, int(rng.integers(2, 8)))
        bad += not kernel_inclusion_check(t, 1e-8).lemma_consistent
    assert bad == 0


def test_hyponormal_implies_semi_and_quasinormal_fixed(rng):
    for k in range(300):
        d = int(rng.integers(2, 6))
        t = gen.random_normal(rng, d) if k % 3 == 0 else gen.random_matrix(rng, d)
        if is_p_hyponormal(t, 1.0):
            assert is_p_hyponormal(t, 0.5)
        if is_quasinormal(t):
            assert operator_norm(mean_transform(t) - t) <= 1e-8 * (1 + operator_norm(t))


def test_classify_report(rng):
    rep = classify(gen.random_normal(rng, 3))
    assert rep.normal and rep.quasinormal and rep.hyponormal and rep.semi_hyponormal
    assert rep.consistent
    rep = classify(NIL)
    assert not rep.normal and rep.partial_isometry and rep.consistent
    assert set(rep.witnesses) == {"normal", "quasinormal", "hyponormal", "semi_hyponormal",
                                  "partial_isometry"}
    assert is_normal(np.eye(2))
