import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opnorm import ck_norms as ck
from opnorm.banach_embed import discretize_dual_ball, dual_ball_norm
from opnorm.spaces import lp_space

from .oracles import cone_sampling_preserves, sign_vector_sup_norm


def test_cone_preserving_examples():
    assert ck.cone_preserving(np.eye(3)).preserving
    res = ck.cone_preserving(np.array([[1, -0.5], [0, 1]]))
    assert not res.preserving
    np.testing.assert_array_equal(res.witness, [0, 1])
    assert (np.array([[1, -0.5], [0, 1]]) @ res.witness).min() < 0


def test_cone_preserving_rejects_complex_entries():
    assert not ck.cone_preserving(np.array([[1, 1j], [0, 1]])).preserving


def test_cone_preserving_agrees_with_sampling_oracle():
    rng = np.random.default_rng(0)
    for trial in range(60):
        k = int(rng.integers(1, 13))
        T = rng.exponential(size=(k, k)) * (rng.uniform(size=(k, k)) < 0.6)
        if trial % 2:
            i, j = rng.integers(0, k, size=2)
            T[i, j] = -rng.uniform(0.01, 1)
        assert ck.cone_preserving(T).preserving == cone_sampling_preserves(T, 10_000, trial)


def test_op_norm_sup_examples():
    assert ck.op_norm_sup(np.diag([1.0, -4.0, 2j])) == 4.0
    assert ck.op_norm_sup(np.ones((3, 3))) == 3.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 10))
def test_op_norm_sup_matches_sign_vectors(seed, k):
    T = np.random.default_rng(seed).standard_normal((k, k))
    assert abs(ck.op_norm_sup(T) - sign_vector_sup_norm(T)) <= 1e-12


def test_op_norm_sup_complex_vs_unimodular_sampling():
    rng = np.random.default_rng(1)
    T = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    f = np.exp(2j * np.pi * rng.uniform(size=(3, 200_000)))
    sampled = np.abs(T @ f).max()
    exact = ck.op_norm_sup(T)
    assert sampled <= exact + 1e-12
    assert exact - sampled <= 1e-3


def test_mult_norm_ck_examples():
    F = ck.mult_norm_ck(5)
    np.testing.assert_array_equal(F(np.ones(5)), np.eye(5))
    assert F.value_norm(np.ones(5)) == 1.0
    np.testing.assert_array_equal(F(np.zeros(5)), np.zeros((5, 5)))
    rng = np.random.default_rng(2)
    g = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    assert F.value_norm(g) == pytest.approx(np.abs(g).max(), rel=1e-15)
    assert F.ck.labels[0] == "t=0" and F.ck.labels[-1] == "t=1"


def test_diagonal_form_matches_dense():
    rng = np.random.default_rng(3)
    for F in (ck.mult_norm_ck(6), ck.negated_entry_norm(ck.mult_norm_ck(6), 2)):
        X = F.domain.random_vectors(rng, 8)
        np.testing.assert_array_equal(F.evaluate_many(X), np.array([np.diag(v) for v in F.diagonals_many(X)]))


def test_axioms_pass_for_mult_norm():
    rep = ck.check_ck_axioms(ck.mult_norm_ck(8), 500, 100, seed=0)
    assert rep.passed, rep.failures()
    assert rep.axioms["triangle"].route["cone"] == 500
    assert rep.axioms["positivity"].details["representation"] == "diagonal"


def test_dense_and_diagonal_checks_agree():
    F = ck.mult_norm_ck(6)
    dense = ck.CKValuedNorm(F.domain, F.size, F.evaluator, "dense copy", F.batch_evaluator)
    a = ck.check_ck_axioms(F, 100, 50, seed=4)
    b = ck.check_ck_axioms(dense, 100, 50, seed=4)
    assert b.axioms["positivity"].details["representation"] == "dense"
    for name in a.axioms:
        assert a.axioms[name].passed == b.axioms[name].passed
        assert a.axioms[name].worst_residual == pytest.approx(b.axioms[name].worst_residual, abs=1e-14)


def test_lying_diagonal_form_falls_back_to_dense():
    F = ck.mult_norm_ck(4)
    liar = ck.CKValuedNorm(F.domain, F.size, F.evaluator, "liar", F.batch_evaluator,
                           diagonal_evaluator=lambda X: np.abs(X) + 1.0)
    rep = ck.check_ck_axioms(liar, 50, 20, seed=0)
    assert rep.axioms["positivity"].details["representation"] == "dense"
    assert rep.passed


def test_negated_entry_fails_positivity_with_witness():
    G = ck.negated_entry_norm(ck.mult_norm_ck(8), 3)
    rep = ck.check_ck_axioms(G, 100, 50, seed=0)
    pos = rep.axioms["positivity"]
    assert not pos.passed
    assert np.asarray(pos.witness["image"]).real.min() < 0
    np.testing.assert_array_equal(pos.witness["f"], np.eye(8)[3])


def test_axioms_pass_for_dual_ball_norm():
    disc = discretize_dual_ball(lp_space(3, 1.0, "real"), "exact")
    assert ck.check_ck_axioms(dual_ball_norm(disc), 300, 50, seed=1).passed


def test_nonnegative_functions_are_nonnegative_and_nonzero():
    f = ck.nonnegative_functions(np.random.default_rng(5), 7, 500)
    assert f.min() >= 0
    assert (f > 0).any(axis=1).all()
    assert ((f > 0).sum(axis=1) == 1).any()
