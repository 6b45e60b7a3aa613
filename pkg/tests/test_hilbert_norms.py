import numpy as np
import pytest

from opnorm import hilbert_norms as hn
from opnorm.exceptions import SingularOperatorError
from opnorm.numkernel import spectral_norm
from opnorm.spaces import lp_space


def test_trivial_norm_examples():
    F = hn.trivial_norm(lp_space(3, 2.0), 2)
    np.testing.assert_array_equal(F(np.zeros(3)), np.zeros((2, 2)))
    np.testing.assert_allclose(F(np.array([3.0, 4.0, 0.0])), np.diag([5.0, 5.0]))


def test_mult_norm_l2_examples():
    F = hn.mult_norm_l2(6)
    np.testing.assert_allclose(F(np.ones(6)), np.eye(6))
    assert F.value_norm(np.ones(6)) == 1.0
    np.testing.assert_array_equal(F(np.zeros(6)), np.zeros((6, 6)))
    rng = np.random.default_rng(0)
    for _ in range(20):
        g = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        assert F.value_norm(g) == pytest.approx(np.abs(g).max(), rel=1e-15)


def test_batch_evaluator_matches_pointwise():
    rng = np.random.default_rng(1)
    base = hn.mult_norm_l2(4)
    T = hn.random_with_condition(rng, 4, 10.0)
    for F in (base, hn.compose_norm(base, T), hn.shifted_norm(base, 0.01),
              hn.trivial_norm(lp_space(4, 1.0), 3)):
        X = F.domain.random_vectors(rng, 10)
        X[0] = 0
        np.testing.assert_allclose(F.evaluate_many(X), np.array([F(x) for x in X]), atol=1e-14)


def test_compose_identity_and_scaling():
    rng = np.random.default_rng(2)
    F = hn.mult_norm_l2(4)
    x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    np.testing.assert_allclose(hn.compose_norm(F, np.eye(4))(x), F(x))
    np.testing.assert_allclose(hn.compose_norm(F, 2 * np.eye(4))(x), 2 * F(x))


def test_compose_rejects_singular():
    T = np.diag([1.0, 1.0, 1.0, 0.0])
    with pytest.raises(SingularOperatorError):
        hn.compose_norm(hn.mult_norm_l2(4), T)
    with pytest.raises(ValueError):
        hn.compose_norm(hn.mult_norm_l2(4), np.eye(3))


def test_random_condition_number():
    rng = np.random.default_rng(3)
    T = hn.random_with_condition(rng, 5, 1e3)
    s = np.linalg.svd(T, compute_uv=False)
    assert s[0] / s[-1] == pytest.approx(1e3)


def test_axioms_pass_for_valid_norms():
    rng = np.random.default_rng(4)
    norms = [hn.trivial_norm(lp_space(3, 1.0), 2), hn.mult_norm_l2(8),
             hn.compose_norm(hn.mult_norm_l2(4), hn.random_with_condition(rng, 4, 10.0))]
    for F in norms:
        rep = hn.check_lh_axioms(F, 500, seed=1)
        assert rep.passed, rep.failures()
        assert set(rep.axioms) == {"positivity", "triangle", "homogeneity", "definiteness"}


def test_shifted_norm_fails_positivity_with_witness():
    G = hn.shifted_norm(hn.mult_norm_l2(8), 0.01)
    rep = hn.check_lh_axioms(G, 200, seed=0)
    pos = rep.axioms["positivity"]
    assert not pos.passed
    w = pos.witness
    assert w["quadratic_form"] < 0
    h = w["h"]
    assert np.real(h.conj() @ G(w["x"]) @ h) < 0
    assert "positivity" in rep.failures()


def test_report_serializes():
    rep = hn.check_lh_axioms(hn.mult_norm_l2(3), 20, seed=0)
    d = rep.to_dict()
    assert d["status"] == "pass"
    assert "20" in d["claim"] or "samples" in d["claim"]


def test_boundedness_examples():
    assert hn.boundedness_estimate(hn.trivial_norm(lp_space(3, 2.0), 2), 500, seed=0) == pytest.approx(1.0, abs=1e-14)
    for n in (4, 8, 16):
        assert abs(hn.boundedness_estimate(hn.mult_norm_l2(n), 500, seed=0) - 1.0) <= 1e-12


def test_boundedness_compose_vs_denser_sampling():
    rng = np.random.default_rng(5)
    T = hn.random_with_condition(rng, 4, 10.0)
    F = hn.compose_norm(hn.mult_norm_l2(4), T)
    est = hn.boundedness_estimate(F, 2000, seed=1)
    dense = hn.boundedness_estimate(F, 20000, seed=2)
    # operator norm of T from l_inf to l_inf is the exact bound
    exact = np.abs(T).sum(axis=1).max()
    assert est <= dense + 1e-9 or est <= exact + 1e-9
    assert dense <= exact + 1e-9
    polished = hn.boundedness_estimate(F, 2000, seed=1, polish=8)
    assert est <= polished <= exact + 1e-9
    assert polished >= 0.99 * exact


def test_boundedness_is_monotone_in_samples():
    F = hn.compose_norm(hn.mult_norm_l2(4), hn.random_with_condition(np.random.default_rng(6), 4, 5.0))
    vals = [hn.boundedness_estimate(F, n, seed=3) for n in (100, 1000, 5000)]
    assert vals == sorted(vals)


def test_spectral_norm_is_the_lh_operator_norm():
    F = hn.mult_norm_l2(3)
    A = F(np.array([1, -2j, 0.5]))
    assert F.operator_norm(A) == pytest.approx(spectral_norm(A))
