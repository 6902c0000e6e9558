import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import rel_err
from bgshrink.dictionary import band_layout, make_dictionary, random_orthogonal
from bgshrink.exact import enumerate_supports, exact_risk, masks_to_bool
from bgshrink.model import ModelParams, make_rng, sample_signal
from bgshrink.risk import (estimate_risk, excess_map, excess_mmse, expected_support_size,
                           map_risk, mmse_risk, oracle_risk, oracle_term, posterior_inclusion,
                           posterior_mc_risk, risk_report)
from bgshrink.shrinkage import atom_constants, map_shrink, mmse_shrink


def _instance(seed, m, hetero=True):
    rng = make_rng(seed, "risk-test")
    Q = random_orthogonal(m, rng)
    if hetero:
        params = ModelParams(rng.uniform(0.05, 0.95, m), rng.uniform(0.3, 3, m), rng.uniform(0.2, 2))
    else:
        params = ModelParams.homoscedastic(m, rng.uniform(0.05, 0.95), rng.uniform(0.3, 3),
                                           rng.uniform(0.2, 2))
    D = make_dictionary("explicit-matrix", matrix=Q)
    _, _, y = sample_signal(D, params, seed)
    return Q, params, y, Q.T @ y


def test_inclusion_at_zero_and_infinity():
    params = ModelParams(np.array([0.1, 0.4]), np.array([1.0, 2.0]), 1.0)
    G = atom_constants(params).G
    np.testing.assert_allclose(posterior_inclusion(np.zeros(2), params), G / (1 + G), rtol=1e-15)
    assert np.all(posterior_inclusion(np.array([1e4, -1e4]), params) == 1.0)


def test_oracle_risk_examples():
    params = ModelParams.homoscedastic(8, 0.3, 1.0, 1.0)
    assert oracle_risk(np.zeros(8, bool), params) == 0
    support = np.array([1, 1, 1, 1, 1, 0, 0, 0], bool)
    assert oracle_risk(support, params) == pytest.approx(2.5, rel=1e-15)


@pytest.mark.parametrize("m", [3, 6, 10])
def test_oracle_risk_equals_dense_trace(m):
    Q, params, y, _ = _instance(m, m)
    e = enumerate_supports(y, Q, params)
    masks = masks_to_bool(e.masks, m)
    np.testing.assert_allclose(oracle_risk(masks, params), e.trace, rtol=1e-12, atol=1e-14)


def test_mmse_risk_at_zero_observation():
    params = ModelParams(np.array([0.1, 0.3, 0.6]), np.array([1.0, 0.5, 2.0]), 0.8)
    c2, G = atom_constants(params).c2, atom_constants(params).G
    expected = np.sum(c2 * 0.64 * G / (1 + G))
    assert mmse_risk(np.zeros(3), params) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("seed, m", [(1, 2), (2, 5), (3, 8), (4, 10)])
def test_risks_match_enumeration(seed, m):
    Q, params, y, beta = _instance(seed, m)
    assert rel_err(mmse_risk(beta, params), exact_risk(y, Q, params, mmse_shrink(beta, params).xhat)) < 1e-9
    assert rel_err(map_risk(beta, params), exact_risk(y, Q, params, map_shrink(beta, params).xhat)) < 1e-9


@pytest.mark.parametrize("seed, m", [(5, 4), (6, 9)])
def test_expected_support_size_matches_enumeration(seed, m):
    Q, params, y, beta = _instance(seed, m)
    e = enumerate_supports(y, Q, params)
    assert rel_err(expected_support_size(beta, params), e.probabilities @ e.sizes) < 1e-9


@given(seed=st.integers(0, 10 ** 6), m=st.integers(1, 40))
def test_ordering_and_map_relation(seed, m):
    rng = make_rng(seed)
    params = ModelParams(rng.uniform(0.01, 0.99, m), rng.uniform(0.1, 5, m), rng.uniform(0.1, 5))
    beta = rng.normal(0, rng.uniform(0.1, 10), m)
    r = risk_report(beta, params)
    assert 0 <= r.mse_oracle <= r.mse_mmse * (1 + 1e-12) + 1e-300
    assert r.mse_mmse <= r.mse_map * (1 + 1e-12)
    xmap, xmmse = map_shrink(beta, params).xhat, mmse_shrink(beta, params).xhat
    assert rel_err(r.mse_map, r.mse_mmse + np.sum((xmap - xmmse) ** 2)) < 1e-9
    # difference written out term by term
    c2 = atom_constants(params).c2
    g = posterior_inclusion(beta, params)
    keep = map_shrink(beta, params).support
    diff = np.sum(c2 ** 2 * beta ** 2 * (keep * (1 - 2 * g) + g ** 2))
    assert abs((r.mse_map - r.mse_mmse) - diff) <= 1e-9 * max(r.mse_map, 1e-300)


@given(seed=st.integers(0, 10 ** 6), m=st.integers(1, 30))
def test_pythagorean_identity(seed, m):
    rng = make_rng(seed)
    params = ModelParams(rng.uniform(0.01, 0.99, m), rng.uniform(0.1, 5, m), rng.uniform(0.1, 5))
    beta = rng.normal(0, 3, m)
    xhat = rng.normal(0, 3, m)
    xmmse = mmse_shrink(beta, params).xhat
    lhs = estimate_risk(beta, params, xhat)
    rhs = np.sum((xhat - xmmse) ** 2) + mmse_risk(beta, params)
    assert rel_err(lhs, rhs) < 1e-9


def test_risk_of_zero_estimate():
    params = ModelParams(np.array([0.2, 0.5]), np.array([1.0, 2.0]), 0.5)
    beta = np.array([0.4, -3.0])
    c2 = atom_constants(params).c2
    g = posterior_inclusion(beta, params)
    expected = np.sum(g * (c2 * 0.25 + c2 ** 2 * beta ** 2))
    assert estimate_risk(beta, params, np.zeros(2)) == pytest.approx(expected, rel=1e-14)


def test_map_mmse_align_for_rare_atoms():
    params = ModelParams.homoscedastic(20, 1e-8, 1.0, 1.0)
    beta = make_rng(1).normal(0, 1.5, 20)
    assert map_risk(beta, params) / mmse_risk(beta, params) == pytest.approx(1.0, abs=1e-6)


def test_expected_support_size_monotone_and_at_zero():
    params = ModelParams.homoscedastic(5, 0.3, 1.0, 1.0)
    G = atom_constants(params).G[0]
    assert expected_support_size(np.zeros(5), params) == pytest.approx(5 * G / (1 + G))
    sizes = [expected_support_size(np.full(5, b), params) for b in np.linspace(0, 10, 50)]
    assert np.all(np.diff(sizes) >= 0)


def test_signal_domain_error_equals_coefficient_error():
    D = make_dictionary("db5-2d", shape=(32, 32), levels=3)
    params = ModelParams.homoscedastic(D.length, 0.1, 1.0, 0.3)
    _, x, y = sample_signal(D, params, 0)
    xhat = mmse_shrink(D.analyze(y), params).xhat
    a = np.sum((D.synthesize(xhat) - D.synthesize(x)) ** 2)
    assert rel_err(a, np.sum((xhat - x) ** 2)) < 1e-10


def test_per_band_report_sums_to_total():
    D = make_dictionary("db5-2d", shape=(16, 16), levels=2)
    layout = band_layout(D)
    params = ModelParams.from_bands(layout, np.linspace(0.1, 0.7, 7), np.linspace(1, 3, 7), 0.5)
    _, _, y = sample_signal(D, params, 2)
    r = risk_report(D.analyze(y), params, layout)
    for key, total in (("mse_mmse", r.mse_mmse), ("mse_map", r.mse_map),
                       ("mse_oracle", r.mse_oracle)):
        assert sum(b[key] for b in r.per_band.values()) == pytest.approx(total, rel=1e-12)


def test_excess_terms_nonnegative():
    params = ModelParams.homoscedastic(6, 0.2, 1.0, 1.0)
    beta = make_rng(0).normal(0, 2, 6)
    assert excess_mmse(beta, params) >= 0 and excess_map(beta, params) >= 0
    assert oracle_term(beta, params) > 0


def test_posterior_mc_matches_closed_forms():
    params = ModelParams(np.array([0.1, 0.5, 0.3, 0.8]), np.array([1.0, 2.0, 0.5, 1.5]), 0.7)
    beta = np.array([0.3, -2.5, 1.1, 0.0])
    for est, exact in ((mmse_shrink(beta, params).xhat, mmse_risk(beta, params)),
                       (map_shrink(beta, params).xhat, map_risk(beta, params)),
                       (np.zeros(4), estimate_risk(beta, params, np.zeros(4)))):
        mean, se = posterior_mc_risk(beta, params, est, 100_000, 3)
        assert abs(mean - exact) < 3 * se


def test_mmse_minimizes_mc_risk():
    params = ModelParams.homoscedastic(5, 0.3, 1.0, 0.8)
    beta = np.array([0.5, -1.5, 2.0, 0.1, 1.2])
    c2 = atom_constants(params).c2
    wrong = np.where(np.array([1, 0, 0, 1, 0], bool), c2 * beta, 0.0)
    cands = {"zero": np.zeros(5), "map": map_shrink(beta, params).xhat,
             "mmse": mmse_shrink(beta, params).xhat, "wrong-oracle": wrong}
    risks = {k: posterior_mc_risk(beta, params, v, 100_000, 8)[0] for k, v in cands.items()}
    assert min(risks, key=risks.get) == "mmse"


def test_mc_is_reproducible_and_validates_samples():
    params = ModelParams.homoscedastic(3, 0.3, 1.0, 1.0)
    beta = np.ones(3)
    assert posterior_mc_risk(beta, params, beta, 1000, 5) == posterior_mc_risk(beta, params, beta, 1000, 5)
    with pytest.raises(ValueError):
        posterior_mc_risk(beta, params, beta, 0, 5)
