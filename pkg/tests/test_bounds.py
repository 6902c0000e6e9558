import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize_scalar

from bgshrink.bounds import (MAP_SWITCH, MMSE_SWITCH, bound_report, bounds_table,
                             explicit_bound_map, explicit_bound_mmse, f_map, f_mmse, g_factor,
                             min_G, risk_ratio, worst_case_beta, worst_ratio_map,
                             worst_ratio_mmse, worst_s_map)
from bgshrink.model import ModelParams, make_rng
from bgshrink.shrinkage import atom_constants

# s* and r* for the MMSE ratio, solved at 40 digits with mpmath (findroot on G e^s (s-1) = 1).
MMSE_REFERENCE = {
    0.01: (3.6359329905535246106, 5.2718659811070492212),
    0.1: (2.1568683966150044686, 2.3137367932300089372),
    0.25: (1.7178245124945949016, 1.4356490249891898032),
}


def test_g_factor_examples():
    assert g_factor(0.5, 1.0, 1.0) == pytest.approx(np.sqrt(0.5), rel=1e-15)
    assert g_factor(0.1, 1.0, 1.0) == pytest.approx(0.078567420131838613822, rel=1e-14)
    assert g_factor(0.2, 1.0, 1e6) == pytest.approx(0.25, rel=1e-9)
    with pytest.raises(ValueError):
        g_factor(1.0, 1.0, 1.0)


@pytest.mark.parametrize("G", sorted(MMSE_REFERENCE))
def test_mmse_worst_ratio_reference(G):
    s_ref, r_ref = MMSE_REFERENCE[G]
    s, r = worst_ratio_mmse(G)
    assert s == pytest.approx(s_ref, rel=1e-11)
    assert r == pytest.approx(r_ref, rel=1e-11)


@pytest.mark.parametrize("G", [1e-6, 1e-3, 0.03, 0.5, 2.0, 50.0])
def test_mmse_worst_ratio_matches_numerical_maximum(G):
    res = minimize_scalar(lambda s: -f_mmse(s, G), bounds=(0, 60), method="bounded",
                          options={"xatol": 1e-12})
    _, r = worst_ratio_mmse(G)
    assert r == pytest.approx(-res.fun, rel=1e-9)


def test_explicit_mmse_bound_examples():
    b, regime = explicit_bound_mmse(0.01)
    assert b == pytest.approx(2 * np.log(25), rel=1e-14) and regime == "log"
    assert b == pytest.approx(6.4378, abs=1e-4)
    b, regime = explicit_bound_mmse(0.1)
    assert b == pytest.approx(2 / (np.sqrt(0.1) * np.e), rel=1e-14) and regime == "exponential"
    assert b == pytest.approx(2.3267, abs=1e-4)
    assert explicit_bound_mmse(0.25)[0] == pytest.approx(1.4715, abs=1e-4)


def test_switch_points():
    assert round(MMSE_SWITCH, 3) == 0.034
    assert round(MAP_SWITCH, 3) == 0.368
    lo = 2 * np.log(1 / (4 * MMSE_SWITCH))
    hi = 2 / (np.sqrt(MMSE_SWITCH) * np.e)
    assert lo == pytest.approx(4.0, rel=1e-14) and hi == pytest.approx(4.0, rel=1e-14)
    assert explicit_bound_mmse(MMSE_SWITCH * (1 - 1e-12))[1] == "log"
    assert explicit_bound_mmse(MMSE_SWITCH * (1 + 1e-12))[1] == "exponential"
    assert explicit_bound_map(MAP_SWITCH * (1 - 1e-12))[1] == "log"
    assert explicit_bound_map(MAP_SWITCH * (1 + 1e-12))[1] == "exponential"


def test_map_examples():
    assert explicit_bound_map(0.2)[0] == pytest.approx(2 * np.log(5), rel=1e-14)
    assert explicit_bound_map(0.2)[0] == pytest.approx(3.2189, abs=1e-4)
    assert explicit_bound_map(0.8)[0] == pytest.approx(0.9197, abs=1e-4)
    assert worst_s_map(0.2) == pytest.approx(np.log(5)) and worst_s_map(0.8) == 1.0


G_GRID = np.geomspace(1e-6, 1e3, 400)


def test_bound_consistency_on_grid():
    _, r_mmse = worst_ratio_mmse(G_GRID)
    b_mmse, _ = explicit_bound_mmse(G_GRID)
    assert np.all(r_mmse <= b_mmse * (1 + 1e-12))
    assert np.all(np.diff(r_mmse) < 0)
    assert np.all(np.diff(b_mmse) < 0)
    s_map, r_map = worst_ratio_map(G_GRID)
    b_map, _ = explicit_bound_map(G_GRID)
    np.testing.assert_allclose(r_map, b_map, rtol=1e-9)
    np.testing.assert_allclose(s_map, worst_s_map(G_GRID), rtol=1e-5, atol=1e-5)
    assert np.all(r_map >= r_mmse)
    assert np.all(b_map >= r_mmse)


def _random_case(rng, m):
    sx = rng.uniform(0.5, 2.0, m)
    ratio = np.exp(rng.uniform(np.log(0.05), np.log(20)))
    sigma = float(sx.mean() * ratio)
    params = ModelParams(rng.uniform(0.01, 0.99, m), sx, sigma)
    c = np.sqrt(atom_constants(params).c2)
    beta = rng.uniform(-50, 50, m) * sigma / c
    return params, beta


@given(st.integers(0, 10 ** 6), st.integers(1, 12))
def test_ratio_never_exceeds_worst_case(seed, m):
    params, beta = _random_case(make_rng(seed), m)
    Gm = min_G(params)
    assert risk_ratio(beta, params, "mmse") <= worst_ratio_mmse(Gm)[1] * (1 + 1e-9) + 1e-12
    assert risk_ratio(beta, params, "map") <= worst_ratio_map(Gm)[1] * (1 + 1e-9) + 1e-12


def test_ratio_zero_at_zero_observation():
    params = ModelParams.homoscedastic(4, 0.2, 1.0, 1.0)
    assert risk_ratio(np.zeros(4), params, "mmse") == 0.0


@pytest.mark.parametrize("p, sx, s", [(0.1, 1.0, 1.0), (0.02, 2.0, 0.5), (0.4, 1.0, 3.0)])
def test_tightness_at_substitution_beta(p, sx, s):
    params = ModelParams.homoscedastic(6, p, sx, s)
    c2 = atom_constants(params).c2[0]
    G = min_G(params)
    s_mmse, r_mmse = worst_ratio_mmse(G)
    beta = np.full(6, worst_case_beta(s_mmse, c2, s))
    assert risk_ratio(beta, params, "mmse") == pytest.approx(r_mmse, rel=1e-6)
    s_map, r_map = worst_ratio_map(G)
    beta = np.full(6, worst_case_beta(worst_s_map(G), c2, s))
    assert risk_ratio(beta, params, "map") == pytest.approx(r_map, rel=1e-6)


@pytest.mark.parametrize("p, sx, s", [(0.1, 1.0, 1.0), (0.02, 2.0, 0.5)])
def test_alternative_worst_beta_forms_fall_short(p, sx, s):
    params = ModelParams.homoscedastic(3, p, sx, s)
    c2 = atom_constants(params).c2[0]
    G = min_G(params)
    s_mmse, r_mmse = worst_ratio_mmse(G)
    alt = np.full(3, s * np.sqrt(s_mmse / c2))
    assert risk_ratio(alt, params, "mmse") < r_mmse * (1 - 1e-3)
    _, r_map = worst_ratio_map(G)
    alt = np.full(3, 2 * s ** 2 / c2 * np.sqrt(2 * np.log(1 / G)))
    assert risk_ratio(alt, params, "map") < r_map * (1 - 1e-3)


def test_numerical_beta_search_reaches_worst_ratio():
    params = ModelParams.homoscedastic(1, 0.1, 1.0, 1.0)
    for est, worst in (("mmse", worst_ratio_mmse), ("map", worst_ratio_map)):
        res = minimize_scalar(lambda b: -risk_ratio(np.array([b]), params, est),
                              bounds=(0, 20), method="bounded", options={"xatol": 1e-12})
        assert -res.fun == pytest.approx(worst(min_G(params))[1], rel=1e-4)


@given(st.integers(0, 10 ** 6))
def test_oracle_multiplier_bounds(seed):
    from bgshrink.risk import map_risk, mmse_risk, oracle_term
    params, beta = _random_case(make_rng(seed), 8)
    Gm = min_G(params)
    mse1 = oracle_term(beta, params)
    assert mmse_risk(beta, params) <= (1 + explicit_bound_mmse(Gm)[0]) * mse1 * (1 + 1e-9)
    assert map_risk(beta, params) <= (1 + explicit_bound_map(Gm)[0]) * mse1 * (1 + 1e-9)


def test_f_functions_shapes():
    s = np.linspace(0, 10, 11)
    assert np.all(f_mmse(s, 0.1) <= f_map(s, 0.1) + 1e-15)
    assert f_map(0.5, 1.0) == pytest.approx(1.0 * np.exp(-0.5))


def test_bound_report_and_table():
    rep = bound_report(0.01, "mmse")
    assert rep.regime == "log" and rep.oracle_multiplier == pytest.approx(1 + 2 * np.log(25))
    assert rep.r_star <= rep.explicit_bound
    rep = bound_report(0.8, "map")
    assert rep.s_star == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValueError):
        bound_report(0.1, "median")
    rows = bounds_table([MMSE_SWITCH, MAP_SWITCH, 1.0])
    assert [r[3] for r in rows] == ["exponential", "exponential", "exponential"]
    assert rows[0][2] == pytest.approx(4.0) and rows[1][5] == pytest.approx(2.0)


def test_invalid_G():
    with pytest.raises(ValueError):
        worst_ratio_mmse(0.0)
    with pytest.raises(ValueError):
        explicit_bound_map(-1.0)
