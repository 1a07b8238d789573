import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hybrid_noma.channel import RfApConfig, VlcApConfig
from hybrid_noma.errors import DomainError
from hybrid_noma.montecarlo import (
    McConfig,
    batch_rng,
    draw_rf_batch,
    draw_vlc_batch,
    mc_noma_rf_sum_rate,
    mc_noma_vlc_sum_rate,
    mc_ofdma_vlc_sum_rate,
)
from hybrid_noma.rates import (
    analytic_noma_rf_sum_rate,
    analytic_noma_vlc_sum_rate,
    analytic_ofdma_vlc_sum_rate,
)

CFG = VlcApConfig()
RF = RfApConfig()


def _within(mc, exact, k=3.0):
    return abs(mc.sum_rate - exact) <= k * mc.std_error


def test_mc_config_validation():
    with pytest.raises(DomainError):
        McConfig(trials=0)
    with pytest.raises(DomainError):
        McConfig(batch=0)
    with pytest.raises(DomainError):
        McConfig(seed=-1)
    mc = McConfig(trials=250, batch=100)
    assert mc.n_batches == 3
    assert [mc.batch_size(b) for b in range(3)] == [100, 100, 50]


def test_bad_flags():
    with pytest.raises(DomainError):
        mc_noma_vlc_sum_rate(CFG, 2, mc=McConfig(trials=10), sort_by="whatever")
    with pytest.raises(DomainError):
        mc_noma_vlc_sum_rate(CFG, 2, mc=McConfig(trials=10), anchor="whatever")
    with pytest.raises(DomainError):
        mc_noma_rf_sum_rate(RF, 2, sigma_e_sq=1.0, mc=McConfig(trials=10))


def test_single_user_matches_quadrature():
    mc = McConfig(trials=400_000, seed=1)
    est = mc_noma_vlc_sum_rate(CFG, 1, rho=1e13, mc=mc)
    assert _within(est, analytic_noma_vlc_sum_rate(CFG, 1, rho=1e13).sum_rate)
    est = mc_ofdma_vlc_sum_rate(CFG, 1, rho=1e13, mc=mc)
    assert _within(est, analytic_ofdma_vlc_sum_rate(CFG, 1, rho=1e13).sum_rate)


def test_rf_single_user_unit_disc():
    cfg = RfApConfig(path_loss_exp=2.0, cell_radius_D=1.0)
    est = mc_noma_rf_sum_rate(cfg, 1, rho=1000.0, mc=McConfig(trials=400_000, seed=2))
    assert _within(est, analytic_noma_rf_sum_rate(cfg, 1, rho=1000.0, route="quadrature").sum_rate)


def test_rf_chebyshev_within_five_percent():
    cfg = RfApConfig(path_loss_exp=3.0, cell_radius_D=10.0)
    est = mc_noma_rf_sum_rate(cfg, 2, sigma_e_sq=0.01, mc=McConfig(trials=10 ** 6, seed=3))
    cheb = analytic_noma_rf_sum_rate(cfg, 2, sigma_e_sq=0.01).sum_rate
    assert abs(cheb - est.sum_rate) / est.sum_rate < 0.05


def test_rf_decreasing_in_error_for_weak_users():
    mc = McConfig(trials=200_000, seed=4)
    per_user = [mc_noma_rf_sum_rate(RF, 3, sigma_e_sq=s, mc=mc).per_user for s in (0, 1e-3, 1e-2, 1e-1)]
    for k in range(2):
        seq = [p[k] for p in per_user]
        assert all(a > b for a, b in zip(seq, seq[1:]))


def test_thread_count_independence():
    mc = McConfig(trials=120_000, seed=77, batch=10_000)
    a = mc_noma_vlc_sum_rate(CFG, 4, rho=1e15, sigma_e_sq=1e-13, mc=mc, workers=1)
    b = mc_noma_vlc_sum_rate(CFG, 4, rho=1e15, sigma_e_sq=1e-13, mc=mc, workers=8)
    assert a.sum_rate == b.sum_rate and a.std_error == b.std_error and a.per_user == b.per_user
    c = mc_noma_rf_sum_rate(RF, 3, sigma_e_sq=0.01, mc=mc, workers=1)
    d = mc_noma_rf_sum_rate(RF, 3, sigma_e_sq=0.01, mc=mc, workers=8)
    assert c.sum_rate == d.sum_rate


def test_seed_changes_estimate():
    a = mc_noma_vlc_sum_rate(CFG, 3, mc=McConfig(trials=5000, seed=1))
    b = mc_noma_vlc_sum_rate(CFG, 3, mc=McConfig(trials=5000, seed=2))
    assert a.sum_rate != b.sum_rate


def test_standard_error_scaling():
    ses = [mc_ofdma_vlc_sum_rate(CFG, 3, rho=1e14, mc=McConfig(trials=n, seed=9)).std_error for n in (10 ** 4, 10 ** 6)]
    assert ses[0] / ses[1] == pytest.approx(10.0, rel=0.2)
    pair = [mc_ofdma_vlc_sum_rate(CFG, 3, rho=1e14, mc=McConfig(trials=n, seed=9)).std_error for n in (50_000, 100_000)]
    assert pair[0] / pair[1] == pytest.approx(math.sqrt(2), rel=0.2)


@given(st.integers(1, 8), st.sampled_from([0.0, 1e-13, 1e-12]), st.sampled_from(["estimated", "true"]))
def test_sorted_gain_invariant(K, s2, sort_by):
    rng = np.random.default_rng(K)
    h2, h = draw_vlc_batch(CFG, K, s2, 500, rng, sort_by)
    key = h2 if sort_by == "estimated" else h ** 2
    assert np.all(np.diff(key, axis=1) >= 0)


def test_error_variance_invariant():
    s2 = 1e-12
    rng = np.random.default_rng(10)
    h2, h = draw_vlc_batch(CFG, 2, s2, 500_000, rng)
    e = (h - np.sqrt(h2)).ravel()
    var = e.var(ddof=1)
    se = var * math.sqrt(2.0 / (e.size - 1))
    assert abs(var - s2) < 3 * se
    # the error is drawn independently of the estimate
    assert abs(np.corrcoef(np.sqrt(h2).ravel(), e)[0, 1]) < 5 / math.sqrt(e.size)


def test_rf_error_variance_invariant():
    # per sample the path loss cancels in ln|h|^2 - ln|h_hat|^2, and for
    # X ~ CN(0, v), E[ln |X|^2] = ln v - gamma, so the mean gap is -ln(1 - s2)
    s2 = 0.05
    rng = np.random.default_rng(12)
    est, true = draw_rf_batch(RF, 1, s2, 400_000, rng)
    gap = np.log(true) - np.log(est)
    se = gap.std(ddof=1) / math.sqrt(gap.size)
    assert abs(gap.mean() + math.log1p(-s2)) < 3 * se


def test_truth_anchor_is_available():
    mc = McConfig(trials=50_000, seed=5)
    a = mc_noma_vlc_sum_rate(CFG, 3, rho=1e15, sigma_e_sq=1e-12, mc=mc, anchor="truth")
    b = mc_noma_vlc_sum_rate(CFG, 3, rho=1e15, sigma_e_sq=1e-12, mc=mc)
    assert a.sum_rate > 0 and a.sum_rate != b.sum_rate


def test_batch_streams_are_distinct():
    mc = McConfig(seed=3)
    x = batch_rng(mc, "vlc", 0).random(4)
    y = batch_rng(mc, "vlc", 1).random(4)
    z = batch_rng(mc, "rf", 0).random(4)
    assert not np.array_equal(x, y) and not np.array_equal(x, z)
    assert np.array_equal(x, batch_rng(mc, "vlc", 0).random(4))


def test_table_point_matches_analytic():
    mc = McConfig(trials=400_000, seed=21)
    for sigma in (0.0, 1e-12):
        est = mc_noma_vlc_sum_rate(CFG, 5, rho=1e18, sigma_e_sq=sigma, mc=mc)
        assert _within(est, analytic_noma_vlc_sum_rate(CFG, 5, rho=1e18, sigma_e_sq=sigma).sum_rate)
