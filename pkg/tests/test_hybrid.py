import pytest
from hypothesis import given, strategies as st

from hybrid_noma.errors import DomainError
from hybrid_noma.hybrid import (
    HybridConfig,
    HybridRate,
    energy_efficiency,
    hybrid_sum_rate,
    vlc_only_energy_efficiency,
)
from hybrid_noma.rates import RateEstimate


def test_sum_rate_examples():
    assert hybrid_sum_rate(HybridConfig(beta_vlc=0, beta_rf=0), 3.0, 2.0).value == 0.0
    r = hybrid_sum_rate(HybridConfig(beta_vlc=1, beta_rf=0, B_vlc=20e6), 2.0, 5.0)
    assert r.value == pytest.approx(4.0e7)


def test_energy_efficiency_example():
    h = HybridConfig(Q_vlc=4, Q_rf=6.7, P_rf_users=())
    assert energy_efficiency(h, 1.07e8).value == pytest.approx(1.0e7)
    with pytest.raises(DomainError):
        energy_efficiency(HybridConfig(Q_vlc=0, Q_rf=0, P_rf_users=()), 1.0)


def test_vlc_only():
    h = HybridConfig(beta_vlc=0.0)
    assert vlc_only_energy_efficiency(h, 5.0).value == 0.0
    with pytest.raises(DomainError):
        vlc_only_energy_efficiency(HybridConfig(Q_vlc=0), 1.0)
    # same as the hybrid figure when RF carries nothing and costs nothing
    h = HybridConfig(beta_vlc=0.7, beta_rf=0.0, Q_rf=0.0, P_rf_users=())
    a = vlc_only_energy_efficiency(h, 3.0).value
    b = energy_efficiency(h, hybrid_sum_rate(h, 3.0, 9.0)).value
    assert a == pytest.approx(b, rel=1e-15)


def test_defaults_and_validation():
    h = HybridConfig.equal_split(4)
    assert sum(h.P_rf_users) == pytest.approx(0.7)
    assert h.total_power == pytest.approx(11.4)
    for kw in (dict(beta_vlc=1.2), dict(beta_rf=-0.1), dict(B_vlc=0), dict(Q_rf=-1), dict(P_rf_users=(-1.0,))):
        with pytest.raises(DomainError):
            HybridConfig(**kw)
    with pytest.raises(DomainError):
        HybridConfig.equal_split(0)
    with pytest.raises(DomainError):
        hybrid_sum_rate(HybridConfig(), -1.0, 1.0)


def test_standard_error_propagation():
    h = HybridConfig(beta_vlc=0.5, beta_rf=0.5)
    rv = RateEstimate(2.0, [2.0], "monte-carlo", std_error=0.03, trials=10)
    rr = RateEstimate(1.0, [1.0], "monte-carlo", std_error=0.04, trials=10)
    r = hybrid_sum_rate(h, rv, rr)
    assert r.std_error == pytest.approx(1e7 * 0.05)
    assert energy_efficiency(h, r).std_error == pytest.approx(r.std_error / h.total_power)


rates = st.floats(0, 30)
probs = st.floats(0, 1)


@given(rates, rates, probs, probs, st.floats(0.1, 10))
def test_homogeneous(v, f, bv, br, c):
    h = HybridConfig(beta_vlc=bv, beta_rf=br)
    r = hybrid_sum_rate(h, v, f).value
    assert energy_efficiency(h, c * r).value == pytest.approx(c * energy_efficiency(h, r).value, rel=1e-12, abs=1e-9)


@given(rates, rates, probs, probs, probs)
def test_linear_in_beta(v, f, b1, b2, br):
    # three equally spaced beta values lie on a line
    vals = [hybrid_sum_rate(HybridConfig(beta_vlc=b, beta_rf=br), v, f).value for b in (0.0, b1 / 2, b1)]
    assert vals[1] - vals[0] == pytest.approx(vals[2] - vals[1], rel=1e-9, abs=1e-3)
    vals = [hybrid_sum_rate(HybridConfig(beta_vlc=b2, beta_rf=b), v, f).value for b in (0.0, br / 2, br)]
    assert vals[1] - vals[0] == pytest.approx(vals[2] - vals[1], rel=1e-9, abs=1e-3)


@given(rates, rates, probs, st.floats(0.5, 20), st.floats(0.01, 5))
def test_monotone_in_fixed_power(v, f, beta, q, dq):
    a = energy_efficiency(HybridConfig(beta_vlc=beta, Q_vlc=q), hybrid_sum_rate(HybridConfig(beta_vlc=beta), v, f))
    b = energy_efficiency(HybridConfig(beta_vlc=beta, Q_vlc=q + dq), hybrid_sum_rate(HybridConfig(beta_vlc=beta), v, f))
    if a.value > 0:
        assert b.value < a.value


@given(rates, rates, probs, probs)
def test_hybrid_beats_standalone_iff_inequality(v, f, bv, br):
    h = HybridConfig(beta_vlc=bv, beta_rf=br)
    hyb = energy_efficiency(h, hybrid_sum_rate(h, v, f)).value
    solo = vlc_only_energy_efficiency(h, v).value
    rf_numerator = h.B_rf * br * f
    rf_share = h.Q_rf + sum(h.P_rf_users)
    lhs, rhs = rf_numerator, rf_share * solo
    if abs(lhs - rhs) > 1e-6 * max(lhs, rhs, 1.0):
        assert (hyb >= solo) == (lhs >= rhs)


def test_hybrid_rate_type():
    assert isinstance(energy_efficiency(HybridConfig(), 1e7), HybridRate)
