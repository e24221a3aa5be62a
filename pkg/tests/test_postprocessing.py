import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from qkdrate.channel import SETUPS, ChannelObservables, simulate_observables, transmittance, true_single_photon
from qkdrate.errors import DomainError, EstimatorCollapseError, PNSInsecureError
from qkdrate.postprocessing import (
    SinglePhotonEstimate,
    estimate_decoy_vw,
    estimate_pessimistic,
    final_key_length,
    key_rate,
)
from oracles import exp, mpf

# Security parameters of the 60 km run as quoted (rounded to 3 figures).
RUN_60KM = ChannelObservables(
    q=0.319, mu=0.55, Q_mu=1.81e-3, E_mu=0.0305, nu=0.152, Q_nu=5.47e-4, E_nu=455 / 5397, Q_vac=1.11e-4
)
DISTANCES = [0, 10, 25, 50, 80]


def _mp_decoy_q1():
    mu, nu, y0 = mpf("0.55"), mpf("0.152"), mpf("1.11e-4")
    pre = mu**2 * exp(-mu) / (mu * nu - nu**2)
    bracket = mpf("5.47e-4") * exp(nu) - mpf("1.81e-3") * exp(mu) * nu**2 / mu**2 - (mu**2 - nu**2) / mu**2 * y0
    return pre, bracket


def test_pessimistic_basic():
    obs = ChannelObservables(q=0.5, mu=0.55, Q_mu=0.2, E_mu=0.0)
    est = estimate_pessimistic(obs)
    p_multi = 1 - 1.55 * math.exp(-0.55)
    assert p_multi == pytest.approx(0.105728, abs=1e-6)
    assert est.Q1_bound == pytest.approx(0.2 - p_multi, rel=1e-12)
    assert est.e1_bound == 0.0
    assert est.delta == pytest.approx(p_multi / 0.2)
    assert est.method == "pessimistic"


def test_pessimistic_pns_gys():
    obs = simulate_observables(SETUPS["GYS"], 0, 0.1)
    with pytest.raises(PNSInsecureError) as info:
        estimate_pessimistic(obs)
    assert info.value.Q_mu == pytest.approx(0.0044916, abs=1e-6)
    assert info.value.p_multi == pytest.approx(0.0046788, abs=1e-7)


def test_decoy_60km_intermediates():
    pre, bracket = _mp_decoy_q1()
    assert float(pre) == pytest.approx(2.8850, abs=1e-3)
    assert float(bracket) == pytest.approx(2.9467e-4, abs=1e-7)
    est = estimate_decoy_vw(RUN_60KM, "signal")
    assert est.Q1_bound == pytest.approx(float(pre * bracket), rel=1e-12)


def test_decoy_60km_signal_e1():
    est = estimate_decoy_vw(RUN_60KM, "signal")
    assert est.Q1_bound == pytest.approx(8.50e-4, rel=5e-3)
    assert est.e1_bound == pytest.approx(0.0273, abs=2e-4)
    assert est.method == "decoy_vw_signal_e1"
    assert not est.clamped


def test_decoy_e1_from_decoy_block():
    # E_nu Q_nu e^nu falls just short of Y0/2 on these numbers
    with pytest.warns(RuntimeWarning, match="clamped"):
        est = estimate_decoy_vw(RUN_60KM, "decoy")
    pre, bracket = _mp_decoy_q1()
    q1 = pre * bracket
    ref = (mpf(455) / 5397 * mpf("5.47e-4") * exp(mpf("0.152")) - mpf("1.11e-4") / 2) / (
        q1 * exp(mpf("0.55")) * mpf("0.152") / mpf("0.55")
    )
    assert ref < 0
    assert est.clamped and est.e1_bound == 0.0
    assert est.method == "decoy_vw"


def test_decoy_e1_from_decoy_block_unclamped():
    obs = ChannelObservables(q=0.5, mu=0.5, Q_mu=1e-2, E_mu=0.02, nu=0.1, Q_nu=3e-3, E_nu=0.03, Q_vac=1e-4)
    est = estimate_decoy_vw(obs, "decoy")
    mu, nu = mpf("0.5"), mpf("0.1")
    q1 = mu**2 * exp(-mu) / (mu * nu - nu**2) * (
        mpf("3e-3") * exp(nu) - mpf("1e-2") * exp(mu) * nu**2 / mu**2 - (mu**2 - nu**2) / mu**2 * mpf("1e-4")
    )
    ref = (mpf("0.03") * mpf("3e-3") * exp(nu) - mpf("1e-4") / 2) / (q1 * exp(mu) * nu / mu)
    assert est.Q1_bound == pytest.approx(float(q1), rel=1e-12)
    assert est.e1_bound == pytest.approx(float(ref), rel=1e-12)


def test_decoy_requires_block_and_ordering():
    with pytest.raises(DomainError):
        estimate_decoy_vw(ChannelObservables(q=0.5, mu=0.5, Q_mu=1e-3, E_mu=0.02))
    bad = ChannelObservables(q=0.5, mu=0.1, Q_mu=1e-3, E_mu=0.02, nu=0.2, Q_nu=1e-3, E_nu=0.02, Q_vac=0)
    with pytest.raises(DomainError):
        estimate_decoy_vw(bad)
    with pytest.raises(DomainError):
        estimate_decoy_vw(RUN_60KM, "both")


def test_decoy_collapse():
    obs = ChannelObservables(q=0.5, mu=0.5, Q_mu=1e-2, E_mu=0.02, nu=0.1, Q_nu=1e-5, E_nu=0.02, Q_vac=1e-4)
    with pytest.raises(EstimatorCollapseError):
        estimate_decoy_vw(obs)


def test_decoy_negative_numerator_is_clamped():
    obs = ChannelObservables(q=0.5, mu=0.5, Q_mu=1e-2, E_mu=0.02, nu=0.1, Q_nu=3e-3, E_nu=0.0, Q_vac=1e-4)
    with pytest.warns(RuntimeWarning, match="clamped"):
        est = estimate_decoy_vw(obs, "decoy")
    assert est.clamped and est.e1_bound == 0.0


def test_key_rate_published_values():
    est = SinglePhotonEstimate(Q1_bound=8.50e-4, e1_bound=0.0273, method="decoy_vw_signal_e1")
    lut = key_rate("lutkenhaus", RUN_60KM, est, 1.16)
    gllp = key_rate("gllp", RUN_60KM, est, 1.16)
    assert lut.R == pytest.approx(9.98e-5, rel=5e-3)
    assert gllp.R == pytest.approx(9.04e-5, rel=5e-3)
    # independent 40-digit evaluation of the same formulas
    ec = mpf("0.319") * mpf("1.16") * mpf("1.81e-3") * oracles.h2("0.0305")
    ref_lut = mpf("0.319") * mpf("8.50e-4") * (1 - oracles.tau("0.0273")) - ec
    ref_gllp = mpf("0.319") * mpf("8.50e-4") * (1 - oracles.h2("0.0273")) - ec
    assert lut.R == pytest.approx(float(ref_lut), rel=1e-12)
    assert gllp.R == pytest.approx(float(ref_gllp), rel=1e-12)
    assert lut.ec_term == pytest.approx(float(ec), rel=1e-12)
    assert lut.R == pytest.approx(lut.pa_term - lut.ec_term)


def test_key_rate_no_costs():
    obs = ChannelObservables(q=0.5, mu=0.3, Q_mu=0.01, E_mu=0.0)
    est = SinglePhotonEstimate(Q1_bound=0.006, e1_bound=0.0, method="pessimistic")
    for scheme in ("lutkenhaus", "gllp"):
        assert key_rate(scheme, obs, est, 1.0).R == pytest.approx(0.003)


def test_key_rate_e1_out_of_range():
    est = SinglePhotonEstimate(Q1_bound=1e-3, e1_bound=0.6, method="pessimistic")
    r = key_rate("lutkenhaus", RUN_60KM, est)
    assert r.e1_out_of_range
    assert r.pa_term == 0.0 and r.R < 0


def test_key_rate_argument_checks():
    est = SinglePhotonEstimate(Q1_bound=1e-3, e1_bound=0.01, method="pessimistic")
    with pytest.raises(DomainError):
        key_rate("bb84", RUN_60KM, est)
    with pytest.raises(DomainError):
        key_rate("gllp", RUN_60KM, est, f_ec=0.9)


def test_final_key_length():
    assert final_key_length(9.98e-5, 104.8e6) == 10459
    # N R = 9473.92
    assert final_key_length(9.04e-5, 104.8e6) == 9473
    assert final_key_length(-1e-4, 1e6) == 0
    assert final_key_length(0.0, 1e6) == 0
    with pytest.raises(DomainError):
        final_key_length(1e-4, 0)


@given(
    st.floats(0.001, 0.499),
    st.floats(1e-5, 1e-2),
    st.floats(0.0, 0.2),
)
def test_gllp_never_beats_lutkenhaus(e1, Q1, E):
    obs = ChannelObservables(q=0.5, mu=0.5, Q_mu=0.02, E_mu=E)
    est = SinglePhotonEstimate(Q1_bound=Q1, e1_bound=e1, method="pessimistic")
    assert key_rate("gllp", obs, est).R <= key_rate("lutkenhaus", obs, est).R


@given(st.floats(1.0, 3.0), st.floats(1e-3, 1.0))
def test_rate_decreases_with_f_ec(f, df):
    est = SinglePhotonEstimate(Q1_bound=8.5e-4, e1_bound=0.0273, method="pessimistic")
    for scheme in ("lutkenhaus", "gllp"):
        assert key_rate(scheme, RUN_60KM, est, f + df).R < key_rate(scheme, RUN_60KM, est, f).R


@pytest.mark.parametrize("name", list(SETUPS))
@pytest.mark.parametrize("distance", DISTANCES)
@pytest.mark.parametrize("e1_source", ["decoy", "signal"])
def test_decoy_bounds_are_valid(name, distance, e1_source):
    s = SETUPS[name]
    mu, nu = 0.5, 0.05
    obs = simulate_observables(s, distance, mu, nu)
    truth = true_single_photon(s, distance, mu)
    est = estimate_decoy_vw(obs, e1_source)
    assert 0 < est.Q1_bound <= truth.Q * (1 + 1e-12)
    assert est.e1_bound >= truth.e * (1 - 1e-12)


# non-decoy cutoffs with mu = eta are roughly 7, 9, 15 and 34 km
NONDECOY_RANGE = {"T8": 7.0, "G13": 9.0, "KTH": 15.0, "GYS": 34.0}


@pytest.mark.parametrize("name", list(SETUPS))
@pytest.mark.parametrize("frac", [0.0, 0.25, 0.5, 0.75, 0.95])
def test_decoy_tighter_than_pessimistic(name, frac):
    s = SETUPS[name]
    distance = frac * NONDECOY_RANGE[name]
    mu = transmittance(s, distance)
    obs = simulate_observables(s, distance, mu, mu / 4)
    pess = estimate_pessimistic(obs)
    dec = estimate_decoy_vw(obs, "decoy")
    assert dec.Q1_bound >= pess.Q1_bound
    assert dec.e1_bound <= pess.e1_bound
