"""Single-photon bounds and secure key rates.

Both security analyses credit privacy amplification only to pulses that
carried exactly one photon:

    R = q * ( -f_ec * Q_mu * H2(E_mu) + Q_1 * (1 - penalty(e_1)) )

with ``penalty = H2`` (GLLP, unconditional) or
``penalty = log2(1 + 4e - 4e^2)`` (individual attacks, Lutkenhaus).
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional

from .core_math import E0, binary_entropy, lutkenhaus_pa_term, multi_photon_probability
from .errors import DomainError, EstimatorCollapseError, PNSInsecureError

SCHEMES = ("lutkenhaus", "gllp")
METHODS = ("pessimistic", "decoy_vw", "decoy_vw_signal_e1")

#: Cascade reconciliation overhead above the Shannon limit.
F_EC_CASCADE = 1.16


@dataclass(frozen=True)
class SinglePhotonEstimate:
    """Lower bound on Q_1 and upper bound on e_1.

    ``clamped`` is set when the e_1 numerator came out negative and was
    replaced by zero (possible with measured, noisy data).
    """

    Q1_bound: float
    e1_bound: float
    method: str
    delta: Optional[float] = None
    clamped: bool = False


@dataclass(frozen=True)
class RateResult:
    scheme: str
    R: float
    ec_term: float
    pa_term: float
    f_ec: float
    e1_out_of_range: bool = False


def estimate_pessimistic(obs):
    """Bounds without decoy states: every loss and every error is charged
    to the single-photon pulses."""
    p_multi = multi_photon_probability(obs.mu)
    Q1 = obs.Q_mu - p_multi
    if Q1 <= 0:
        raise PNSInsecureError(obs.Q_mu, p_multi)
    return SinglePhotonEstimate(
        Q1_bound=Q1,
        e1_bound=obs.Q_mu * obs.E_mu / Q1,
        method="pessimistic",
        delta=p_multi / obs.Q_mu,
    )


def estimate_decoy_vw(obs, e1_source="decoy"):
    """Vacuum + weak decoy bounds on the single-photon gain and error rate.

    ``e1_source="signal"`` bounds e_1 from the signal QBER instead of the
    decoy QBER, which is the safer choice when the decoy and signal error
    rates disagree (e.g. attenuator imperfections).
    """
    if not obs.has_decoy:
        raise DomainError("decoy estimator needs Q_nu, E_nu and Q_vac")
    if e1_source not in ("decoy", "signal"):
        raise DomainError(f"e1_source must be 'decoy' or 'signal', got {e1_source!r}")
    mu, nu, Y0 = obs.mu, obs.nu, obs.Q_vac
    if not 0 < nu < mu:
        raise DomainError(f"need 0 < nu < mu, got nu={nu}, mu={mu}")

    prefactor = mu * mu * math.exp(-mu) / (mu * nu - nu * nu)
    bracket = (
        obs.Q_nu * math.exp(nu)
        - obs.Q_mu * math.exp(mu) * nu * nu / (mu * mu)
        - (mu * mu - nu * nu) / (mu * mu) * Y0
    )
    Q1 = prefactor * bracket
    if Q1 <= 0:
        raise EstimatorCollapseError(f"decoy bound on Q_1 is not positive ({Q1:.6g})")

    if e1_source == "decoy":
        numerator = obs.E_nu * obs.Q_nu * math.exp(nu) - E0 * Y0
        denominator = Q1 * math.exp(mu) * nu / mu
        method = "decoy_vw"
    else:
        numerator = obs.E_mu * obs.Q_mu * math.exp(mu) - E0 * Y0
        denominator = Q1 * math.exp(mu)
        method = "decoy_vw_signal_e1"
    clamped = numerator < 0
    if clamped:
        warnings.warn(f"e_1 numerator negative ({numerator:.3g}); clamped to 0", RuntimeWarning)
        numerator = 0.0
    return SinglePhotonEstimate(Q1_bound=Q1, e1_bound=numerator / denominator, method=method, clamped=clamped)


def privacy_penalty(scheme, e):
    if scheme == "gllp":
        return binary_entropy(e)
    if scheme == "lutkenhaus":
        return lutkenhaus_pa_term(e)
    raise DomainError(f"unknown scheme {scheme!r}")


def key_rate(scheme, obs, est, f_ec=F_EC_CASCADE):
    """Secret key bits per transmitted pulse; may be negative.

    An ``e1_bound`` above 1/2 leaves nothing to distil from the single-photon
    part, so the penalty saturates at 1 and ``e1_out_of_range`` is set.
    """
    if scheme not in SCHEMES:
        raise DomainError(f"unknown scheme {scheme!r}")
    if f_ec < 1:
        raise DomainError(f"error correction efficiency must be >= 1, got {f_ec}")
    out_of_range = est.e1_bound > 0.5
    penalty = 1.0 if out_of_range else privacy_penalty(scheme, est.e1_bound)
    ec = obs.q * f_ec * obs.Q_mu * binary_entropy(obs.E_mu)
    pa = obs.q * est.Q1_bound * (1.0 - penalty)
    return RateResult(scheme=scheme, R=pa - ec, ec_term=ec, pa_term=pa, f_ec=f_ec, e1_out_of_range=out_of_range)


def final_key_length(R, N):
    """Length in bits of the distilled key, floor(N R), never negative."""
    if N <= 0:
        raise DomainError(f"pulse count must be positive, got {N}")
    return max(0, math.floor(N * R))
