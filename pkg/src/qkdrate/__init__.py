"""Secure key rates of weak coherent BB84 under the individual-attack
(Lutkenhaus) and unconditional (GLLP) analyses, with and without
vacuum + weak decoy states."""

from .channel import SETUPS, ChannelObservables, SetupParams, simulate_observables, transmittance, true_single_photon
from .core_math import binary_entropy, lutkenhaus_pa_term, pa_term_max_deviation, poisson_weight
from .errors import (
    DegenerateChannelError,
    DomainError,
    EstimatorCollapseError,
    NoPositiveRateError,
    PNSInsecureError,
    QKDError,
)
from .experiment import analyze, derive_params
from .postprocessing import estimate_decoy_vw, estimate_pessimistic, final_key_length, key_rate
from .scan import max_distance, optimal_mu, sweep

__version__ = "0.1.0"
