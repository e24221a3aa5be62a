"""Fiber channel + threshold detector model for a weak coherent BB84 link.

The model is the usual one for phase-randomised coherent pulses: an
``i``-photon pulse is detected with probability

    Y_i = Y0 + eta_i - Y0 * eta_i,    eta_i = 1 - (1 - eta)^i

and its error rate satisfies ``e_i Y_i = e0 Y0 + e_d eta_i``.  Summing over
the Poisson distribution gives the closed forms for the gain and QBER of
an intensity ``mu`` used by :func:`simulate_observables`.
"""

import configparser
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .core_math import E0, poisson_weight
from .errors import DegenerateChannelError, DomainError

N_PHOTON_MAX = 50


@dataclass(frozen=True)
class SetupParams:
    """Hardware and fiber parameters of one QKD setup."""

    name: str
    wavelength: float  # nm
    alpha: float  # fiber loss, dB/km
    e_d: float  # misalignment error probability
    Y0: float  # background count rate per pulse
    eta_bob: float  # receiver transmittance times detector efficiency

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"{self.name}: alpha must be positive")
        if not 0 <= self.e_d < 0.5:
            raise DomainError(f"{self.name}: e_d must lie in [0, 0.5)")
        if not 0 <= self.Y0 < 1:
            raise DomainError(f"{self.name}: Y0 must lie in [0, 1)")
        if not 0 < self.eta_bob <= 1:
            raise DomainError(f"{self.name}: eta_bob must lie in (0, 1]")


# Published parameters of four fiber experiments.
SETUPS = {
    "T8": SetupParams("T8", 830, 2.5, 0.01, 1e-7, 0.0792),
    "G13": SetupParams("G13", 1300, 0.32, 0.0014, 1.64e-4, 0.0814),
    "KTH": SetupParams("KTH", 1550, 0.2, 0.01, 4e-4, 0.143),
    "GYS": SetupParams("GYS", 1550, 0.21, 0.033, 1.7e-6, 0.045),
}

_SETUP_KEYS = {
    "name": "name",
    "wavelength_nm": "wavelength",
    "alpha_db_per_km": "alpha",
    "e_d": "e_d",
    "y0": "Y0",
    "eta_bob": "eta_bob",
}


def get_setup(name):
    try:
        return SETUPS[name]
    except KeyError:
        raise KeyError(f"unknown setup {name!r}; choose from {', '.join(SETUPS)}") from None


def parse_key_value(text, source="<string>"):
    """Parse ``key = value`` lines with ``#`` comments into a dict of strings."""
    parser = configparser.ConfigParser(
        delimiters=("=",), comment_prefixes=("#",), inline_comment_prefixes=("#",)
    )
    parser.optionxform = str
    try:
        parser.read_string("[root]\n" + text, source=source)
    except configparser.Error as exc:
        raise ValueError(f"{source}: malformed key-value file: {exc}") from None
    return dict(parser["root"])


def load_setup(path):
    """Read a setup description from a key-value file."""
    path = Path(path)
    values = parse_key_value(path.read_text(), source=str(path))
    missing = [k for k in _SETUP_KEYS if k not in values]
    if missing:
        raise ValueError(f"{path}: missing keys {', '.join(missing)}")
    unknown = sorted(set(values) - set(_SETUP_KEYS))
    if unknown:
        raise ValueError(f"{path}: unknown keys {', '.join(unknown)}")
    kwargs = {_SETUP_KEYS[k]: (v if k == "name" else float(v)) for k, v in values.items()}
    return SetupParams(**kwargs)


@dataclass(frozen=True)
class ChannelObservables:
    """Quantities Alice and Bob measure (or a simulation predicts).

    ``Q_*`` are gains per sifted-basis pulse, ``E_*`` the matching QBERs.
    The decoy block (``nu``, ``Q_nu``, ``E_nu``, ``Q_vac``) is optional.
    """

    q: float
    mu: float
    Q_mu: float
    E_mu: float
    nu: Optional[float] = None
    Q_nu: Optional[float] = None
    E_nu: Optional[float] = None
    Q_vac: Optional[float] = None

    @property
    def has_decoy(self):
        return self.nu is not None


@dataclass(frozen=True)
class PhotonNumberTruth:
    """Yield, error rate and gain of the ``i``-photon component."""

    i: int
    Y: float
    e: float
    Q: float


def transmittance(setup, distance):
    """Overall transmittance eta = eta_bob * 10^(-alpha * l / 10)."""
    if distance < 0:
        raise DomainError(f"distance must be non-negative, got {distance}")
    return setup.eta_bob * 10.0 ** (-setup.alpha * distance / 10.0)


def _gain_and_errors(Y0, e_d, eta, x):
    # detection probability of the signal part, 1 - exp(-eta x)
    p_sig = -math.expm1(-eta * x)
    Q = Y0 + p_sig - Y0 * p_sig
    EQ = E0 * Y0 + e_d * p_sig - E0 * Y0 * p_sig
    return Q, EQ


def _yield(Y0, e_d, eta, i):
    eta_i = -math.expm1(i * math.log1p(-eta)) if eta < 1 else float(i > 0)
    Y = Y0 + eta_i - Y0 * eta_i
    eY = E0 * Y0 + e_d * eta_i - E0 * Y0 * eta_i
    return Y, eY


def simulate_observables(setup, distance, mu, nu=None, q=0.5):
    """Gains and QBERs predicted by the model for signal intensity ``mu``
    and, if ``nu`` is given, a vacuum + weak decoy pair."""
    if mu <= 0:
        raise DomainError(f"mu must be positive, got {mu}")
    if nu is not None and not 0 < nu < mu:
        raise DomainError(f"decoy intensity must satisfy 0 < nu < mu, got nu={nu}, mu={mu}")
    eta = transmittance(setup, distance)
    Q_mu, EQ_mu = _gain_and_errors(setup.Y0, setup.e_d, eta, mu)
    if Q_mu <= 0:
        raise DegenerateChannelError(f"{setup.name}: gain underflowed at {distance} km")
    decoy = {}
    if nu is not None:
        Q_nu, EQ_nu = _gain_and_errors(setup.Y0, setup.e_d, eta, nu)
        if Q_nu <= 0:
            raise DegenerateChannelError(f"{setup.name}: decoy gain underflowed at {distance} km")
        decoy = dict(nu=nu, Q_nu=Q_nu, E_nu=EQ_nu / Q_nu, Q_vac=setup.Y0)
    return ChannelObservables(q=q, mu=mu, Q_mu=Q_mu, E_mu=EQ_mu / Q_mu, **decoy)


def photon_number_truth(setup, distance, mu, i):
    """True Y_i, e_i and Q_i of the model (the quantities an eavesdropper
    could in principle tamper with)."""
    eta = transmittance(setup, distance)
    Y, eY = _yield(setup.Y0, setup.e_d, eta, i)
    e = eY / Y if Y > 0 else E0
    return PhotonNumberTruth(i=i, Y=Y, e=e, Q=Y * poisson_weight(mu, i))


def true_single_photon(setup, distance, mu):
    return photon_number_truth(setup, distance, mu, 1)


def photon_number_decomposition(setup, distance, mu, n_max=N_PHOTON_MAX):
    """Arrays (Q_i, e_i * Q_i) for i = 0..n_max."""
    parts = [photon_number_truth(setup, distance, mu, i) for i in range(n_max + 1)]
    Q = np.array([p.Q for p in parts])
    EQ = np.array([p.e * p.Q for p in parts])
    return Q, EQ
