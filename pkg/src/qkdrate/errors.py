"""Exception hierarchy shared by the rate calculators."""


class QKDError(Exception):
    """Base class for every error raised by :mod:`qkdrate`."""


class DomainError(QKDError, ValueError):
    """An argument lies outside the domain of a formula."""


class DegenerateChannelError(QKDError):
    """The simulated gain underflowed to zero."""


class PNSInsecureError(QKDError):
    """Gain does not exceed the multi-photon probability.

    Every detection could then come from a multi-photon pulse, so an
    eavesdropper running a photon-number-splitting attack learns the
    whole key without introducing errors.
    """

    def __init__(self, Q_mu, p_multi):
        self.Q_mu = Q_mu
        self.p_multi = p_multi
        super().__init__(
            f"PNS-insecure: Q_mu={Q_mu:.6g} <= p_M={p_multi:.6g}, no untagged qubits remain"
        )


class EstimatorCollapseError(QKDError):
    """The decoy lower bound on the single-photon gain is not positive."""


class NoPositiveRateError(QKDError):
    """No intensity yields a positive key rate."""
