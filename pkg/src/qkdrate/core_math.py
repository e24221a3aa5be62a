"""Scalar primitives: binary entropy, the individual-attack privacy term and
Poisson photon-number statistics.

All functions take and return plain floats.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError

#: Error rate of a click caused purely by background (random outcome).
E0 = 0.5

#: Tolerance used for internal floating point comparisons.
TOL = 1e-12


def binary_entropy(e):
    """Binary Shannon entropy H2(e) in bits.

    The endpoints are handled explicitly so that 0*log(0) = 0.

    >>> binary_entropy(0.5)
    1.0
    >>> binary_entropy(0.0)
    0.0
    """
    e = float(e)
    if not 0.0 <= e <= 1.0:
        raise DomainError(f"binary entropy needs 0 <= e <= 1, got {e}")
    if e == 0.0 or e == 1.0:
        return 0.0
    return -e * math.log2(e) - (1.0 - e) * math.log2(1.0 - e)


def lutkenhaus_pa_term(e):
    """Privacy amplification cost per single-photon bit against individual
    attacks, log2(1 + 4e - 4e^2).

    Only defined up to the symmetric point e = 1/2, where it reaches 1.
    """
    e = float(e)
    if not 0.0 <= e <= 0.5:
        raise DomainError(f"privacy term needs 0 <= e <= 1/2, got {e}")
    return math.log2(1.0 + 4.0 * e - 4.0 * e * e)


def _gap(e):
    # works on arrays; caller keeps e inside (0, 1/2]
    h = -e * np.log2(e) - (1.0 - e) * np.log2(1.0 - e)
    t = np.log2(1.0 + 4.0 * e - 4.0 * e * e)
    return h - t, h


def pa_term_relative_deviation(e):
    """(H2(e) - tau(e)) / H2(e) for 0 < e < 1."""
    h = binary_entropy(e)
    if h == 0.0:
        raise DomainError(f"relative deviation undefined where H2 vanishes (e={e})")
    return (h - lutkenhaus_pa_term(e)) / h


def pa_term_max_deviation(grid_step=1e-5):
    """Find where the GLLP and individual-attack privacy terms differ most.

    The two curves are farthest apart where H2(e) - tau(e) peaks.  A uniform
    scan over (0, 1/2] finds the best grid point and a golden-section search
    on the neighbouring cells polishes it.  The separation is reported
    relative to H2 at that point.  (The relative gap alone is not a useful
    objective: it tends to 1 as e -> 0 because tau vanishes linearly while
    H2 carries a log factor.)

    Returns
    -------
    (e_at_max, relative_deviation)
    """
    if not 0.0 < grid_step <= 1e-4:
        raise DomainError(f"grid_step must lie in (0, 1e-4], got {grid_step}")
    n = int(math.floor(0.5 / grid_step))
    grid = grid_step * np.arange(1, n + 1)
    gap, _ = _gap(grid)
    i = int(np.argmax(gap))
    e_best = float(grid[i])
    if 0 < i < n - 1:
        res = minimize_scalar(
            lambda x: -float(_gap(np.float64(x))[0]),
            bracket=(grid[i - 1], grid[i], grid[i + 1]),
            method="golden",
            tol=1e-10,
        )
        if -res.fun >= gap[i]:
            e_best = float(res.x)
    return e_best, pa_term_relative_deviation(e_best)


def poisson_weight(mu, i):
    """Probability that a phase-randomised coherent pulse of mean photon
    number ``mu`` carries exactly ``i`` photons.

    Evaluated in log space so large ``i`` does not overflow.
    """
    if mu <= 0:
        raise DomainError(f"mean photon number must be positive, got {mu}")
    if i < 0 or int(i) != i:
        raise DomainError(f"photon number must be a non-negative integer, got {i}")
    i = int(i)
    return math.exp(i * math.log(mu) - mu - math.lgamma(i + 1))


def multi_photon_probability(mu):
    """p_M = 1 - (1 + mu) exp(-mu), the chance of two or more photons."""
    if mu <= 0:
        raise DomainError(f"mean photon number must be positive, got {mu}")
    # -expm1 keeps precision for small mu where 1 - (1+mu)e^-mu cancels
    return -math.expm1(-mu) - mu * math.exp(-mu)


@dataclass(frozen=True)
class PhotonNumberDistribution:
    """Poisson photon-number statistics of a weak coherent source."""

    mu: float

    def __post_init__(self):
        if self.mu <= 0:
            raise DomainError(f"mean photon number must be positive, got {self.mu}")

    def weight(self, i):
        return poisson_weight(self.mu, i)

    def weights(self, n_max=50):
        """Array of weights for i = 0..n_max."""
        return np.array([self.weight(i) for i in range(n_max + 1)])

    @property
    def p_multi(self):
        return multi_photon_probability(self.mu)
