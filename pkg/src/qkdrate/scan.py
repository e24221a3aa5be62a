"""Distance sweeps, intensity optimisation and cutoff distances.

The signal intensity at each distance is chosen by a *mu policy*:

``"auto"``
    non-decoy: mu = eta (overall transmittance at that distance);
    decoy: mu maximises the key rate at that distance.
``"origin"``
    mu maximises the key rate at 0 km and is then held fixed over the
    whole fiber, the way a fielded system picks one operating intensity.
a float
    a fixed intensity.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .channel import simulate_observables, transmittance
from .errors import DomainError, NoPositiveRateError, PNSInsecureError, QKDError
from .postprocessing import F_EC_CASCADE, SCHEMES, estimate_decoy_vw, estimate_pessimistic, key_rate

MODES = ("nondecoy", "decoy")
DEFAULT_NU = 0.05
CSV_HEADER = ["distance_km", "mu", "scheme", "mode", "Q_mu", "E_mu", "Q1_bound", "e1_bound", "R"]

_MU_GRID_POINTS = 400
_MU_MIN = 1e-5
_MU_XATOL = 1e-6


@dataclass(frozen=True)
class SweepPoint:
    distance: float
    mu_used: float
    R_lutkenhaus: float
    R_gllp: float
    Q_mu: float
    E_mu: float
    Q1_bound: float
    e1_bound: float
    status: str = "ok"  # ok | pns_insecure | estimator_collapse | degenerate

    def rate(self, scheme):
        return self.R_lutkenhaus if scheme == "lutkenhaus" else self.R_gllp


def _check_mode(mode, nu):
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "decoy" and not 0 < nu:
        raise DomainError(f"decoy intensity must be positive, got {nu}")


def evaluate(setup, distance, mu, mode="nondecoy", nu=DEFAULT_NU, q=0.5, f_ec=F_EC_CASCADE):
    """Observables, single-photon bounds and both rates at one operating point.

    Estimator failures do not raise; the point comes back with zero rates
    and a status flag.
    """
    _check_mode(mode, nu)
    try:
        obs = simulate_observables(setup, distance, mu, nu if mode == "decoy" else None, q)
    except QKDError:
        return SweepPoint(distance, mu, 0.0, 0.0, 0.0, math.nan, math.nan, math.nan, "degenerate")
    try:
        est = estimate_pessimistic(obs) if mode == "nondecoy" else estimate_decoy_vw(obs, "decoy")
    except PNSInsecureError:
        status = "pns_insecure"
    except QKDError:
        status = "estimator_collapse"
    else:
        R = {s: key_rate(s, obs, est, f_ec).R for s in SCHEMES}
        return SweepPoint(
            distance, mu, R["lutkenhaus"], R["gllp"], obs.Q_mu, obs.E_mu, est.Q1_bound, est.e1_bound
        )
    return SweepPoint(distance, mu, 0.0, 0.0, obs.Q_mu, obs.E_mu, math.nan, math.nan, status)


def _signed_rate(setup, distance, mu, mode, scheme, nu, q, f_ec):
    # failures count as "no key"; -inf keeps them below every real rate
    p = evaluate(setup, distance, mu, mode, nu, q, f_ec)
    return p.rate(scheme) if p.status == "ok" else -math.inf


def _maximize_mu(setup, distance, mode, scheme, nu, q, f_ec):
    lo = nu * (1 + 1e-3) if mode == "decoy" else _MU_MIN
    if lo >= 1:
        raise DomainError(f"no admissible signal intensity above nu={nu}")
    grid = np.geomspace(lo, 1.0, _MU_GRID_POINTS)
    rates = np.array([_signed_rate(setup, distance, m, mode, scheme, nu, q, f_ec) for m in grid])
    i = int(np.argmax(rates))
    if not np.isfinite(rates[i]):
        return float(grid[i]), -math.inf
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]

    def objective(m):
        r = _signed_rate(setup, distance, m, mode, scheme, nu, q, f_ec)
        return -r if np.isfinite(r) else 1.0

    res = minimize_scalar(objective, bounds=(a, b), method="bounded", options={"xatol": _MU_XATOL})
    if -res.fun >= rates[i]:
        return float(res.x), float(-res.fun)
    return float(grid[i]), float(rates[i])


def optimal_mu(setup, distance, mode="decoy", scheme="gllp", nu=DEFAULT_NU, q=0.5, f_ec=F_EC_CASCADE):
    """Signal intensity in (0, 1] maximising the key rate of ``scheme``.

    Raises NoPositiveRateError when no intensity gives a positive rate.
    """
    _check_mode(mode, nu)
    mu, R = _maximize_mu(setup, distance, mode, scheme, nu, q, f_ec)
    if not R > 0:
        raise NoPositiveRateError(
            f"{setup.name}: no intensity gives a positive {scheme} rate at {distance} km ({mode})"
        )
    return mu


def _mu_chooser(setup, mode, mu_policy, scheme, nu, q, f_ec):
    """Return a function distance -> intensity implementing ``mu_policy``."""
    if mu_policy == "auto":
        if mode == "nondecoy":
            return lambda d: transmittance(setup, d)
        return lambda d: _maximize_mu(setup, d, mode, scheme, nu, q, f_ec)[0]
    if mu_policy == "origin":
        mu0 = optimal_mu(setup, 0.0, mode, scheme, nu, q, f_ec)
        return lambda d: mu0
    try:
        mu = float(mu_policy)
    except (TypeError, ValueError):
        raise DomainError(f"mu policy must be 'auto', 'origin' or a number, got {mu_policy!r}") from None
    if not 0 < mu <= 1:
        raise DomainError(f"fixed mu must lie in (0, 1], got {mu}")
    return lambda d: mu


def choose_mu(setup, distance, mode, mu_policy="auto", scheme="gllp", nu=DEFAULT_NU, q=0.5, f_ec=F_EC_CASCADE):
    """Intensity that ``mu_policy`` prescribes at ``distance``."""
    _check_mode(mode, nu)
    return _mu_chooser(setup, mode, mu_policy, scheme, nu, q, f_ec)(distance)


def max_distance(
    setup, mode="nondecoy", scheme="gllp", mu_policy="auto", nu=DEFAULT_NU, q=0.5, f_ec=F_EC_CASCADE,
    resolution=0.01,
):
    """Largest fiber length (km) with a positive key rate, by bisection.

    With an optimising policy the intensity is optimised for ``scheme``
    itself, so each scheme gets its own best cutoff.
    """
    _check_mode(mode, nu)
    pick = _mu_chooser(setup, mode, mu_policy, scheme, nu, q, f_ec)

    def positive(d):
        return _signed_rate(setup, d, pick(d), mode, scheme, nu, q, f_ec) > 0

    if not positive(0.0):
        raise NoPositiveRateError(f"{setup.name}: no positive {scheme} rate at 0 km ({mode})")
    lo, hi = 0.0, 1.0
    while positive(hi):
        lo, hi = hi, 2.0 * hi
        if hi > 1e5:
            raise QKDError(f"{setup.name}: key rate stays positive beyond {lo} km")
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if positive(mid):
            lo = mid
        else:
            hi = mid
    return lo


def default_distances(setup, mode, mu_policy="auto", nu=DEFAULT_NU, q=0.5, f_ec=F_EC_CASCADE, step=1.0):
    """0 km to 10 km past the Lutkenhaus cutoff (200 km if there is none)."""
    try:
        end = max_distance(setup, mode, "lutkenhaus", mu_policy, nu, q, f_ec) + 10.0
    except NoPositiveRateError:
        end = 200.0
    return list(np.arange(0.0, math.floor(end / step) * step + step / 2, step))


def sweep(setup, mode="nondecoy", mu_policy="auto", nu=DEFAULT_NU, distances=None, q=0.5, f_ec=F_EC_CASCADE):
    """Evaluate both schemes along a distance grid.

    Optimising policies tune mu for GLLP; the Lutkenhaus rate at each
    distance is evaluated at the same intensity.
    """
    _check_mode(mode, nu)
    if distances is None:
        distances = default_distances(setup, mode, mu_policy, nu, q, f_ec)
    distances = [float(d) for d in distances]
    if not distances:
        raise DomainError("distance grid is empty")
    if any(b <= a for a, b in zip(distances, distances[1:])):
        raise DomainError("distance grid must be strictly ascending")
    pick = _mu_chooser(setup, mode, mu_policy, "gllp", nu, q, f_ec)
    return [evaluate(setup, d, pick(d), mode, nu, q, f_ec) for d in distances]


def _sci(x):
    return "nan" if math.isnan(x) else f"{x:.5e}"


def write_csv(points, fh, mode, schemes=SCHEMES):
    """One row per (distance, scheme); negative rates are written as zero."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for p in points:
        for s in schemes:
            writer.writerow([
                f"{p.distance:g}", _sci(p.mu_used), s, mode, _sci(p.Q_mu), _sci(p.E_mu),
                _sci(p.Q1_bound), _sci(p.e1_bound), _sci(max(p.rate(s), 0.0)),
            ])
