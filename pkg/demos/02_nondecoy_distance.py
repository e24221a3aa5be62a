"""
Key rate versus distance without decoy states
=============================================

Without decoys every loss and every error is charged to single photons,
so the multi-photon probability p_M eats into the gain.  The intensity
follows the classic rule mu = eta (overall transmittance).
"""

# %%
from qkdrate.channel import SETUPS, simulate_observables
from qkdrate.scan import choose_mu, max_distance, sweep

for name, setup in SETUPS.items():
    d_gllp = max_distance(setup, "nondecoy", "gllp")
    d_lut = max_distance(setup, "nondecoy", "lutkenhaus")
    mu = choose_mu(setup, d_gllp, "nondecoy")
    E = simulate_observables(setup, d_gllp, mu).E_mu
    print(f"{name:>4}: cutoff GLLP {d_gllp:6.2f} km, Lutkenhaus {d_lut:6.2f} km, QBER at GLLP cutoff {E:.2%}")

# %%
# A closer look at GYS, 5 km steps
print(f"\n{'km':>4} {'mu':>8} {'R_lut':>11} {'R_gllp':>11}")
for p in sweep(SETUPS["GYS"], "nondecoy", "auto", distances=range(0, 40, 5)):
    print(f"{p.distance:4.0f} {p.mu_used:8.4f} {max(p.R_lutkenhaus, 0):11.3e} {max(p.R_gllp, 0):11.3e}")

# %%
# With the popular choice mu = 0.1 the GYS link never beats p_M: every
# detection could be a split multi-photon pulse.
pts = sweep(SETUPS["GYS"], "nondecoy", 0.1, distances=range(0, 201, 50))
print("\nGYS, mu = 0.1:", {p.distance: p.status for p in pts})
