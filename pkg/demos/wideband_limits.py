"""Wideband limits: where the bit energy settles, and when it does not.

With a fixed subchannel count the spectral-efficiency curve approaches a
closed-form minimum bit energy and slope. Let the subchannel count grow
with bandwidth instead and the per-subchannel power starves: the bit
energy diverges.
"""

import math

import numpy as np

from effcap_kit import (
    GrowthLaw,
    asymptotics_numeric_check,
    asymptotics_sparse_bounded,
    bit_energy_vs_bandwidth,
    last_decade_rise_db,
)

T = 2e-3

print("closed-form limits at per-subchannel power budget 1e4:")
print(f"{'theta':>8} {'ebn0_min_db':>12} {'slope':>8} {'rho_star':>10}")
for theta in (0.0, 0.001, 0.01, 0.1, 1.0):
    a = asymptotics_sparse_bounded(theta, T, 1, 1e4, 1.0)
    print(
        f"{theta:>8g} {10*math.log10(a.ebn0_min):>12.4f}"
        f" {a.wideband_slope:>8.4f} {a.rho_star:>10.6f}"
    )

print()
theta = 0.01
ref = asymptotics_sparse_bounded(theta, T, 1, 1e4, 1.0)
got_db, got_slope = asymptotics_numeric_check(
    theta, T, 1, 1e4, 1.0, np.geomspace(1e7, 1e10, 16)
)
print(f"finite-coherence extrapolation at theta = {theta}:")
print(f"  limit  {got_db:.4f} dB vs closed form {10*math.log10(ref.ebn0_min):.4f} dB")
print(f"  slope  {got_slope:.4f}    vs closed form {ref.wideband_slope:.4f}")

print()
bands = np.geomspace(1e8, 1e12, 13)
for growth in (GrowthLaw("bounded", 10, 1e8), GrowthLaw("sublinear", 10, 1e8, 0.5)):
    pts = bit_energy_vs_bandwidth(0.001, T, growth, 1e5, 1.0, bands)
    rise = last_decade_rise_db([p.bandwidth_hz for p in pts], [p.ebn0_db for p in pts])
    print(
        f"{growth.kind:>9} subchannel growth: bit energy moves {rise:+.3f} dB"
        f" over the last bandwidth decade"
    )
