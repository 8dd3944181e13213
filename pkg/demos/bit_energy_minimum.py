"""Why running a noisy-estimate link at very low power backfires.

Bit energy falls as the power shrinks, bottoms out at an interior SNR,
then climbs without bound: below the minimum the channel estimate decays
faster than the energy savings accrue. More bandwidth moves the minimum
down and to the left.
"""

import numpy as np

from effcap_kit import LinkConfig, QosSpec, bit_energy_db, min_bit_energy_numeric

T = 2e-3
grid = np.geomspace(1e-6, 10.0, 48)

print("bit energy around the minimum, B = 100 kHz, theta = 0.01:")
qos = QosSpec(0.01)
cfg = LinkConfig(T, 1e5, 1.0, 1e5)
snr_at, min_db = min_bit_energy_numeric(cfg, qos, grid)
for scale in (0.01, 0.1, 0.5, 1.0, 2.0, 10.0):
    snr = snr_at * scale
    db = bit_energy_db(LinkConfig(T, 1e5, 1.0, snr * 1e5), qos)
    mark = "  <- minimum" if scale == 1.0 else ""
    print(f"  snr = {snr:>9.4g}: {db:>8.3f} dB{mark}")

print()
print(f"{'theta':>8} | " + " ".join(f"{b:>10.0e}" for b in (1e4, 1e5, 1e6, 1e7)))
for theta in (0.001, 0.01, 0.1, 1.0):
    qos = QosSpec(theta)
    row = []
    for b in (1e4, 1e5, 1e6, 1e7):
        _, db = min_bit_energy_numeric(LinkConfig(T, b, 1.0, b), qos, grid)
        row.append(f"{db:>10.4f}")
    print(f"{theta:>8g} | " + " ".join(row))
print("minimum bit energy in dB: rises with theta, falls with bandwidth")
