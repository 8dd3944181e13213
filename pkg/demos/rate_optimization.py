"""Picking the fixed transmission rate under a queueing constraint.

The link never learns the channel exactly, so any fixed rate risks
outage. A stricter delay constraint (larger theta) pushes the optimal
rate down: less throughput per ON frame, but fewer OFF frames.
"""

import numpy as np

from effcap_kit import LinkConfig, QosSpec, effective_capacity_at, spectral_efficiency

cfg = LinkConfig(2e-3, 1e5, 1.0, 1e5)  # snr = 1 on a 100 kHz link

print(f"{'theta':>8} {'rate kbps':>10} {'p_on':>8} {'se':>10} {'rate se':>10}")
for theta in (0.0, 1e-3, 1e-2, 1e-1, 1.0):
    res = spectral_efficiency(cfg, QosSpec(theta))
    # spectral efficiency of the raw ON-frame rate, before outage and
    # queueing discount it
    raw_se = res.rate_opt_bps / cfg.bandwidth_hz
    print(
        f"{theta:>8g} {res.rate_opt_bps/1e3:>10.2f} {res.on_probability:>8.4f}"
        f" {res.spectral_efficiency:>10.5f} {raw_se:>10.5f}"
    )

print()
theta = 0.01
res = spectral_efficiency(cfg, QosSpec(theta))
print(f"theta = {theta}: the chosen rate is a genuine interior optimum")
for scale in (0.5, 0.9, 1.0, 1.1, 2.0):
    rate = res.rate_opt_bps * scale
    value = effective_capacity_at(cfg, QosSpec(theta), rate, res.rho_used)
    mark = "  <- optimum" if scale == 1.0 else ""
    print(f"  rate x {scale:>3g}: effective capacity {value:.6f} bits/s/Hz{mark}")
