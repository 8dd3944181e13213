"""How much of the power budget should buy channel estimates?

Walks the optimal pilot fraction across the SNR range on a 10 MHz link
and shows the two limits: an even split when the link is starved, a few
permille when power is plentiful.
"""

import numpy as np

from effcap_kit import LinkConfig, effective_snr, energy_split, rho_opt_closed_form

T = 2e-3
B = 1e7

print(f"link: frame {T*1e3:g} ms, bandwidth {B:g} Hz, TB = {T*B:g} symbols")
print()
print(f"{'snr':>10} {'rho_opt':>10} {'snr_eff':>12} {'loss vs nominal':>16}")
for snr in np.geomspace(1e-6, 1e6, 13):
    cfg = LinkConfig(T, B, 1.0, snr * B)
    sol = rho_opt_closed_form(cfg)
    print(
        f"{snr:>10.1e} {sol.rho_opt:>10.5f} {sol.snr_eff_opt:>12.4e}"
        f" {10*np.log10(snr / sol.snr_eff_opt):>14.1f} dB"
    )

print()
cfg = LinkConfig(T, B, 1.0, 1.0 * B)
sol = rho_opt_closed_form(cfg)
split = energy_split(cfg, sol.rho_opt)
frame_energy = cfg.avg_power_w * T
print(f"at snr = 1: rho_opt = {sol.rho_opt:.5f}")
print(f"  pilot symbol gets   {split.pilot_energy_j:.4e} J of {frame_energy:.4e} J")
print(f"  each data symbol    {split.data_symbol_energy_j:.4e} J")
print(f"  pilot / data-symbol energy ratio: {split.pilot_energy_j / split.data_symbol_energy_j:.1f}")

# the optimum is flat: a 20 percent mis-set costs little effective SNR
for off in (0.8, 1.0, 1.2):
    rho = sol.rho_opt * off
    stats = effective_snr(cfg, rho)
    print(f"  rho = {rho:.5f}: snr_eff = {stats.effective_snr:.6g}")
