"""Does the queue-length tail really decay at the promised rate?

Feed the link at exactly its effective capacity for a target exponent
theta and the simulated queue tail should decay like exp(-theta q).
Offer less traffic and the tail decays faster. Reruns with the same seed
reproduce the estimate bit for bit.
"""

from effcap_kit import LinkConfig, QosSpec, SimSpec, simulate_queue

cfg = LinkConfig(2e-3, 1e5, 1.0, 1e5)
theta = 0.01
frames = 4_000_000

for margin in (1.0, 0.5):
    spec = SimSpec(cfg, QosSpec(theta), frames, 7, margin)
    est = simulate_queue(spec)
    lo, hi = est.fit_range_bits
    print(f"arrival margin {margin:g}:")
    print(f"  theta_hat = {est.theta_hat:.5f} (target {theta:g}, ratio {est.theta_hat/theta:.3f})")
    print(f"  95% ci halfwidth {est.ci_halfwidth:.2e}, fit window [{lo:.0f}, {hi:.0f}] bits,"
          f" {est.samples_in_tail} tail samples")

rerun = simulate_queue(SimSpec(cfg, QosSpec(theta), frames, 7, 1.0))
first = simulate_queue(SimSpec(cfg, QosSpec(theta), frames, 7, 1.0))
print()
print(f"same seed, same estimate: {rerun == first}")
