"""Monte Carlo check of the queue-tail semantics behind theta.

A buffer is fed at a constant rate and drained by the simulated ON-OFF
channel at the optimal fixed rate. When the arrival rate equals the
effective capacity at exponent theta, the stationary queue tail decays
like exp(-theta q), so the fitted decay rate of the empirical tail
should land near theta. The fit is a least-squares slope of the log
complementary CDF over a percentile-bounded range, with a block
bootstrap for the confidence interval.

Randomness comes from numpy's default PCG64 generator; everything is
derived deterministically from the spec seed, so a SimSpec maps to a
bit-identical TailEstimate.
"""

import math
from dataclasses import dataclass

import numpy as np

from .effcap import QosSpec, spectral_efficiency
from .errors import DegenerateQueueError, DomainError, InsufficientTailError
from .link_model import LinkConfig

__all__ = [
    "RNG_ALGORITHM",
    "SimSpec",
    "TailEstimate",
    "bernoulli_trace",
    "on_off_trace",
    "lindley_path",
    "simulate_queue",
]

RNG_ALGORITHM = "pcg64"

# tail runs need enough frames for the asymptotic slope to mean anything
MIN_TAIL_FRAMES = 1_000_000

# queue state is double-precision bits; past this the run is declared
# non-stationary rather than silently losing integer resolution
OVERFLOW_BITS = 1e15

_FIT_POINTS = 64
_MIN_TAIL_SAMPLES = 50
_BOOTSTRAP_BLOCKS = 200
_BOOTSTRAP_RESAMPLES = 200


@dataclass(frozen=True)
class SimSpec:
    """One simulation run: link, QoS target, length, seed and load.

    arrival_margin scales the offered load relative to the effective
    capacity at theta; 1 means arrivals exactly at capacity, the point
    where the tail exponent should equal theta.
    """

    cfg: LinkConfig
    qos: QosSpec
    frames: int
    seed: int
    arrival_margin: float = 1.0

    def __post_init__(self):
        f = self.frames
        if isinstance(f, bool) or not isinstance(f, (int, np.integer)) or f < 1:
            raise DomainError(f"frames must be a positive integer, got {f!r}")
        object.__setattr__(self, "frames", int(f))
        s = self.seed
        if isinstance(s, bool) or not isinstance(s, (int, np.integer)):
            raise DomainError(f"seed must be an integer, got {s!r}")
        if not 0 <= int(s) < 2**64:
            raise DomainError("seed must fit in 64 unsigned bits")
        object.__setattr__(self, "seed", int(s))
        m = float(self.arrival_margin)
        if not 0.0 < m <= 1.0:
            raise DomainError(f"arrival_margin must lie in (0, 1], got {m!r}")
        object.__setattr__(self, "arrival_margin", m)


@dataclass(frozen=True)
class TailEstimate:
    """Fitted exponential decay rate of the queue-length tail."""

    theta_hat: float
    fit_range_bits: tuple
    ci_halfwidth: float
    samples_in_tail: int


def bernoulli_trace(p_on: float, frames: int, seed: int) -> np.ndarray:
    """i.i.d. boolean ON/OFF sequence with P(ON) = p_on."""
    if not 0.0 <= p_on <= 1.0:
        raise DomainError(f"p_on must lie in [0, 1], got {p_on!r}")
    rng = np.random.default_rng(seed)
    return rng.random(int(frames)) < p_on


def on_off_trace(cfg: LinkConfig, qos: QosSpec, frames: int, seed: int) -> np.ndarray:
    """Channel state sequence at the jointly optimal rate and training."""
    result = spectral_efficiency(cfg, qos)
    return bernoulli_trace(result.on_probability, frames, seed)


def lindley_path(increments) -> np.ndarray:
    """Queue lengths after each frame, starting empty.

    Q_n = max(Q_{n-1} + increment_n, 0), computed in closed form as the
    running sum minus its running minimum (clipped at zero).
    """
    inc = np.asarray(increments, dtype=float)
    if inc.ndim != 1 or inc.size == 0:
        raise DomainError("increments must be a nonempty 1-d sequence")
    s = np.cumsum(inc)
    q = s - np.minimum(np.minimum.accumulate(s), 0.0)
    if q[-1] > OVERFLOW_BITS or q.max() > OVERFLOW_BITS:
        raise DegenerateQueueError(
            f"queue exceeded {OVERFLOW_BITS:.0e} bits; the run is not stationary"
        )
    return q


def _fit_slope(q_grid: np.ndarray, log_ccdf: np.ndarray) -> float:
    slope = np.polyfit(q_grid, log_ccdf, 1)[0]
    return -float(slope)


def _estimate_tail(q: np.ndarray, seed: int) -> TailEstimate:
    n = q.size
    q_lo = float(np.quantile(q, 0.99))
    if q_lo <= 0.0:
        raise DegenerateQueueError(
            "queue is empty at the fit-range start; no tail to fit"
        )
    q_sorted = np.sort(q)
    q_hi = float(q_sorted[n - _MIN_TAIL_SAMPLES])
    if not q_hi > q_lo:
        raise InsufficientTailError(
            "fewer than 50 samples spread beyond the fit-range start"
        )
    grid = np.linspace(q_lo, q_hi, _FIT_POINTS)
    counts = n - np.searchsorted(q_sorted, grid, side="left")
    samples_in_tail = int(counts[0])
    if samples_in_tail < _MIN_TAIL_SAMPLES:
        raise InsufficientTailError(
            f"only {samples_in_tail} samples beyond the fit-range start"
        )
    log_ccdf = np.log(counts / n)
    theta_hat = _fit_slope(grid, log_ccdf)
    if theta_hat <= 0.0:
        raise InsufficientTailError("tail fit produced a nonpositive decay rate")

    # block bootstrap on per-block exceedance counts: resampling whole
    # blocks keeps the short-range dependence of the queue path
    blocks = _BOOTSTRAP_BLOCKS
    block_len = n // blocks
    if block_len < 1:
        raise InsufficientTailError("too few frames for the block bootstrap")
    used = blocks * block_len
    per_block = np.empty((blocks, grid.size), dtype=np.int64)
    for b in range(blocks):
        chunk = np.sort(q[b * block_len : (b + 1) * block_len])
        per_block[b] = block_len - np.searchsorted(chunk, grid, side="left")

    rng = np.random.default_rng([seed, 0xB007])
    estimates = np.empty(_BOOTSTRAP_RESAMPLES)
    for i in range(_BOOTSTRAP_RESAMPLES):
        pick = rng.integers(0, blocks, size=blocks)
        counts_r = per_block[pick].sum(axis=0)
        valid = counts_r > 0
        if valid.sum() < 8:
            raise InsufficientTailError("bootstrap resample lost the tail")
        estimates[i] = _fit_slope(
            grid[valid], np.log(counts_r[valid] / used)
        )
    half = 0.5 * float(
        np.quantile(estimates, 0.975) - np.quantile(estimates, 0.025)
    )
    return TailEstimate(
        theta_hat=theta_hat,
        fit_range_bits=(q_lo, q_hi),
        ci_halfwidth=half,
        samples_in_tail=samples_in_tail,
    )


def simulate_queue(spec: SimSpec) -> TailEstimate:
    """Run the buffer at the capacity-matched load and fit the tail.

    Arrivals are arrival_margin * R_E(theta) * T * B bits per frame;
    service is rate_opt * T bits when the frame is ON, zero otherwise.
    The fit range starts at the empirical 99th percentile (above the
    90th, as far into the tail as the sample size supports) and ends at
    the 50th-largest sample.
    """
    if spec.qos.theta <= 0.0:
        raise DomainError("simulate_queue needs theta > 0 as the tail target")
    if spec.frames < MIN_TAIL_FRAMES:
        raise DomainError(
            f"tail estimation needs at least {MIN_TAIL_FRAMES} frames"
        )
    result = spectral_efficiency(spec.cfg, spec.qos)
    if result.spectral_efficiency <= 0.0:
        raise DomainError("effective capacity is zero; nothing to offer the queue")
    t = spec.cfg.frame_duration_s
    arrival = (
        spec.arrival_margin
        * result.spectral_efficiency
        * t
        * spec.cfg.bandwidth_hz
    )
    service = result.rate_opt_bps * t
    mean_service = result.on_probability * service
    if arrival <= 0.0:
        raise DegenerateQueueError("zero arrivals leave the queue empty")
    if arrival >= mean_service:
        raise DegenerateQueueError(
            "arrivals at or above the mean service rate; queue is not stationary"
        )
    on = bernoulli_trace(result.on_probability, spec.frames, spec.seed)
    increments = np.where(on, arrival - service, arrival)
    q = lindley_path(increments)
    return _estimate_tail(q, spec.seed)
