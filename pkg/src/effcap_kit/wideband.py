"""Wideband decomposition into N independent flat subchannels.

A channel of total bandwidth B with coherence bandwidth B_c splits into
N = B / B_c parallel flat-fading subchannels, each running the pilot
scheme of the narrowband model. The service state of a frame is the
number of subchannels that are ON, which gives an N+1-state effective
capacity. For i.i.d. subchannels with uniform power and training split
this collapses to the single-subchannel problem at bandwidth B_c.

As B_c grows with everything else held fixed, the bit energy converges
to a closed-form minimum with a closed-form slope; both are expansions
in z = 1/B_c around z = 0 (the number of subchannels never enters, only
the power-to-noise ratio per subchannel does). When the subchannel
count grows with total bandwidth instead, bounded bit energy is lost:
that is the scenario classification at the bottom of the module.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .effcap import EffCapResult, QosSpec, spectral_efficiency
from .errors import ConvergenceError, DomainError
from .link_model import LN2, LinkConfig, effective_snr, outage_threshold

__all__ = [
    "WidebandConfig",
    "WidebandAsymptotics",
    "GrowthLaw",
    "ScenarioTag",
    "WidebandPoint",
    "uniform_wideband_config",
    "transition_probabilities",
    "effective_capacity_wideband",
    "optimize_wideband_iid",
    "training_fraction_expansion",
    "effective_snr_expansion",
    "asymptotics_sparse_bounded",
    "asymptotics_numeric_check",
    "bit_energy_vs_bandwidth",
    "last_decade_rise_db",
    "classify_scenario",
]

_REL_TOL = 1e-12


@dataclass(frozen=True)
class WidebandConfig:
    """N parallel subchannels of width B_c each.

    link carries the totals: bandwidth_hz must equal N * B_c and
    avg_power_w bounds the per-subchannel powers from above. The three
    per-subchannel tuples hold fading variance, power and training
    fraction for each subchannel in order.
    """

    num_subchannels: int
    coherence_bandwidth_hz: float
    link: LinkConfig
    per_subchannel_variances: tuple
    per_subchannel_powers: tuple
    per_subchannel_rho: tuple

    def __post_init__(self):
        n = self.num_subchannels
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
            raise DomainError(f"num_subchannels must be a positive integer, got {n!r}")
        object.__setattr__(self, "num_subchannels", int(n))
        bc = float(self.coherence_bandwidth_hz)
        if not (math.isfinite(bc) and bc > 0.0):
            raise DomainError("coherence_bandwidth_hz must be finite and > 0")
        object.__setattr__(self, "coherence_bandwidth_hz", bc)
        if bc * self.link.frame_duration_s <= 2.0:
            raise DomainError(
                "each subchannel needs frame_duration_s * coherence_bandwidth_hz > 2"
            )
        total = self.num_subchannels * bc
        if abs(total - self.link.bandwidth_hz) > _REL_TOL * total:
            raise DomainError(
                "link.bandwidth_hz must equal num_subchannels * "
                f"coherence_bandwidth_hz ({total!r}), got {self.link.bandwidth_hz!r}"
            )
        for name, lower in (
            ("per_subchannel_variances", "positive"),
            ("per_subchannel_powers", "nonnegative"),
            ("per_subchannel_rho", "unit-interval"),
        ):
            values = tuple(float(v) for v in getattr(self, name))
            if len(values) != self.num_subchannels:
                raise DomainError(f"{name} must have one entry per subchannel")
            for v in values:
                if not math.isfinite(v):
                    raise DomainError(f"{name} entries must be finite")
                if lower == "positive" and v <= 0.0:
                    raise DomainError(f"{name} entries must be > 0")
                if lower == "nonnegative" and v < 0.0:
                    raise DomainError(f"{name} entries must be >= 0")
                if lower == "unit-interval" and not 0.0 <= v <= 1.0:
                    raise DomainError(f"{name} entries must lie in [0, 1]")
            object.__setattr__(self, name, values)
        budget = self.link.avg_power_w
        if sum(self.per_subchannel_powers) > budget * (1.0 + _REL_TOL):
            raise DomainError("per-subchannel powers exceed the power budget")


def uniform_wideband_config(
    num_subchannels: int,
    coherence_bandwidth_hz: float,
    frame_duration_s: float,
    noise_psd: float,
    total_power_w: float,
    fading_variance: float = 1.0,
    rho: float = 0.5,
) -> WidebandConfig:
    """i.i.d. subchannels with the power budget spread evenly."""
    n = int(num_subchannels)
    link = LinkConfig(
        frame_duration_s=frame_duration_s,
        bandwidth_hz=n * float(coherence_bandwidth_hz),
        noise_psd=noise_psd,
        avg_power_w=total_power_w,
        fading_variance=fading_variance,
    )
    return WidebandConfig(
        num_subchannels=n,
        coherence_bandwidth_hz=float(coherence_bandwidth_hz),
        link=link,
        per_subchannel_variances=(float(fading_variance),) * n,
        per_subchannel_powers=(float(total_power_w) / n,) * n,
        per_subchannel_rho=(float(rho),) * n,
    )


def _subchannel_on_probabilities(wcfg: WidebandConfig, rate_bps: float) -> np.ndarray:
    t = wcfg.link.frame_duration_s
    n0 = wcfg.link.noise_psd
    p_on = np.empty(wcfg.num_subchannels)
    for k in range(wcfg.num_subchannels):
        power = wcfg.per_subchannel_powers[k]
        if power == 0.0:
            p_on[k] = 0.0
            continue
        sub = LinkConfig(
            frame_duration_s=t,
            bandwidth_hz=wcfg.coherence_bandwidth_hz,
            noise_psd=n0,
            avg_power_w=power,
            fading_variance=wcfg.per_subchannel_variances[k],
        )
        snr_eff = effective_snr(sub, wcfg.per_subchannel_rho[k]).effective_snr
        if snr_eff <= 0.0 and rate_bps > 0.0:
            p_on[k] = 0.0
            continue
        p_on[k] = math.exp(-outage_threshold(sub, rate_bps, snr_eff))
    return p_on


def transition_probabilities(wcfg: WidebandConfig, rate_bps: float) -> np.ndarray:
    """Distribution of the number of ON subchannels in a frame.

    Entry j is the probability that exactly j of the N subchannels are
    ON. Each subchannel is an independent Bernoulli with its own ON
    probability, so the counts follow a Poisson-binomial law, built in
    O(N^2) by a running convolution rather than summing over the 2^N
    subchannel subsets.
    """
    p_on = _subchannel_on_probabilities(wcfg, rate_bps)
    probs = np.zeros(wcfg.num_subchannels + 1)
    probs[0] = 1.0
    for p in p_on:
        nxt = probs * (1.0 - p)
        nxt[1:] += probs[:-1] * p
        probs = nxt
    return probs


def effective_capacity_wideband(
    wcfg: WidebandConfig, qos: QosSpec, rate_bps: float
) -> float:
    """R_E of the N+1-state service model, per Hz of total bandwidth.

    R_E = -(1/(theta T B)) ln( sum_j p_j exp(-theta j r T) ) with B the
    total bandwidth N * B_c and j the number of ON subchannels, each
    delivering r T bits when ON.
    """
    if qos.theta <= 0.0:
        raise DomainError("effective_capacity_wideband needs theta > 0")
    if rate_bps < 0.0:
        raise DomainError(f"rate_bps must be >= 0, got {rate_bps!r}")
    probs = transition_probabilities(wcfg, rate_bps)
    t = wcfg.link.frame_duration_s
    theta_t = qos.theta * t
    j = np.arange(probs.size, dtype=float)
    # log of the weighted exponential sum; robust when the sum underflows
    log_mgf = logsumexp(-theta_t * rate_bps * j, b=probs)
    total_bandwidth = wcfg.num_subchannels * wcfg.coherence_bandwidth_hz
    return -log_mgf / (theta_t * total_bandwidth)


def _require_iid(wcfg: WidebandConfig) -> None:
    def uniform(values) -> bool:
        lo, hi = min(values), max(values)
        return hi - lo <= _REL_TOL * max(abs(hi), 1.0)

    if not (
        uniform(wcfg.per_subchannel_variances)
        and uniform(wcfg.per_subchannel_powers)
        and uniform(wcfg.per_subchannel_rho)
    ):
        raise DomainError(
            "optimize_wideband_iid needs identical variances, powers and "
            "training fractions across subchannels"
        )


def optimize_wideband_iid(wcfg: WidebandConfig, qos: QosSpec) -> EffCapResult:
    """Joint rate/training optimum for i.i.d. uniform subchannels.

    The N+1-state capacity factorizes, so the problem is the
    narrowband one at bandwidth B_c and per-subchannel power; the
    stored per-subchannel rho is ignored because rho is optimized. The
    returned spectral efficiency is per Hz of either B_c or the total
    bandwidth, the normalizations coincide.
    """
    _require_iid(wcfg)
    sub = LinkConfig(
        frame_duration_s=wcfg.link.frame_duration_s,
        bandwidth_hz=wcfg.coherence_bandwidth_hz,
        noise_psd=wcfg.link.noise_psd,
        avg_power_w=wcfg.per_subchannel_powers[0],
        fading_variance=wcfg.per_subchannel_variances[0],
    )
    return spectral_efficiency(sub, qos)


def _check_ratio_args(theta: float, t_s: float, n: int, power_over_nn0: float, gamma: float):
    try:
        theta = float(theta)
        t_s = float(t_s)
        power_over_nn0 = float(power_over_nn0)
        gamma = float(gamma)
    except (TypeError, ValueError):
        raise DomainError("asymptotics arguments must be real numbers") from None
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if not (math.isfinite(theta) and theta >= 0.0):
        raise DomainError(f"theta must be finite and >= 0, got {theta!r}")
    for name, v in (("T_s", t_s), ("power_over_NN0", power_over_nn0), ("gamma", gamma)):
        if not (math.isfinite(v) and v > 0.0):
            raise DomainError(f"{name} must be finite and > 0, got {v!r}")
    return theta, t_s, int(n), power_over_nn0, gamma


def training_fraction_expansion(
    t_s: float, power_over_nn0: float, gamma: float
) -> tuple[float, float]:
    """First-order behavior of the optimal training fraction in z = 1/B_c.

    rho_opt(z) = rho* + rho_dot0 z + o(z) with, writing
    q = 1 / (gamma p T) for the inverse power-time product,

        rho*     = sqrt(q (1 + q)) - q
        rho_dot0 = (1 / 2T) sqrt(1 + gamma p T) (sqrt(1 + q) - sqrt(q))^2
    """
    q = 1.0 / (gamma * power_over_nn0 * t_s)
    rho_star = q * math.expm1(0.5 * math.log1p(1.0 / q))
    spread = math.sqrt(1.0 + q) - math.sqrt(q)
    rho_dot0 = (
        0.5 / t_s * math.sqrt(1.0 + gamma * power_over_nn0 * t_s) * spread * spread
    )
    return rho_star, rho_dot0


def effective_snr_expansion(
    t_s: float, power_over_nn0: float, gamma: float
) -> tuple[float, float]:
    """Coefficients (phi, omega) of snr_eff at the training optimum.

    snr_eff,opt(z) = phi z + omega z^2 + o(z^2) in z = 1/B_c, with

        phi   = gamma p (sqrt(1 + q) - sqrt(q))^2
        omega = -(gamma p / T) (sqrt(1 + q) - sqrt(q))^2
                 (sqrt(1 + gamma p T) - 2)

    and q = 1 / (gamma p T) as above.
    """
    q = 1.0 / (gamma * power_over_nn0 * t_s)
    spread = math.sqrt(1.0 + q) - math.sqrt(q)
    base = gamma * power_over_nn0 * spread * spread
    phi = base
    omega = -base / t_s * (math.sqrt(1.0 + gamma * power_over_nn0 * t_s) - 2.0)
    return phi, omega


@dataclass(frozen=True)
class WidebandAsymptotics:
    """Closed-form wideband limits for bounded subchannel count.

    ebn0_min is the linear-scale minimum of E_b/(N N0), reached as
    B_c grows without bound; wideband_slope is the slope of the
    spectral-efficiency versus bit-energy curve at that point.
    """

    phi: float
    delta: float
    alpha_star: float
    xi: float
    ebn0_min: float
    wideband_slope: float
    rho_star: float


def asymptotics_sparse_bounded(
    theta: float, t_s: float, n: int, power_over_nn0: float, gamma: float
) -> WidebandAsymptotics:
    """Closed-form bit-energy minimum and slope for fixed subchannel count.

    Only the per-subchannel ratio p = avg_power / (N noise_psd) enters;
    the count n is validated for interface symmetry with the numeric
    check but does not appear in the limits. theta = 0 uses the exact
    limiting forms (alpha* = 1, ebn0_min = p e ln2 / phi) rather than a
    small-theta substitution.
    """
    theta, t_s, n, p, gamma = _check_ratio_args(theta, t_s, n, power_over_nn0, gamma)
    phi, _ = effective_snr_expansion(t_s, p, gamma)
    rho_star, _ = training_fraction_expansion(t_s, p, gamma)
    sqrt_term = math.sqrt(1.0 + gamma * p * t_s) - 1.0

    if theta == 0.0:
        bracket = sqrt_term / t_s + 0.5 * phi
        return WidebandAsymptotics(
            phi=phi,
            delta=0.0,
            alpha_star=1.0,
            xi=1.0,
            ebn0_min=p * math.e * LN2 / phi,
            wideband_slope=phi / (math.e * bracket),
            rho_star=rho_star,
        )

    x = theta * t_s * phi / LN2
    alpha_star = math.log1p(x) / x
    # exp(-theta T r*) with r* = phi alpha* / ln2 equals 1/(1+x) exactly,
    # by the fixed-point relation x alpha* = log(1 + x)
    one_minus_xi = math.exp(-alpha_star) * x / (1.0 + x)
    xi = 1.0 - one_minus_xi
    ln_xi = math.log1p(-one_minus_xi)
    delta = theta * t_s * p / LN2
    ebn0_min = -delta * LN2 / ln_xi
    bracket = sqrt_term / t_s + 0.5 * phi * alpha_star
    slope = (
        xi
        * ln_xi
        * ln_xi
        * LN2
        / (theta * t_s * alpha_star * one_minus_xi * bracket)
    )
    return WidebandAsymptotics(
        phi=phi,
        delta=delta,
        alpha_star=alpha_star,
        xi=xi,
        ebn0_min=ebn0_min,
        wideband_slope=slope,
        rho_star=rho_star,
    )


def asymptotics_numeric_check(
    theta: float,
    t_s: float,
    n: int,
    power_over_nn0: float,
    gamma: float,
    bc_grid,
) -> tuple[float, float]:
    """Estimate the wideband limits from finite-B_c optimizations.

    Evaluates the i.i.d. optimum along bc_grid (spanning at least three
    decades), extrapolates the last decade of bit energies linearly in
    z = 1/B_c to z = 0, and rebuilds the slope from the two largest B_c
    points via the two-term expansion R_E(z) = Rdot z + Rddot z^2 / 2.
    Returns (bit energy limit in dB, slope estimate). Raises
    ConvergenceError if the last decade has not settled to 0.05 dB.
    """
    theta, t_s, n, p, gamma = _check_ratio_args(theta, t_s, n, power_over_nn0, gamma)
    grid = np.sort(np.asarray([float(b) for b in bc_grid]))
    if grid.size < 4 or grid[0] <= 0.0:
        raise DomainError("bc_grid needs at least 4 positive points")
    if grid[-1] / grid[0] < 1e3 * (1.0 - 1e-9):
        raise DomainError("bc_grid must span at least three decades")

    qos = QosSpec(theta)
    re = np.empty(grid.size)
    for i, bc in enumerate(grid):
        sub = LinkConfig(
            frame_duration_s=t_s,
            bandwidth_hz=float(bc),
            noise_psd=1.0,
            avg_power_w=p,
            fading_variance=gamma,
        )
        re[i] = spectral_efficiency(sub, qos).spectral_efficiency

    zeta = 1.0 / grid
    ebn0 = (p / grid) / re
    last = grid >= grid[-1] / 10.0 * (1.0 - 1e-12)
    ebn0_db = 10.0 * np.log10(ebn0[last])
    if ebn0_db.max() - ebn0_db.min() > 0.05:
        raise ConvergenceError(
            "bit energy still moving by more than 0.05 dB over the last "
            "decade of B_c; no finite limit in sight"
        )
    slope_fit, intercept = np.polyfit(zeta[last], ebn0[last], 1)
    limit_db = 10.0 * math.log10(intercept)

    # slope from the two largest B_c: R_E/z is linear in z to first order
    z1, z2 = zeta[-1], zeta[-2]
    y1, y2 = re[-1] / z1, re[-2] / z2
    rddot = 2.0 * (y2 - y1) / (z2 - z1)
    rdot = y1 - 0.5 * rddot * z1
    if rddot >= 0.0 or rdot <= 0.0:
        raise ConvergenceError("slope construction failed on this grid")
    s0 = 2.0 * rdot * rdot * LN2 / (-rddot)
    return limit_db, s0


class ScenarioTag(enum.Enum):
    """How the bit energy behaves as total bandwidth grows."""

    RICH = "rich"  # N grows linearly with B: bit energy diverges
    SPARSE_BOUNDED = "sparse-bounded"  # N bounded: finite minimum
    SPARSE_UNBOUNDED = "sparse-unbounded"  # N grows sublinearly: diverges


@dataclass(frozen=True)
class GrowthLaw:
    """Subchannel count as a function of total bandwidth.

    kind is one of "bounded", "linear" or "sublinear"; n_ref is the
    count at the reference bandwidth b_ref; the exponent only applies
    to the sublinear law and must lie strictly between 0 and 1.
    """

    kind: str
    n_ref: int
    b_ref: float
    exponent: float = 0.5

    def __post_init__(self):
        if self.kind not in ("bounded", "linear", "sublinear"):
            raise DomainError(f"unknown growth-law kind {self.kind!r}")
        n = self.n_ref
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
            raise DomainError("n_ref must be a positive integer")
        object.__setattr__(self, "n_ref", int(n))
        b = float(self.b_ref)
        if not (math.isfinite(b) and b > 0.0):
            raise DomainError("b_ref must be finite and > 0")
        object.__setattr__(self, "b_ref", b)
        e = float(self.exponent)
        if self.kind == "sublinear" and not 0.0 < e < 1.0:
            raise DomainError("sublinear exponent must lie in (0, 1)")
        object.__setattr__(self, "exponent", e)

    def subchannels(self, bandwidth_hz: float) -> int:
        if self.kind == "bounded":
            return self.n_ref
        ratio = float(bandwidth_hz) / self.b_ref
        if self.kind == "linear":
            return max(1, round(self.n_ref * ratio))
        return max(1, round(self.n_ref * ratio**self.exponent))


def classify_scenario(n_of_b: GrowthLaw) -> ScenarioTag:
    """Map a subchannel growth law onto its bit-energy behavior."""
    if not isinstance(n_of_b, GrowthLaw):
        raise DomainError("classify_scenario expects a GrowthLaw")
    return {
        "bounded": ScenarioTag.SPARSE_BOUNDED,
        "linear": ScenarioTag.RICH,
        "sublinear": ScenarioTag.SPARSE_UNBOUNDED,
    }[n_of_b.kind]


@dataclass(frozen=True)
class WidebandPoint:
    """One point of a bit-energy sweep over total bandwidth."""

    bandwidth_hz: float
    num_subchannels: int
    coherence_bandwidth_hz: float
    snr: float
    spectral_efficiency: float
    ebn0_db: float


def bit_energy_vs_bandwidth(
    theta: float,
    t_s: float,
    growth: GrowthLaw,
    power_over_n0: float,
    gamma: float,
    b_grid,
) -> list:
    """Evaluate E_b/(N N0) along a total-bandwidth grid.

    The subchannel count at each point comes from the growth law; the
    per-subchannel power is the budget split N ways. power_over_n0 is
    the total avg_power / noise_psd ratio in Hz.
    """
    if not isinstance(growth, GrowthLaw):
        raise DomainError("growth must be a GrowthLaw")
    if not power_over_n0 > 0.0:
        raise DomainError("power_over_n0 must be > 0")
    qos = QosSpec(theta)
    points = []
    for b in b_grid:
        b = float(b)
        n = growth.subchannels(b)
        bc = b / n
        if t_s * bc <= 2.0:
            raise DomainError(
                f"growth law leaves coherence bandwidth {bc!r} Hz with "
                "frame_duration_s * B_c <= 2"
            )
        sub = LinkConfig(
            frame_duration_s=t_s,
            bandwidth_hz=bc,
            noise_psd=1.0,
            avg_power_w=power_over_n0 / n,
            fading_variance=gamma,
        )
        res = spectral_efficiency(sub, qos)
        snr = power_over_n0 / (n * bc)
        re = res.spectral_efficiency
        ebn0_db = math.inf if re <= 0.0 else 10.0 * math.log10(snr / re)
        points.append(
            WidebandPoint(
                bandwidth_hz=b,
                num_subchannels=n,
                coherence_bandwidth_hz=bc,
                snr=snr,
                spectral_efficiency=re,
                ebn0_db=ebn0_db,
            )
        )
    return points


def last_decade_rise_db(b_values, ebn0_db_values) -> float:
    """Increase of the bit energy over the top decade of the sweep.

    Positive means the bit energy is still climbing (divergence);
    near zero means it has settled.
    """
    b = np.asarray([float(v) for v in b_values])
    e = np.asarray([float(v) for v in ebn0_db_values])
    if b.size != e.size or b.size < 2:
        raise DomainError("need matching b and ebn0 sequences, at least 2 points")
    order = np.argsort(b)
    b, e = b[order], e[order]
    mask = b >= b[-1] / 10.0 * (1.0 - 1e-12)
    tail = e[mask]
    return float(tail[-1] - tail[0])
