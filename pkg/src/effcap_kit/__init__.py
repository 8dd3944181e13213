"""Effective capacity of pilot-assisted links under queueing constraints.

The package models a block-fading link that spends part of each frame
on a training symbol, estimates the channel with an MMSE filter and
then transmits at a fixed rate. Service is ON-OFF: a frame delivers
its payload only when the estimated channel supports the chosen rate.
Under a statistical delay constraint with exponent theta the relevant
throughput is the effective capacity, and the modules here optimize
the training split, the transmission rate and the decoding threshold,
extend the model to many parallel subchannels, evaluate the wideband
bit-energy limit and slope in closed form, and cross-check the queue
exponent by direct simulation.
"""

from .effcap import (
    EffCapResult,
    QosSpec,
    bit_energy,
    bit_energy_db,
    effective_capacity_at,
    effective_capacity_theta0,
    min_bit_energy_numeric,
    optimal_rate,
    spectral_efficiency,
)
from .errors import (
    ConvergenceError,
    DegenerateQueueError,
    DomainError,
    EffcapError,
    GridEndpointError,
    InsufficientTailError,
)
from .link_model import (
    EnergySplit,
    EstimateStats,
    LinkConfig,
    effective_snr,
    energy_split,
    nominal_snr,
    outage_threshold,
    with_nominal_snr,
)
from .queue_sim import (
    SimSpec,
    TailEstimate,
    bernoulli_trace,
    lindley_path,
    on_off_trace,
    simulate_queue,
)
from .training import TrainingSolution, rho_opt_closed_form, rho_opt_numeric
from .wideband import (
    GrowthLaw,
    ScenarioTag,
    WidebandAsymptotics,
    WidebandConfig,
    WidebandPoint,
    asymptotics_numeric_check,
    asymptotics_sparse_bounded,
    bit_energy_vs_bandwidth,
    classify_scenario,
    effective_capacity_wideband,
    effective_snr_expansion,
    last_decade_rise_db,
    optimize_wideband_iid,
    training_fraction_expansion,
    transition_probabilities,
    uniform_wideband_config,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "EffcapError",
    "DomainError",
    "ConvergenceError",
    "GridEndpointError",
    "DegenerateQueueError",
    "InsufficientTailError",
    "LinkConfig",
    "EnergySplit",
    "EstimateStats",
    "nominal_snr",
    "with_nominal_snr",
    "energy_split",
    "effective_snr",
    "outage_threshold",
    "TrainingSolution",
    "rho_opt_closed_form",
    "rho_opt_numeric",
    "QosSpec",
    "EffCapResult",
    "effective_capacity_at",
    "optimal_rate",
    "effective_capacity_theta0",
    "spectral_efficiency",
    "bit_energy",
    "bit_energy_db",
    "min_bit_energy_numeric",
    "WidebandConfig",
    "uniform_wideband_config",
    "transition_probabilities",
    "effective_capacity_wideband",
    "optimize_wideband_iid",
    "training_fraction_expansion",
    "effective_snr_expansion",
    "WidebandAsymptotics",
    "asymptotics_sparse_bounded",
    "asymptotics_numeric_check",
    "ScenarioTag",
    "GrowthLaw",
    "classify_scenario",
    "WidebandPoint",
    "bit_energy_vs_bandwidth",
    "last_decade_rise_db",
    "SimSpec",
    "TailEstimate",
    "bernoulli_trace",
    "on_off_trace",
    "lindley_path",
    "simulate_queue",
]
