"""Exception hierarchy shared by all modules.

The CLI maps these onto process exit codes, so library code should
raise the most specific class that applies.
"""


class EffcapError(Exception):
    """Base class for every error raised by this package."""


class DomainError(EffcapError, ValueError):
    """A parameter is outside the domain a formula is valid on."""


class ConvergenceError(EffcapError, RuntimeError):
    """An iterative solver failed to reach its stated tolerance."""


class GridEndpointError(DomainError):
    """A grid minimizer landed on an endpoint; the grid is too narrow."""


class DegenerateQueueError(DomainError):
    """Queue simulation is non-stationary or the queue never grows."""


class InsufficientTailError(ConvergenceError):
    """Too few tail samples to fit a decay exponent."""
