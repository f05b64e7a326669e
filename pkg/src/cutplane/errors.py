"""Exception types shared across the library."""


class CutplaneError(Exception):
    """Base class for all library errors."""


class LPInfeasible(CutplaneError):
    """A linear program over the knowledge set was infeasible (corrupted state)."""


class LPUnbounded(CutplaneError):
    """A linear program was unbounded; impossible for bounded polytopes."""


class NonConvergence(CutplaneError):
    """An iterative routine failed to reach its tolerance within the iteration cap."""


class DimensionTooLarge(CutplaneError):
    """The Monte Carlo volume oracle is restricted to desk-scale dimensions."""


class EmptyKnowledge(CutplaneError):
    """A cut made the knowledge set infeasible beyond tolerance."""


class MissingHorizon(CutplaneError):
    """A learner that needs the horizon T was run without one."""


class InvalidOracle(CutplaneError):
    """A simulated oracle returned a direction violating the validity condition."""


class PackingTooSmall(CutplaneError):
    """The greedy direction packing ended up with fewer than 4 vectors."""


class ConfigError(CutplaneError):
    """An experiment configuration failed validation."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"config field '{field}': {message}")
