"""Exception hierarchy shared by all comfortloop modules."""


class ComfortLoopError(Exception):
    """Base class for every domain error raised by the package."""

    code = "error"


# comfort core
class OutOfRange(ComfortLoopError, ValueError):
    code = "out_of_range"

    def __init__(self, field, value, lo=None, hi=None):
        self.field = field
        self.value = value
        bounds = f" (allowed [{lo}, {hi}])" if lo is not None else ""
        super().__init__(f"{field}={value!r} out of range{bounds}")


class NotFinite(ComfortLoopError, ValueError):
    code = "not_finite"


class NonConvergence(ComfortLoopError, RuntimeError):
    code = "non_convergence"


# predictor
class EmptyWindow(ComfortLoopError, ValueError):
    code = "empty_window"


class TooFewSamples(ComfortLoopError, ValueError):
    code = "too_few_samples"


class DegenerateDesign(ComfortLoopError, ValueError):
    code = "degenerate_design"


# profile
class NoNeutralPoint(ComfortLoopError):
    code = "no_neutral_point"


class NonMonotone(ComfortLoopError):
    code = "non_monotone"


class EmptyGroup(ComfortLoopError, ValueError):
    code = "empty_group"


# control
class NoOccupants(ComfortLoopError):
    code = "no_occupants"


class NoGroupProfile(ComfortLoopError):
    code = "no_group_profile"


# gateway
class MalformedFrame(ComfortLoopError):
    code = "malformed"


class UnknownNode(ComfortLoopError, KeyError):
    code = "unknown_node"

    def __str__(self):
        return Exception.__str__(self)


class StaleTimestamp(ComfortLoopError):
    code = "stale_timestamp"


class Unauthorized(ComfortLoopError):
    code = "unauthorized"


class DuplicateKindMismatch(ComfortLoopError):
    code = "kind_mismatch"


class CorruptSnapshot(ComfortLoopError):
    code = "corrupt_snapshot"


# simulation
class ConfigError(ComfortLoopError, ValueError):
    code = "config"


class ScenarioError(ComfortLoopError):
    """Wraps a module error with the simulated time at which it happened."""

    code = "scenario"

    def __init__(self, time, cause):
        self.time = time
        self.cause = cause
        super().__init__(f"t={time:g}s: {type(cause).__name__}: {cause}")
