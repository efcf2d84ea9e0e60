"""Exception types shared across the package."""


class ToolError(Exception):
    """Base class for every error this package raises deliberately."""


class DimensionMismatch(ToolError):
    """Operands live in Hilbert spaces of different dimension."""


class ZeroVector(ToolError):
    """A vector with (numerically) zero norm was supplied."""


class NotAProjector(ToolError):
    """A matrix failed hermiticity/idempotence/spectrum validation."""


class ImpossiblePostselection(ToolError):
    """The post-selection can never succeed: the ABL denominator vanishes."""


class ZeroProbabilityOutcome(ToolError):
    """State update conditioned on an outcome of (numerically) zero probability."""


class NoAcceptedRuns(ToolError):
    """Every sampled run was discarded by pre- or post-selection."""


class PreconditionViolated(ToolError):
    """An operation was called outside its stated precondition."""


class NonorthogonalityRequired(ToolError):
    """Pre- and post-selection projectors are orthogonal; no proof exists."""


class NotAParadox(ToolError):
    """Constraint-system construction requires a verified logical paradox."""


class NotAScenario(ToolError):
    """The requested input is a constraint-system fixture, not a scenario."""


class ParseError(ToolError):
    """A scenario document failed to parse or validate."""


class UnknownBuiltin(ToolError):
    """No builtin input is registered under the requested name."""
