"""Exception types shared across the package.

Everything raised on purpose derives from TelbError so callers (and the CLI)
can catch one base class and still tell failure modes apart.
"""


class TelbError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(TelbError):
    """A precondition on user-supplied parameters is violated."""


class DomainError(TelbError):
    """A coordinate lies outside the periodic domain of a grid."""


class ParseError(TelbError):
    """A config document failed to parse.

    Carries the 1-based line number (and column when known) plus a remedy
    hint, so the CLI can point at the offending line.
    """

    def __init__(self, message, line=None, column=None, hint=None):
        self.line = line
        self.column = column
        self.hint = hint
        loc = ""
        if line is not None:
            loc = f"line {line}" + (f", col {column}" if column is not None else "")
            loc = f" ({loc})"
        full = f"{message}{loc}"
        if hint:
            full += f" -- {hint}"
        super().__init__(full)


class IntegrationError(TelbError):
    """Time integration produced a non-finite state or derivative."""

    def __init__(self, message, stage=None, step=None, time=None):
        self.stage = stage
        self.step = step
        self.time = time
        detail = []
        if step is not None:
            detail.append(f"step {step}")
        if stage is not None:
            detail.append(f"stage {stage}")
        if time is not None:
            detail.append(f"t={time:.6g}")
        if detail:
            message = f"{message} ({', '.join(detail)})"
        super().__init__(message)


class NodeError(TelbError):
    """The configuration sits too close to a node of the guiding field."""

    def __init__(self, message, config=None, time=None):
        self.config = config
        self.time = time
        super().__init__(message)


class TuningError(TelbError):
    """Coupling bisection could not bracket or reach the target."""


class BlowUpError(TelbError):
    """A truncated-hierarchy field exceeded the divergence threshold.

    Carries a small report (time, field label, norm ratio) so harnesses can
    record the blow-up instead of dying.
    """

    def __init__(self, message, report=None):
        self.report = report or {}
        super().__init__(message)


class DegenerateStateError(TelbError):
    """A wave-function construction produced (numerically) the zero vector."""
