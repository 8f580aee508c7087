"""Exception hierarchy shared by all modules.

Every library error derives from :class:`HolonomyError` so the CLI can map
numeric failures to a single exit status and print the class name.
"""


class HolonomyError(Exception):
    """Base class for numeric failures raised by the library."""


class AntipodalVertices(HolonomyError):
    pass


class PoleError(HolonomyError):
    """A rational function was evaluated at (or numerically on) a pole."""


class DegreeCapExceeded(HolonomyError):
    pass


class PoleTooClose(HolonomyError):
    """A base path comes closer to a pole than the configured margin."""


class StepCollapse(HolonomyError):
    """The adaptive step size fell below the configured minimum."""


class LoopNotClosed(HolonomyError):
    pass


class ZeroAlpha0(HolonomyError):
    pass


class PoleOrderTooHigh(HolonomyError):
    pass


class DevelopingCritical(HolonomyError):
    pass


class DegenerateVertices(HolonomyError):
    pass


class InconsistentStart(HolonomyError):
    pass


class NoCandidateWord(HolonomyError):
    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"no admissible word at step {step}")


class NewtonDiverged(HolonomyError):
    pass


class TangencyNearby(HolonomyError):
    pass


class SeparationViolated(HolonomyError):
    pass


class NotNested(HolonomyError):
    pass


class DomainEscape(HolonomyError):
    pass


class DegreeOverflow(HolonomyError):
    pass


class CoverageGap(HolonomyError):
    pass


class ContractionFailure(HolonomyError):
    pass
