"""
Exception hierarchy for laplace_panels.

Library code raises these; the runner layer turns them into failed
result dicts so a worker thread never dies on a bad record.
"""


class GalerkinError(Exception):
    """Base class for every error raised by the library."""


class DegenerateTriangle(GalerkinError):
    pass


class NotParallel(GalerkinError):
    pass


class AmbiguousContact(GalerkinError):
    pass


class InvalidGapPattern(GalerkinError):
    """Gap tuple outside the admissible zero-patterns (an upstream bug, not a user error)."""


class InadmissibleCombination(GalerkinError):
    """No closed form exists for the requested (d, family, case) triple."""


class NonPositiveP(GalerkinError):
    pass


class DivergentEdgeIntegral(GalerkinError):
    """Overlapping collinear edges that are not a shared edge."""


class ToleranceNotReached(GalerkinError):
    pass


class ConfigError(GalerkinError):
    pass


class InputError(GalerkinError):
    """Malformed pair input. Carries the offending line and record id when known."""

    def __init__(self, message, line=None, record_id=None):
        super().__init__(message)
        self.line = line
        self.record_id = record_id

    def __str__(self):
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.record_id is not None:
            where.append(f"record {self.record_id!r}")
        base = super().__str__()
        return f"{base} ({', '.join(where)})" if where else base
