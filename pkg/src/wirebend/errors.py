"""Exception hierarchy shared across the toolchain."""

from __future__ import annotations


class WirebendError(Exception):
    """Base class for every error raised by this package."""


class TargetUnreachable(WirebendError):
    """A requested bend angle exceeds what the machine can plastically achieve."""


class Unsimplifiable(WirebendError):
    """A path cannot be made fabrication-feasible while keeping two points."""


class ConstraintViolation(WirebendError):
    """Geometry violates machine constraints.

    ``violations`` is a list of dicts, each naming the offending part /
    vertex / segment so callers (CLI exit code 2, HTTP 409) can report
    structured detail.
    """

    def __init__(self, message: str, violations: list[dict] | None = None):
        super().__init__(message)
        self.violations = violations or []


class InfeasibleSpec(WirebendError):
    """Connector parameters force sub-threshold bends or feeds."""


class InfeasibleTrack(WirebendError):
    """Track geometry cannot be realized (offsets self-intersect etc.)."""


class EndpointOccupied(WirebendError):
    """A wire endpoint is already part of a splice."""


class SelfSplice(WirebendError):
    """Both splice ends sit on the same part but out of sleeve reach."""


class UnknownLabel(WirebendError):
    """A part label does not exist in the scene."""


class VersionError(WirebendError):
    """A persisted file carries an unsupported schema version."""
