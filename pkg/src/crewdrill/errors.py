"""Exception types shared across the engine."""

from __future__ import annotations


class CrewdrillError(Exception):
    """Base class for all package errors."""


class UnknownHumanoid(CrewdrillError):
    pass


class UnknownObject(CrewdrillError):
    pass


class UnknownAction(CrewdrillError):
    pass


class IllegalInteraction(CrewdrillError):
    """Actor, target or tool abilities do not permit the relation."""


class ActionNotEnabled(CrewdrillError):
    """The scenario marking does not currently offer this action."""


class RoleNotAllowed(CrewdrillError):
    """None of the performers' roles match the action's role list."""


class HandsUnavailable(CrewdrillError):
    """No implicit grasp/lay sequence can satisfy the action's hand states."""


class InvalidHandState(CrewdrillError):
    """A hand state is malformed (Indifferent as an actual state, empty hold)."""


class ClockRegression(CrewdrillError):
    """A tick older than the engine clock was submitted."""


class SafenessViolation(CrewdrillError):
    """A transition tried to place a second token on a marked step."""


class NoCandidate(CrewdrillError):
    """Repartition found nobody able to perform the action."""


class ConfigError(CrewdrillError):
    """Malformed agents or criteria configuration."""


class RoleTaken(CrewdrillError):
    """A second participant tried to claim an exclusive role."""


class ReplayDivergence(CrewdrillError):
    """An event log failed re-derivation at a given sequence number."""

    def __init__(self, seq: int, message: str):
        super().__init__(f"event {seq}: {message}")
        self.seq = seq
