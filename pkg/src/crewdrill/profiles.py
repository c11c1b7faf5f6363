"""Behaviour profiles for virtual humans.

A profile is a probability split over the four decision branches: follow
the procedure, commit a deliberate error, hinder another participant, or
stay idle.  Presets cover the usual teaching stances; exact figures for
them are package defaults, chosen for plausible behaviour rather than
taken from any measured data.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError

_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class PedagogicalProfile:
    """Probabilities of the four decision branches; they must sum to 1."""

    p_follow: float
    p_error: float
    p_hinder: float
    p_idle: float
    name: str = "custom"

    def __post_init__(self) -> None:
        for field in ("p_follow", "p_error", "p_hinder", "p_idle"):
            if getattr(self, field) < 0:
                raise ConfigError(f"profile {self.name}: {field} < 0")
        total = self.p_follow + self.p_error + self.p_hinder + self.p_idle
        if abs(total - 1.0) > _SUM_TOLERANCE:
            raise ConfigError(f"profile {self.name}: branch probabilities sum to {total}, not 1")

    def to_payload(self) -> dict:
        return {
            "name": self.name,
            "p_follow": self.p_follow,
            "p_error": self.p_error,
            "p_hinder": self.p_hinder,
            "p_idle": self.p_idle,
        }

    @staticmethod
    def from_payload(payload: dict) -> "PedagogicalProfile":
        return PedagogicalProfile(
            p_follow=float(payload["p_follow"]),
            p_error=float(payload["p_error"]),
            p_hinder=float(payload["p_hinder"]),
            p_idle=float(payload["p_idle"]),
            name=str(payload.get("name", "custom")),
        )


# A tutor never deviates: it demonstrates the procedure.
TUTOR = PedagogicalProfile(1.0, 0.0, 0.0, 0.0, name="tutor")

# A companion mostly cooperates but occasionally errs or pauses.
COMPANION = PedagogicalProfile(0.8, 0.1, 0.0, 0.1, name="companion")

# A troublemaker stresses the trainee with errors and hindrance.
TROUBLEMAKER = PedagogicalProfile(0.4, 0.2, 0.3, 0.1, name="troublemaker")

PRESETS = {p.name: p for p in (TUTOR, COMPANION, TROUBLEMAKER)}


def resolve_profile(spec: str | dict | PedagogicalProfile) -> PedagogicalProfile:
    """Accept a preset name, a payload dict or a ready profile."""
    if isinstance(spec, PedagogicalProfile):
        return spec
    if isinstance(spec, str):
        try:
            return PRESETS[spec]
        except KeyError:
            raise ConfigError(f"unknown profile preset: {spec!r}") from None
    return PedagogicalProfile.from_payload(spec)
