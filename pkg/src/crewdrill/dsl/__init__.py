"""Line-oriented scenario language: parser, canonical serializer, validator."""

from .ast import (
    ANYONE,
    ActionKind,
    ActionSpec,
    RoleDecl,
    RoleSpec,
    ScenarioDoc,
    ScenarioGraph,
    Step,
    Transition,
)
from .parser import ScenarioParseError, parse
from .serializer import serialize
from .validator import Diagnostic, Severity, validate_static

__all__ = [
    "ANYONE",
    "ActionKind",
    "ActionSpec",
    "Diagnostic",
    "RoleDecl",
    "RoleSpec",
    "ScenarioDoc",
    "ScenarioGraph",
    "ScenarioParseError",
    "Severity",
    "Step",
    "Transition",
    "parse",
    "serialize",
    "validate_static",
]
