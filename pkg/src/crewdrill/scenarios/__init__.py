"""Bundled example scenarios and configs, addressable by name."""

from __future__ import annotations

from importlib import resources

BUNDLED_SCENARIOS = ("winch", "dark_screw")


def read_text(filename: str) -> str:
    return resources.files(__package__).joinpath(filename).read_text(encoding="utf-8")


def scenario_text(name: str) -> str:
    return read_text(f"{name}.lora.txt")


def agents_text(name: str) -> str:
    return read_text(f"{name}_agents.cfg")


def default_criteria_text() -> str:
    return read_text("criteria_default.cfg")
