"""Sample networks shipped with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..core import Network, load_network

__all__ = ["fixture_names", "fixture_path", "load_fixture"]


def fixture_path(name: str) -> Path:
    """Path of the JSON file for fixture ``name`` (without extension)."""
    p = Path(str(resources.files(__package__) / f"{name}.json"))
    if not p.exists():
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(fixture_names())}")
    return p


def fixture_names() -> list[str]:
    return sorted(p.stem for p in Path(str(resources.files(__package__))).glob("*.json"))


def load_fixture(name: str) -> Network:
    return load_network(fixture_path(name))
