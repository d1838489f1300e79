"""Embedded benchmark corpus: classic polynomial-system test problems.

Each system ships as a ``.sys`` file in the package data together with a
manifest recording dimension, initial box, and the expected isolated-root
count where one is established (null where it is not).  Systems whose
defining equations could not be verified from a canonical source are
listed in the manifest under ``not_bundled`` instead of being guessed.
"""

from __future__ import annotations

import json
from importlib import resources

from ..poly import PolySystem, parse_system

__all__ = ["manifest", "names", "load", "source_text"]

_MANIFEST = None


def _pkg():
    return resources.files(__name__)


def manifest() -> dict:
    global _MANIFEST
    if _MANIFEST is None:
        _MANIFEST = json.loads(_pkg().joinpath("manifest.json").read_text())
    return _MANIFEST


def names() -> list[str]:
    return [entry["name"] for entry in manifest()["systems"]]


def entry(name: str) -> dict:
    for e in manifest()["systems"]:
        if e["name"] == name:
            return e
    raise KeyError(f"no corpus system named {name!r}")


def source_text(name: str) -> str:
    if name not in names():
        raise KeyError(f"no corpus system named {name!r}")
    return _pkg().joinpath(f"{name}.sys").read_text()


def load(name: str) -> PolySystem:
    return parse_system(source_text(name), name=name)
