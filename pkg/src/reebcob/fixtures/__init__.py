"""Pinned surfaces with verified functions, plus their golden reports."""
from __future__ import annotations

import json
from importlib import resources

from ..surface import TriangulatedSurface, VertexFunction, load_off, load_values

NAMES = ("sphere", "wiggly_sphere", "torus", "rp2", "klein")


def _text(filename: str) -> str:
    return resources.files(__name__).joinpath(filename).read_text()


def load(name: str) -> tuple[TriangulatedSurface, VertexFunction]:
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(NAMES)}")
    s = load_off(_text(f"{name}.off"))
    return s, load_values(_text(f"{name}.values"), s.vertex_count)


def report(name: str) -> dict:
    return json.loads(_text(f"{name}.report.json"))


def path(filename: str):
    return resources.files(__name__).joinpath(filename)
