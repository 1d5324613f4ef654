"""The cobordism group Z + Z/2 through its complete invariant."""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import fixtures
from .moves import MoveTrace
from .normal_form import canonical, normalize
from .reeb import ReebGraph, is_isomorphic, sigma
from .surface import (
    TriangulatedSurface,
    VertexFunction,
    concat_functions,
    disjoint_union,
    extract_reeb,
)


@dataclass(frozen=True, order=True)
class CobordismClass:
    t: int
    d: int

    def __post_init__(self):
        object.__setattr__(self, "d", self.d % 2)

    def __add__(self, other: CobordismClass) -> CobordismClass:
        return CobordismClass(self.t + other.t, self.d + other.d)

    def __neg__(self) -> CobordismClass:
        return CobordismClass(-self.t, self.d)

    def __sub__(self, other: CobordismClass) -> CobordismClass:
        return self + (-other)

    def order(self) -> int | float:
        """1 for the identity, 2 for the torsion element, ``math.inf`` otherwise."""
        if self.t:
            return math.inf
        return 2 if self.d else 1

    def to_json(self) -> dict:
        return {"t": self.t, "d": self.d}

    @classmethod
    def from_json(cls, doc: dict) -> CobordismClass:
        t, d = doc["t"], doc["d"]
        if not isinstance(t, int) or d not in (0, 1):
            raise ValueError("class must be {\"t\": integer, \"d\": 0 or 1}")
        return cls(t, d)


ZERO = CobordismClass(0, 0)


def group_add(a: CobordismClass, b: CobordismClass) -> CobordismClass:
    return a + b


def group_neg(a: CobordismClass) -> CobordismClass:
    return -a


def order(a: CobordismClass) -> int | float:
    return a.order()


def class_of_graph(g: ReebGraph) -> CobordismClass:
    return CobordismClass(*sigma(g).as_tuple())


def class_of_morse(s: TriangulatedSurface, f: VertexFunction) -> CobordismClass:
    return class_of_graph(extract_reeb(s, f).graph)


@dataclass
class Certificate:
    """Traces taking both graphs to one canonical graph."""

    first: MoveTrace
    second: MoveTrace
    canonical: ReebGraph

    def check(self) -> bool:
        a, b = self.first.replay(), self.second.replay()
        return is_isomorphic(a, b) and is_isomorphic(a, self.canonical)


def are_cobordant(g1: ReebGraph, g2: ReebGraph) -> tuple[bool, Certificate | None]:
    if sigma(g1) != sigma(g2):
        return False, None
    c1, t1 = normalize(g1)
    _, t2 = normalize(g2)
    return True, Certificate(t1, t2, c1)


def realize(c: CobordismClass) -> ReebGraph:
    return canonical(c.t, c.d)


def realize_surface(c: CobordismClass) -> tuple[TriangulatedSurface, VertexFunction]:
    """|t| wiggly spheres (function negated when t < 0) and d projective
    planes; a plain sphere stands in for the empty union."""
    parts: list[tuple[TriangulatedSurface, VertexFunction]] = []
    wiggly, wf = fixtures.load("wiggly_sphere")
    for _ in range(abs(c.t)):
        parts.append((wiggly, wf if c.t > 0 else -wf))
    if c.d:
        parts.append(fixtures.load("rp2"))
    if not parts:
        parts.append(fixtures.load("sphere"))
    surface = disjoint_union(*(s for s, _ in parts))
    return surface, concat_functions(*(f for _, f in parts))
