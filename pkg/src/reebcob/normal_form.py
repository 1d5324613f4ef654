"""Canonical representatives and a normalizer that reaches them by moves."""
from __future__ import annotations

from fractions import Fraction

from .moves import BACKWARD, FORWARD, MoveTrace, Rewriter, enumerate_sites
from .reeb import (
    ReebGraph,
    VertexModel,
    isomorphism,
    require_valid,
    sigma,
)

MIN = VertexModel.MINIMUM
MAX = VertexModel.MAXIMUM
PASS = VertexModel.PASS_THROUGH
UP = VertexModel.FORK_UP
DOWN = VertexModel.FORK_DOWN


def canonical(n: int, d: int) -> ReebGraph:
    """The representative of class (n, d).

    For n > 0: a comb of n upward forks stacked on a spine from one minimum,
    each fork shedding a side branch to its own maximum, the spine ending in
    one more maximum.  d = 1 adds a pass-through on the bottom spine edge.
    n < 0 is the upside-down mirror.  (0, 0) is a single edge and (0, 1) a
    single edge with a pass-through.
    """
    if d not in (0, 1):
        raise ValueError("d must be 0 or 1")
    if n < 0:
        g = canonical(-n, d)
        top = max(g.heights.values())
        return ReebGraph({v: top - h for v, h in g.heights.items()}, g.edges)
    if n == 0:
        if d == 0:
            return ReebGraph({0: Fraction(0), 1: Fraction(1)}, [(0, 1)])
        return ReebGraph({0: Fraction(0), 1: Fraction(1), 2: Fraction(2)}, [(0, 1), (1, 2)])
    heights = {0: Fraction(0)}
    edges = []
    prev = nid = 0
    if d:
        heights[1] = Fraction(1, 2)
        edges.append((0, 1))
        prev = nid = 1
    forks = []
    for i in range(1, n + 1):
        nid += 1
        heights[nid] = Fraction(i)
        edges.append((prev, nid))
        forks.append(nid)
        prev = nid
    nid += 1
    heights[nid] = Fraction(n + 1)
    edges.append((prev, nid))
    for i, s in enumerate(forks, start=1):
        nid += 1
        heights[nid] = Fraction(n + 1 + i)
        edges.append((s, nid))
    return ReebGraph(heights, edges)


def _first(g: ReebGraph, model: VertexModel) -> list[int]:
    return sorted(v for v, m in g.models.items() if m is model)


def normalize(g: ReebGraph) -> tuple[ReebGraph, MoveTrace]:
    """Reduce ``g`` to ``canonical(*sigma(g))`` by moves and homotopies.

    The result is equal, vertex for vertex, to the end of the returned trace
    and is isomorphic to the canonical graph with identical heights.
    """
    require_valid(g)
    n, d = sigma(g).as_tuple()
    target = canonical(n, d)
    rw = Rewriter(g)
    if isomorphism(g, target) is None:
        _reduce(rw, keep=(n, d) == (0, 0))
        _assemble(rw, n, d)
    iso = {v: v for v in target.heights} if rw.g == target else isomorphism(rw.g, target)
    if iso is None:  # pragma: no cover - would mean the strategy is incomplete
        raise AssertionError("normalization did not reach the canonical graph")
    heights = {v: target.height(iso[v]) for v in rw.g.heights}
    if heights != dict(rw.g.heights):
        rw.homotopy(heights)
    trace = rw.trace()
    return trace.end, trace


def _reduce(rw: Rewriter, keep: bool) -> None:
    # Local cancellations first: they shrink the graph cheaply.
    while True:
        sites = enumerate_sites(rw.g, "i", BACKWARD) or enumerate_sites(rw.g, "c", BACKWARD)
        if not sites:
            break
        rw.apply(sites[0])

    # Cut every edge whose ends are both non-extremal; what is left is a
    # union of stars: arcs, forks with three extremal ends, pass-through paths.
    while True:
        g = rw.g
        inner = [
            (u, v) for u, v in sorted(set(g.directed_edges()))
            if g.model(u) is not MIN and g.model(v) is not MAX
        ]
        if not inner:
            break
        rw.move("b", FORWARD, inner[0])

    _drop_spheres(rw, keep)

    # A split star and a merge star cancel: join them into an N, turn it
    # into an X, pull the X apart into two arcs, delete the arcs.
    ups, downs = _first(rw.g, UP), _first(rw.g, DOWN)
    while ups and downs:
        s, j = ups.pop(0), downs.pop(0)
        rw.move("b", BACKWARD, (rw.g.up(s)[0], rw.g.down(j)[0]))
        rw.move("g", BACKWARD, (s, j))
        rw.apply(_site_at(rw.g, "d", BACKWARD, s))
        _drop_spheres(rw, keep)

    # Two pass-through paths cancel: stack them, delete both vertices.
    passes = _first(rw.g, PASS)
    while len(passes) >= 2:
        p, q = passes.pop(0), passes.pop(0)
        rw.move("b", BACKWARD, (rw.g.up(p)[0], rw.g.down(q)[0]))
        rw.move("i", BACKWARD, (p, q))
        _drop_spheres(rw, keep)


def _site_at(g: ReebGraph, kind: str, direction: str, root: int):
    return next(s for s in enumerate_sites(g, kind, direction) if s.anchor[0] == root)


def _drop_spheres(rw: Rewriter, keep: bool) -> None:
    """Delete isolated edges; with ``keep``, spare one to end up as the
    single-edge representative."""
    sites = enumerate_sites(rw.g, "a", BACKWARD)
    for site in sites[1:] if keep else sites:
        rw.apply(site)


def _assemble(rw: Rewriter, n: int, d: int) -> None:
    if n == 0:
        if d == 0 and not len(rw.g):
            rw.move("a", FORWARD, ())
        return
    model = UP if n > 0 else DOWN
    forks = _first(rw.g, model)
    passes = _first(rw.g, PASS)
    g = rw.g
    if n > 0:
        top = max(g.up(forks[0]))
        for s in forks[1:]:
            rw.move("b", BACKWARD, (top, rw.g.down(s)[0]))
            top = max(rw.g.up(s))
        if passes:
            rw.move("b", BACKWARD, (rw.g.up(passes[0])[0], rw.g.down(forks[0])[0]))
    else:
        bottom = max(g.down(forks[0]))
        for j in forks[1:]:
            rw.move("b", BACKWARD, (rw.g.up(j)[0], bottom))
            bottom = max(rw.g.down(j))
        if passes:
            rw.move("b", BACKWARD, (rw.g.up(forks[0])[0], rw.g.down(passes[0])[0]))
