"""Graph generators and brute-force checks used by tests and the CLI.

Graphs are built by sweeping upward: each new vertex either opens a strand
(minimum), closes one (maximum), continues one (pass-through), splits one
(upward fork) or merges two (downward fork).  Every valid graph arises this
way from its height order, so exhaustive sweeps enumerate all of them.
"""
from __future__ import annotations

import random
from collections import deque
from fractions import Fraction
from itertools import combinations
from typing import Iterator

from .moves import all_sites, apply, candidate_moves, reparametrize, site_for
from .reeb import ReebGraph, VertexModel, canonical_key, sigma

MIN = VertexModel.MINIMUM
MAX = VertexModel.MAXIMUM
PASS = VertexModel.PASS_THROUGH
UP = VertexModel.FORK_UP
DOWN = VertexModel.FORK_DOWN


def _closable(open_count: int, remaining: int, allow_pass: bool = True) -> bool:
    # without pass-throughs every vertex moves the strand count by one
    if not allow_pass and (remaining - open_count) % 2:
        return False
    if open_count == 0:
        return remaining == 0 or remaining >= 2
    return remaining >= open_count


def _options(open_count: int, remaining: int, allow_pass: bool) -> list[VertexModel]:
    """Vertex types keeping the sweep closable in ``remaining`` more vertices
    (``remaining`` counts the vertex being placed)."""
    after = remaining - 1
    change = {MIN: 1, MAX: -1, PASS: 0, UP: 1, DOWN: -1}
    need = {MIN: 0, MAX: 1, PASS: 1, UP: 1, DOWN: 2}
    return [
        m for m in (MIN, MAX, PASS, UP, DOWN)
        if (allow_pass or m is not PASS)
        and open_count >= need[m]
        and _closable(open_count + change[m], after, allow_pass)
    ]


def _place(model, strands, v, pick):
    """Edges created by placing ``v`` of ``model``; updates ``strands``."""
    if model is MIN:
        strands.extend([v])
        return []
    if model is DOWN:
        i, j = pick
        a, b = strands[i], strands[j]
        for k in sorted((i, j), reverse=True):
            del strands[k]
        strands.append(v)
        return [(a, v), (b, v)]
    a = strands.pop(pick)
    if model is PASS:
        strands.append(v)
    elif model is UP:
        strands.extend([v, v])
    return [(a, v)]


def random_graph(rng: random.Random, max_vertices: int = 12, allow_pass: bool = True,
                 n_vertices: int | None = None) -> ReebGraph:
    """A random valid graph with between 2 and ``max_vertices`` vertices.

    Without pass-throughs the vertex count is even; an odd ``n_vertices``
    then raises ValueError.
    """
    if n_vertices is not None:
        n = n_vertices
    elif allow_pass:
        n = rng.randint(2, max(2, max_vertices))
    else:
        n = 2 * rng.randint(1, max(1, max_vertices // 2))
    if not allow_pass and n % 2:
        raise ValueError("a graph without pass-throughs has an even number of vertices")
    if n < 2:
        return ReebGraph({}, [])
    strands: list[int] = []
    edges = []
    for v in range(n):
        opts = _options(len(strands), n - v, allow_pass)
        model = rng.choice(opts)
        if model is DOWN:
            pick = tuple(sorted(rng.sample(range(len(strands)), 2)))
        elif model is MIN:
            pick = None
        else:
            pick = rng.randrange(len(strands))
        edges += _place(model, strands, v, pick)
    assert not strands
    ids = list(range(n))
    rng.shuffle(ids)
    heights, h = {}, Fraction(rng.randint(-4, 4))
    for v in range(n):
        h += Fraction(rng.randint(1, 8), rng.choice((1, 2, 4)))
        heights[ids[v]] = h
    return ReebGraph(heights, [(ids[a], ids[b]) for a, b in edges])


def all_graphs(max_vertices: int) -> dict[tuple, ReebGraph]:
    """One representative per homotopy class of graph with at most
    ``max_vertices`` vertices (the empty graph included), keyed by
    :func:`canonical_key`."""
    found: dict[tuple, ReebGraph] = {}

    def rec(strands, edges, v, limit):
        if v == limit:
            if not strands:
                g = ReebGraph({i: Fraction(i) for i in range(v)}, edges)
                found.setdefault(canonical_key(g), g)
            return
        for model in _options(len(strands), limit - v, True):
            if model is MIN:
                picks = [None]
            elif model is DOWN:
                picks = list(combinations(range(len(strands)), 2))
            else:
                picks = range(len(strands))
            seen = set()
            for pick in picks:
                key = _pick_key(strands, pick)
                if key in seen:
                    continue
                seen.add(key)
                s = list(strands)
                e = edges + _place(model, s, v, pick)
                rec(s, e, v + 1, limit)

    for limit in range(0, max_vertices + 1):
        rec([], [], 0, limit)
    return found


def _pick_key(strands, pick):
    if pick is None:
        return None
    if isinstance(pick, tuple):
        return tuple(sorted(strands[i] for i in pick))
    return strands[pick]


def neighbours(g: ReebGraph, max_vertices: int | None = None) -> Iterator[ReebGraph]:
    """Graphs one move away from ``g`` or from anything homotopic to it."""
    for kind, direction, anchor, order in candidate_moves(g):
        h = reparametrize(g, order)
        if h is None:
            continue
        out = apply(h, site_for(h, kind, direction, anchor))
        if max_vertices is None or len(out) <= max_vertices:
            yield out


def move_classes(max_vertices: int, slack: int = 0) -> tuple[dict[tuple, ReebGraph], dict[tuple, tuple]]:
    """Connected components of the move graph on small graphs.

    Nodes are the homotopy classes with at most ``max_vertices + slack``
    vertices; returns (representatives, component root for each key).
    """
    bound = max_vertices + slack
    reps = all_graphs(bound)
    parent = {k: k for k in reps}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for key, g in reps.items():
        for h in neighbours(g, bound):
            other = canonical_key(h)
            a, b = find(key), find(other)
            if a != b:
                parent[a] = b
    return reps, {k: find(k) for k in reps}


def completeness_report(max_vertices: int, slack: int = 0) -> dict:
    """Compare move-reachability classes with fibres of the invariant, on
    graphs with at most ``max_vertices`` vertices."""
    reps, root = move_classes(max_vertices, slack)
    small = {k: g for k, g in reps.items() if len(g) <= max_vertices}
    by_sigma: dict[tuple, set] = {}
    by_component: dict[tuple, set] = {}
    for k, g in small.items():
        by_sigma.setdefault(sigma(g).as_tuple(), set()).add(root[k])
        by_component.setdefault(root[k], set()).add(sigma(g).as_tuple())
    split = {s: len(c) for s, c in by_sigma.items() if len(c) > 1}
    mixed = [sorted(s) for s in by_component.values() if len(s) > 1]
    return {
        "max_vertices": max_vertices,
        "slack": slack,
        "graphs": len(small),
        "sigma_values": len(by_sigma),
        "components": len({root[k] for k in small}),
        "split_fibres": {f"{a},{b}": n for (a, b), n in sorted(split.items())},
        "mixed_components": mixed,
        "ok": not split and not mixed,
    }


def invariance_failures(g: ReebGraph) -> list[str]:
    """Sites of ``g`` whose move changes the invariant."""
    s = sigma(g)
    bad = []
    for site in all_sites(g):
        if sigma(apply(g, site)) != s:
            bad.append(f"{site.kind}/{site.direction} at {site.anchor}")
    return bad


def bfs_path(a: ReebGraph, b: ReebGraph, max_vertices: int, limit: int = 200000):
    """Shortest move sequence (as a list of graphs) from ``a`` to a graph
    homotopic to ``b`` through graphs of bounded size, or None."""
    goal = canonical_key(b)
    start = canonical_key(a)
    prev = {start: None}
    graphs = {start: a}
    queue = deque([start])
    while queue and len(prev) < limit:
        k = queue.popleft()
        if k == goal:
            path = []
            while k is not None:
                path.append(graphs[k])
                k = prev[k]
            return path[::-1]
        for h in neighbours(graphs[k], max_vertices):
            hk = canonical_key(h)
            if hk not in prev:
                prev[hk] = k
                graphs[hk] = h
                queue.append(hk)
    return None
