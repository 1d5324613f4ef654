"""The eleven local moves on abstract Reeb functions.

Each move is a fixed local rewrite, applicable in both directions:

    a  create / delete an isolated edge (a sphere component)
    b  cut an edge into a maximum below a minimum / join them back
    c  open a bubble (an upward fork feeding a downward fork twice) on an edge
    d  merge two edges into an X (downward fork, then upward fork)
    e  re-associate two stacked upward forks
    f  re-associate two stacked downward forks
    g  trade an X for an N (split-then-merge) and back
    h  trade a bubble for two stacked pass-through vertices
    i  create / delete two stacked pass-through vertices on an edge
    j  move a pass-through vertex across an upward fork
    k  move a pass-through vertex across a downward fork

Moves a-g are the ones available on orientable surfaces; h-k involve the
degree-two vertices that only nonorientable surfaces produce.

A site names the matched vertices in ``anchor``; which vertices, and in what
order, is fixed per (kind, direction) below.  Height-order requirements that
are not already implied by the matched edges are checked against the current
heights.  :func:`reparametrize` finds a homotopic height function meeting
them when the current one does not.
"""
from __future__ import annotations

import heapq
import json
from bisect import bisect_left, bisect_right
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence, Union

from .reeb import (
    ReebGraph,
    VertexModel,
    format_height,
    from_document,
    require_valid,
    to_document,
    to_height,
)

FORWARD = "forward"
BACKWARD = "backward"
DIRECTIONS = (FORWARD, BACKWARD)
KINDS = tuple("abcdefghijk")

MIN = VertexModel.MINIMUM
MAX = VertexModel.MAXIMUM
PASS = VertexModel.PASS_THROUGH
UP = VertexModel.FORK_UP
DOWN = VertexModel.FORK_DOWN


class MoveError(ValueError):
    pass


class StaleSiteError(MoveError):
    """The site's pattern is not present in the graph it was applied to."""


class TraceError(MoveError):
    pass


@dataclass(frozen=True)
class MoveSite:
    kind: str
    direction: str
    anchor: tuple[int, ...]
    fresh_heights: tuple[Fraction, ...] = ()
    new_ids: tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "direction": self.direction,
            "anchor": list(self.anchor),
            "fresh_heights": [format_height(h) for h in self.fresh_heights],
            "new_ids": list(self.new_ids),
        }

    @classmethod
    def from_json(cls, doc: dict) -> MoveSite:
        return cls(
            doc["kind"],
            doc["direction"],
            tuple(int(x) for x in doc["anchor"]),
            tuple(to_height(h) for h in doc.get("fresh_heights", ())),
            tuple(int(x) for x in doc.get("new_ids", ())),
        )


@dataclass(frozen=True)
class Homotopy:
    """A new height for every vertex, keeping every edge's direction."""

    heights: tuple[tuple[int, Fraction], ...]

    def to_json(self) -> dict:
        return {"kind": "homotopy", "heights": [[v, format_height(h)] for v, h in self.heights]}

    @classmethod
    def from_json(cls, doc: dict) -> Homotopy:
        return cls(tuple((int(v), to_height(h)) for v, h in doc["heights"]))


Step = Union[MoveSite, Homotopy]


# ---------------------------------------------------------------- edits

@dataclass
class _Edit:
    drop_vertices: list[int] = field(default_factory=list)
    drop_edges: list[tuple[int, int]] = field(default_factory=list)
    add_vertices: dict[int, Fraction] = field(default_factory=dict)
    add_edges: list[tuple[int, int]] = field(default_factory=list)
    moved: dict[int, Fraction] = field(default_factory=dict)


def _build(g: ReebGraph, edit: _Edit, new_ids: Sequence[int]) -> ReebGraph:
    heights = dict(g.heights)
    for v in edit.drop_vertices:
        del heights[v]
    heights.update(edit.add_vertices)
    heights.update(edit.moved)
    edges = Counter(g.edges)
    for a, b in edit.drop_edges:
        key = (a, b) if a <= b else (b, a)
        if edges[key] <= 0:
            raise AssertionError(f"rewrite removes absent edge {key}")
        edges[key] -= 1
    for a, b in edit.add_edges:
        edges[(a, b) if a <= b else (b, a)] += 1
    next_id = max([g.next_id] + [i + 1 for i in new_ids])
    return ReebGraph(heights, edges.elements(), next_id)


def _unique(seq: Sequence[int]) -> list[int]:
    return sorted(set(seq))


def _other(seq: Sequence[int], x: int) -> int:
    rest = list(seq)
    rest.remove(x)
    return rest[0]


# ---------------------------------------------------------------- rules
#
# match(g, root) yields (anchor, order, fresh) where ``order`` lists (x, y)
# pairs that must satisfy height(x) < height(y), and ``fresh`` is None or
# (lows, highs, count): ``count`` new heights strictly between the highest of
# ``lows`` and the lowest of ``highs``.

class _Rule:
    kind = ""
    direction = ""
    creates = 0
    root_models: tuple[VertexModel, ...] | None = None

    def roots(self, g: ReebGraph) -> list[int]:
        if self.root_models is None:
            return g.vertices
        models = g.models
        return [v for v in g.heights if models[v] in self.root_models]

    def match(self, g, root):  # pragma: no cover - interface
        raise NotImplementedError

    def rewrite(self, g, anchor, fresh, ids) -> _Edit:  # pragma: no cover
        raise NotImplementedError

    def inverse(self, g, site, after) -> MoveSite:  # pragma: no cover
        raise NotImplementedError


class _SphereCreate(_Rule):
    kind, direction, creates = "a", FORWARD, 2

    def roots(self, g):
        return [None]

    def match(self, g, root):
        yield (), [], ((), (), 2)

    def rewrite(self, g, anchor, fresh, ids):
        m, top = ids
        return _Edit(add_vertices={m: fresh[0], top: fresh[1]}, add_edges=[(m, top)])

    def inverse(self, g, site, after):
        return MoveSite("a", BACKWARD, site.new_ids)


class _SphereDelete(_Rule):
    kind, direction = "a", BACKWARD
    root_models = (MIN,)

    def match(self, g, m):
        top = g.up(m)[0]
        if g.model(top) is MAX:
            yield (m, top), [], None

    def rewrite(self, g, anchor, fresh, ids):
        m, top = anchor
        return _Edit(drop_vertices=[m, top], drop_edges=[(m, top)])

    def inverse(self, g, site, after):
        m, top = site.anchor
        return MoveSite("a", FORWARD, (), (g.height(m), g.height(top)))


class _EdgeInsertion(_Rule):
    """Shared matcher for rules that replace one edge (u, v) by new vertices."""

    creates = 2

    def match(self, g, u):
        for v in _unique(g.up(u)):
            yield (u, v), [], ((u,), (v,), 2)


class _Cut(_EdgeInsertion):
    kind, direction = "b", FORWARD

    def rewrite(self, g, anchor, fresh, ids):
        u, v = anchor
        top, bottom = ids
        return _Edit(
            drop_edges=[(u, v)],
            add_vertices={top: fresh[0], bottom: fresh[1]},
            add_edges=[(u, top), (bottom, v)],
        )

    def inverse(self, g, site, after):
        return MoveSite("b", BACKWARD, site.new_ids)


class _Join(_Rule):
    kind, direction = "b", BACKWARD
    root_models = (MAX,)

    def match(self, g, top):
        u = g.down(top)[0]
        for m in sorted(v for v, mod in g.models.items() if mod is MIN):
            if m != u:
                yield (top, m), [(top, m)], None

    def rewrite(self, g, anchor, fresh, ids):
        top, m = anchor
        u, v = g.down(top)[0], g.up(m)[0]
        return _Edit(
            drop_vertices=[top, m],
            drop_edges=[(u, top), (m, v)],
            add_edges=[(u, v)],
        )

    def inverse(self, g, site, after):
        top, m = site.anchor
        u, v = g.down(top)[0], g.up(m)[0]
        return MoveSite("b", FORWARD, (u, v), (g.height(top), g.height(m)))


class _BubbleOpen(_EdgeInsertion):
    kind, direction = "c", FORWARD

    def rewrite(self, g, anchor, fresh, ids):
        u, v = anchor
        s, j = ids
        return _Edit(
            drop_edges=[(u, v)],
            add_vertices={s: fresh[0], j: fresh[1]},
            add_edges=[(u, s), (s, j), (s, j), (j, v)],
        )

    def inverse(self, g, site, after):
        return MoveSite("c", BACKWARD, site.new_ids)


def _bubbles(g: ReebGraph, s: int) -> Iterator[tuple[int, int]]:
    ups = g.up(s)
    if ups[0] == ups[1] and g.model(ups[0]) is DOWN:
        yield s, ups[0]


class _BubbleClose(_Rule):
    kind, direction = "c", BACKWARD
    root_models = (UP,)

    def match(self, g, s):
        for anchor in _bubbles(g, s):
            yield anchor, [], None

    def rewrite(self, g, anchor, fresh, ids):
        s, j = anchor
        u, v = g.down(s)[0], g.up(j)[0]
        return _Edit(
            drop_vertices=[s, j],
            drop_edges=[(u, s), (s, j), (s, j), (j, v)],
            add_edges=[(u, v)],
        )

    def inverse(self, g, site, after):
        s, j = site.anchor
        u, v = g.down(s)[0], g.up(j)[0]
        return MoveSite("c", FORWARD, (u, v), (g.height(s), g.height(j)))


class _Cross(_Rule):
    """Two edges (a1, b1) <= (a2, b2) become a1, a2 -> w -> x -> b1, b2."""

    kind, direction, creates = "d", FORWARD, 2

    def match(self, g, a1):
        edges = sorted(set(g.directed_edges()))
        for b1 in _unique(g.up(a1)):
            start = bisect_left(edges, (a1, b1))
            for a2, b2 in edges[start:]:
                if (a2, b2) == (a1, b1) and g.multiplicity(a1, b1) < 2:
                    continue
                yield (a1, b1, a2, b2), [(a1, b2), (a2, b1)], ((a1, a2), (b1, b2), 2)

    def rewrite(self, g, anchor, fresh, ids):
        a1, b1, a2, b2 = anchor
        w, x = ids
        return _Edit(
            drop_edges=[(a1, b1), (a2, b2)],
            add_vertices={w: fresh[0], x: fresh[1]},
            add_edges=[(a1, w), (a2, w), (w, x), (x, b1), (x, b2)],
        )

    def inverse(self, g, site, after):
        a1, b1, a2, b2 = site.anchor
        w, x = site.new_ids
        if a1 < a2:
            partner = b1
        elif a2 < a1:
            partner = b2
        else:
            partner = min(b1, b2)
        return MoveSite("d", BACKWARD, (w, x, partner))


class _Uncross(_Rule):
    """An X splits back into two edges; ``anchor[2]`` is the upper end joined
    to the lower neighbour of ``w`` with the smaller id."""

    kind, direction = "d", BACKWARD
    root_models = (DOWN,)

    def match(self, g, w):
        x = g.up(w)[0]
        if g.model(x) is not UP:
            return
        lows = g.down(w)
        targets = _unique(g.up(x))
        if lows[0] == lows[1]:
            targets = targets[:1]
        for b in targets:
            yield (w, x, b), [], None

    def rewrite(self, g, anchor, fresh, ids):
        w, x, b = anchor
        a1, a2 = g.down(w)
        b_other = _other(g.up(x), b)
        return _Edit(
            drop_vertices=[w, x],
            drop_edges=[(a1, w), (a2, w), (w, x), (x, b), (x, b_other)],
            add_edges=[(a1, b), (a2, b_other)],
        )

    def inverse(self, g, site, after):
        w, x, b = site.anchor
        a1, a2 = g.down(w)
        pair = sorted([(a1, b), (a2, _other(g.up(x), b))])
        return MoveSite("d", FORWARD, pair[0] + pair[1], (g.height(w), g.height(x)))


class _AssocUp(_Rule):
    """Upward fork v feeding upward fork w: swap v's other branch c with one
    branch b of w.  Its own inverse, so both directions match the same sites."""

    kind = "e"
    root_models = (UP,)

    def __init__(self, direction):
        self.direction = direction

    def match(self, g, v):
        ups = g.up(v)
        for w in _unique(ups):
            if g.model(w) is not UP:
                continue
            c = _other(ups, w)
            for b in _unique(g.up(w)):
                if b != c:
                    yield (v, w, c, b), [(w, c)], None

    def rewrite(self, g, anchor, fresh, ids):
        v, w, c, b = anchor
        return _Edit(drop_edges=[(v, c), (w, b)], add_edges=[(v, b), (w, c)])

    def inverse(self, g, site, after):
        v, w, c, b = site.anchor
        return MoveSite("e", site.direction, (v, w, b, c))


class _AssocDown(_Rule):
    """Mirror of :class:`_AssocUp`: downward fork x feeding downward fork y."""

    kind = "f"
    root_models = (DOWN,)

    def __init__(self, direction):
        self.direction = direction

    def match(self, g, y):
        downs = g.down(y)
        for x in _unique(downs):
            if g.model(x) is not DOWN:
                continue
            c = _other(downs, x)
            for a in _unique(g.down(x)):
                if a != c:
                    yield (y, x, c, a), [(c, x)], None

    def rewrite(self, g, anchor, fresh, ids):
        y, x, c, a = anchor
        return _Edit(drop_edges=[(c, y), (a, x)], add_edges=[(a, y), (c, x)])

    def inverse(self, g, site, after):
        y, x, c, a = site.anchor
        return MoveSite("f", site.direction, (y, x, a, c))


class _XtoN(_Rule):
    """X (w merges a, a'; x splits to b, b') becomes N: a splits at w into b
    and x; x merges w with a' and continues to b'.  Heights are kept."""

    kind, direction = "g", FORWARD
    root_models = (DOWN,)

    def match(self, g, w):
        x = g.up(w)[0]
        if g.model(x) is not UP:
            return
        for a in _unique(g.down(w)):
            for b in _unique(g.up(x)):
                yield (w, x, a, b), [], None

    def rewrite(self, g, anchor, fresh, ids):
        w, x, a, b = anchor
        a_other = _other(g.down(w), a)
        return _Edit(drop_edges=[(a_other, w), (x, b)], add_edges=[(w, b), (a_other, x)])

    def inverse(self, g, site, after):
        w, x = site.anchor[:2]
        return MoveSite("g", BACKWARD, (w, x))


class _NtoX(_Rule):
    kind, direction = "g", BACKWARD
    root_models = (UP,)

    def match(self, g, s):
        ups = g.up(s)
        for j in _unique(ups):
            if g.model(j) is DOWN and g.multiplicity(s, j) == 1:
                b = _other(ups, j)
                a_other = _other(g.down(j), s)
                yield (s, j), [(a_other, s), (j, b)], None

    def rewrite(self, g, anchor, fresh, ids):
        s, j = anchor
        b = _other(g.up(s), j)
        a_other = _other(g.down(j), s)
        return _Edit(drop_edges=[(s, b), (a_other, j)], add_edges=[(a_other, s), (j, b)])

    def inverse(self, g, site, after):
        s, j = site.anchor
        return MoveSite("g", FORWARD, (s, j, g.down(s)[0], _other(g.up(s), j)))


class _BubbleToPasses(_Rule):
    kind, direction = "h", FORWARD
    root_models = (UP,)

    def match(self, g, s):
        for anchor in _bubbles(g, s):
            yield anchor, [], None

    def rewrite(self, g, anchor, fresh, ids):
        return _Edit(drop_edges=[anchor])

    def inverse(self, g, site, after):
        return MoveSite("h", BACKWARD, site.anchor)


def _pass_pairs(g: ReebGraph, p: int) -> Iterator[tuple[int, int]]:
    q = g.up(p)[0]
    if g.model(q) is PASS:
        yield p, q


class _PassesToBubble(_Rule):
    kind, direction = "h", BACKWARD
    root_models = (PASS,)

    def match(self, g, p):
        for anchor in _pass_pairs(g, p):
            yield anchor, [], None

    def rewrite(self, g, anchor, fresh, ids):
        return _Edit(add_edges=[anchor])

    def inverse(self, g, site, after):
        return MoveSite("h", FORWARD, site.anchor)


class _PassesCreate(_EdgeInsertion):
    kind, direction = "i", FORWARD

    def rewrite(self, g, anchor, fresh, ids):
        u, v = anchor
        p, q = ids
        return _Edit(
            drop_edges=[(u, v)],
            add_vertices={p: fresh[0], q: fresh[1]},
            add_edges=[(u, p), (p, q), (q, v)],
        )

    def inverse(self, g, site, after):
        return MoveSite("i", BACKWARD, site.new_ids)


class _PassesDelete(_Rule):
    kind, direction = "i", BACKWARD
    root_models = (PASS,)

    def match(self, g, p):
        for anchor in _pass_pairs(g, p):
            yield anchor, [], None

    def rewrite(self, g, anchor, fresh, ids):
        p, q = anchor
        u, v = g.down(p)[0], g.up(q)[0]
        return _Edit(
            drop_vertices=[p, q],
            drop_edges=[(u, p), (p, q), (q, v)],
            add_edges=[(u, v)],
        )

    def inverse(self, g, site, after):
        p, q = site.anchor
        u, v = g.down(p)[0], g.up(q)[0]
        return MoveSite("i", FORWARD, (u, v), (g.height(p), g.height(q)))


def _relocate(p, old_lo, old_hi, new_lo, new_hi, h) -> _Edit:
    """Lift pass-through ``p`` off (old_lo, old_hi) onto edge (new_lo, new_hi)."""
    return _Edit(
        drop_edges=[(old_lo, p), (p, old_hi), (new_lo, new_hi)],
        add_edges=[(old_lo, old_hi), (new_lo, p), (p, new_hi)],
        moved={p: h},
    )


class _PassUpThroughSplit(_Rule):
    """Pass-through p just below upward fork v moves onto the branch (v, b)."""

    kind, direction = "j", FORWARD
    root_models = (PASS,)

    def match(self, g, p):
        v = g.up(p)[0]
        if g.model(v) is UP:
            for b in _unique(g.up(v)):
                yield (p, v, b), [], ((v,), (b,), 1)

    def rewrite(self, g, anchor, fresh, ids):
        p, v, b = anchor
        return _relocate(p, g.down(p)[0], v, v, b, fresh[0])

    def inverse(self, g, site, after):
        p, v = site.anchor[:2]
        return MoveSite("j", BACKWARD, (p, v), (g.height(p),))


class _PassDownThroughSplit(_Rule):
    """Pass-through p just above upward fork v moves below it."""

    kind, direction = "j", BACKWARD
    root_models = (PASS,)

    def match(self, g, p):
        v = g.down(p)[0]
        if g.model(v) is UP:
            yield (p, v), [], ((g.down(v)[0],), (v,), 1)

    def rewrite(self, g, anchor, fresh, ids):
        p, v = anchor
        return _relocate(p, v, g.up(p)[0], g.down(v)[0], v, fresh[0])

    def inverse(self, g, site, after):
        p, v = site.anchor
        return MoveSite("j", FORWARD, (p, v, g.up(p)[0]), (g.height(p),))


class _PassUpThroughMerge(_Rule):
    """Pass-through p on a lower branch of downward fork w moves above it."""

    kind, direction = "k", FORWARD
    root_models = (PASS,)

    def match(self, g, p):
        w = g.up(p)[0]
        if g.model(w) is DOWN:
            yield (p, w), [], ((w,), (g.up(w)[0],), 1)

    def rewrite(self, g, anchor, fresh, ids):
        p, w = anchor
        return _relocate(p, g.down(p)[0], w, w, g.up(w)[0], fresh[0])

    def inverse(self, g, site, after):
        p, w = site.anchor
        return MoveSite("k", BACKWARD, (p, w, g.down(p)[0]), (g.height(p),))


class _PassDownThroughMerge(_Rule):
    """Pass-through p just above downward fork w moves onto branch (a, w)."""

    kind, direction = "k", BACKWARD
    root_models = (PASS,)

    def match(self, g, p):
        w = g.down(p)[0]
        if g.model(w) is DOWN:
            for a in _unique(g.down(w)):
                yield (p, w, a), [], ((a,), (w,), 1)

    def rewrite(self, g, anchor, fresh, ids):
        p, w, a = anchor
        return _relocate(p, w, g.up(p)[0], a, w, fresh[0])

    def inverse(self, g, site, after):
        p, w = site.anchor[:2]
        return MoveSite("k", FORWARD, (p, w), (g.height(p),))


RULES: dict[tuple[str, str], _Rule] = {
    (r.kind, r.direction): r
    for r in [
        _SphereCreate(), _SphereDelete(),
        _Cut(), _Join(),
        _BubbleOpen(), _BubbleClose(),
        _Cross(), _Uncross(),
        _AssocUp(FORWARD), _AssocUp(BACKWARD),
        _AssocDown(FORWARD), _AssocDown(BACKWARD),
        _XtoN(), _NtoX(),
        _BubbleToPasses(), _PassesToBubble(),
        _PassesCreate(), _PassesDelete(),
        _PassUpThroughSplit(), _PassDownThroughSplit(),
        _PassUpThroughMerge(), _PassDownThroughMerge(),
    ]
}


def _rule(kind: str, direction: str) -> _Rule:
    try:
        return RULES[(kind, direction)]
    except KeyError:
        raise MoveError(f"unknown move {kind!r} / {direction!r}") from None


# ---------------------------------------------------------------- heights

def _interval(g: ReebGraph, lows, highs) -> tuple[Fraction | None, Fraction | None]:
    lo = max((g.height(x) for x in lows), default=None)
    hi = min((g.height(x) for x in highs), default=None)
    return lo, hi


def _sorted_heights(g: ReebGraph) -> list[Fraction]:
    cache = g.__dict__.get("_sorted_heights")
    if cache is None:
        cache = sorted(g.heights.values())
        g.__dict__["_sorted_heights"] = cache
    return cache


def fresh_heights(g: ReebGraph, lows, highs, count: int) -> tuple[Fraction, ...]:
    """``count`` increasing heights in the tightest gap at the bottom of the
    interval between ``lows`` and ``highs``, avoiding every existing height."""
    hs = _sorted_heights(g)
    lo, hi = _interval(g, lows, highs)
    if lo is None and hi is None:
        base = hs[-1] + 1 if hs else Fraction(0)
        return tuple(base + i for i in range(count))
    if lo is None:
        i = bisect_left(hs, hi)
        lo = hs[i - 1] if i > 0 else hi - 1
    else:
        i = bisect_right(hs, lo)
        above = hs[i] if i < len(hs) else lo + 1
        hi = above if hi is None else min(hi, above)
    if not lo < hi:
        raise MoveError("empty height interval for new vertices")
    parts = 2
    while parts < count + 1:
        parts *= 2
    step = (hi - lo) / parts
    return tuple(lo + step * k for k in range(1, count + 1))


def _order_holds(g: ReebGraph, order) -> bool:
    rank = g.rank
    return all(rank[x] < rank[y] for x, y in order)


def reparametrize(g: ReebGraph, order) -> ReebGraph | None:
    """A homotopic height function on ``g`` with height(x) < height(y) for
    every (x, y) in ``order``; None when no such function exists.

    Returns ``g`` itself when the current heights already comply.  Otherwise
    vertices are ranked by a topological sort that prefers the current
    order, and the ranks become the new heights.
    """
    if _order_holds(g, order):
        return g
    succ: dict[int, list[int]] = {v: [] for v in g.heights}
    indeg = {v: 0 for v in g.heights}
    for x, y in list(g.directed_edges()) + list(order):
        succ[x].append(y)
        indeg[y] += 1
    heap = [(g.height(v), v) for v, k in indeg.items() if k == 0]
    heapq.heapify(heap)
    ranked = []
    while heap:
        _, v = heapq.heappop(heap)
        ranked.append(v)
        for y in succ[v]:
            indeg[y] -= 1
            if indeg[y] == 0:
                heapq.heappush(heap, (g.height(y), y))
    if len(ranked) != len(g):
        return None
    return g.with_heights({v: Fraction(i) for i, v in enumerate(ranked)})


def apply_homotopy(g: ReebGraph, step: Homotopy) -> ReebGraph:
    new = dict(step.heights)
    if set(new) != set(g.heights):
        raise MoveError("homotopy must assign a height to exactly the existing vertices")
    if len(set(new.values())) != len(new):
        raise MoveError("homotopy produces coinciding heights")
    for a, b in g.edges:
        if (g.height(a) < g.height(b)) != (new[a] < new[b]):
            raise MoveError(f"homotopy flips the direction of edge {{{a}, {b}}}")
    return g.with_heights(new)


def homotopy_to(target: ReebGraph) -> Homotopy:
    return Homotopy(tuple(target.heights.items()))


# ---------------------------------------------------------------- sites

def _site(g: ReebGraph, rule: _Rule, anchor, fresh_req) -> MoveSite:
    fh = fresh_heights(g, *fresh_req) if fresh_req else ()
    ids = tuple(range(g.next_id, g.next_id + rule.creates))
    return MoveSite(rule.kind, rule.direction, tuple(anchor), fh, ids)


def enumerate_sites(g: ReebGraph, kind: str, direction: str = FORWARD) -> list[MoveSite]:
    """Every site of one move in ``g`` at its current heights, sorted by anchor."""
    rule = _rule(kind, direction)
    out = []
    for root in rule.roots(g):
        for anchor, order, fresh in rule.match(g, root):
            if _order_holds(g, order) and _fresh_possible(g, fresh):
                out.append(_site(g, rule, anchor, fresh))
    out.sort(key=lambda s: s.anchor)
    return out


def all_sites(g: ReebGraph) -> Iterator[MoveSite]:
    for kind in KINDS:
        for direction in DIRECTIONS:
            yield from enumerate_sites(g, kind, direction)


def _fresh_possible(g, fresh) -> bool:
    if not fresh:
        return True
    lo, hi = _interval(g, fresh[0], fresh[1])
    return lo is None or hi is None or lo < hi


def candidate_moves(g: ReebGraph) -> Iterator[tuple[str, str, tuple[int, ...], list]]:
    """Every move pattern in ``g`` ignoring heights, with the order it needs.

    Together with :func:`reparametrize` this enumerates the moves available
    anywhere in the homotopy class of ``g``.
    """
    for kind in KINDS:
        for direction in DIRECTIONS:
            rule = RULES[(kind, direction)]
            for root in rule.roots(g):
                for anchor, order, fresh in rule.match(g, root):
                    if fresh:
                        lows, highs, _ = fresh
                        order = order + [(x, y) for x in lows for y in highs]
                    yield kind, direction, tuple(anchor), order


def site_for(g: ReebGraph, kind: str, direction: str, anchor: Sequence[int]) -> MoveSite:
    """The site of ``kind`` at ``anchor`` with default fresh heights and ids."""
    rule = _rule(kind, direction)
    anchor = tuple(anchor)
    found = _find(g, rule, anchor)
    if found is None:
        raise StaleSiteError(f"no {kind}/{direction} pattern at {anchor}")
    order, fresh = found
    if not _order_holds(g, order):
        raise StaleSiteError(f"{kind}/{direction} at {anchor}: height order not satisfied")
    return _site(g, rule, anchor, fresh)


def _find(g: ReebGraph, rule: _Rule, anchor):
    root = anchor[0] if anchor else None
    if root is not None and (root not in g or root not in rule.roots(g)):
        return None
    for cand, order, fresh in rule.match(g, root):
        if cand == anchor:
            return order, fresh
    return None


def apply(g: ReebGraph, site: MoveSite) -> ReebGraph:
    """Rewrite ``g`` at ``site``; everything outside the anchor is untouched."""
    rule = _rule(site.kind, site.direction)
    if any(v not in g for v in site.anchor):
        raise StaleSiteError(f"site {site.anchor} refers to missing vertices")
    found = _find(g, rule, site.anchor)
    if found is None:
        raise StaleSiteError(f"no {site.kind}/{site.direction} pattern at {site.anchor}")
    order, fresh_req = found
    if not _order_holds(g, order):
        raise StaleSiteError(
            f"{site.kind}/{site.direction} at {site.anchor}: height order not satisfied"
        )
    fresh = tuple(site.fresh_heights)
    if fresh_req:
        lows, highs, count = fresh_req
        if not fresh:
            fresh = fresh_heights(g, lows, highs, count)
        _check_fresh(g, fresh, lows, highs, count, site)
    elif fresh:
        raise MoveError(f"move {site.kind}/{site.direction} takes no fresh heights")
    ids = tuple(site.new_ids) or tuple(range(g.next_id, g.next_id + rule.creates))
    if len(ids) != rule.creates:
        raise MoveError(f"move {site.kind}/{site.direction} creates {rule.creates} vertices")
    if any(i in g or i < g.next_id for i in ids) or len(set(ids)) != len(ids):
        raise MoveError(f"new vertex ids {ids} are not fresh")
    return _build(g, rule.rewrite(g, site.anchor, fresh, ids), ids)


def _check_fresh(g, fresh, lows, highs, count, site):
    if len(fresh) != count:
        raise MoveError(f"expected {count} fresh heights, got {len(fresh)}")
    lo, hi = _interval(g, lows, highs)
    if any(b <= a for a, b in zip(fresh, fresh[1:])):
        raise MoveError("fresh heights violate the required height order")
    if (lo is not None and fresh[0] <= lo) or (hi is not None and fresh[-1] >= hi):
        raise MoveError("fresh heights fall outside the allowed interval")
    moving = set(site.anchor[:1]) if site.kind in "jk" else set()
    taken = {h for v, h in g.heights.items() if v not in moving}
    if taken.intersection(fresh):
        raise MoveError("fresh heights collide with existing heights")


def apply_with_inverse(g: ReebGraph, site: MoveSite) -> tuple[ReebGraph, MoveSite]:
    """Apply ``site`` and return the site of the opposite move that undoes it."""
    after = apply(g, site)
    rule = _rule(site.kind, site.direction)
    if not site.new_ids and rule.creates:
        site = MoveSite(site.kind, site.direction, site.anchor, site.fresh_heights,
                        tuple(range(g.next_id, g.next_id + rule.creates)))
    if not site.fresh_heights and site.kind in "jk":
        found = _find(g, rule, site.anchor)
        site = MoveSite(site.kind, site.direction, site.anchor,
                        fresh_heights(g, *found[1]), site.new_ids)
    inv = rule.inverse(g, site, after)
    if not inv.new_ids:
        inv_rule = _rule(inv.kind, inv.direction)
        inv = MoveSite(inv.kind, inv.direction, inv.anchor, inv.fresh_heights,
                       tuple(range(after.next_id, after.next_id + inv_rule.creates)))
    return after, inv


# ---------------------------------------------------------------- traces

@dataclass
class MoveTrace:
    """Moves and homotopies taking ``start`` to ``end``."""

    start: ReebGraph
    steps: list[Step]
    end: ReebGraph

    def replay(self) -> ReebGraph:
        """Re-run every step from ``start``; raises TraceError unless the
        result equals ``end``."""
        g = self.start
        for n, step in enumerate(self.steps):
            try:
                if isinstance(step, Homotopy):
                    g = apply_homotopy(g, step)
                else:
                    g = apply(g, step)
            except MoveError as exc:
                raise TraceError(f"step {n}: {exc}") from exc
        if g != self.end:
            raise TraceError("replay does not reproduce the recorded end graph")
        return g

    @property
    def moves(self) -> list[MoveSite]:
        return [s for s in self.steps if isinstance(s, MoveSite)]

    def to_json(self) -> dict:
        return {
            "version": 1,
            "start": to_document(self.start),
            "end": to_document(self.end),
            "steps": [s.to_json() for s in self.steps],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1) + "\n"

    @classmethod
    def loads(cls, text: str) -> MoveTrace:
        doc = json.loads(text)
        steps: list[Step] = []
        for item in doc["steps"]:
            if item.get("kind") == "homotopy":
                steps.append(Homotopy.from_json(item))
            else:
                steps.append(MoveSite.from_json(item))
        return cls(from_document(doc["start"], "$.start"), steps,
                   from_document(doc["end"], "$.end"))


class Rewriter:
    """Applies moves to a working graph while recording the trace.

    :meth:`move` inserts a homotopy first when the move needs a height
    order the current heights lack.
    """

    def __init__(self, g: ReebGraph):
        require_valid(g)
        self.start = g
        self.g = g
        self.steps: list[Step] = []

    def apply(self, site: MoveSite) -> MoveSite:
        self.g = apply(self.g, site)
        self.steps.append(site)
        return site

    def homotopy(self, heights) -> None:
        step = Homotopy(tuple(sorted(heights.items())))
        self.g = apply_homotopy(self.g, step)
        self.steps.append(step)

    def move(self, kind: str, direction: str, anchor: Sequence[int]) -> MoveSite:
        rule = _rule(kind, direction)
        anchor = tuple(anchor)
        found = _find(self.g, rule, anchor)
        if found is None:
            raise StaleSiteError(f"no {kind}/{direction} pattern at {anchor}")
        order, fresh = found
        if fresh:
            order = order + [(x, y) for x in fresh[0] for y in fresh[1]]
        if not _order_holds(self.g, order):
            moved = reparametrize(self.g, order)
            if moved is None:
                raise MoveError(f"{kind}/{direction} at {anchor} is impossible up to homotopy")
            self.homotopy(dict(moved.heights))
        return self.apply(_site(self.g, rule, anchor, fresh))

    def trace(self) -> MoveTrace:
        return MoveTrace(self.start, list(self.steps), self.g)



def rule_table() -> list[dict]:
    """The shipped example for every move: a left-hand graph, the forward
    site applied to it, the resulting right-hand graph and the inverse site."""
    from importlib import resources

    text = resources.files(__package__).joinpath("rules.json").read_text()
    return json.loads(text)["rules"]
