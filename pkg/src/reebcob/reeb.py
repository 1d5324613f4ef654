"""Abstract Reeb functions: finite graphs with a height on every vertex.

A graph is valid when every vertex has degree 1, 2 or 3, no edge is flat,
all heights are pairwise distinct, and each vertex looks locally like one of
the Reeb models (extremum, pass-through, fork).  Edges are unordered; their
direction is always read off the heights of the endpoints.
"""
from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from functools import cached_property
from math import lcm
from itertools import permutations, product
from typing import Iterable, Mapping, Sequence

import networkx as nx

FORMAT_VERSION = 1


# ---------------------------------------------------------------- heights

def to_height(value) -> Fraction:
    """Coerce ``value`` to an exact rational height.

    Strings may be decimals (``"0.25"``, ``"1e-3"``) or ratios (``"1/3"``).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("boolean is not a height")
    if isinstance(value, (int, Decimal)):
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(f"height must be finite, got {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" not in text:
            try:
                dec = Decimal(text)
            except InvalidOperation:
                raise ValueError(f"not a decimal number: {value!r}") from None
            if not dec.is_finite():
                raise ValueError(f"height must be finite, got {value!r}")
            return Fraction(dec)
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not a rational number: {value!r}") from None
    raise TypeError(f"cannot use {type(value).__name__} as a height")


def format_height(h: Fraction) -> str:
    """Exact text for ``h``: a terminating decimal when one exists, else ``p/q``."""
    h = Fraction(h)
    den = h.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{h.numerator}/{h.denominator}"
    digits = max(twos, fives)
    scaled = h * 10**digits
    assert scaled.denominator == 1
    sign = "-" if scaled < 0 else ""
    text = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    if digits == 0:
        return sign + text
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


# ---------------------------------------------------------------- models

class VertexModel(enum.Enum):
    """Local shape of a vertex, determined by its (down, up) edge counts."""

    MINIMUM = (0, 1)
    MAXIMUM = (1, 0)
    PASS_THROUGH = (1, 1)
    FORK_UP = (1, 2)
    FORK_DOWN = (2, 1)

    @property
    def degree(self) -> int:
        return self.value[0] + self.value[1]

    @property
    def sign(self) -> int:
        """+1 for an upward fork, -1 for a downward fork, 0 otherwise."""
        if self is VertexModel.FORK_UP:
            return 1
        if self is VertexModel.FORK_DOWN:
            return -1
        return 0

    @property
    def is_extremum(self) -> bool:
        return self in (VertexModel.MINIMUM, VertexModel.MAXIMUM)

    @property
    def is_fork(self) -> bool:
        return self.sign != 0

    @property
    def label(self) -> str:
        return {
            VertexModel.MINIMUM: "Extremum{Up}",
            VertexModel.MAXIMUM: "Extremum{Down}",
            VertexModel.PASS_THROUGH: "PassThrough",
            VertexModel.FORK_UP: "Fork{+1}",
            VertexModel.FORK_DOWN: "Fork{-1}",
        }[self]


_MODEL_BY_COUNTS = {m.value: m for m in VertexModel}


@dataclass(frozen=True)
class Sigma:
    t: int
    d: int

    def __post_init__(self):
        if self.d not in (0, 1):
            raise ValueError(f"d must be 0 or 1, got {self.d}")

    def __add__(self, other: Sigma) -> Sigma:
        return Sigma(self.t + other.t, (self.d + other.d) % 2)

    def as_tuple(self) -> tuple[int, int]:
        return (self.t, self.d)


# ---------------------------------------------------------------- errors

class InvalidGraphError(ValueError):
    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations[:5])
        more = "" if len(self.violations) <= 5 else f" (+{len(self.violations) - 5} more)"
        super().__init__(f"invalid abstract Reeb function: {lines}{more}")


class DecodeError(ValueError):
    """Malformed or invalid graph document; ``where`` locates the problem."""

    def __init__(self, message: str, where: str):
        self.where = where
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    vertices: tuple[int, ...] = ()

    STRUCTURAL = frozenset({"dangling-edge", "duplicate-vertex"})

    @property
    def structural(self) -> bool:
        return self.code in self.STRUCTURAL

    def __str__(self) -> str:
        return f"[{self.code}] {self.message}"


# ---------------------------------------------------------------- the graph

def _edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u <= v else (v, u)


class ReebGraph:
    """An abstract Reeb function: vertex heights plus a multiset of edges.

    Instances are immutable.  ``next_id`` is the first id a rewrite may
    allocate; it only ever grows, so ids are not recycled while editing.
    """

    __slots__ = ("_heights", "_edges", "next_id", "__dict__")

    def __init__(
        self,
        heights: Mapping[int, object] | Iterable[tuple[int, object]] = (),
        edges: Iterable[Sequence[int]] = (),
        next_id: int | None = None,
    ):
        items = heights.items() if isinstance(heights, Mapping) else heights
        hs = {int(v): to_height(h) for v, h in items}
        if any(v < 0 for v in hs):
            raise ValueError("vertex ids must be nonnegative")
        self._heights: dict[int, Fraction] = dict(sorted(hs.items()))
        self._edges: tuple[tuple[int, int], ...] = tuple(
            sorted(_edge_key(int(e[0]), int(e[1])) for e in edges)
        )
        floor = max(self._heights, default=-1) + 1
        self.next_id = floor if next_id is None else max(int(next_id), floor)

    # -- basic access

    @property
    def heights(self) -> Mapping[int, Fraction]:
        return self._heights

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return self._edges

    @property
    def vertices(self) -> list[int]:
        return list(self._heights)

    def height(self, v: int) -> Fraction:
        return self._heights[v]

    def __len__(self) -> int:
        return len(self._heights)

    def __contains__(self, v: object) -> bool:
        return v in self._heights

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ReebGraph):
            return NotImplemented
        return self._heights == other._heights and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((tuple(self._heights.items()), self._edges))

    def __repr__(self) -> str:
        vs = ", ".join(f"{v}@{format_height(h)}" for v, h in self._heights.items())
        return f"ReebGraph([{vs}], edges={list(self._edges)})"

    # -- derived structure (cached; the graph never changes)

    @cached_property
    def edge_counts(self) -> Counter:
        return Counter(self._edges)

    @cached_property
    def rank(self) -> dict[int, int]:
        """Position of each vertex in height order (ties broken by id)."""
        hs = self._heights
        # integer keys over a common denominator compare much faster
        den = lcm(*(h.denominator for h in hs.values())) if hs else 1
        key = {v: h.numerator * (den // h.denominator) for v, h in hs.items()}
        order = sorted(hs, key=key.__getitem__)
        return {v: i for i, v in enumerate(order)}

    @cached_property
    def _adjacency(self) -> tuple[dict[int, list[int]], dict[int, list[int]]]:
        down: dict[int, list[int]] = {v: [] for v in self._heights}
        up: dict[int, list[int]] = {v: [] for v in self._heights}
        hs = self._heights
        rank = self.rank
        for a, b in self._edges:
            if a not in hs or b not in hs or a == b or hs[a] == hs[b]:
                continue
            lo, hi = (a, b) if rank[a] < rank[b] else (b, a)
            up[lo].append(hi)
            down[hi].append(lo)
        for lists in (down, up):
            for xs in lists.values():
                xs.sort()
        return down, up

    def down(self, v: int) -> list[int]:
        """Lower neighbours of ``v``, with multiplicity, sorted by id.

        The list is shared; do not mutate it.
        """
        return self._adjacency[0][v]

    def up(self, v: int) -> list[int]:
        """Upper neighbours of ``v``, with multiplicity, sorted by id.

        The list is shared; do not mutate it.
        """
        return self._adjacency[1][v]

    def degree(self, v: int) -> int:
        return sum(1 for e in self._edges for x in e if x == v)

    def multiplicity(self, u: int, v: int) -> int:
        return self.edge_counts.get(_edge_key(u, v), 0)

    @cached_property
    def models(self) -> dict[int, VertexModel | None]:
        down, up = self._adjacency
        return {
            v: _MODEL_BY_COUNTS.get((len(down[v]), len(up[v])))
            for v in self._heights
        }

    def model(self, v: int) -> VertexModel | None:
        return self.models[v]

    def directed_edges(self) -> list[tuple[int, int]]:
        """Edges as (lower, upper) pairs."""
        rank = self.rank
        return [(a, b) if rank[a] < rank[b] else (b, a) for a, b in self._edges]

    def components(self) -> list[list[int]]:
        """Vertex sets of connected components, each sorted, ordered by least id."""
        parent = {v: v for v in self._heights}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self._edges:
            if a in parent and b in parent:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        groups: dict[int, list[int]] = {}
        for v in self._heights:
            groups.setdefault(find(v), []).append(v)
        return sorted(groups.values(), key=lambda c: c[0])

    def with_heights(self, heights: Mapping[int, Fraction]) -> ReebGraph:
        return ReebGraph(heights, self._edges, self.next_id)

    def to_networkx(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        for v in self._heights:
            g.add_node(v, model=self.models[v])
        g.add_edges_from(self.directed_edges())
        return g


EMPTY = ReebGraph()


# ---------------------------------------------------------------- validation

def validate(g: ReebGraph) -> list[Violation]:
    """Every broken invariant of ``g``; an empty list means ``g`` is valid."""
    cached = g.__dict__.get("_violations")
    if cached is None:
        cached = g.__dict__["_violations"] = _validate(g)
    return list(cached)


def _validate(g: ReebGraph) -> list[Violation]:
    out: list[Violation] = []
    hs = g.heights
    for a, b in g.edges:
        missing = [x for x in (a, b) if x not in hs]
        if missing:
            out.append(Violation(
                "dangling-edge",
                f"edge {{{a}, {b}}} references missing vertex {missing[0]}",
                (a, b),
            ))
    if out:
        return out
    for a, b in g.edges:
        if a == b:
            out.append(Violation("self-loop", f"self-loop at vertex {a}", (a,)))
        elif hs[a] == hs[b]:
            out.append(Violation(
                "edge-not-embedded",
                f"edge {{{a}, {b}}} is not embedded: both ends at height {format_height(hs[a])}",
                (a, b),
            ))
    order = sorted(hs, key=g.rank.__getitem__)
    groups: list[list[int]] = []
    for v in order:
        if groups and hs[groups[-1][0]] == hs[v]:
            groups[-1].append(v)
        else:
            groups.append([v])
    for vs in groups:
        if len(vs) > 1:
            h = hs[vs[0]]
            out.append(Violation(
                "height-collision",
                f"vertices {vs} share height {format_height(h)}",
                tuple(vs),
            ))
    degree = Counter(x for e in g.edges for x in e)
    for v in hs:
        d = degree.get(v, 0)
        if not 1 <= d <= 3:
            out.append(Violation(
                "degree-out-of-range", f"vertex {v} has degree {d}", (v,)
            ))
        elif g.model(v) is None and not any(
            x.code in ("self-loop", "edge-not-embedded") and v in x.vertices for x in out
        ):
            out.append(Violation(
                "no-model",
                f"vertex {v} has {len(g.down(v))} edge(s) down and {len(g.up(v))} up:"
                " no matching local model",
                (v,),
            ))
    return out


def require_valid(g: ReebGraph) -> None:
    problems = validate(g)
    if problems:
        raise InvalidGraphError(problems)


def is_valid(g: ReebGraph) -> bool:
    return not validate(g)


def classify(g: ReebGraph, v: int) -> VertexModel:
    if v not in g:
        raise KeyError(f"no vertex {v}")
    m = g.model(v)
    if m is None:
        raise InvalidGraphError([Violation("no-model", f"vertex {v} matches no model", (v,))])
    return m


# ---------------------------------------------------------------- invariants

def sigma(g: ReebGraph) -> Sigma:
    """Signed fork count and parity of pass-through vertices."""
    require_valid(g)
    models = g.models.values()
    t = sum(m.sign for m in models)
    d = sum(1 for m in models if m is VertexModel.PASS_THROUGH) % 2
    return Sigma(t, d)


def euler_characteristic(g: ReebGraph) -> int:
    """Extrema minus index-one vertices; the χ of any surface realizing ``g``."""
    require_valid(g)
    return sum(1 if m.is_extremum else -1 for m in g.models.values())


def model_counts(g: ReebGraph) -> dict[VertexModel, int]:
    counts = Counter(g.models.values())
    return {m: counts.get(m, 0) for m in VertexModel}


# ---------------------------------------------------------------- isomorphism

def _profile(g: ReebGraph) -> tuple:
    return (len(g), len(g.edges), sorted(Counter(g.models.values()).items(), key=lambda kv: kv[0].value))


def is_isomorphic(g1: ReebGraph, g2: ReebGraph) -> bool:
    """Same graph up to relabeling and order-preserving change of heights.

    Edge directions are part of the data, so the local model (including the
    fork sign) of every vertex is preserved.  Two height functions with the
    same edge directions on one graph are connected by a straight-line
    homotopy that never flattens an edge, so this is exactly equivalence up
    to homotopy in the space of abstract Reeb functions.
    """
    if _profile(g1) != _profile(g2):
        return False
    return nx.is_isomorphic(
        g1.to_networkx(), g2.to_networkx(),
        node_match=lambda a, b: a["model"] is b["model"],
    )


def isomorphism(g1: ReebGraph, g2: ReebGraph) -> dict[int, int] | None:
    """A vertex map realizing :func:`is_isomorphic`, or None."""
    if _profile(g1) != _profile(g2):
        return None
    matcher = nx.algorithms.isomorphism.MultiDiGraphMatcher(
        g1.to_networkx(), g2.to_networkx(),
        node_match=lambda a, b: a["model"] is b["model"],
    )
    for mapping in matcher.isomorphisms_iter():
        return dict(mapping)
    return None


def canonical_key(g: ReebGraph) -> tuple:
    """Complete isomorphism invariant (hashable) for small graphs.

    Colour refinement splits vertices into cells, then every ordering within
    the cells is tried; cost grows with the product of cell factorials, so
    this is meant for the handful-of-vertices graphs used by the oracles.
    """
    vs = g.vertices
    dirs = g.directed_edges()
    colour = {v: list(VertexModel).index(g.model(v)) if g.model(v) else 9 for v in vs}
    while True:
        sig = {}
        outn: dict[int, list] = {v: [] for v in vs}
        inn: dict[int, list] = {v: [] for v in vs}
        for a, b in dirs:
            outn[a].append(b)
            inn[b].append(a)
        for v in vs:
            sig[v] = (
                colour[v],
                tuple(sorted(colour[x] for x in outn[v])),
                tuple(sorted(colour[x] for x in inn[v])),
            )
        ranks = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        new = {v: ranks[sig[v]] for v in vs}
        if len(set(new.values())) == len(set(colour.values())):
            colour = new
            break
        colour = new
    cells: dict[int, list[int]] = {}
    for v in vs:
        cells.setdefault(colour[v], []).append(v)
    ordered = [cells[c] for c in sorted(cells)]
    colours = tuple(c for c in sorted(cells) for _ in cells[c])
    best = None
    for choice in product(*(permutations(cell) for cell in ordered)):
        order = [v for cell in choice for v in cell]
        pos = {v: i for i, v in enumerate(order)}
        code = tuple(sorted((pos[a], pos[b]) for a, b in dirs))
        if best is None or code < best:
            best = code
    return (colours, best or ())


# ---------------------------------------------------------------- composition

def separate_heights(low: Iterable[Fraction], high_graph: ReebGraph) -> dict[int, Fraction]:
    """Heights for ``high_graph`` that avoid every value in ``low``.

    Colliding vertices are nudged upward by half the smallest gap between
    distinct values, which preserves every edge direction of ``high_graph``.
    """
    taken = set(low)
    hs = dict(high_graph.heights)
    if not taken.intersection(hs.values()):
        return hs
    values = sorted(taken.union(hs.values()))
    gaps = [b - a for a, b in zip(values, values[1:])]
    eps = min(gaps) / 2 if gaps else Fraction(1, 2)
    return {v: (h + eps if h in taken else h) for v, h in hs.items()}


def disjoint_union(g1: ReebGraph, g2: ReebGraph) -> ReebGraph:
    """``g1`` followed by a relabeled copy of ``g2``.

    Ids of ``g1`` are kept; those of ``g2`` are shifted past ``g1.next_id``.
    """
    shift = g1.next_id
    hs2 = separate_heights(g1.heights.values(), g2)
    heights = dict(g1.heights)
    heights.update({v + shift: h for v, h in hs2.items()})
    edges = list(g1.edges) + [(a + shift, b + shift) for a, b in g2.edges]
    return ReebGraph(heights, edges, shift + g2.next_id)


# ---------------------------------------------------------------- documents

def to_document(g: ReebGraph) -> dict:
    return {
        "version": FORMAT_VERSION,
        "vertices": [{"id": v, "height": format_height(h)} for v, h in g.heights.items()],
        "edges": [list(e) for e in g.edges],
    }


def encode(g: ReebGraph) -> str:
    return json.dumps(to_document(g), indent=1) + "\n"


def from_document(doc, where: str = "$", check: bool = True) -> ReebGraph:
    if not isinstance(doc, dict):
        raise DecodeError("expected an object", where)
    if doc.get("version") != FORMAT_VERSION:
        raise DecodeError(f"unsupported version {doc.get('version')!r}", f"{where}.version")
    verts = doc.get("vertices")
    if not isinstance(verts, list):
        raise DecodeError("expected a list", f"{where}.vertices")
    heights: dict[int, Fraction] = {}
    for i, item in enumerate(verts):
        here = f"{where}.vertices[{i}]"
        if not isinstance(item, dict) or set(item) != {"id", "height"}:
            raise DecodeError("expected {id, height}", here)
        vid, h = item["id"], item["height"]
        if not isinstance(vid, int) or isinstance(vid, bool) or vid < 0:
            raise DecodeError("id must be a nonnegative integer", f"{here}.id")
        if vid in heights:
            raise DecodeError(f"structural error: duplicate vertex id {vid}", f"{here}.id")
        if not isinstance(h, str):
            raise DecodeError("height must be a decimal string", f"{here}.height")
        try:
            heights[vid] = to_height(h)
        except ValueError as exc:
            raise DecodeError(str(exc), f"{here}.height") from None
    edges_in = doc.get("edges")
    if not isinstance(edges_in, list):
        raise DecodeError("expected a list", f"{where}.edges")
    edges = []
    for i, e in enumerate(edges_in):
        here = f"{where}.edges[{i}]"
        if (not isinstance(e, list) or len(e) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in e)):
            raise DecodeError("edge must be a pair of integer ids", here)
        for x in e:
            if x not in heights:
                raise DecodeError(f"structural error: unknown vertex id {x}", here)
        edges.append((e[0], e[1]))
    g = ReebGraph(heights, edges)
    if check:
        problems = validate(g)
        if problems:
            first = problems[0]
            msg = "; ".join(str(p) for p in problems)
            if first.code == "degree-out-of-range":
                msg = "degree out of range: " + msg
            raise DecodeError(msg, f"{where}.vertices")
    return g


def decode(text: str | bytes, check: bool = True) -> ReebGraph:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DecodeError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return from_document(doc, check=check)


# ---------------------------------------------------------------- DOT export

def to_dot(g: ReebGraph, name: str = "reeb") -> str:
    """Graphviz text; lower heights are drawn lower."""
    lines = [f"graph {name} {{", "  rankdir=BT;", "  node [fontname=Helvetica];"]
    for v, h in g.heights.items():
        m = g.model(v)
        label = f"{v}@{format_height(h)}"
        attrs = [f'label="{label}"']
        if m is VertexModel.PASS_THROUGH:
            attrs.append("shape=square")
        elif m is not None and m.is_fork:
            attrs[0] = f'label="{label}\\n{"+1" if m.sign > 0 else "-1"}"'
            attrs.append(f'sign="{m.sign:+d}"')
            attrs.append("shape=triangle" if m.sign > 0 else "shape=invtriangle")
        else:
            attrs.append("shape=circle")
        lines.append(f"  v{v} [{', '.join(attrs)}];")
    for lo, hi in g.directed_edges():
        lines.append(f"  v{lo} -- v{hi};")
    chain = sorted(g.heights, key=g.height)
    for a, b in zip(chain, chain[1:]):
        lines.append(f"  v{a} -- v{b} [style=invis];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_from_edges(heights: Mapping[int, object], edges: Iterable[Sequence[int]]) -> ReebGraph:
    """Build and validate in one step."""
    g = ReebGraph(heights, edges)
    require_valid(g)
    return g

