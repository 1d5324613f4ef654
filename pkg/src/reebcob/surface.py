"""Triangulated closed surfaces, PL Morse functions and Reeb graph extraction."""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Iterable, Sequence

from .reeb import ReebGraph, VertexModel, euler_characteristic, format_height, sigma, to_height

Triangle = tuple[int, int, int]


class SurfaceError(ValueError):
    """An input that is not a closed triangulated surface."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class OffParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.message, self.line, self.column = message, line, column
        super().__init__(f"line {line}, column {column}: {message}")


class ExtractionError(ValueError):
    pass


@dataclass(frozen=True)
class TriangulatedSurface:
    """Vertices 0..vertex_count-1 and oriented triangles over them.

    ``coordinates`` is only kept so that the z-coordinate can serve as a
    default function; nothing else looks at geometry.
    """

    vertex_count: int
    triangles: tuple[Triangle, ...]
    coordinates: tuple[tuple[Fraction, Fraction, Fraction], ...] | None = field(
        default=None, compare=False
    )

    @classmethod
    def build(cls, vertex_count: int, triangles: Iterable[Sequence[int]], coordinates=None):
        """Construct and verify; raises :class:`SurfaceError`."""
        s = cls(int(vertex_count), tuple(tuple(int(x) for x in t) for t in triangles),
                None if coordinates is None else tuple(tuple(to_height(c) for c in p) for p in coordinates))
        problems = manifold_problems(s)
        if problems:
            raise SurfaceError(problems)
        return s

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted({_ek(a, b) for t in self.triangles for a, b in _sides(t)})

    def default_function(self) -> VertexFunction:
        if self.coordinates is None:
            raise ExtractionError("surface carries no coordinates to take a default function from")
        return VertexFunction(tuple(p[2] for p in self.coordinates))


@dataclass(frozen=True)
class VertexFunction:
    values: tuple[Fraction, ...]

    @classmethod
    def of(cls, values: Iterable) -> VertexFunction:
        return cls(tuple(to_height(v) for v in values))

    def __len__(self) -> int:
        return len(self.values)

    def __neg__(self) -> VertexFunction:
        return VertexFunction(tuple(-v for v in self.values))

    def ranks(self) -> list[int]:
        """Position of each vertex in the order by (value, index)."""
        order = sorted(range(len(self.values)), key=lambda i: (self.values[i], i))
        rank = [0] * len(order)
        for r, v in enumerate(order):
            rank[v] = r
        return rank

    def perturbed(self) -> VertexFunction:
        """Distinct values inducing the (value, index) order.

        Tied vertices are spread upward by multiples of a step smaller than
        any gap between distinct values, so untied values are unchanged.
        """
        vals = self.values
        distinct = sorted(set(vals))
        if len(distinct) == len(vals):
            return self
        gaps = [b - a for a, b in zip(distinct, distinct[1:])]
        gap = min(gaps) if gaps else Fraction(1)
        step = gap / (len(vals) + 1)
        seen: Counter = Counter()
        out = []
        for v in vals:
            out.append(v + step * seen[v])
            seen[v] += 1
        return VertexFunction(tuple(out))


def _ek(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def _sides(t: Sequence[int]):
    a, b, c = t
    return ((a, b), (b, c), (c, a))


# ---------------------------------------------------------------- checks

def manifold_problems(s: TriangulatedSurface) -> list[str]:
    """Everything keeping ``s`` from being a closed surface, per simplex."""
    out = []
    n = s.vertex_count
    for i, t in enumerate(s.triangles):
        if len(t) != 3:
            out.append(f"triangle {i} does not have three vertices")
        elif any(not 0 <= x < n for x in t):
            out.append(f"triangle {i} {list(t)} references a vertex outside 0..{n - 1}")
        elif len(set(t)) != 3:
            out.append(f"triangle {i} {list(t)} repeats a vertex")
    if out:
        return out
    seen: dict[frozenset, int] = {}
    for i, t in enumerate(s.triangles):
        key = frozenset(t)
        if key in seen:
            out.append(f"triangle {i} duplicates triangle {seen[key]} {sorted(key)}")
        else:
            seen[key] = i
    edge_use = Counter(_ek(a, b) for t in s.triangles for a, b in _sides(t))
    for e, k in sorted(edge_use.items()):
        if k != 2:
            out.append(f"edge {list(e)} lies in {k} triangle(s), expected 2")
    links = _links(s)
    for v in range(n):
        why = _link_defect(links.get(v, []))
        if why:
            out.append(f"vertex {v}: link {why}")
    return out


def _links(s: TriangulatedSurface) -> dict[int, list[tuple[int, int]]]:
    links: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for a, b, c in s.triangles:
        links[a].append((b, c))
        links[b].append((c, a))
        links[c].append((a, b))
    return links


def _link_defect(link: list[tuple[int, int]]) -> str | None:
    if not link:
        return "is empty (vertex in no triangle)"
    if len({frozenset(e) for e in link}) != len(link) or len(link) < 3:
        return "is not a simple cycle (repeated link edge)"
    deg = Counter(x for e in link for x in e)
    if any(k != 2 for k in deg.values()):
        return "is not a simple cycle (branching or open)"
    if len(_cycle(link)) != len(deg):
        return "is not a simple cycle (several cycles)"
    return None


def _cycle(link: list[tuple[int, int]]) -> list[int]:
    """Vertices of a link cycle in cyclic order."""
    nbrs: dict[int, list[int]] = defaultdict(list)
    for a, b in link:
        nbrs[a].append(b)
        nbrs[b].append(a)
    start = min(nbrs)
    order = [start]
    prev, cur = None, start
    while True:
        options = [x for x in nbrs[cur] if x != prev] if prev is not None else nbrs[cur][:1]
        if not options:
            break
        nxt = options[0]
        if nxt == start:
            break
        order.append(nxt)
        prev, cur = cur, nxt
        if len(order) > len(nbrs):
            break
    return order


def require_surface(s: TriangulatedSurface) -> None:
    problems = manifold_problems(s)
    if problems:
        raise SurfaceError(problems)


def euler_char(s: TriangulatedSurface) -> int:
    return s.vertex_count - len(s.edges) + len(s.triangles)


def _triangle_components(s: TriangulatedSurface) -> list[int]:
    parent = list(range(len(s.triangles)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    by_edge: dict[tuple[int, int], int] = {}
    for i, t in enumerate(s.triangles):
        for a, b in _sides(t):
            j = by_edge.setdefault(_ek(a, b), i)
            if j != i:
                parent[find(i)] = find(j)
    return [find(i) for i in range(len(s.triangles))]


def components(s: TriangulatedSurface) -> int:
    return len(set(_triangle_components(s)))


def orientable(s: TriangulatedSurface) -> bool:
    """True when every component admits a coherent orientation of its triangles."""
    by_edge: dict[tuple[int, int], list[int]] = defaultdict(list)
    for i, t in enumerate(s.triangles):
        for a, b in _sides(t):
            by_edge[_ek(a, b)].append(i)
    flip: list[bool | None] = [None] * len(s.triangles)

    def directed(i: int, a: int, b: int) -> bool:
        """Does triangle i, after its flip, traverse a->b?"""
        forward = (a, b) in _sides(s.triangles[i])
        return forward != flip[i]

    for seed in range(len(s.triangles)):
        if flip[seed] is not None:
            continue
        flip[seed] = False
        stack = [seed]
        while stack:
            i = stack.pop()
            for a, b in _sides(s.triangles[i]):
                along = directed(i, a, b)
                for j in by_edge[_ek(a, b)]:
                    if j == i:
                        continue
                    # j must traverse the shared edge the other way
                    native = (a, b) in _sides(s.triangles[j])
                    want = native == along  # flip j when it agrees with i
                    if flip[j] is None:
                        flip[j] = want
                        stack.append(j)
                    elif flip[j] != want:
                        return False
    return True


def disjoint_union(*surfaces: TriangulatedSurface) -> TriangulatedSurface:
    n = 0
    tris = []
    coords: list | None = []
    for s in surfaces:
        tris += [tuple(x + n for x in t) for t in s.triangles]
        if coords is not None and s.coordinates is not None:
            coords += list(s.coordinates)
        else:
            coords = None
        n += s.vertex_count
    return TriangulatedSurface(n, tuple(tris), None if coords is None else tuple(coords))


def concat_functions(*fs: VertexFunction) -> VertexFunction:
    return VertexFunction(tuple(v for f in fs for v in f.values))


# ---------------------------------------------------------------- files

def load_off(data: bytes | str) -> TriangulatedSurface:
    """Parse an ASCII OFF document and verify it is a closed surface."""
    text = data.decode("ascii", errors="replace") if isinstance(data, bytes) else data
    lines = []
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks = []
        col = 0
        for part in body.split():
            col = body.index(part, col)
            toks.append((part, col + 1))
            col += len(part)
        if toks:
            lines.append((no, toks))
    pos = 0

    def take(what):
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] + 1 if lines else 1
            raise OffParseError(f"unexpected end of file, expected {what}", last, 1)
        pos += 1
        return lines[pos - 1]

    no, toks = take("OFF header")
    if toks[0][0] != "OFF":
        raise OffParseError(f"expected header 'OFF', found {toks[0][0]!r}", no, toks[0][1])
    toks = toks[1:]
    if not toks:
        no, toks = take("counts line 'V F E'")
    if len(toks) < 3:
        raise OffParseError("counts line needs three integers 'V F E'", no, toks[-1][1])
    nv, nf, _ = (_int(t, no) for t in toks[:3])
    coords = []
    for _ in range(nv):
        no, toks = take("vertex coordinates")
        if len(toks) < 3:
            raise OffParseError("vertex line needs three coordinates", no, toks[-1][1] if toks else 1)
        coords.append(tuple(_num(t, no) for t in toks[:3]))
    tris = []
    for _ in range(nf):
        no, toks = take("face")
        k = _int(toks[0], no)
        if k != 3:
            raise OffParseError(f"face has {k} vertices; only triangles are supported", no, toks[0][1])
        if len(toks) < 4:
            raise OffParseError("face line needs three vertex indices", no, toks[-1][1])
        idx = []
        for t in toks[1:4]:
            i = _int(t, no)
            if not 0 <= i < nv:
                raise OffParseError(f"vertex index {i} out of range 0..{nv - 1}", no, t[1])
            idx.append(i)
        tris.append(tuple(idx))
    if pos < len(lines):
        no, toks = lines[pos]
        raise OffParseError("trailing content after the last face", no, toks[0][1])
    return TriangulatedSurface.build(nv, tris, coords)


def _int(tok, line) -> int:
    text, col = tok
    try:
        return int(text)
    except ValueError:
        raise OffParseError(f"expected an integer, found {text!r}", line, col) from None


def _num(tok, line) -> Fraction:
    text, col = tok
    try:
        return to_height(text)
    except ValueError:
        raise OffParseError(f"expected a number, found {text!r}", line, col) from None


def dump_off(s: TriangulatedSurface, function: VertexFunction | None = None) -> str:
    """OFF text for ``s``; the z-coordinate carries ``function`` when given."""
    out = ["OFF", f"{s.vertex_count} {len(s.triangles)} {len(s.edges)}"]
    for v in range(s.vertex_count):
        if s.coordinates is not None:
            x, y, z = s.coordinates[v]
        else:
            x, y, z = Fraction(v), Fraction(0), Fraction(0)
        if function is not None:
            z = function.values[v]
        out.append(" ".join(format_height(c) for c in (x, y, z)))
    out += [f"3 {a} {b} {c}" for a, b, c in s.triangles]
    return "\n".join(out) + "\n"


def load_values(data: bytes | str, vertex_count: int | None = None) -> VertexFunction:
    """One decimal per line; blank lines and ``#`` comments are ignored."""
    text = data.decode("ascii", errors="replace") if isinstance(data, bytes) else data
    vals = []
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            vals.append(Fraction(Decimal(body)))
        except (InvalidOperation, ValueError, OverflowError):
            col = raw.index(body) + 1
            raise OffParseError(f"expected a finite decimal value, found {body!r}", no, col) from None
    if vertex_count is not None and len(vals) != vertex_count:
        raise OffParseError(f"found {len(vals)} values for {vertex_count} vertices", len(text.splitlines()) or 1, 1)
    return VertexFunction(tuple(vals))


def dump_values(f: VertexFunction) -> str:
    return "".join(format_height(v) + "\n" for v in f.values)


# ---------------------------------------------------------------- critical points

@dataclass(frozen=True)
class CriticalPointType:
    kind: str
    multiplicity: int = 0

    @property
    def label(self) -> str:
        return f"MultiSaddle{{{self.multiplicity}}}" if self.kind == "MultiSaddle" else self.kind

    def __str__(self) -> str:
        return self.label


REGULAR = CriticalPointType("Regular")
MINIMUM = CriticalPointType("Minimum")
MAXIMUM = CriticalPointType("Maximum")
SIMPLE_SADDLE = CriticalPointType("SimpleSaddle", 1)


def _check_function(s: TriangulatedSurface, f: VertexFunction) -> None:
    if len(f) != s.vertex_count:
        raise ExtractionError(f"function has {len(f)} values for {s.vertex_count} vertices")


def _classify(link_cycle: list[int], rank: list[int], v: int) -> CriticalPointType:
    signs = [rank[w] > rank[v] for w in link_cycle]
    changes = sum(1 for i in range(len(signs)) if signs[i] != signs[i - 1])
    if changes == 0:
        return MINIMUM if signs[0] else MAXIMUM
    k = changes // 2
    if k == 1:
        return REGULAR
    if k == 2:
        return SIMPLE_SADDLE
    return CriticalPointType("MultiSaddle", k - 1)


def classify_critical(s: TriangulatedSurface, f: VertexFunction, v: int) -> CriticalPointType:
    """Type of vertex ``v`` from sign alternations of f around its link."""
    _check_function(s, f)
    return _classify(_cycle(_links(s)[v]), f.ranks(), v)


def classify_all(s: TriangulatedSurface, f: VertexFunction) -> list[CriticalPointType]:
    _check_function(s, f)
    links, rank = _links(s), f.ranks()
    return [_classify(_cycle(links[v]), rank, v) for v in range(s.vertex_count)]


# ---------------------------------------------------------------- extraction

@dataclass(frozen=True)
class ReebExtraction:
    graph: ReebGraph
    vertex_map: dict[int, int]
    edge_slabs: dict[tuple[int, int], list[list[int]]]
    critical: tuple[CriticalPointType, ...]


SADDLE_MODELS = {(2, 1): VertexModel.FORK_DOWN, (1, 2): VertexModel.FORK_UP, (1, 1): VertexModel.PASS_THROUGH}


def extract_reeb(s: TriangulatedSurface, f: VertexFunction) -> ReebExtraction:
    """Reeb graph of ``f`` on ``s`` by slabs between consecutive critical levels.

    Reeb vertex ids follow the height order of the critical vertices.  In
    ``edge_slabs`` each Reeb edge (lower id, upper id) maps to one triangle
    list per parallel copy of the edge.
    """
    _check_function(s, f)
    links = _links(s)
    rank = f.ranks()
    kinds = [_classify(_cycle(links[v]), rank, v) for v in range(s.vertex_count)]
    for v, k in enumerate(kinds):
        if k.kind == "MultiSaddle":
            raise ExtractionError(
                f"vertex {v} is a {k.label}; the function is not Morse there"
                " (subdivide the triangulation or perturb the values)"
            )
    crit = sorted((v for v, k in enumerate(kinds) if k is not REGULAR), key=rank.__getitem__)
    crit_rank = [rank[v] for v in crit]
    tris = s.triangles
    lo = [min(rank[x] for x in t) for t in tris]
    hi = [max(rank[x] for x in t) for t in tris]

    parent: dict[tuple[int, int], tuple[int, int]] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    by_edge: dict[tuple[int, int], list[int]] = defaultdict(list)
    for i, t in enumerate(tris):
        for a, b in _sides(t):
            by_edge[_ek(a, b)].append(i)

    # Slab k lies strictly between critical levels k and k+1.
    for k in range(len(crit) - 1):
        a, b = crit_rank[k], crit_rank[k + 1]
        for i in range(len(tris)):
            if lo[i] < b and hi[i] > a:
                parent[(k, i)] = (k, i)
        for (x, y), ts in by_edge.items():
            if min(rank[x], rank[y]) < b and max(rank[x], rank[y]) > a:
                union((k, ts[0]), (k, ts[1]))

    # Across critical level k, contours that miss the critical vertex go on.
    for k in range(1, len(crit) - 1):
        c, r = crit[k], crit_rank[k]
        crossing = [i for i in range(len(tris)) if lo[i] < r < hi[i]]
        level: dict[object, object] = {}

        def lfind(x):
            while level.setdefault(x, x) != x:
                level[x] = level[level[x]]
                x = level[x]
            return x

        for i in crossing:
            nodes = [("v", c)] if c in tris[i] else []
            nodes += [
                ("e", _ek(x, y)) for x, y in _sides(tris[i])
                if min(rank[x], rank[y]) < r < max(rank[x], rank[y])
            ]
            for n in nodes[1:]:
                level[lfind(n)] = lfind(nodes[0])
        singular = lfind(("v", c))
        for i in crossing:
            some_edge = next(
                _ek(x, y) for x, y in _sides(tris[i])
                if min(rank[x], rank[y]) < r < max(rank[x], rank[y])
            )
            if lfind(("e", some_edge)) != singular:
                union((k - 1, i), (k, i))

    # Each union-find class is one Reeb edge; read off its ends.
    ends: dict[tuple[int, int], list[int]] = {}
    for k, c in enumerate(crit):
        r = crit_rank[k]
        for i, t in enumerate(tris):
            if c not in t:
                continue
            if lo[i] < r and k > 0:
                ends.setdefault(find((k - 1, i)), [None, None])[1] = k
            if hi[i] > r and k < len(crit) - 1:
                ends.setdefault(find((k, i)), [None, None])[0] = k
    members: dict[tuple[int, int], set[int]] = defaultdict(set)
    for node in parent:
        members[find(node)].add(node[1])

    heights = f.perturbed().values
    graph_heights = {k: heights[c] for k, c in enumerate(crit)}
    edges = []
    slabs: dict[tuple[int, int], list[list[int]]] = defaultdict(list)
    for root in sorted(members):
        bottom, top = ends.get(root, [None, None])
        if bottom is None or top is None:
            raise AssertionError(f"Reeb edge {root} lacks an end")
        edges.append((bottom, top))
        slabs[(bottom, top)].append(sorted(members[root]))
    graph = ReebGraph(graph_heights, edges)
    for k, c in enumerate(crit):
        want = {MINIMUM: VertexModel.MINIMUM, MAXIMUM: VertexModel.MAXIMUM}.get(kinds[c])
        got = graph.model(k)
        counts = (len(graph.down(k)), len(graph.up(k)))
        if want is None:
            if counts not in SADDLE_MODELS:
                raise AssertionError(f"saddle at vertex {c} meets {counts[0]} contours below and {counts[1]} above")
        elif got is not want:
            raise AssertionError(f"extremum at vertex {c} extracted as {got}")
    return ReebExtraction(graph, {c: k for k, c in enumerate(crit)},
                          {e: sorted(v) for e, v in sorted(slabs.items())}, tuple(kinds))


def extraction_report(s: TriangulatedSurface, f: VertexFunction, ex: ReebExtraction | None = None) -> dict:
    ex = ex or extract_reeb(s, f)
    counts = Counter(k.label for k in ex.critical)
    chi = euler_char(s)
    graph_chi = euler_characteristic(ex.graph)
    sig = sigma(ex.graph)
    models = Counter(m.label for m in ex.graph.models.values())
    return {
        "vertices": s.vertex_count,
        "edges": len(s.edges),
        "triangles": len(s.triangles),
        "components": components(s),
        "orientable": orientable(s),
        "euler_characteristic": chi,
        "graph_euler_characteristic": graph_chi,
        "euler_check": chi == graph_chi,
        "critical_points": {k: counts[k] for k in sorted(counts)},
        "graph_vertices": {k: models[k] for k in sorted(models)},
        "sigma": {"t": sig.t, "d": sig.d},
    }
