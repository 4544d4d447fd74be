"""Mixed graphs: representation, text format, structural predicates."""

from __future__ import annotations

import hashlib
import heapq
import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Label = str

_LABEL_RE = re.compile(r"^[A-Za-z0-9]+$")
_EDGE_RE = re.compile(r"^\s*([A-Za-z0-9]+)\s*(<->|->)\s*([A-Za-z0-9]+)\s*$")


class GraphError(ValueError):
    """Malformed graph input or an invalid query against a graph."""


class GraphParseError(GraphError):
    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class CycleError(GraphError):
    """The directed part of a graph contains a cycle."""

    def __init__(self, cycle: Sequence[Label]):
        self.cycle = list(cycle)
        path = "->".join(self.cycle + self.cycle[:1])
        super().__init__(f"directed cycle {path}")


def natural_key(label: Label) -> tuple:
    """Order numeric labels numerically and before alphabetic ones."""
    if label.isdigit():
        return (0, int(label), label)
    return (1, 0, label)


def label_to_json(label: Label):
    if label.isdigit() and (label == "0" or not label.startswith("0")):
        return int(label)
    return label


def as_label(x) -> Label:
    if isinstance(x, bool):
        raise GraphError(f"invalid vertex label {x!r}")
    return str(x)


@dataclass(frozen=True)
class MixedGraph:
    """A graph with directed edges ``i -> j`` and bidirected edges ``i <-> j``.

    Vertices keep their declaration order, which serves as the linear order
    for every row/column ordering downstream.  Bidirected edges are stored
    as pairs with the earlier-declared endpoint first.
    """

    vertices: tuple[Label, ...]
    directed: frozenset[tuple[Label, Label]] = frozenset()
    bidirected: frozenset[tuple[Label, Label]] = frozenset()
    _index: dict = field(init=False, repr=False, compare=False, hash=False)
    _adj: tuple = field(init=False, repr=False, compare=False, hash=False)

    def __init__(self, vertices: Iterable, directed: Iterable = (), bidirected: Iterable = ()):
        verts = tuple(as_label(v) for v in vertices)
        if len(set(verts)) != len(verts):
            raise GraphError("duplicate vertex labels")
        index = {v: k for k, v in enumerate(verts)}
        d = set()
        for a, b in directed:
            a, b = as_label(a), as_label(b)
            _check_edge(index, a, b)
            d.add((a, b))
        bi = set()
        for a, b in bidirected:
            a, b = as_label(a), as_label(b)
            _check_edge(index, a, b)
            bi.add((a, b) if index[a] < index[b] else (b, a))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "directed", frozenset(d))
        object.__setattr__(self, "bidirected", frozenset(bi))
        object.__setattr__(self, "_index", index)
        pa = {v: [] for v in verts}
        ch = {v: [] for v in verts}
        sib = {v: [] for v in verts}
        for a, b in d:
            pa[b].append(a)
            ch[a].append(b)
        for a, b in bi:
            sib[a].append(b)
            sib[b].append(a)
        for table in (pa, ch, sib):
            for v in table:
                table[v].sort(key=index.__getitem__)
        object.__setattr__(self, "_adj", (pa, ch, sib))

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v) -> bool:
        return as_label(v) in self._index

    def index(self, v) -> int:
        try:
            return self._index[as_label(v)]
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def label(self, v) -> Label:
        v = as_label(v)
        if v not in self._index:
            raise GraphError(f"unknown vertex {v!r}")
        return v

    def labels(self, vs: Iterable) -> list[Label]:
        return [self.label(v) for v in vs]

    def sort(self, vs: Iterable) -> list[Label]:
        """Labels of ``vs`` (a multiset) in declaration order."""
        return sorted(self.labels(vs), key=self._index.__getitem__)

    def parents(self, v) -> list[Label]:
        return list(self._adj[0][self.label(v)])

    def children(self, v) -> list[Label]:
        return list(self._adj[1][self.label(v)])

    def siblings(self, v) -> list[Label]:
        return list(self._adj[2][self.label(v)])

    def ancestors(self, v) -> list[Label]:
        """Vertices with a directed path to ``v``, ``v`` included."""
        v = self.label(v)
        seen = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for p in self.parents(x):
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return self.sort(seen)

    def descendants(self, v) -> list[Label]:
        v = self.label(v)
        seen = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for c in self.children(x):
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return self.sort(seen)

    def is_acyclic(self) -> bool:
        return find_cycle(self) is None

    def induced(self, vs: Iterable) -> "MixedGraph":
        keep = set(self.labels(vs))
        return MixedGraph(
            [v for v in self.vertices if v in keep],
            [(a, b) for a, b in self.directed if a in keep and b in keep],
            [(a, b) for a, b in self.bidirected if a in keep and b in keep],
        )

    def reordered(self, order: Sequence) -> "MixedGraph":
        order = self.labels(order)
        if sorted(order) != sorted(self.vertices):
            raise GraphError("reordering must be a permutation of the vertices")
        return MixedGraph(order, self.directed, self.bidirected)

    def num_edges(self) -> int:
        return len(self.directed) + len(self.bidirected)

    def __str__(self) -> str:
        return format_graph(self)


def _check_edge(index, a, b):
    for x in (a, b):
        if x not in index:
            raise GraphError(f"unknown vertex {x!r}")
    if a == b:
        raise GraphError(f"self-loop at {a}")


# ---------------------------------------------------------------- text format


def parse_graph(text: str) -> MixedGraph:
    """Parse the line-oriented graph format.

    ::

        # comment
        vertices: 1 2 3 4
        1 -> 2
        2 <-> 4

    Duplicate edges are merged.
    """
    vertices: list[Label] | None = None
    directed: list[tuple[Label, Label]] = []
    bidirected: list[tuple[Label, Label]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("vertices:"):
            if vertices is not None:
                raise GraphParseError(lineno, "second 'vertices:' line")
            vertices = line[len("vertices:"):].split()
            for v in vertices:
                if not _LABEL_RE.match(v):
                    raise GraphParseError(lineno, f"invalid vertex label {v!r}")
            if len(set(vertices)) != len(vertices):
                raise GraphParseError(lineno, "duplicate vertex label")
            continue
        m = _EDGE_RE.match(line)
        if m is None:
            raise GraphParseError(lineno, f"malformed line {raw.strip()!r}")
        if vertices is None:
            raise GraphParseError(lineno, "edge before 'vertices:' line")
        a, arrow, b = m.groups()
        for x in (a, b):
            if x not in vertices:
                raise GraphParseError(lineno, f"unknown vertex {x!r}")
        if a == b:
            raise GraphParseError(lineno, f"self-loop at {a}")
        (directed if arrow == "->" else bidirected).append((a, b))
    if vertices is None:
        raise GraphParseError(0, "missing 'vertices:' line")
    return MixedGraph(vertices, directed, bidirected)


def format_graph(g: MixedGraph) -> str:
    """Deterministic text form; ``parse_graph(format_graph(g)) == g``."""
    key = lambda e: (g.index(e[0]), g.index(e[1]))
    lines = ["vertices: " + " ".join(g.vertices)]
    lines += [f"{a} -> {b}" for a, b in sorted(g.directed, key=key)]
    lines += [f"{a} <-> {b}" for a, b in sorted(g.bidirected, key=key)]
    return "\n".join(lines) + "\n"


def graph_sha256(g: MixedGraph) -> str:
    return hashlib.sha256(format_graph(g).encode("utf-8")).hexdigest()


# ---------------------------------------------------------------- structure


def find_cycle(g: MixedGraph) -> list[Label] | None:
    """One directed cycle as a vertex list, or None for acyclic graphs."""
    color = {v: 0 for v in g.vertices}
    stack_path: list[Label] = []

    def visit(v):
        color[v] = 1
        stack_path.append(v)
        for c in g.children(v):
            if color[c] == 1:
                return stack_path[stack_path.index(c):]
            if color[c] == 0:
                found = visit(c)
                if found:
                    return found
        stack_path.pop()
        color[v] = 2
        return None

    for v in g.vertices:
        if color[v] == 0:
            found = visit(v)
            if found:
                return list(found)
    return None


def topological_order(g: MixedGraph) -> list[Label]:
    """Kahn's algorithm, breaking ties by declaration order.

    Raises CycleError carrying a witness cycle.
    """
    indeg = {v: 0 for v in g.vertices}
    for _, b in g.directed:
        indeg[b] += 1
    heap = [g.index(v) for v in g.vertices if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = g.vertices[heapq.heappop(heap)]
        order.append(v)
        for c in g.children(v):
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, g.index(c))
    if len(order) < len(g):
        raise CycleError(find_cycle(g))
    return order


@dataclass(frozen=True)
class Relations:
    parents: list[Label]
    siblings: list[Label]
    ancestors: list[Label]


def relations(g: MixedGraph, v) -> Relations:
    return Relations(g.parents(v), g.siblings(v), g.ancestors(v))


def is_ancestral_vertex(g: MixedGraph, v) -> bool:
    """True if ``v`` is on no directed cycle and no sibling of ``v`` is its ancestor."""
    v = g.label(v)
    for c in g.children(v):
        if v in g.descendants(c):
            return False
    anc = set(g.ancestors(v))
    return not any(k in anc for k in g.siblings(v))


def _bidirected_connected(g: MixedGraph, vs: Sequence[Label]) -> bool:
    vs = set(vs)
    start = next(iter(vs))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in g.siblings(x):
            if y in vs and y not in seen:
                seen.add(y)
                stack.append(y)
    return seen == vs


def is_globally_identifiable(g: MixedGraph) -> bool:
    """No vertex subset of size >= 2 carries a subgraph with connected
    bidirected part and a unique directed sink.

    A subset ``W`` admits such a subgraph iff its induced bidirected part is
    connected and some ``s`` in ``W`` is reachable in one step from every
    other vertex of ``W`` staying inside ``W`` (i.e. every other vertex has a
    child in ``W``).
    """
    if not g.is_acyclic():
        raise CycleError(find_cycle(g))
    verts = g.vertices
    for size in range(2, len(verts) + 1):
        for sub in itertools.combinations(verts, size):
            subset = set(sub)
            if not _bidirected_connected(g, sub):
                continue
            has_child = {v: any(c in subset for c in g.children(v)) for v in sub}
            # sink s keeps no out-edges; everyone else needs one inside W
            for s in sub:
                if all(has_child[v] for v in sub if v != s):
                    return False
    return True


# ---------------------------------------------------------------- subdivision


@dataclass(frozen=True)
class SubdivisionMap:
    """Bidirected subdivision: each ``i <-> j`` becomes a source ``v_ij`` with
    edges to ``i`` and ``j``."""

    original: MixedGraph
    subdivided: MixedGraph
    new_vertex_of: dict[tuple[Label, Label], Label]

    def extend(self, vs: Iterable) -> list[Label]:
        """Add ``v_ij`` whenever ``i`` or ``j`` is in ``vs``."""
        base = set(self.original.labels(vs))
        out = set(base)
        for (i, j), w in self.new_vertex_of.items():
            if i in base or j in base:
                out.add(w)
        return self.subdivided.sort(out)

    def endpoints(self, w: Label) -> tuple[Label, Label] | None:
        for e, x in self.new_vertex_of.items():
            if x == w:
                return e
        return None


def bidirected_subdivision(g: MixedGraph) -> SubdivisionMap:
    taken = set(g.vertices)
    key = lambda e: (g.index(e[0]), g.index(e[1]))
    new_of: dict[tuple[Label, Label], Label] = {}
    directed = set(g.directed)
    for i, j in sorted(g.bidirected, key=key):
        name = f"v{i}{j}" if len(i) == 1 and len(j) == 1 else f"v{i}x{j}"
        while name in taken:
            name = "v" + name
        taken.add(name)
        new_of[(i, j)] = name
        directed.add((name, i))
        directed.add((name, j))
    verts = list(g.vertices) + list(new_of.values())
    return SubdivisionMap(g, MixedGraph(verts, directed, ()), new_of)
