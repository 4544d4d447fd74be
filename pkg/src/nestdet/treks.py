"""Treks, restricted trek systems and restricted trek separation.

Separation is decided on an auxiliary DAG whose vertices are left copies
``x'`` of the vertices in ``P`` and right copies ``x`` of the vertices in
``Q``; restricted treks from ``A`` to ``B`` are exactly the directed paths
from ``A'`` to ``B`` there, and side-disjoint systems are vertex-disjoint
path systems.  Minimum cuts come from unit node-capacity max flow.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graph import (
    CycleError,
    GraphError,
    Label,
    MixedGraph,
    bidirected_subdivision,
    find_cycle,
    label_to_json,
)

COMMON = "common"
BIDIRECTED = "bidirected"

# candidate pairs examined when searching the lexicographically least cut
DEFAULT_SEARCH_CAP = 200_000


def _require_acyclic(g: MixedGraph):
    cycle = find_cycle(g)
    if cycle is not None:
        raise CycleError(cycle)


# ---------------------------------------------------------------- treks


@dataclass(frozen=True)
class Trek:
    """``left`` runs from the sink in A up to the top (i_l, ..., i_1);
    ``right`` runs from the top down to the sink in B (j_1, ..., j_r)."""

    left: tuple[Label, ...]
    right: tuple[Label, ...]
    top_kind: str

    @property
    def source(self) -> Label:
        return self.left[0]

    @property
    def target(self) -> Label:
        return self.right[-1]

    @property
    def left_side(self) -> frozenset:
        return frozenset(self.left)

    @property
    def right_side(self) -> frozenset:
        return frozenset(self.right)

    def edges(self) -> list[tuple[Label, Label]]:
        up = [(self.left[k + 1], self.left[k]) for k in range(len(self.left) - 1)]
        down = [(self.right[k], self.right[k + 1]) for k in range(len(self.right) - 1)]
        return up + down

    def top(self) -> tuple[Label, Label]:
        return (self.left[-1], self.right[0])

    def monomial(self):
        from .poly import Polynomial, lam, omega

        m = Polynomial.var(omega(*self.top()))
        for a, b in self.edges():
            m = m * Polynomial.var(lam(a, b))
        return m

    def is_valid(self, g: MixedGraph) -> bool:
        if not self.left or not self.right:
            return False
        if any(e not in g.directed for e in self.edges()):
            return False
        i1, j1 = self.top()
        if self.top_kind == COMMON:
            return i1 == j1
        return i1 != j1 and ((i1, j1) in g.bidirected or (j1, i1) in g.bidirected)

    def __str__(self) -> str:
        left = " <- ".join(self.left)
        right = " -> ".join(self.right[1:] if self.top_kind == COMMON else self.right)
        mid = " <-> " if self.top_kind == BIDIRECTED else (" -> " if len(self.right) > 1 else "")
        return left + mid + right


def _paths_into(g: MixedGraph, allowed: set, start: Label) -> dict[Label, list[tuple]]:
    """All directed paths from ``start`` staying inside ``allowed``, keyed by
    their end vertex."""
    out: dict[Label, list[tuple]] = {}
    if start not in allowed:
        return out
    stack = [(start,)]
    while stack:
        path = stack.pop()
        out.setdefault(path[-1], []).append(path)
        for c in g.children(path[-1]):
            if c in allowed and c not in path:
                stack.append(path + (c,))
    for v in out:
        out[v].sort(key=lambda p: [g.index(x) for x in p])
    return out


def restricted_treks(g: MixedGraph, a, b, P: Iterable | None = None, Q: Iterable | None = None) -> list[Trek]:
    """All treks from ``a`` to ``b`` with simple sides, left side inside
    ``P`` and right side inside ``Q`` (defaults: all vertices)."""
    _require_acyclic(g)
    a, b = g.label(a), g.label(b)
    P = set(g.vertices if P is None else g.labels(P))
    Q = set(g.vertices if Q is None else g.labels(Q))
    treks = []
    for t in g.vertices:
        if t in P and t in Q:
            for lp in _paths_into(g, P, t).get(a, []):
                for rp in _paths_into(g, Q, t).get(b, []):
                    treks.append(Trek(tuple(reversed(lp)), rp, COMMON))
    edges = sorted(g.bidirected, key=lambda e: (g.index(e[0]), g.index(e[1])))
    for x, y in edges:
        for top_l, top_r in ((x, y), (y, x)):
            for lp in _paths_into(g, P, top_l).get(a, []):
                for rp in _paths_into(g, Q, top_r).get(b, []):
                    treks.append(Trek(tuple(reversed(lp)), rp, BIDIRECTED))
    return treks


@dataclass(frozen=True)
class TrekSystem:
    treks: tuple[Trek, ...]
    sources: tuple[Label, ...]
    targets: tuple[Label, ...]
    sign: int

    @property
    def no_sided_intersection(self) -> bool:
        lefts = [t.left_side for t in self.treks]
        rights = [t.right_side for t in self.treks]
        for x, y in itertools.combinations(range(len(self.treks)), 2):
            if lefts[x] & lefts[y] or rights[x] & rights[y]:
                return False
        return True

    def monomial(self):
        from .poly import product

        return product(t.monomial() for t in self.treks).scale(self.sign)


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def enumerate_trek_systems(g: MixedGraph, A: Sequence, B: Sequence, P: Iterable | None = None,
                           Q: Iterable | None = None) -> list[TrekSystem]:
    """All systems of (P,Q)-restricted treks from A to B without sided
    intersection.  A and B are taken in declaration order; the sign is
    that of the induced bijection A -> B."""
    _require_acyclic(g)
    A, B = g.sort(A), g.sort(B)
    if len(A) != len(B):
        raise GraphError("trek systems need |A| == |B|")
    if len(set(A)) < len(A) or len(set(B)) < len(B):
        return []
    table = {(a, b): restricted_treks(g, a, b, P, Q) for a in A for b in B}
    systems = []
    k = len(A)

    def extend(i, perm, chosen, used_left, used_right):
        if i == k:
            systems.append(TrekSystem(tuple(chosen), tuple(A), tuple(B), _perm_sign(perm)))
            return
        for jb, b in enumerate(B):
            if jb in perm:
                continue
            for t in table[(A[i], b)]:
                if t.left_side & used_left or t.right_side & used_right:
                    continue
                extend(i + 1, perm + [jb], chosen + [t], used_left | t.left_side, used_right | t.right_side)

    extend(0, [], [], frozenset(), frozenset())
    return systems


# ---------------------------------------------------------------- flow network


@dataclass
class FlowNetwork:
    """Unit node-capacity network.  Nodes are ``("u",)``, ``("v",)``,
    ``("L", x)`` for left copies and ``("R", x)`` for right copies, where
    ``x`` is a vertex of the (possibly subdivided) graph."""

    nodes: list[tuple]
    arcs: list[tuple[tuple, tuple]]
    graph: MixedGraph
    subdivision: object | None
    A: list[Label]
    B: list[Label]
    P: list[Label]
    Q: list[Label]
    provenance: dict[tuple, tuple[str, Label]] = field(default_factory=dict)

    source = ("u",)
    sink = ("v",)

    def successors(self) -> dict[tuple, list[tuple]]:
        succ: dict[tuple, list[tuple]] = {n: [] for n in self.nodes}
        for a, b in self.arcs:
            succ[a].append(b)
        return succ

    def reachable(self, removed: Iterable[tuple] = ()) -> bool:
        """Is the sink reachable once ``removed`` nodes are deleted?"""
        removed = set(removed)
        succ = self.successors()
        seen = {self.source}
        queue = deque([self.source])
        while queue:
            x = queue.popleft()
            if x == self.sink:
                return True
            for y in succ[x]:
                if y not in seen and y not in removed:
                    seen.add(y)
                    queue.append(y)
        return False

    def relevant_nodes(self) -> set[tuple]:
        """Nodes on some source-to-sink path."""
        succ = self.successors()
        pred: dict[tuple, list[tuple]] = {n: [] for n in self.nodes}
        for a, b in self.arcs:
            pred[b].append(a)

        def closure(start, nbrs):
            seen = {start}
            stack = [start]
            while stack:
                x = stack.pop()
                for y in nbrs[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            return seen

        return closure(self.source, succ) & closure(self.sink, pred)

    def max_flow(self) -> tuple[int, list[tuple]]:
        """Value of a maximum flow and the nodes of one minimum cut.

        Breadth-first augmenting paths on the split graph; every node other
        than the terminals has capacity one.
        """
        INF = len(self.nodes) + 1

        def inn(n):
            return (n, 0)

        def out(n):
            return (n, 1)

        cap: dict[tuple, dict[tuple, int]] = {}

        def add(a, b, c):
            cap.setdefault(a, {})
            cap.setdefault(b, {})
            cap[a][b] = cap[a].get(b, 0) + c
            cap[b].setdefault(a, 0)

        terminals = {self.source, self.sink}
        for n in self.nodes:
            add(inn(n), out(n), INF if n in terminals else 1)
        for a, b in self.arcs:
            add(out(a), inn(b), INF)
        s, t = out(self.source), inn(self.sink)
        order = {x: k for k, x in enumerate(cap)}
        flow = 0
        while True:
            parent = {s: None}
            queue = deque([s])
            while queue and t not in parent:
                x = queue.popleft()
                for y in sorted(cap[x], key=order.__getitem__):
                    if cap[x][y] > 0 and y not in parent:
                        parent[y] = x
                        queue.append(y)
            if t not in parent:
                break
            y = t
            while parent[y] is not None:
                x = parent[y]
                cap[x][y] -= 1
                cap[y][x] += 1
                y = x
            flow += 1
        reach = set(parent)
        cut = [n for n in self.nodes if n not in terminals and inn(n) in reach and out(n) not in reach]
        return flow, cut


def _check_sets(g: MixedGraph, A, B, P, Q):
    A, B = g.sort(set(g.labels(A))), g.sort(set(g.labels(B)))
    P = g.sort(set(g.vertices if P is None else g.labels(P)))
    Q = g.sort(set(g.vertices if Q is None else g.labels(Q)))
    if not set(A) <= set(P):
        raise GraphError("A must be a subset of P")
    if not set(B) <= set(Q):
        raise GraphError("B must be a subset of Q")
    return A, B, P, Q


def build_aux_graph(g: MixedGraph, A, B, P=None, Q=None, subdivide: bool = True) -> FlowNetwork:
    """Auxiliary network for (P,Q)-restricted treks from A to B.

    With ``subdivide`` (the default) the network is built on the bidirected
    subdivision with P, Q extended to the subdivision vertices; otherwise a
    bidirected edge ``x <-> y`` contributes arcs ``x' -> y`` and ``y' -> x``.
    """
    _require_acyclic(g)
    A, B, P, Q = _check_sets(g, A, B, P, Q)
    sub = None
    h = g
    Pb, Qb = P, Q
    if subdivide and g.bidirected:
        sub = bidirected_subdivision(g)
        h = sub.subdivided
        Pb, Qb = sub.extend(P), sub.extend(Q)
    Pset, Qset = set(Pb), set(Qb)
    nodes = [FlowNetwork.source]
    nodes += [("L", x) for x in Pb]
    nodes += [("R", x) for x in Qb]
    nodes.append(FlowNetwork.sink)
    arcs = [(FlowNetwork.source, ("L", a)) for a in A]
    for x, y in sorted(h.directed, key=lambda e: (h.index(e[0]), h.index(e[1]))):
        if x in Pset and y in Pset:
            arcs.append((("L", y), ("L", x)))
        if x in Qset and y in Qset:
            arcs.append((("R", x), ("R", y)))
    for x in Pb:
        if x in Qset:
            arcs.append((("L", x), ("R", x)))
    if not subdivide:
        for x, y in sorted(g.bidirected, key=lambda e: (g.index(e[0]), g.index(e[1]))):
            for s, t in ((x, y), (y, x)):
                if s in Pset and t in Qset:
                    arcs.append((("L", s), ("R", t)))
    arcs += [(("R", b), FlowNetwork.sink) for b in B]
    prov = {n: (n[0], n[1]) for n in nodes if len(n) == 2}
    return FlowNetwork(nodes, arcs, h, sub, A, B, P, Q, prov)


# ---------------------------------------------------------------- certificates


@dataclass(frozen=True)
class SeparationCertificate:
    A: tuple[Label, ...]
    B: tuple[Label, ...]
    P: tuple[Label, ...]
    Q: tuple[Label, ...]
    SL: tuple[Label, ...]
    SR: tuple[Label, ...]
    size: int
    verified: bool
    subdivided: bool = False

    def to_json(self) -> dict:
        j = lambda xs: [label_to_json(x) for x in xs]
        out = {
            "A": j(self.A), "B": j(self.B), "P": j(self.P), "Q": j(self.Q),
            "SL": j(self.SL), "SR": j(self.SR), "size": self.size, "verified": self.verified,
        }
        if self.subdivided:
            out["subdivided"] = True
        return out

    @classmethod
    def from_json(cls, data: dict) -> "SeparationCertificate":
        s = lambda key: tuple(str(x) for x in data.get(key, []))
        return cls(s("A"), s("B"), s("P"), s("Q"), s("SL"), s("SR"), int(data["size"]),
                   bool(data.get("verified", False)), bool(data.get("subdivided", False)))


def is_restricted_trek_separated(g: MixedGraph, A, B, SL, SR, P=None, Q=None) -> bool:
    """Does every (P,Q)-restricted trek from A to B meet SL on its left side
    or SR on its right side?"""
    net = build_aux_graph(g, A, B, P, Q)
    removed = [("L", x) for x in g.labels(SL)] + [("R", x) for x in g.labels(SR)]
    return not net.reachable(removed)


def _cut_key(g: MixedGraph, SL, SR):
    return (tuple(g.index(x) for x in SL), tuple(g.index(x) for x in SR))


def min_restricted_cut(g: MixedGraph, A, B, P=None, Q=None, search_cap: int = DEFAULT_SEARCH_CAP) -> SeparationCertificate:
    """Minimum (SL, SR) that (P,Q)-restricted trek-separates A from B.

    The size is the max-flow value.  Among all minimum cuts the
    lexicographically least one (declaration order, SL compared first) is
    returned; it is searched over vertices lying on some restricted trek.
    If that search would exceed ``search_cap`` candidates the flow's own
    cut is projected back from the subdivision instead.
    """
    net = build_aux_graph(g, A, B, P, Q)
    k, cut = net.max_flow()
    A_, B_, P_, Q_ = net.A, net.B, net.P, net.Q

    def cert(SL, SR, verified, subdivided=False):
        return SeparationCertificate(tuple(A_), tuple(B_), tuple(P_), tuple(Q_), tuple(SL), tuple(SR),
                                     len(SL) + len(SR), verified, subdivided)

    rel = net.relevant_nodes()
    left = g.sort(x for (side, x) in (n for n in rel if len(n) == 2) if side == "L" and x in g)
    right = g.sort(x for (side, x) in (n for n in rel if len(n) == 2) if side == "R" and x in g)
    total = sum(_comb(len(left), s) * _comb(len(right), k - s) for s in range(k + 1))
    if total <= search_cap:
        candidates = []
        for s in range(k + 1):
            for SL in itertools.combinations(left, s):
                for SR in itertools.combinations(right, k - s):
                    candidates.append((_cut_key(g, SL, SR), SL, SR))
        candidates.sort(key=lambda c: c[0])
        for _, SL, SR in candidates:
            removed = [("L", x) for x in SL] + [("R", x) for x in SR]
            if not net.reachable(removed):
                return cert(SL, SR, True)
    return _project_cut(g, net, cut, cert)


def _comb(n, r):
    if r < 0 or r > n:
        return 0
    from math import comb

    return comb(n, r)


def _project_cut(g, net, cut, cert):
    """Map a cut on the subdivided network back to original vertices by
    trying every endpoint replacement for the subdivision vertices."""
    sub = net.subdivision
    fixed_L = [x for side, x in cut if side == "L" and x in g]
    fixed_R = [x for side, x in cut if side == "R" and x in g]
    extra = [(side, x) for side, x in cut if x not in g]
    P, Q = set(net.P), set(net.Q)
    options = []
    for side, w in extra:
        i, j = sub.endpoints(w)
        opts = [("L", y) for y in (i, j) if y in P] + [("R", y) for y in (i, j) if y in Q]
        options.append(opts)
    best = None
    for choice in itertools.product(*options):
        SL = g.sort(set(fixed_L) | {y for s, y in choice if s == "L"})
        SR = g.sort(set(fixed_R) | {y for s, y in choice if s == "R"})
        removed = [("L", x) for x in SL] + [("R", x) for x in SR]
        if not net.reachable(removed):
            key = (len(SL) + len(SR), _cut_key(g, SL, SR))
            if best is None or key < best[0]:
                best = (key, SL, SR)
    if best is not None:
        return cert(best[1], best[2], True)
    SL = [x for side, x in cut if side == "L"]
    SR = [x for side, x in cut if side == "R"]
    return cert(SL, SR, False, subdivided=True)


def generic_rank(g: MixedGraph, A, B, P=None, Q=None) -> int:
    """Generic rank of the restricted covariance block: the minimum
    restricted trek-separating set size."""
    net = build_aux_graph(g, A, B, P, Q)
    k, _ = net.max_flow()
    return min(k, len(net.A), len(net.B))
