"""Independent brute-force oracles.

Nothing here calls into the package's trek, flow or symbolic code: treks
are enumerated directly from the edge lists, polynomials are plain dicts
from sorted variable-name tuples to integer coefficients, and subgraph
conditions are checked by exhaustive enumeration.
"""

from __future__ import annotations

import itertools
from collections import Counter

from nestdet.graph import MixedGraph, natural_key


def var_name(prefix: str, i: str, j: str) -> str:
    if prefix != "l" and natural_key(j) < natural_key(i):
        i, j = j, i
    return f"{prefix}{i}{j}" if len(i) == 1 and len(j) == 1 else f"{prefix}{i}_{j}"


def as_dict(poly) -> dict:
    """Package polynomial -> {sorted tuple of variable names: coefficient}."""
    out = {}
    for powers, c in poly.items():
        key = tuple(sorted(n for v, e in powers.items() for n in [str(v)] * e))
        out[key] = c
    return out


def mono(*names) -> tuple:
    return tuple(sorted(names))


def padd(p: dict, key: tuple, c) -> None:
    v = p.get(key, 0) + c
    if v:
        p[key] = v
    else:
        p.pop(key, None)


def pmul(p: dict, q: dict) -> dict:
    out: dict = {}
    for a, x in p.items():
        for b, y in q.items():
            padd(out, tuple(sorted(a + b)), x * y)
    return out


# ---------------------------------------------------------------- treks


def paths_into(g: MixedGraph, target: str, allowed: set) -> list[tuple[str, frozenset, tuple]]:
    """All directed paths ending at ``target`` with every vertex in
    ``allowed``: (start, vertex set, lambda names)."""
    parents = {v: [a for a, b in g.directed if b == v] for v in g.vertices}
    out = []

    def walk(v, seen, lams):
        out.append((v, seen, lams))
        for u in parents[v]:
            if u in allowed and u not in seen:
                walk(u, seen | {u}, lams + (var_name("l", u, v),))

    if target in allowed:
        walk(target, frozenset([target]), ())
    return out


def treks(g: MixedGraph, a: str, b: str, P, Q) -> list[tuple[frozenset, frozenset, tuple]]:
    """(P,Q)-restricted treks a ... b as (left vertices, right vertices, monomial)."""
    P, Q = set(P), set(Q)
    left = paths_into(g, a, P)
    right = paths_into(g, b, Q)
    out = []
    for (s, ls, ll), (t, rs, rl) in itertools.product(left, right):
        if s == t:
            out.append((ls, rs, mono(var_name("w", s, s), *ll, *rl)))
        if (s, t) in g.bidirected or (t, s) in g.bidirected:
            out.append((ls, rs, mono(var_name("w", s, t), *ll, *rl)))
    return out


def perm_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def trek_system_sum(g: MixedGraph, A, B, P, Q) -> dict:
    """Signed sum over restricted trek systems A -> B without sided
    intersection; A and B are taken in the order given."""
    A, B = list(A), list(B)
    table = {(a, b): treks(g, a, b, P, Q) for a in A for b in B}
    total: dict = {}
    for perm in itertools.permutations(range(len(B))):
        sign = perm_sign(perm)
        choices = [table[(A[k], B[perm[k]])] for k in range(len(A))]
        for system in itertools.product(*choices):
            lefts = [t[0] for t in system]
            rights = [t[1] for t in system]
            if any(x & y for x, y in itertools.combinations(lefts, 2)):
                continue
            if any(x & y for x, y in itertools.combinations(rights, 2)):
                continue
            padd(total, tuple(sorted(n for t in system for n in t[2])), sign)
    return total


def covariance_entry(g: MixedGraph, a: str, b: str, P=None, Q=None) -> dict:
    P = g.vertices if P is None else P
    Q = g.vertices if Q is None else Q
    out: dict = {}
    for _, _, m in treks(g, a, b, P, Q):
        padd(out, m, 1)
    return out


def min_cut_size(g: MixedGraph, A, B, P, Q) -> int:
    """Smallest |SL| + |SR| such that every restricted trek from A to B
    meets SL on its left or SR on its right, by exhaustive search."""
    all_treks = [t for a in A for b in B for t in treks(g, a, b, P, Q)]
    V = list(g.vertices)
    for size in range(len(V) * 2 + 1):
        for s in range(size + 1):
            for SL in itertools.combinations(V, s):
                for SR in itertools.combinations(V, size - s):
                    if all(t[0] & set(SL) or t[1] & set(SR) for t in all_treks):
                        return size
    raise AssertionError("unreachable")


def separates(g: MixedGraph, A, B, SL, SR, P, Q) -> bool:
    SL, SR = set(SL), set(SR)
    return all(t[0] & SL or t[1] & SR for a in A for b in B for t in treks(g, a, b, P, Q))


# ---------------------------------------------------------------- identifiability


def _connected(vs, edges) -> bool:
    vs = list(vs)
    seen = {vs[0]}
    stack = [vs[0]]
    while stack:
        v = stack.pop()
        for a, b in edges:
            for x, y in ((a, b), (b, a)):
                if x == v and y not in seen:
                    seen.add(y)
                    stack.append(y)
    return seen == set(vs)


def globally_identifiable_brute(g: MixedGraph) -> bool:
    """No subgraph on >= 2 vertices with connected bidirected part and a
    unique sink in its directed part."""
    V = list(g.vertices)
    for r in range(2, len(V) + 1):
        for Vs in itertools.combinations(V, r):
            S = set(Vs)
            D = [e for e in g.directed if set(e) <= S]
            Bd = [e for e in g.bidirected if set(e) <= S]
            for kb in range(len(Bd) + 1):
                for Bs in itertools.combinations(Bd, kb):
                    if not _connected(Vs, Bs):
                        continue
                    for kd in range(len(D) + 1):
                        for Ds in itertools.combinations(D, kd):
                            sinks = [v for v in Vs if not any(a == v for a, _ in Ds)]
                            if len(sinks) == 1:
                                return False
    return True


# ---------------------------------------------------------------- corpus


def _acyclic(n, directed) -> bool:
    indeg = Counter(b for _, b in directed)
    ready = [v for v in range(n) if indeg[v] == 0]
    seen = 0
    while ready:
        v = ready.pop()
        seen += 1
        for a, b in directed:
            if a == v:
                indeg[b] -= 1
                if indeg[b] == 0:
                    ready.append(b)
    return seen == n


def mixed_graph_corpus(max_vertices: int, max_edges: int, up_to_isomorphism: bool = True) -> list[MixedGraph]:
    """All acyclic mixed graphs on 1..max_vertices vertices labelled 1..n
    with at most ``max_edges`` edges, one per isomorphism class."""
    graphs = []
    for n in range(1, max_vertices + 1):
        slots = [("d", i, j) for i in range(n) for j in range(n) if i != j]
        slots += [("b", i, j) for i in range(n) for j in range(i + 1, n)]
        seen = set()
        perms = list(itertools.permutations(range(n)))
        for k in range(max_edges + 1):
            for edges in itertools.combinations(slots, k):
                directed = [(i, j) for t, i, j in edges if t == "d"]
                if not _acyclic(n, directed):
                    continue
                if up_to_isomorphism:
                    canon = min(
                        tuple(sorted((t, p[i], p[j]) if t == "d" else (t, *sorted((p[i], p[j]))) for t, i, j in edges))
                        for p in perms
                    )
                    if canon in seen:
                        continue
                    seen.add(canon)
                lab = lambda i: str(i + 1)
                graphs.append(MixedGraph(
                    [lab(i) for i in range(n)],
                    [(lab(i), lab(j)) for t, i, j in edges if t == "d"],
                    [(lab(i), lab(j)) for t, i, j in edges if t == "b"],
                ))
    return graphs


def subsets_containing(V, S):
    rest = [v for v in V if v not in S]
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            yield [v for v in V if v in S or v in extra]
