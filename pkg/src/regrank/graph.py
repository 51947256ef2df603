"""Graphs with loops, biclique coverings, chromatic number and biclique
partition number.

A biclique ``(A, B)`` covers the oriented edge ``(a, b)`` for every
``a in A``, ``b in B``.  An undirected edge ``{u, v}`` is covered once per
oriented incidence, so a biclique with ``u, v in A & B`` covers it twice; a
loop ``{u, u}`` is covered once per biclique with ``u in A & B``.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .matrix import BoolMatrix, Rectangle
from .rank import DEFAULT_NODE_BUDGET, RectangleSet, verify_rectangles


class GraphError(ValueError):
    pass


def _norm(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[tuple[int, int]]

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        es = set()
        for e in edges:
            u, v = e
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {tuple(e)} has an endpoint outside [0, {n})")
            es.add(_norm(u, v))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", frozenset(es))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, combinations(range(n), 2))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls(n, ((i, (i + 1) % n) for i in range(n)))

    @classmethod
    def petersen(cls) -> "Graph":
        outer = [(i, (i + 1) % 5) for i in range(5)]
        spokes = [(i, i + 5) for i in range(5)]
        inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        return cls(10, outer + spokes + inner)

    def adjacency(self) -> list[int]:
        """Neighbourhood bitmasks (a loop puts ``v`` in its own mask)."""
        adj = [0] * self.n
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return adj

    def has_edge(self, u: int, v: int) -> bool:
        return _norm(u, v) in self.edges

    @property
    def loops(self) -> list[int]:
        return sorted(u for u, v in self.edges if u == v)

    @property
    def is_simple(self) -> bool:
        return not any(u == v for u, v in self.edges)

    def degrees(self) -> list[int]:
        # a loop contributes one to the degree (adjacency-count convention)
        return [m.bit_count() for m in self.adjacency()]

    def regular_degree(self) -> int | None:
        ds = self.degrees()
        if not ds:
            return 0
        return ds[0] if all(d == ds[0] for d in ds) else None

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph, relabelled to ``0..len-1``; returns it with the
        list mapping new labels to old."""
        vs = sorted(set(vertices))
        pos = {v: i for i, v in enumerate(vs)}
        es = [(pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos]
        return Graph(len(vs), es), vs

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in sorted(self.edges)]}

    @classmethod
    def from_json(cls, obj: dict) -> "Graph":
        try:
            return cls(int(obj["n"]), [tuple(e) for e in obj["edges"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphError(f"malformed graph JSON: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class Biclique:
    A: frozenset[int]
    B: frozenset[int]

    def __init__(self, A: Iterable[int], B: Iterable[int]):
        object.__setattr__(self, "A", frozenset(A))
        object.__setattr__(self, "B", frozenset(B))

    def oriented_edges(self) -> Iterable[tuple[int, int]]:
        for a in self.A:
            for b in self.B:
                yield a, b

    @property
    def size(self) -> int:
        return len(self.A) * len(self.B)


@dataclass(frozen=True)
class BicliqueCovering:
    t: int
    bicliques: tuple[Biclique, ...]

    def __init__(self, t: int, bicliques: Iterable[Biclique]):
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "bicliques", tuple(bicliques))

    def __len__(self) -> int:
        return len(self.bicliques)

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "bicliques": [{"A": sorted(b.A), "B": sorted(b.B)} for b in self.bicliques],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BicliqueCovering":
        try:
            return cls(int(obj["t"]), [Biclique(b["A"], b["B"]) for b in obj["bicliques"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphError(f"malformed covering JSON: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


# coverage ------------------------------------------------------------------------


def coverage_counts(C: Iterable[Biclique]) -> dict[tuple[int, int], int]:
    """Oriented-incidence coverage of every vertex pair touched by ``C``."""
    cnt: dict[tuple[int, int], int] = defaultdict(int)
    for bc in C:
        for a, b in bc.oriented_edges():
            cnt[_norm(a, b)] += 1
    return cnt


def coverage_count(G: Graph, C: Iterable[Biclique], e: Sequence[int]) -> int:
    u, v = e
    if not G.has_edge(u, v):
        raise GraphError(f"{tuple(e)} is not an edge")
    total = 0
    for bc in C:
        if u == v:
            total += u in bc.A and u in bc.B
        else:
            total += (u in bc.A and v in bc.B) + (v in bc.A and u in bc.B)
    return total


def is_biclique_of(G: Graph, bc: Biclique) -> bool:
    adj = G.adjacency()
    bmask = sum(1 << b for b in bc.B)
    return all(adj[a] & bmask == bmask for a in bc.A)


def verify_covering(G: Graph, C: BicliqueCovering) -> bool:
    """Every member is a biclique of ``G`` and each edge is covered between 1
    and ``C.t`` times; non-edges are never covered."""
    for bc in C.bicliques:
        if any(not 0 <= x < G.n for x in bc.A | bc.B):
            raise GraphError("biclique vertex out of range")
        if not is_biclique_of(G, bc):
            return False
    cnt = coverage_counts(C.bicliques)
    if any(e not in G.edges for e in cnt):
        return False
    return all(1 <= cnt.get(e, 0) <= C.t for e in G.edges)


# chromatic number ----------------------------------------------------------------


class BudgetExhausted(RuntimeError):
    pass


def _require_simple(G: Graph, what: str) -> None:
    if not G.is_simple:
        raise GraphError(f"{what} is undefined for a graph with loops")


def _greedy_clique(adj: list[int], n: int) -> list[int]:
    best: list[int] = []
    for start in range(n):
        clique = [start]
        cand = adj[start]
        while cand:
            # vertex with most neighbours among the candidates
            v = max(_bits(cand), key=lambda w: ((adj[w] & cand).bit_count(), -w))
            clique.append(v)
            cand &= adj[v]
        if len(clique) > len(best):
            best = clique
    return best


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _color_search(adj: list[int], n: int, k: int, budget: float, counter: list[int], seed_clique: list[int]):
    """DSATUR backtracking for a proper ``k``-coloring; returns a color list or None."""
    color = [-1] * n
    class_mask = [0] * k
    for c, v in enumerate(seed_clique[:k]):
        color[v] = c
        class_mask[c] |= 1 << v
    if len(seed_clique) > k:
        return None

    def pick() -> int:
        best, key = -1, None
        for v in range(n):
            if color[v] >= 0:
                continue
            sat = sum(1 for c in range(k) if adj[v] & class_mask[c])
            kk = (sat, (adj[v]).bit_count(), -v)
            if key is None or kk > key:
                best, key = v, kk
        return best

    def rec(colored: int, used: int) -> bool:
        counter[0] += 1
        if counter[0] > budget:
            raise BudgetExhausted
        if colored == n:
            return True
        v = pick()
        # new colors are interchangeable: only try the first unused one
        for c in range(min(used + 1, k)):
            if adj[v] & class_mask[c]:
                continue
            color[v] = c
            class_mask[c] |= 1 << v
            if rec(colored + 1, max(used, c + 1)):
                return True
            class_mask[c] &= ~(1 << v)
            color[v] = -1
        return False

    if rec(len(seed_clique), len(seed_clique)):
        return list(color)
    return None


def find_coloring(G: Graph, k: int, node_budget: int | None = DEFAULT_NODE_BUDGET) -> list[int] | None:
    """A proper coloring with at most ``k`` colors, or ``None``."""
    _require_simple(G, "coloring")
    if G.n == 0:
        return []
    if k <= 0:
        return None
    adj = G.adjacency()
    budget = math.inf if not node_budget else node_budget
    return _color_search(adj, G.n, k, budget, [0], _greedy_clique(adj, G.n))


def k_colorable(G: Graph, c: int, node_budget: int | None = DEFAULT_NODE_BUDGET) -> bool:
    return find_coloring(G, c, node_budget) is not None


def greedy_coloring(G: Graph) -> list[int]:
    """DSATUR greedy coloring (upper bound)."""
    adj = G.adjacency()
    color = [-1] * G.n
    for _ in range(G.n):
        v = max(
            (w for w in range(G.n) if color[w] < 0),
            key=lambda w: (len({color[u] for u in _bits(adj[w]) if color[u] >= 0}), adj[w].bit_count(), -w),
        )
        taken = {color[u] for u in _bits(adj[v]) if color[u] >= 0}
        color[v] = next(c for c in range(G.n + 1) if c not in taken)
    return color


def optimal_coloring(G: Graph, node_budget: int | None = DEFAULT_NODE_BUDGET) -> list[int]:
    """A proper coloring with ``chi(G)`` colors.

    Lower bound from a greedy clique, upper bound from DSATUR greedy; the
    gap is closed by ``k``-colorability searches from the bottom up.
    """
    _require_simple(G, "chromatic number")
    if G.n == 0:
        return []
    adj = G.adjacency()
    budget = math.inf if not node_budget else node_budget
    counter = [0]
    clique = _greedy_clique(adj, G.n)
    best = greedy_coloring(G)
    upper = max(best) + 1
    for k in range(len(clique), upper):
        col = _color_search(adj, G.n, k, budget, counter, clique)
        if col is not None:
            return col
    return best


def chromatic_number(G: Graph, node_budget: int | None = DEFAULT_NODE_BUDGET) -> int:
    col = optimal_coloring(G, node_budget)
    return max(col) + 1 if col else 0


def is_proper_coloring(G: Graph, coloring: Sequence[int]) -> bool:
    return len(coloring) == G.n and all(coloring[u] != coloring[v] for u, v in G.edges)


# biclique partition number ----------------------------------------------------------


@dataclass(frozen=True)
class BpResult:
    value: int
    covering: BicliqueCovering
    optimal: bool


def bp_exact(G: Graph, node_budget: int | None = DEFAULT_NODE_BUDGET) -> BpResult:
    """Minimum number of edge-disjoint bicliques partitioning ``E(G)``.

    Branches on the lexicographically first uncovered edge ``(u, v)``; the
    biclique through it has ``u`` on one side and ``v`` on the other, and
    every vertex involved is at least ``u`` (``B``-side vertices at least ``v``),
    because all earlier edges are already covered.
    """
    _require_simple(G, "biclique partition number")
    n = G.n
    U0 = G.adjacency()
    total = len(G.edges)
    if total == 0:
        return BpResult(0, BicliqueCovering(1, ()), True)
    budget = math.inf if not node_budget else node_budget
    nodes = [0]

    def first_edge(U):
        for u in range(n):
            higher = U[u] >> (u + 1)
            if higher:
                low = higher & -higher
                return u, u + low.bit_length()
        return None

    def candidates(U, u, v):
        ge_u = ~((1 << u) - 1)
        ge_v = ~((1 << v) - 1)
        a_pool = [a for a in _bits(U[v] & ge_u) if a != u]
        out = []

        def grow(k, amask, common):
            rest = common & ge_v & ~(1 << v)
            sub = rest
            while True:
                bmask = sub | (1 << v)
                out.append((amask, bmask, amask.bit_count() * bmask.bit_count()))
                if sub == 0:
                    break
                sub = (sub - 1) & rest
            for idx in range(k, len(a_pool)):
                a = a_pool[idx]
                grow(idx + 1, amask | (1 << a), common & U[a])

        grow(0, 1 << u, U[u])
        out.sort(key=lambda t: (-t[2], t[0], t[1]))
        return out

    def lower_bound(U, left):
        return max(_inertia_bound(U), _edge_fooling_bound(U))

    def _edge_fooling_bound(U):
        # greedy set of uncovered edges no two of which share a biclique
        chosen = []
        for u in range(n):
            for v in _bits(U[u] >> (u + 1)):
                v += u + 1
                ok = True
                for a, b in chosen:
                    if (U[a] >> v & 1 and U[u] >> b & 1) or (U[a] >> u & 1 and U[b] >> v & 1):
                        ok = False
                        break
                if ok:
                    chosen.append((u, v))
        return len(chosen)

    def apply(U, amask, bmask):
        V = list(U)
        for a in _bits(amask):
            V[a] &= ~bmask
        for b in _bits(bmask):
            V[b] &= ~amask
        return V

    # greedy incumbent
    U = list(U0)
    greedy = []
    while (e := first_edge(U)) is not None:
        a, b, _ = candidates(U, *e)[0]
        greedy.append((a, b))
        U = apply(U, a, b)
    best = {"val": len(greedy), "sol": greedy}
    root_lb = lower_bound(U0, total)

    def search(U, left, chosen):
        nodes[0] += 1
        if nodes[0] > budget:
            raise BudgetExhausted
        if left == 0:
            if len(chosen) < best["val"]:
                best["val"], best["sol"] = len(chosen), list(chosen)
            return
        if len(chosen) + max(1, lower_bound(U, left)) >= best["val"]:
            return
        u, v = first_edge(U)
        for amask, bmask, size in candidates(U, u, v):
            chosen.append((amask, bmask))
            search(apply(U, amask, bmask), left - size, chosen)
            chosen.pop()
            if best["val"] <= max(root_lb, len(chosen) + 1):
                return

    optimal = True
    if best["val"] > root_lb:
        try:
            search(U0, total, [])
        except BudgetExhausted:
            optimal = False
    cov = BicliqueCovering(1, [Biclique(_bits(a), _bits(b)) for a, b in best["sol"]])
    return BpResult(best["val"], cov, optimal)


def _charpoly(a: list[list[int]]) -> list[int]:
    """Coefficients ``c_0..c_n`` of ``det(x I - a)`` (descending powers), by
    the Faddeev-LeVerrier recursion, exact over the integers."""
    n = len(a)
    coeffs = [1]
    m = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        c_prev = coeffs[-1]
        # m <- a @ m + c_prev * I
        m = [
            [sum(a[i][t] * m[t][j] for t in range(n) if a[i][t]) + (c_prev if i == j else 0) for j in range(n)]
            for i in range(n)
        ]
        tr = sum(a[i][t] * m[t][i] for i in range(n) for t in range(n) if a[i][t])
        coeffs.append(-tr // k)
    return coeffs


def _sign_changes(seq: list[int]) -> int:
    signs = [x > 0 for x in seq if x]
    return sum(1 for p, q in zip(signs, signs[1:]) if p != q)


def _inertia_bound(U: list[int]) -> int:
    """``max(n_+, n_-)`` of the adjacency matrix of the graph with neighbourhoods
    ``U``; each biclique contributes one positive and one negative eigenvalue,
    so this bounds the number of bicliques in any partition.  The polynomial is
    real-rooted, so Descartes' sign rule counts the roots exactly."""
    vs = [v for v in range(len(U)) if U[v]]
    if not vs:
        return 0
    a = [[(U[x] >> y) & 1 for y in vs] for x in vs]
    c = _charpoly(a)
    n = len(vs)
    pos = _sign_changes(c)
    neg = _sign_changes([ck * (-1) ** (n - k) for k, ck in enumerate(c)])
    return max(pos, neg)


# t-covering to partition --------------------------------------------------------------


def partition_from_t_covering(H: Graph, C: BicliqueCovering) -> tuple[Graph, BicliqueCovering]:
    """Biclique partition of ``H' = (V, E')``, ``E'`` the edges covered exactly
    ``t`` times by ``C``, with at most ``(2k)^t`` bicliques.

    Each edge of ``E'`` is labelled by the sorted indices of the bicliques
    covering it plus the side pattern of one endpoint; the endpoint is chosen
    so that it lies in ``A`` of the lowest-indexed covering biclique.  Edges
    with equal labels form a biclique.
    """
    _require_simple(H, "partition_from_t_covering")
    if not verify_covering(H, C):
        raise GraphError("input is not a valid t-biclique covering")
    t = C.t
    incid: dict[tuple[int, int], list[tuple[int, int, int]]] = defaultdict(list)
    for idx, bc in enumerate(C.bicliques):
        for a, b in bc.oriented_edges():
            # (biclique index, A-endpoint, B-endpoint)
            incid[_norm(a, b)].append((idx, a, b))
    groups: dict[tuple, tuple[set[int], set[int]]] = {}
    e_prime = []
    for e, inc in sorted(incid.items()):
        if len(inc) != t:
            continue
        e_prime.append(e)
        inc.sort()
        u = inc[0][1]  # A-side endpoint of the lowest-indexed biclique
        v = e[0] if e[1] == u else e[1]
        indices = tuple(i for i, _, _ in inc)
        side = tuple(0 if a == u else 1 for _, a, _ in inc)
        U, W = groups.setdefault((indices, side), (set(), set()))
        U.add(u)
        W.add(v)
    bicliques = [Biclique(U, W) for _, (U, W) in sorted(groups.items())]
    return Graph(H.n, e_prime), BicliqueCovering(1, bicliques)


# matrix bridge ------------------------------------------------------------------------


def adjacency_matrix(G: Graph) -> BoolMatrix:
    if G.n == 0:
        raise GraphError("adjacency matrix of the empty graph has no rows")
    return BoolMatrix(G.n, G.n, tuple(G.adjacency()))


def rectangles_from_bicliques(G: Graph, P: BicliqueCovering) -> RectangleSet:
    """``A x B`` and ``B x A`` for each biclique of a partition of ``G``."""
    _require_simple(G, "rectangles_from_bicliques")
    if P.t != 1 or not verify_covering(G, P):
        raise GraphError("input is not a biclique partition of G")
    rects = []
    for bc in P.bicliques:
        if bc.A and bc.B:
            rects.append(Rectangle(tuple(bc.A), tuple(bc.B)))
            rects.append(Rectangle(tuple(bc.B), tuple(bc.A)))
    return RectangleSet("partition", tuple(rects))


def coloring_from_zero_cover(G: Graph, cover: RectangleSet) -> list[int]:
    """Color ``j`` by the first rectangle of a zero cover of the adjacency
    matrix that contains the diagonal cell ``(j, j)``; colors are compacted
    to ``0..c-1`` in order of first use."""
    from .matrix import complement

    _require_simple(G, "coloring_from_zero_cover")
    if not verify_rectangles(complement(adjacency_matrix(G)), cover):
        raise GraphError("input is not a cover of the zeros of the adjacency matrix")
    raw = []
    for j in range(G.n):
        raw.append(next(i for i, r in enumerate(cover.rects) if j in r.row_set and j in r.col_set))
    relabel: dict[int, int] = {}
    return [relabel.setdefault(c, len(relabel)) for c in raw]
