"""Exact binary rank (rectangle partition of the ones) and Boolean rank
(rectangle cover of the ones), with verifiable certificates.

Both solvers are depth-first branch and bound over bitset rows with an
explicit node budget.  When the budget runs out the best certificate found
so far is returned with ``optimal=False``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Literal

from .matrix import BoolMatrix, Rectangle, complement, integer_rank, real_rank

DEFAULT_NODE_BUDGET = 10**7

Kind = Literal["partition", "cover"]


@dataclass(frozen=True)
class RectangleSet:
    kind: Kind
    rects: tuple[Rectangle, ...] = ()

    def __post_init__(self):
        if self.kind not in ("partition", "cover"):
            raise ValueError(f"unknown rectangle-set kind {self.kind!r}")
        object.__setattr__(self, "rects", tuple(self.rects))

    def __len__(self) -> int:
        return len(self.rects)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "rects": [{"rows": list(r.row_set), "cols": list(r.col_set)} for r in self.rects],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RectangleSet":
        try:
            rects = [Rectangle(tuple(r["rows"]), tuple(r["cols"])) for r in obj["rects"]]
            return cls(obj["kind"], tuple(rects))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed certificate JSON: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class RankResult:
    value: int
    certificate: RectangleSet
    optimal: bool
    nodes: int = field(default=0, compare=False)


def verify_rectangles(M: BoolMatrix, S: RectangleSet) -> bool:
    """True iff every rectangle is all-ones in ``M``, the rectangles cover
    exactly the ones of ``M`` and, for a partition, are pairwise disjoint."""
    covered = [0] * M.rows
    for rect in S.rects:
        if not rect.in_bounds(M):
            raise IndexError(f"rectangle {rect} out of bounds for {M.rows}x{M.cols}")
        cm = rect.col_mask
        for i in rect.row_set:
            if M.bits[i] & cm != cm:
                return False
            if S.kind == "partition" and covered[i] & cm:
                return False
            covered[i] |= cm
    return tuple(covered) == M.bits


class _BudgetExhausted(Exception):
    pass


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _popcount_rows(rows) -> int:
    return sum(r.bit_count() for r in rows)


def maximal_rectangles(M: BoolMatrix) -> list[Rectangle]:
    """All inclusion-maximal all-ones rectangles of ``M``, in canonical order."""
    return [Rectangle.from_masks(p, q) for p, q in _concepts(M.bits, M.cols)]


def _concepts(rows: tuple[int, ...], ncols: int) -> list[tuple[int, int]]:
    # column sets closed under intersection generated by the non-zero rows
    intents: set[int] = set()
    frontier = {r for r in rows if r}
    while frontier:
        intents |= frontier
        nxt = set()
        for a in frontier:
            for b in intents:
                c = a & b
                if c and c not in intents:
                    nxt.add(c)
        frontier = nxt
    out = []
    for q in intents:
        p = 0
        for i, r in enumerate(rows):
            if r & q == q:
                p |= 1 << i
        out.append((p, q))
    out.sort(key=lambda pq: (-(pq[0].bit_count() * pq[1].bit_count()), pq[0], pq[1]))
    return out


def _fooling_bound(cells: list[tuple[int, int]], rows: list[int]) -> int:
    """Greedy fooling set: ones no two of which fit in one all-ones rectangle
    of the 0,1 pattern ``rows``."""
    chosen: list[tuple[int, int]] = []
    for r2, c2 in cells:
        ok = True
        for r1, c1 in chosen:
            if rows[r1] >> c2 & 1 and rows[r2] >> c1 & 1:
                ok = False
                break
        if ok:
            chosen.append((r2, c2))
    return len(chosen)


def _cells(rows) -> list[tuple[int, int]]:
    return [(i, j) for i, r in enumerate(rows) for j in _iter_bits(r)]


def _budget(node_budget: int | None) -> float:
    return math.inf if not node_budget else node_budget


# binary rank -------------------------------------------------------------


def binary_rank(M: BoolMatrix, node_budget: int | None = DEFAULT_NODE_BUDGET) -> RankResult:
    """Minimum partition of the ones of ``M`` into all-ones rectangles.

    Branches on the first uncovered one in row-major order; that cell must be
    the top-left corner of whichever rectangle covers it, so only rows and
    columns at or after it are candidates.  ``node_budget`` of 0 or ``None``
    means unlimited.
    """
    rows = M.bits
    total = _popcount_rows(rows)
    if total == 0:
        return RankResult(0, RectangleSet("partition"), True, 0)

    max_area = max(p.bit_count() * q.bit_count() for p, q in _concepts(rows, M.cols))
    root_lb = max(
        real_rank(M),
        _fooling_bound(_cells(rows), list(rows)),
        -(-total // max_area),
    )
    budget = _budget(node_budget)
    nrows = M.rows
    state = {"nodes": 0}

    ncols = M.cols

    def lower_bound(U: list[int], left: int) -> int:
        # a partition of the residual ones is a sum of rank-one 0,1 matrices
        rk = integer_rank([[(r >> j) & 1 for j in range(ncols)] for r in U if r])
        return max(rk, -(-left // max_area), _fooling_bound(_cells(U), U) if left <= 256 else 1)

    def candidates(U: list[int]):
        r = next(i for i in range(nrows) if U[i])
        low = U[r] & -U[r]
        c = low.bit_length() - 1
        others = [i for i in range(r + 1, nrows) if U[i] & low]
        out = []

        def grow_rows(k: int, pmask: int, common: int):
            # common always contains the corner column c
            rest = common ^ low
            q_sub = rest
            while True:
                q = q_sub | low
                out.append((pmask, q, pmask.bit_count() * q.bit_count()))
                if q_sub == 0:
                    break
                q_sub = (q_sub - 1) & rest
            for idx in range(k, len(others)):
                i = others[idx]
                nc = common & U[i]
                grow_rows(idx + 1, pmask | (1 << i), nc)

        grow_rows(0, 1 << r, U[r])
        out.sort(key=lambda t: (-t[2], t[0], t[1]))
        return out

    def search(U: list[int], left: int, chosen: list[tuple[int, int]]):
        state["nodes"] += 1
        if state["nodes"] > budget:
            raise _BudgetExhausted
        if left == 0:
            if len(chosen) < state["best_val"]:
                state["best_val"] = len(chosen)
                state["best"] = list(chosen)
            return
        if len(chosen) + lower_bound(U, left) >= state["best_val"]:
            return
        for pmask, q, area in candidates(U):
            V = list(U)
            for i in _iter_bits(pmask):
                V[i] &= ~q
            chosen.append((pmask, q))
            search(V, left - area, chosen)
            chosen.pop()
            if state["best_val"] <= max(root_lb, len(chosen) + 1):
                return

    # greedy descent as initial incumbent
    U = list(rows)
    greedy = []
    while any(U):
        pmask, q, _ = candidates(U)[0]
        greedy.append((pmask, q))
        for i in _iter_bits(pmask):
            U[i] &= ~q
    state["best"], state["best_val"] = greedy, len(greedy)

    optimal = True
    if state["best_val"] > root_lb:
        try:
            search(list(rows), total, [])
        except _BudgetExhausted:
            optimal = False
    rects = tuple(Rectangle.from_masks(p, q) for p, q in state["best"])
    cert = RectangleSet("partition", rects)
    return RankResult(len(rects), cert, optimal, state["nodes"])


# boolean rank ------------------------------------------------------------


def boolean_rank(M: BoolMatrix, node_budget: int | None = DEFAULT_NODE_BUDGET) -> RankResult:
    """Minimum cover of the ones of ``M`` by all-ones rectangles.

    Set cover over the maximal rectangles: branch on the uncovered one with
    the fewest maximal rectangles through it.
    """
    rows = M.bits
    total = _popcount_rows(rows)
    if total == 0:
        return RankResult(0, RectangleSet("cover"), True, 0)
    concepts = _concepts(rows, M.cols)
    max_area = concepts[0][0].bit_count() * concepts[0][1].bit_count()
    by_cell: dict[tuple[int, int], list[int]] = {}
    for idx, (p, q) in enumerate(concepts):
        for i in _iter_bits(p):
            for j in _iter_bits(q):
                by_cell.setdefault((i, j), []).append(idx)
    full_rows = list(rows)
    root_lb = max(_fooling_bound(_cells(rows), full_rows), -(-total // max_area))
    budget = _budget(node_budget)
    state = {"nodes": 0}

    # greedy cover as initial incumbent
    U = list(rows)
    greedy = []
    while any(U):
        best_idx = max(
            range(len(concepts)),
            key=lambda k: (_gain(concepts[k], U), -k),
        )
        greedy.append(best_idx)
        p, q = concepts[best_idx]
        for i in _iter_bits(p):
            U[i] &= ~q
    state["best"] = greedy
    state["best_val"] = len(greedy)

    def search(U: list[int], left: int, chosen: list[int]):
        state["nodes"] += 1
        if state["nodes"] > budget:
            raise _BudgetExhausted
        if left == 0:
            if len(chosen) < state["best_val"]:
                state["best_val"] = len(chosen)
                state["best"] = list(chosen)
            return
        cells = _cells(U)
        lb = max(-(-left // max_area), _fooling_bound(cells, full_rows))
        if len(chosen) + lb >= state["best_val"]:
            return
        cell = min(cells, key=lambda ij: (len(by_cell[ij]), ij))
        opts = sorted(by_cell[cell], key=lambda k: (-_gain(concepts[k], U), k))
        for k in opts:
            p, q = concepts[k]
            V = list(U)
            gained = 0
            for i in _iter_bits(p):
                gained += (V[i] & q).bit_count()
                V[i] &= ~q
            chosen.append(k)
            search(V, left - gained, chosen)
            chosen.pop()
            if state["best_val"] <= max(root_lb, len(chosen) + 1):
                return

    optimal = True
    if state["best_val"] > root_lb:
        try:
            search(list(rows), total, [])
        except _BudgetExhausted:
            optimal = False
    rects = tuple(Rectangle.from_masks(*concepts[k]) for k in state["best"])
    return RankResult(len(rects), RectangleSet("cover", rects), optimal, state["nodes"])


def _gain(concept: tuple[int, int], U: list[int]) -> int:
    p, q = concept
    return sum((U[i] & q).bit_count() for i in _iter_bits(p))


# communication measures ---------------------------------------------------


def ceil_log2(x: int) -> int:
    """``ceil(log2 x)`` with the convention that ranks 0 and 1 give 0."""
    return 0 if x <= 1 else (x - 1).bit_length()


@dataclass(frozen=True)
class CCMeasures:
    np_cc: int
    conp_cc: int
    up_cc: int
    optimal: bool


def cc_measures(M: BoolMatrix, node_budget: int | None = DEFAULT_NODE_BUDGET) -> CCMeasures:
    """Non-deterministic, co-non-deterministic and unambiguous communication
    complexity of the problem of ``M``, from exact ranks."""
    bool_m = boolean_rank(M, node_budget)
    bool_c = boolean_rank(complement(M), node_budget)
    bin_m = binary_rank(M, node_budget)
    return CCMeasures(
        ceil_log2(bool_m.value),
        ceil_log2(bool_c.value),
        ceil_log2(bin_m.value),
        bool_m.optimal and bool_c.optimal and bin_m.optimal,
    )
