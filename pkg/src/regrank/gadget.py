"""Two-party gadgets, composition, discrepancy, Hadamard/Lindsey checks and
the lifted unambiguous rectangle partition.

Block encoding: a row index of a composed matrix packs ``n`` blocks of
``ell`` bits, block 1 most significant; within a block, bit 1 is most
significant.  So block ``i`` of index ``x`` is ``(x >> ell*(n-i)) & (2**ell-1)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .boolfn import Dnf, TruthTable, dnf_function, is_unambiguous
from .matrix import BoolMatrix, Rectangle, is_regular
from .rank import RectangleSet

COMPOSE_SIDE_CAP = 1 << 12
EXACT_DISC_MAX_SIDE = 16


@dataclass(frozen=True)
class Gadget:
    ell: int
    table: BoolMatrix

    def __post_init__(self):
        side = 1 << self.ell
        if self.ell < 1:
            raise ValueError("gadget block length must be at least 1")
        if self.table.shape != (side, side):
            raise ValueError(f"gadget table must be {side}x{side}")

    @property
    def side(self) -> int:
        return 1 << self.ell

    def __call__(self, x: int, y: int) -> int:
        return self.table[x, y]


def _bits(v: int, ell: int) -> list[int]:
    return [(v >> (ell - 1 - i)) & 1 for i in range(ell)]


def _gadget_from(ell: int, fn) -> Gadget:
    if ell < 1:
        raise ValueError("ell must be at least 1")
    side = 1 << ell
    grid = [[fn(_bits(x, ell), _bits(y, ell)) for y in range(side)] for x in range(side)]
    return Gadget(ell, BoolMatrix.from_rows(grid))


def gadget_gl(ell: int) -> Gadget:
    """``x_1 + y_1 + sum_{i>=2} x_i y_i  (mod 2)``."""
    return _gadget_from(ell, lambda x, y: (x[0] + y[0] + sum(a * b for a, b in zip(x[1:], y[1:]))) % 2)


def gadget_ip(ell: int) -> Gadget:
    """Inner product mod 2."""
    return _gadget_from(ell, lambda x, y: sum(a * b for a, b in zip(x, y)) % 2)


def constant_gadget(ell: int, value: int) -> Gadget:
    side = 1 << ell
    M = BoolMatrix.ones(side) if value else BoolMatrix.zeros(side)
    return Gadget(ell, M)


def gadget_by_name(name: str, ell: int) -> Gadget:
    try:
        return {"gl": gadget_gl, "ip": gadget_ip}[name](ell)
    except KeyError:
        raise ValueError(f"unknown gadget {name!r} (expected 'gl' or 'ip')") from None


def is_strongly_unbiased(g: Gadget) -> bool:
    return is_regular(g.table) == 1 << (g.ell - 1)


# composition ----------------------------------------------------------------


def block_of(index: int, i: int, ell: int, n: int) -> int:
    """Block ``i`` (1-based) of a packed index."""
    return (index >> (ell * (n - i))) & ((1 << ell) - 1)


def compose(f: TruthTable, g: Gadget, n: int | None = None, side_cap: int = COMPOSE_SIDE_CAP) -> BoolMatrix:
    """Matrix of ``f o g^n``: entry ``(x, y)`` is ``f(g(x_1,y_1), ..., g(x_n,y_n))``."""
    n = f.n if n is None else n
    if f.n != n:
        raise ValueError(f"f has {f.n} variables but n = {n}")
    side = 1 << (g.ell * n)
    if side > side_cap:
        raise ValueError(f"composed matrix side {side} exceeds cap {side_cap}")
    gt = g.table.to_numpy(np.int64)
    # z index (z_1 most significant) of g^n(x, y), built block by block
    z = np.zeros((side, side), dtype=np.int64)
    xs = np.arange(side)
    for i in range(1, n + 1):
        bx = (xs >> (g.ell * (n - i))) & (g.side - 1)
        z = (z << 1) | gt[np.ix_(bx, bx)]
    fv = np.array(f.values, dtype=np.int64)
    return BoolMatrix.from_numpy(fv[z])


# discrepancy ------------------------------------------------------------------


def _sign_matrix(g: Gadget) -> np.ndarray:
    """+1 where g = 0, -1 where g = 1."""
    return 1 - 2 * g.table.to_numpy(np.int64)


def discrepancy_exact(g: Gadget) -> Fraction:
    """Maximum over rectangles of ``|P[g=0, R] - P[g=1, R]|`` under uniform inputs.

    Enumerates row subsets; for a fixed row subset the best column subset
    takes every column whose restricted signed sum is positive (or, for the
    negative side, negative).
    """
    side = g.side
    if side > EXACT_DISC_MAX_SIDE:
        raise ValueError(f"exact discrepancy needs side <= {EXACT_DISC_MAX_SIDE}, got {side}")
    N = _sign_matrix(g)
    subsets = ((np.arange(1 << side)[:, None] >> np.arange(side)[None, :]) & 1).astype(np.int64)
    col_sums = subsets @ N
    pos = np.where(col_sums > 0, col_sums, 0).sum(axis=1)
    neg = np.where(col_sums < 0, -col_sums, 0).sum(axis=1)
    best = int(max(pos.max(), neg.max()))
    return Fraction(best, side * side)


def discrepancy_sample(g: Gadget, trials: int, seed: int = 0) -> Fraction:
    """Lower bound on the discrepancy by randomized alternating maximization.

    Each trial starts from a random row subset, then alternately picks the
    optimal columns for the rows and the optimal rows for the columns until
    the imbalance stops improving.  Every value reported is the imbalance
    of an actual rectangle, so the result never exceeds the true discrepancy.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    side = g.side
    N = _sign_matrix(g)
    rng = np.random.default_rng(seed)
    best = 0
    batch = 4096
    done = 0
    while done < trials:
        t = min(batch, trials - done)
        done += t
        for sign in (1, -1):
            S = sign * N
            rows = rng.integers(0, 2, size=(t, side))
            value = np.full(t, -1)
            for _ in range(4 * side):
                cols = ((rows @ S) > 0).astype(np.int64)
                rows = ((cols @ S.T) > 0).astype(np.int64)
                cur = np.einsum("ti,ij,tj->t", rows, S, cols)
                if np.all(cur <= value):
                    break
                value = np.maximum(value, cur)
            best = max(best, int(value.max()))
    return Fraction(best, side * side)


def discrepancy_bound_holds(value: Fraction, ell: int) -> bool:
    """Exact test of ``value <= 2**(-(ell+3)/2)`` via squaring."""
    return value >= 0 and value * value * (1 << (ell + 3)) <= 1


# Hadamard / Lindsey ------------------------------------------------------------


@dataclass(frozen=True)
class SignMatrix:
    side: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.side or any(len(r) != self.side for r in self.entries):
            raise ValueError("sign matrix must be square of the declared side")
        if any(e not in (1, -1) for r in self.entries for e in r):
            raise ValueError("entries must be +1 or -1")

    def to_numpy(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    @property
    def is_hadamard(self) -> bool:
        A = self.to_numpy()
        eye = self.side * np.eye(self.side, dtype=np.int64)
        return bool(np.array_equal(A @ A.T, eye) and np.array_equal(A.T @ A, eye))


def hadamard(ell: int) -> SignMatrix:
    """``(H)_{x,y} = (-1)^{<x,y>}`` on ``{0,1}^ell``."""
    if ell < 0:
        raise ValueError("order must be non-negative")
    side = 1 << ell
    rows = tuple(
        tuple(-1 if (x & y).bit_count() % 2 else 1 for y in range(side)) for x in range(side)
    )
    return SignMatrix(side, rows)


def sign_matrix_of(g: Gadget) -> SignMatrix:
    """``(-1)^{g(x,y)}``."""
    N = _sign_matrix(g)
    return SignMatrix(g.side, tuple(tuple(int(e) for e in row) for row in N))


def lindsey_check(H: SignMatrix) -> bool:
    """Every ``r x s`` submatrix sum is at most ``sqrt(r*s*side)`` in absolute value.

    Exhaustive over row subsets; for each, the extreme column subsets of every
    size ``s`` are prefixes of the sorted column sums.
    """
    if H.side > EXACT_DISC_MAX_SIDE:
        raise ValueError(f"lindsey_check supports side <= {EXACT_DISC_MAX_SIDE}")
    if not H.is_hadamard:
        raise ValueError("input is not a Hadamard matrix")
    side = H.side
    A = H.to_numpy()
    subsets = ((np.arange(1, 1 << side)[:, None] >> np.arange(side)[None, :]) & 1).astype(np.int64)
    r = subsets.sum(axis=1)
    col_sums = np.sort(subsets @ A, axis=1)
    top = np.cumsum(col_sums[:, ::-1], axis=1)
    bottom = np.cumsum(col_sums, axis=1)
    extreme = np.maximum(np.abs(top), np.abs(bottom))
    s = np.arange(1, side + 1)[None, :]
    return bool(np.all(extreme * extreme <= r[:, None] * s * side))


# lifted partition ---------------------------------------------------------------


def lifted_partition(phi: Dnf, g: Gadget, n: int, side_cap: int = COMPOSE_SIDE_CAP) -> RectangleSet:
    """Rectangle partition of the ones of ``compose(f, g, n)`` from an
    unambiguous DNF of ``f``.

    For each clause with variable set ``I`` and each block assignment
    ``(alpha, beta)`` on ``I`` that satisfies the clause under ``g``, emit
    ``{x : x_I = alpha} x {y : y_I = beta}``.
    """
    if not phi.unambiguous or not is_unambiguous(phi, n):
        raise ValueError("lifted_partition needs a DNF that is unambiguous")
    dnf_function(phi, n)  # validates variable range
    ell = g.ell
    side = 1 << (ell * n)
    if side > side_cap:
        raise ValueError(f"composed matrix side {side} exceeds cap {side_cap}")
    idx = np.arange(side)
    blocks = {i: (idx >> (ell * (n - i))) & (g.side - 1) for i in range(1, n + 1)}
    rects = []
    for clause in phi.clauses:
        vars_ = [v for v, _ in clause.fixed]
        want = [b for _, b in clause.fixed]
        # accepted (alpha_i, beta_i) per block, then all combinations across blocks
        per_block = [
            [(a, b) for a in range(g.side) for b in range(g.side) if g(a, b) == w]
            for w in want
        ]
        for combo in product(*per_block):
            rmask = np.ones(side, dtype=bool)
            cmask = np.ones(side, dtype=bool)
            for v, (a, b) in zip(vars_, combo):
                rmask &= blocks[v] == a
                cmask &= blocks[v] == b
            rows_ = tuple(int(i) for i in np.nonzero(rmask)[0])
            cols_ = tuple(int(j) for j in np.nonzero(cmask)[0])
            if rows_ and cols_:
                rects.append(Rectangle(rows_, cols_))
    return RectangleSet("partition", tuple(rects))


def lifted_partition_size_bound(phi: Dnf, ell: int) -> int:
    """``m * 2**(2*ell*k)`` for ``m`` clauses of maximum width ``k``."""
    return len(phi.clauses) * (1 << (2 * ell * phi.width))
