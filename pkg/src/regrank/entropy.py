"""Exact min-entropy and block-density instruments over rational distributions
on pairs of block-structured inputs.

A point of a :class:`BlockDistribution` is a pair ``(x, y)`` of integers in
``[0, 2**(ell*n))``; blocks are packed as in :mod:`regrank.gadget` (block 1
most significant).  Block sets ``I`` are 1-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Mapping

from .gadget import Gadget
from .matrix import Rectangle

MAX_TOTAL_BITS = 10  # ell * n


class EntropyError(ValueError):
    pass


@dataclass(frozen=True)
class MinEntropy:
    max_prob: Fraction
    bits: float

    @classmethod
    def of(cls, p: Fraction) -> "MinEntropy":
        p = Fraction(p)
        bits = math.log2(p.denominator) - math.log2(p.numerator)
        return cls(p, 0.0 if p == 1 else bits)


def min_entropy(D: "BlockDistribution | Mapping[object, Fraction]") -> MinEntropy:
    """``-log2`` of the largest point probability."""
    weights = D.weights if isinstance(D, BlockDistribution) else D
    support = [w for w in weights.values() if w > 0]
    if not support:
        raise EntropyError("empty support")
    return MinEntropy.of(max(support))


def entropy_at_least(max_prob: Fraction, exponent: Fraction) -> bool:
    """Exact test of ``-log2(max_prob) >= exponent`` for rational ``exponent >= 0``:
    ``max_prob**q * 2**p <= 1`` where ``exponent = p/q``."""
    exponent = Fraction(exponent)
    if exponent < 0:
        raise EntropyError("exponent must be non-negative")
    p, q = exponent.numerator, exponent.denominator
    return Fraction(max_prob) ** q * (1 << p) <= 1


class BlockDistribution:
    """Exact probability distribution over ``{0,1}^(ell*n) x {0,1}^(ell*n)``."""

    __slots__ = ("ell", "n", "weights")

    def __init__(self, ell: int, n: int, weights: Mapping[tuple[int, int], Fraction]):
        if ell < 1 or n < 0:
            raise EntropyError("need ell >= 1 and n >= 0")
        if ell * n > MAX_TOTAL_BITS:
            raise EntropyError(f"ell*n = {ell * n} exceeds {MAX_TOTAL_BITS}")
        side = 1 << (ell * n)
        clean: dict[tuple[int, int], Fraction] = {}
        for (x, y), w in weights.items():
            w = Fraction(w)
            if w < 0:
                raise EntropyError("negative weight")
            if not (0 <= x < side and 0 <= y < side):
                raise EntropyError(f"point {(x, y)} out of range")
            if w:
                clean[(x, y)] = clean.get((x, y), Fraction(0)) + w
        if sum(clean.values(), Fraction(0)) != 1:
            raise EntropyError("weights must sum to exactly 1")
        self.ell, self.n = ell, n
        self.weights = dict(sorted(clean.items()))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BlockDistribution)
            and (self.ell, self.n, self.weights) == (other.ell, other.n, other.weights)
        )

    def __repr__(self) -> str:
        return f"BlockDistribution(ell={self.ell}, n={self.n}, support={len(self.weights)})"

    @classmethod
    def uniform(cls, ell: int, n: int, support: Iterable[tuple[int, int]]) -> "BlockDistribution":
        pts = sorted(set(support))
        if not pts:
            raise EntropyError("empty support")
        w = Fraction(1, len(pts))
        return cls(ell, n, {p: w for p in pts})

    @classmethod
    def uniform_all(cls, ell: int, n: int) -> "BlockDistribution":
        side = 1 << (ell * n)
        return cls.uniform(ell, n, ((x, y) for x in range(side) for y in range(side)))

    @classmethod
    def point(cls, ell: int, n: int, x: int, y: int) -> "BlockDistribution":
        return cls(ell, n, {(x, y): Fraction(1)})

    def block(self, v: int, i: int) -> int:
        return (v >> (self.ell * (self.n - i))) & ((1 << self.ell) - 1)

    def key(self, x: int, y: int, I: Iterable[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
        I = tuple(I)
        return tuple(self.block(x, i) for i in I), tuple(self.block(y, i) for i in I)

    def _check_blocks(self, I: Iterable[int]) -> tuple[int, ...]:
        I = tuple(sorted(set(I)))
        if any(not 1 <= i <= self.n for i in I):
            raise EntropyError(f"block set {I} outside 1..{self.n}")
        return I

    def project(self, I: Iterable[int]) -> dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction]:
        """Joint law of ``(X_I, Y_I)``."""
        I = self._check_blocks(I)
        out: dict = {}
        for (x, y), w in self.weights.items():
            k = self.key(x, y, I)
            out[k] = out.get(k, Fraction(0)) + w
        return out

    def marginal_x(self) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for (x, _), w in self.weights.items():
            out[x] = out.get(x, Fraction(0)) + w
        return out

    def marginal_y(self) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for (_, y), w in self.weights.items():
            out[y] = out.get(y, Fraction(0)) + w
        return out

    def probability(self, event: Callable[[int, int], bool]) -> Fraction:
        return sum((w for (x, y), w in self.weights.items() if event(x, y)), Fraction(0))

    def condition(self, event: Callable[[int, int], bool]) -> "BlockDistribution":
        p = self.probability(event)
        if p == 0:
            raise EntropyError("conditioning on a null event")
        return BlockDistribution(
            self.ell, self.n, {xy: w / p for xy, w in self.weights.items() if event(*xy)}
        )

    def condition_on_blocks(self, I: Iterable[int], alpha: tuple[tuple[int, ...], tuple[int, ...]]):
        I = self._check_blocks(I)
        return self.condition(lambda x, y: self.key(x, y, I) == alpha)

    def restrict_blocks(self, keep: Iterable[int]) -> "BlockDistribution":
        """Marginal on the blocks ``keep``, renumbered ``1..len(keep)``."""
        keep = self._check_blocks(keep)
        out: dict[tuple[int, int], Fraction] = {}
        for (xs, ys), w in self.project(keep).items():
            x = y = 0
            for a, b in zip(xs, ys):
                x, y = (x << self.ell) | a, (y << self.ell) | b
            out[(x, y)] = out.get((x, y), Fraction(0)) + w
        return BlockDistribution(self.ell, len(keep), out)


def product(D1: BlockDistribution, D2: BlockDistribution) -> BlockDistribution:
    """Independent joint distribution; blocks of ``D1`` come first."""
    if D1.ell != D2.ell:
        raise EntropyError("block lengths differ")
    shift = D1.ell * D2.n
    w = {
        ((x1 << shift) | x2, (y1 << shift) | y2): a * b
        for (x1, y1), a in D1.weights.items()
        for (x2, y2), b in D2.weights.items()
    }
    return BlockDistribution(D1.ell, D1.n + D2.n, w)


def independent_copies(D: BlockDistribution) -> BlockDistribution:
    """``X`` and ``Y`` drawn independently from the marginals of ``D``."""
    px, py = D.marginal_x(), D.marginal_y()
    return BlockDistribution(D.ell, D.n, {(x, y): a * b for x, a in px.items() for y, b in py.items()})


# density ----------------------------------------------------------------------------


@dataclass(frozen=True)
class DensityResult:
    dense: bool
    witness: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.dense


def _block_subsets(n: int, largest_first: bool = False):
    sizes = range(n, 0, -1) if largest_first else range(1, n + 1)
    for s in sizes:
        yield from combinations(range(1, n + 1), s)


def _violates(D: BlockDistribution, I: tuple[int, ...], delta: Fraction) -> bool:
    maxp = max(D.project(I).values())
    return not entropy_at_least(maxp, delta * 2 * D.ell * len(I))


def is_delta_dense(D: BlockDistribution, delta) -> DensityResult:
    """Every non-empty block set ``I`` has ``H(X_I, Y_I) >= delta * 2 * ell * |I|``.
    On failure the witness is the first violating ``I`` by size, then lexicographically."""
    delta = Fraction(delta)
    if delta < 0:
        raise EntropyError("delta must be non-negative")
    if D.n > 10:
        raise EntropyError("density check enumerates 2**n block sets; n must be <= 10")
    for I in _block_subsets(D.n):
        if _violates(D, I, delta):
            return DensityResult(False, I)
    return DensityResult(True)


@dataclass(frozen=True)
class DenseRestriction:
    fixed: tuple[int, ...]
    alpha: tuple[tuple[int, ...], tuple[int, ...]]
    conditioned: BlockDistribution

    @property
    def remaining(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, self.conditioned.n + 1) if i not in self.fixed)


def find_dense_restriction(D: BlockDistribution, delta) -> DenseRestriction:
    """Fix a largest violating block set to its most likely value.

    The remaining blocks of the conditioned distribution are then
    ``delta``-dense: a violating set there would extend the fixed set to a
    larger violating set of ``D``.
    """
    delta = Fraction(delta)
    if D.n > 10:
        raise EntropyError("n must be <= 10")
    if is_delta_dense(D, delta):
        return DenseRestriction((), ((), ()), D)
    I = next(I for I in _block_subsets(D.n, largest_first=True) if _violates(D, I, delta))
    proj = D.project(I)
    alpha = min(proj, key=lambda k: (-proj[k], k))
    cond = D.condition_on_blocks(I, alpha)
    out = DenseRestriction(I, alpha, cond)
    rest = out.remaining
    if rest and not is_delta_dense(cond.restrict_blocks(rest), delta):
        raise EntropyError("no dense restriction found: conditioned distribution still violates")
    return out


# fibers and uniformity --------------------------------------------------------------------


def _z_bits(z, n: int) -> tuple[int, ...]:
    if isinstance(z, str):
        bits = tuple(int(c) for c in z)
    elif isinstance(z, int):
        bits = tuple((z >> (n - 1 - i)) & 1 for i in range(n))
    else:
        bits = tuple(int(b) for b in z)
    if len(bits) != n or any(b not in (0, 1) for b in bits):
        raise EntropyError(f"target must be {n} bits")
    return bits


def fiber_distribution(g: Gadget, n: int, z, R: Rectangle | None = None) -> BlockDistribution:
    """Uniform distribution on ``{(x, y) : g^n(x, y) = z}``, intersected with ``R``."""
    zb = _z_bits(z, n)
    ell = g.ell
    if ell * n > MAX_TOTAL_BITS:
        raise EntropyError(f"ell*n = {ell * n} exceeds {MAX_TOTAL_BITS}")
    side = 1 << (ell * n)
    per_block = [[(a, b) for a in range(g.side) for b in range(g.side) if g(a, b) == zi] for zi in zb]
    pts = [(0, 0)]
    for choices in per_block:
        pts = [((x << ell) | a, (y << ell) | b) for x, y in pts for a, b in choices]
    if R is not None:
        if R.row_set[-1] >= side or R.col_set[-1] >= side:
            raise EntropyError("rectangle out of range")
        rows, cols = set(R.row_set), set(R.col_set)
        pts = [(x, y) for x, y in pts if x in rows and y in cols]
    if not pts:
        raise EntropyError("empty fiber")
    return BlockDistribution.uniform(ell, n, pts)


def uniformity_gap(D: BlockDistribution, g: Gadget, S: Iterable[int]) -> Fraction:
    """``max_a |P[g^S(X_S, Y_S) = a] - 2**-|S||`` over all ``a`` in ``{0,1}^|S|``."""
    if g.ell != D.ell:
        raise EntropyError("gadget block length differs from the distribution's")
    S = D._check_blocks(S)
    if len(S) > 20:
        raise EntropyError("|S| must be <= 20")
    law: dict[tuple[int, ...], Fraction] = {}
    for (x, y), w in D.weights.items():
        a = tuple(g(D.block(x, i), D.block(y, i)) for i in S)
        law[a] = law.get(a, Fraction(0)) + w
    target = Fraction(1, 1 << len(S))
    # outcomes never hit deviate by exactly the target
    gap = target if len(law) < (1 << len(S)) else Fraction(0)
    for p in law.values():
        gap = max(gap, abs(p - target))
    return gap
