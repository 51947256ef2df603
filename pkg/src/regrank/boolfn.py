"""Boolean functions as truth tables and their certificate measures.

Inputs ``z = (z_1, ..., z_n)`` are indexed by ``sum z_j * 2**(n - j)``, so
``z_1`` is the most significant bit.  Variables are numbered from 1.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable, Iterable, Mapping, Sequence


class TruthTableFormatError(ValueError):
    pass


@dataclass(frozen=True)
class TruthTable:
    n: int
    values: tuple[int, ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("variable count must be non-negative")
        if len(self.values) != 1 << self.n:
            raise ValueError(f"expected {1 << self.n} values, got {len(self.values)}")
        if any(v not in (0, 1) for v in self.values):
            raise ValueError("truth-table values must be 0 or 1")

    @classmethod
    def from_function(cls, n: int, fn: Callable[[tuple[int, ...]], int]) -> "TruthTable":
        return cls(n, tuple(int(bool(fn(z))) for z in product((0, 1), repeat=n)))

    @classmethod
    def from_int(cls, n: int, code: int) -> "TruthTable":
        """Truth table whose value at input index ``z`` is bit ``z`` of ``code``."""
        return cls(n, tuple((code >> z) & 1 for z in range(1 << n)))

    def to_int(self) -> int:
        return sum(v << z for z, v in enumerate(self.values))

    def __call__(self, z: Sequence[int]) -> int:
        return self.values[input_index(z)]

    def negate(self) -> "TruthTable":
        return TruthTable(self.n, tuple(1 - v for v in self.values))

    def ones(self) -> list[int]:
        return [z for z, v in enumerate(self.values) if v]

    def __str__(self) -> str:
        return "".join(str(v) for v in self.values)


def input_index(z: Sequence[int]) -> int:
    idx = 0
    for b in z:
        idx = (idx << 1) | b
    return idx


def input_bits(idx: int, n: int) -> tuple[int, ...]:
    return tuple((idx >> (n - 1 - j)) & 1 for j in range(n))


def or_fn(n: int) -> TruthTable:
    return TruthTable.from_function(n, lambda z: any(z))


def and_fn(n: int) -> TruthTable:
    return TruthTable.from_function(n, lambda z: all(z))


def xor_fn(n: int) -> TruthTable:
    return TruthTable.from_function(n, lambda z: sum(z) % 2)


def constant_fn(n: int, value: int) -> TruthTable:
    return TruthTable(n, (value,) * (1 << n))


def parse_truth_table(text: str | bytes) -> TruthTable:
    if isinstance(text, bytes):
        text = text.decode("ascii", errors="replace")
    lines = [ln for ln in text.split("\n") if not ln.startswith("#")]
    while len(lines) > 2 and lines[-1] == "":
        lines.pop()
    if len(lines) < 2:
        raise TruthTableFormatError("expected a line with n and a line of values")
    if not lines[0].isdigit():
        raise TruthTableFormatError(f"line 1: malformed variable count {lines[0]!r}")
    n = int(lines[0])
    vals = lines[1]
    if len(vals) != 1 << n or any(ch not in "01" for ch in vals):
        raise TruthTableFormatError(f"line 2: expected exactly {1 << n} characters from {{0,1}}")
    if len(lines) > 2 and any(lines[2:]):
        raise TruthTableFormatError("trailing content after the value line")
    return TruthTable(n, tuple(int(ch) for ch in vals))


def serialize_truth_table(f: TruthTable) -> str:
    return f"{f.n}\n{f}\n"


# subcubes and DNFs -----------------------------------------------------------


@dataclass(frozen=True)
class Subcube:
    """Conjunction of literals: ``fixed`` maps a variable (1-based) to its value."""

    fixed: tuple[tuple[int, int], ...]

    def __init__(self, fixed: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = dict(fixed.items() if isinstance(fixed, Mapping) else fixed)
        if any(v not in (0, 1) for v in items.values()):
            raise ValueError("literal values must be 0 or 1")
        if any(k < 1 for k in items):
            raise ValueError("variables are numbered from 1")
        object.__setattr__(self, "fixed", tuple(sorted(items.items())))

    @property
    def width(self) -> int:
        return len(self.fixed)

    def contains(self, z: Sequence[int]) -> bool:
        return all(z[var - 1] == val for var, val in self.fixed)

    def points(self, n: int) -> list[int]:
        if self.fixed and self.fixed[-1][0] > n:
            raise ValueError(f"clause uses variable {self.fixed[-1][0]} > n = {n}")
        return [idx for idx in range(1 << n) if self.contains(input_bits(idx, n))]

    def __str__(self) -> str:
        if not self.fixed:
            return "TRUE"
        return " & ".join(f"x{v}" if b else f"~x{v}" for v, b in self.fixed)


@dataclass(frozen=True)
class Dnf:
    clauses: tuple[Subcube, ...]
    unambiguous: bool = False

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))

    @property
    def width(self) -> int:
        return max((c.width for c in self.clauses), default=0)

    def to_json(self, n: int) -> dict:
        return {
            "n": n,
            "unambiguous": self.unambiguous,
            "clauses": [[list(lit) for lit in c.fixed] for c in self.clauses],
        }

    @classmethod
    def from_json(cls, obj: dict) -> tuple["Dnf", int]:
        """Parse ``{"n":N,"unambiguous":bool,"clauses":[[[var,val],...],...]}``."""
        try:
            n = int(obj["n"])
            clauses = tuple(Subcube((int(v), int(b)) for v, b in c) for c in obj["clauses"])
            return cls(clauses, bool(obj.get("unambiguous", False))), n
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed DNF JSON: {exc}") from exc

    def dumps(self, n: int) -> str:
        return json.dumps(self.to_json(n), sort_keys=True, separators=(",", ":"))


def dnf_function(phi: Dnf, n: int) -> TruthTable:
    """The function computed by ``phi`` on ``n`` variables."""
    vals = [0] * (1 << n)
    for c in phi.clauses:
        for idx in c.points(n):
            vals[idx] = 1
    return TruthTable(n, tuple(vals))


def is_unambiguous(phi: Dnf, n: int) -> bool:
    seen = [0] * (1 << n)
    for c in phi.clauses:
        for idx in c.points(n):
            if seen[idx]:
                return False
            seen[idx] = 1
    return True


def verify_dnf(f: TruthTable, phi: Dnf) -> bool:
    """``phi`` computes ``f``, and is unambiguous if it claims to be."""
    for c in phi.clauses:
        if c.fixed and c.fixed[-1][0] > f.n:
            raise ValueError(f"clause {c} uses a variable beyond n = {f.n}")
    if dnf_function(phi, f.n) != f:
        return False
    return not phi.unambiguous or is_unambiguous(phi, f.n)


# certificate measures ---------------------------------------------------------


def _subcube_masks(n: int, width: int) -> Iterable[tuple[int, ...]]:
    """Variable positions (0-based) for all subcubes of the given width."""
    return combinations(range(n), width)


def _points_mask(n: int, anchor: tuple[int, ...], free_pos: Sequence[int]) -> int:
    """Bitmask over inputs of the subcube through ``anchor`` with ``free_pos``
    left free."""
    base = list(anchor)
    out = 0
    for assignment in product((0, 1), repeat=len(free_pos)):
        for p, b in zip(free_pos, assignment):
            base[p] = b
        out |= 1 << input_index(base)
    return out


def _min_certificate_width(f: TruthTable, z: int) -> int:
    n = f.n
    ones = f.to_int()
    zb = input_bits(z, n)
    for w in range(n + 1):
        for fixed in _subcube_masks(n, w):
            free = [p for p in range(n) if p not in fixed]
            pts = _points_mask(n, zb, free)
            if pts & ones == pts:
                return w
    return n  # unreachable: the point itself is a width-n subcube


def c1(f: TruthTable) -> int:
    """Smallest ``k`` such that ``f`` is a ``k``-DNF (0 for constant 0)."""
    return max((_min_certificate_width(f, z) for z in f.ones()), default=0)


def c0(f: TruthTable) -> int:
    return c1(f.negate())


def _admissible_subcubes(f: TruthTable, max_width: int) -> list[tuple[int, Subcube]]:
    """Every subcube of width <= max_width lying inside f^-1(1), as
    (point mask, Subcube)."""
    n = f.n
    ones = f.to_int()
    out = []
    for w in range(max_width + 1):
        for fixed in _subcube_masks(n, w):
            free = [p for p in range(n) if p not in fixed]
            for vals in product((0, 1), repeat=w):
                anchor = [0] * n
                for p, b in zip(fixed, vals):
                    anchor[p] = b
                pts = _points_mask(n, tuple(anchor), free)
                if pts & ones == pts:
                    out.append((pts, Subcube({p + 1: b for p, b in zip(fixed, vals)})))
    return out


def exact_subcube_partition(f: TruthTable, max_width: int) -> Dnf | None:
    """Partition ``f^-1(1)`` into subcubes of width ``<= max_width`` that lie
    inside ``f^-1(1)``; returns the unambiguous DNF or ``None``."""
    ones = f.to_int()
    if ones == 0:
        return Dnf((), True)
    cubes = _admissible_subcubes(f, max_width)
    by_point: dict[int, list[int]] = {}
    for k, (pts, _) in enumerate(cubes):
        m = pts
        while m:
            low = m & -m
            by_point.setdefault(low.bit_length() - 1, []).append(k)
            m ^= low
    if any(z not in by_point for z in f.ones()):
        return None

    chosen: list[int] = []

    def solve(uncovered: int) -> bool:
        if uncovered == 0:
            return True
        best_z, best_opts = None, None
        m = uncovered
        while m:
            low = m & -m
            z = low.bit_length() - 1
            m ^= low
            opts = [k for k in by_point[z] if cubes[k][0] & uncovered == cubes[k][0]]
            if best_opts is None or len(opts) < len(best_opts):
                best_z, best_opts = z, opts
                if not opts:
                    return False
        for k in best_opts:
            chosen.append(k)
            if solve(uncovered & ~cubes[k][0]):
                return True
            chosen.pop()
        return False

    if not solve(ones):
        return None
    return Dnf(tuple(cubes[k][1] for k in chosen), True)


def uc1_witness(f: TruthTable) -> tuple[int, Dnf]:
    """``UC_1(f)`` together with an unambiguous DNF of that width.

    Iterative deepening on the width; terminates by width ``n`` since the
    singleton cubes always partition ``f^-1(1)``.
    """
    if not f.ones():
        return 0, Dnf((), True)
    for k in range(f.n + 1):
        phi = exact_subcube_partition(f, k)
        if phi is not None:
            return k, phi
    raise AssertionError("singleton cubes always partition f^-1(1)")


def uc1(f: TruthTable) -> int:
    return uc1_witness(f)[0]


# gap search -------------------------------------------------------------------


@dataclass(frozen=True)
class GapResult:
    f: TruthTable
    uc1: int
    c0: int
    examined: int
    complete: bool

    @property
    def gap(self) -> int:
        return self.c0 - self.uc1


def _measures(code_n: tuple[int, int]) -> tuple[int, int, int]:
    code, n = code_n
    f = TruthTable.from_int(n, code)
    return code, uc1(f), c0(f)


def gap_search(
    n: int,
    budget: int | None = None,
    *,
    seed: int = 0,
    parallel: bool = False,
) -> GapResult:
    """Function on ``n`` variables maximizing ``C_0(f) - UC_1(f)``.

    Exhaustive for ``n <= 4`` (all ``2**2**n`` functions, in truth-table
    order, truncated at ``budget``); for larger ``n``, ``budget`` random
    functions are sampled.  Ties go to the smallest truth-table integer.
    """
    import random

    total = 1 << (1 << n)
    if n <= 4:
        limit = total if budget is None else min(total, budget)
        codes: Iterable[int] = range(limit)
        complete = limit == total
    else:
        if budget is None:
            raise ValueError("sampled mode (n > 4) needs a budget")
        rng = random.Random(seed)
        codes = sorted({rng.getrandbits(1 << n) for _ in range(budget)})
        complete = False
    codes = list(codes)
    work = [(c, n) for c in codes]
    if parallel:
        with ProcessPoolExecutor() as ex:
            results = list(ex.map(_measures, work, chunksize=256))
    else:
        results = [_measures(w) for w in work]
    best = None
    for code, u, c in results:
        key = (c - u, -code)
        if best is None or key > best[0]:
            best = (key, code, u, c)
    _, code, u, c = best
    return GapResult(TruthTable.from_int(n, code), u, c, len(codes), complete)
