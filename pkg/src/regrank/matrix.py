"""0,1 matrices: representation, file I/O, regularity, exact real rank, and
random regular generation.

Rows are stored bit-packed as Python ints, column ``j`` at bit ``j``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class MatrixFormatError(ValueError):
    """Raised when a matrix file does not conform to the text format."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class BoolMatrix:
    rows: int
    cols: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("matrix must have at least one row and one column")
        if len(self.bits) != self.rows:
            raise ValueError("bits must hold exactly one int per row")
        full = (1 << self.cols) - 1
        for r in self.bits:
            if r < 0 or r & ~full:
                raise ValueError("row bits outside column range")

    # construction -----------------------------------------------------

    @classmethod
    def from_rows(cls, grid: Sequence[Sequence[int]]) -> "BoolMatrix":
        if not grid or not grid[0]:
            raise ValueError("empty matrix")
        cols = len(grid[0])
        packed = []
        for row in grid:
            if len(row) != cols:
                raise ValueError("ragged rows")
            v = 0
            for j, e in enumerate(row):
                if e not in (0, 1):
                    raise ValueError(f"entry {e!r} is not 0 or 1")
                if e:
                    v |= 1 << j
            packed.append(v)
        return cls(len(grid), cols, tuple(packed))

    @classmethod
    def from_numpy(cls, arr) -> "BoolMatrix":
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise ValueError("expected a 2-d array")
        return cls.from_rows([[int(e) for e in row] for row in arr.tolist()])

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "BoolMatrix":
        cols = rows if cols is None else cols
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def ones(cls, rows: int, cols: int | None = None) -> "BoolMatrix":
        cols = rows if cols is None else cols
        return cls(rows, cols, ((1 << cols) - 1,) * rows)

    @classmethod
    def identity(cls, n: int) -> "BoolMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def circulant(cls, first_row: Sequence[int]) -> "BoolMatrix":
        n = len(first_row)
        return cls.from_rows([[first_row[(j - i) % n] for j in range(n)] for i in range(n)])

    # access -------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"entry {ij} out of bounds for {self.rows}x{self.cols}")
        return (self.bits[i] >> j) & 1

    def row_set(self, i: int) -> list[int]:
        return [j for j in range(self.cols) if self.bits[i] >> j & 1]

    def col_bits(self) -> tuple[int, ...]:
        """Column-packed view: bit ``i`` of entry ``j`` is ``M[i, j]``."""
        out = [0] * self.cols
        for i, r in enumerate(self.bits):
            j = 0
            while r:
                if r & 1:
                    out[j] |= 1 << i
                r >>= 1
                j += 1
        return tuple(out)

    def ones_count(self) -> int:
        return sum(r.bit_count() for r in self.bits)

    def one_entries(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.rows) for j in range(self.cols) if self.bits[i] >> j & 1]

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.cols)] for r in self.bits]

    def to_numpy(self, dtype=np.int64) -> np.ndarray:
        return np.array(self.to_lists(), dtype=dtype)

    # derived matrices -------------------------------------------------

    def transpose(self) -> "BoolMatrix":
        return BoolMatrix(self.cols, self.rows, self.col_bits())

    def permute(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "BoolMatrix":
        """Matrix whose entry ``(i, j)`` is ``self[row_perm[i], col_perm[j]]``."""
        return BoolMatrix.from_rows(
            [[self[row_perm[i], col_perm[j]] for j in range(self.cols)] for i in range(self.rows)]
        )

    def __str__(self) -> str:
        return "\n".join("".join(str(e) for e in row) for row in self.to_lists())


@dataclass(frozen=True)
class Rectangle:
    """Combinatorial rectangle ``row_set x col_set`` (sorted index tuples)."""

    row_set: tuple[int, ...]
    col_set: tuple[int, ...]

    def __post_init__(self):
        rs = tuple(sorted(set(self.row_set)))
        cs = tuple(sorted(set(self.col_set)))
        if not rs or not cs:
            raise ValueError("rectangle sides must be non-empty")
        object.__setattr__(self, "row_set", rs)
        object.__setattr__(self, "col_set", cs)

    @classmethod
    def from_masks(cls, row_mask: int, col_mask: int) -> "Rectangle":
        return cls(_bits_of(row_mask), _bits_of(col_mask))

    @property
    def row_mask(self) -> int:
        return sum(1 << i for i in self.row_set)

    @property
    def col_mask(self) -> int:
        return sum(1 << j for j in self.col_set)

    @property
    def area(self) -> int:
        return len(self.row_set) * len(self.col_set)

    def cells(self) -> Iterable[tuple[int, int]]:
        for i in self.row_set:
            for j in self.col_set:
                yield i, j

    def in_bounds(self, M: BoolMatrix) -> bool:
        return self.row_set[-1] < M.rows and self.col_set[-1] < M.cols and self.row_set[0] >= 0 and self.col_set[0] >= 0


def _bits_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def complement(M: BoolMatrix) -> BoolMatrix:
    full = (1 << M.cols) - 1
    return BoolMatrix(M.rows, M.cols, tuple(full ^ r for r in M.bits))


def is_regular(M: BoolMatrix) -> int | None:
    """Return ``d`` if every row and column of the square matrix has exactly
    ``d`` ones, otherwise ``None``."""
    if M.rows != M.cols:
        raise ValueError(f"is_regular needs a square matrix, got {M.rows}x{M.cols}")
    d = M.bits[0].bit_count()
    if any(r.bit_count() != d for r in M.bits):
        return None
    if any(c.bit_count() != d for c in M.col_bits()):
        return None
    return d


def real_rank(M: BoolMatrix) -> int:
    """Rank over the rationals via Bareiss fraction-free elimination."""
    a = [[(r >> j) & 1 for j in range(M.cols)] for r in M.bits]
    return integer_rank(a)


def integer_rank(a: list[list[int]]) -> int:
    """Rank of an integer matrix (rows are modified in place)."""
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    rank = 0
    prev = 1
    for col in range(ncols):
        if rank == nrows:
            break
        pivot = next((r for r in range(rank, nrows) if a[r][col] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        p = a[rank][col]
        for r in range(rank + 1, nrows):
            f = a[r][col]
            row_r = a[r]
            row_p = a[rank]
            for c in range(col, ncols):
                # exact: Bareiss guarantees divisibility by the previous pivot
                row_r[c] = (p * row_r[c] - f * row_p[c]) // prev
        prev = p
        rank += 1
    return rank


# text format --------------------------------------------------------------


def parse_matrix(text: str | bytes) -> BoolMatrix:
    """Parse the ``R C`` header + rows text format. Lines starting with ``#``
    are skipped."""
    if isinstance(text, bytes):
        try:
            text = text.decode("ascii")
        except UnicodeDecodeError as exc:
            raise MatrixFormatError("non-ASCII input") from exc
    lines = text.split("\n")
    body = [(no, ln) for no, ln in enumerate(lines, start=1) if not ln.startswith("#")]
    # tolerate one trailing blank line (i.e. a final LF) and nothing else
    while body and body[-1][1] == "" and body[-1] is not body[0]:
        body.pop()
    if not body:
        raise MatrixFormatError("missing header", 1)
    no, header = body[0]
    parts = header.split(" ")
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise MatrixFormatError(f"malformed header {header!r}, expected 'R C'", no)
    R, C = int(parts[0]), int(parts[1])
    if R < 1 or C < 1:
        raise MatrixFormatError("dimensions must be positive", no)
    rows = body[1:]
    for no, ln in rows:
        if len(ln) != C:
            bad = next((ch for ch in ln if ch not in "01"), None)
            if bad is not None:
                raise MatrixFormatError(f"non-0/1 character {bad!r}", no)
            raise MatrixFormatError(f"row has {len(ln)} characters, expected {C}", no)
        bad = next((ch for ch in ln if ch not in "01"), None)
        if bad is not None:
            raise MatrixFormatError(f"non-0/1 character {bad!r}", no)
    if len(rows) != R:
        line = rows[-1][0] + 1 if rows else no + 1
        raise MatrixFormatError(f"expected {R} rows, found {len(rows)}", line)
    packed = tuple(sum(1 << j for j, ch in enumerate(ln) if ch == "1") for _, ln in rows)
    return BoolMatrix(R, C, packed)


def serialize_matrix(M: BoolMatrix, comment: str | None = None) -> str:
    head = f"# {comment}\n" if comment else ""
    return head + f"{M.rows} {M.cols}\n" + "".join(line + "\n" for line in str(M).split("\n"))


def read_matrix(path) -> BoolMatrix:
    with open(path, "rb") as fh:
        return parse_matrix(fh.read())


def write_matrix(path, M: BoolMatrix, comment: str | None = None) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(serialize_matrix(M, comment))


# random regular matrices ---------------------------------------------------

_MAX_REJECTIONS = 1000


def random_regular(n: int, d: int, seed: int) -> BoolMatrix:
    """Random ``d``-regular ``n x n`` matrix, as a superposition of ``d``
    permutation matrices with pairwise disjoint supports.

    Each permutation is drawn uniformly and rejected if it hits the current
    support; after ``_MAX_REJECTIONS`` rejections the layer is instead drawn
    by a randomized augmenting-path matching on the remaining zeros, which
    always succeeds because those zeros form an ``(n - k)``-regular pattern.
    Deterministic for a fixed seed.
    """
    if not (0 < d < n):
        raise ValueError(f"need 0 < d < n, got n={n}, d={d}")
    rng = random.Random(seed)
    support = [0] * n
    for _ in range(d):
        perm = None
        for _ in range(_MAX_REJECTIONS):
            cand = list(range(n))
            rng.shuffle(cand)
            if all(not (support[i] >> cand[i] & 1) for i in range(n)):
                perm = cand
                break
        if perm is None:
            perm = _random_matching(support, n, rng)
        for i in range(n):
            support[i] |= 1 << perm[i]
    return BoolMatrix(n, n, tuple(support))


def _random_matching(support: list[int], n: int, rng: random.Random) -> list[int]:
    free = [[j for j in range(n) if not support[i] >> j & 1] for i in range(n)]
    for lst in free:
        rng.shuffle(lst)
    match_col = [-1] * n  # column -> row

    def augment(i: int, seen: set[int]) -> bool:
        for j in free[i]:
            if j in seen:
                continue
            seen.add(j)
            if match_col[j] < 0 or augment(match_col[j], seen):
                match_col[j] = i
                return True
        return False

    order = list(range(n))
    rng.shuffle(order)
    for i in order:
        if not augment(i, set()):
            raise RuntimeError("no perfect matching in zero pattern")  # unreachable for regular support
    perm = [0] * n
    for j, i in enumerate(match_col):
        perm[i] = j
    return perm


def all_regular(n: int, d: int) -> Iterable[BoolMatrix]:
    """Every ``d``-regular ``n x n`` 0,1 matrix (exhaustive, tiny ``n`` only)."""
    from itertools import combinations

    row_choices = [sum(1 << j for j in c) for c in combinations(range(n), d)]

    def rec(i: int, acc: list[int], colsum: list[int]):
        if i == n:
            yield BoolMatrix(n, n, tuple(acc))
            return
        for r in row_choices:
            ok = True
            for j in range(n):
                if r >> j & 1 and colsum[j] == d:
                    ok = False
                    break
            if not ok:
                continue
            for j in range(n):
                if r >> j & 1:
                    colsum[j] += 1
            acc.append(r)
            yield from rec(i + 1, acc, colsum)
            acc.pop()
            for j in range(n):
                if r >> j & 1:
                    colsum[j] -= 1

    yield from rec(0, [], [0] * n)
