"""From a square regular 0,1 matrix to a simple regular graph whose biclique
partition number is small in the binary rank of the matrix and whose
chromatic number is large in the Boolean rank of the complement.

Vertex ``(i, j)`` of the auxiliary graph ``H`` is ``i*n + j``; vertex
``(i, j)`` in copy ``b`` of the output graph is ``b*n*n + i*n + j``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .graph import (
    Biclique,
    BicliqueCovering,
    Graph,
    chromatic_number,
    coverage_counts,
    find_coloring,
    optimal_coloring,
    partition_from_t_covering,
    verify_covering,
)
from .matrix import BoolMatrix, Rectangle, complement, is_regular
from .rank import DEFAULT_NODE_BUDGET, RectangleSet, binary_rank, boolean_rank, verify_rectangles


class TransformError(ValueError):
    """Invalid input to the transform (exit code 2 territory)."""


class StageError(RuntimeError):
    """A sub-solver ran out of budget or an internal consistency check failed."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"[{stage}] {message}")


@dataclass(frozen=True)
class Budgets:
    rank_nodes: int | None = DEFAULT_NODE_BUDGET
    chi_nodes: int | None = DEFAULT_NODE_BUDGET


def cube_root_ceil(m: int) -> int:
    """Smallest integer ``T`` with ``T**3 >= m``."""
    t = 0
    while t**3 < m:
        t += 1
    return t


@dataclass(frozen=True)
class HGraphBundle:
    n: int
    H: Graph
    V0: tuple[int, ...]
    V1: tuple[int, ...]
    C: BicliqueCovering
    H0: Graph  # induced on V0, relabelled; vertex t of H0 is V0[t]
    H0_1: Graph
    H0_2: Graph


def build_H(M: BoolMatrix) -> Graph:
    """``(i1,j1) ~ (i2,j2)`` iff ``M[i1,j2] = 1`` or ``M[i2,j1] = 1``."""
    if M.rows != M.cols:
        raise TransformError(f"matrix must be square, got {M.rows}x{M.cols}")
    n = M.rows
    cols = M.col_bits()
    edges = []
    for i1 in range(n):
        for j1 in range(n):
            u = i1 * n + j1
            for i2 in range(n):
                for j2 in range(n):
                    v = i2 * n + j2
                    if v < u:
                        continue
                    if M.bits[i1] >> j2 & 1 or cols[j1] >> i2 & 1:
                        edges.append((u, v))
    return Graph(n * n, edges)


def build_covering(M: BoolMatrix, P: RectangleSet) -> BicliqueCovering:
    """``C_t = (A_t x [n], [n] x B_t)`` for each rectangle ``A_t x B_t`` of a
    partition of the ones of ``M``."""
    if P.kind != "partition" or not verify_rectangles(M, P):
        raise StageError("build_covering", "rectangles do not partition the ones of M")
    n = M.rows
    out = []
    for r in P.rects:
        A = [i * n + j for i in r.row_set for j in range(n)]
        B = [i * n + j for i in range(n) for j in r.col_set]
        out.append(Biclique(A, B))
    return BicliqueCovering(2, out)


def split_layers(H: Graph, C: BicliqueCovering, V0: tuple[int, ...]) -> tuple[Graph, Graph, Graph]:
    """``H0 = H[V0]`` and its edge split by coverage count (1 or 2)."""
    H0, _ = H.induced(V0)
    cnt = coverage_counts(C.bicliques)
    e1, e2 = [], []
    for a, b in H0.edges:
        c = cnt.get(tuple(sorted((V0[a], V0[b]))), 0)
        if c == 1:
            e1.append((a, b))
        elif c == 2:
            e2.append((a, b))
        else:
            raise StageError("split_layers", f"edge {(V0[a], V0[b])} covered {c} times")
    return H0, Graph(len(V0), e1), Graph(len(V0), e2)


def build_bundle(M: BoolMatrix, P: RectangleSet) -> HGraphBundle:
    n = M.rows
    H = build_H(M)
    C = build_covering(M, P)
    if not verify_covering(H, C):
        raise StageError("build_covering", "C is not a 2-biclique covering of H")
    V1 = tuple(i * n + j for i in range(n) for j in range(n) if M[i, j])
    V0 = tuple(i * n + j for i in range(n) for j in range(n) if not M[i, j])
    H0, H0_1, H0_2 = split_layers(H, C, V0)
    return HGraphBundle(n, H, V0, V1, C, H0, H0_1, H0_2)


def zero_cover_from_coloring(M: BoolMatrix, V0: tuple[int, ...], coloring: list[int]) -> RectangleSet:
    """Rectangles ``A_t x B_t`` (rows and columns met by color class ``t`` of
    a proper coloring of ``H0``), which cover the zeros of ``M``."""
    n = M.rows
    classes: dict[int, tuple[set[int], set[int]]] = {}
    for t, v in enumerate(V0):
        A, B = classes.setdefault(coloring[t], (set(), set()))
        A.add(v // n)
        B.add(v % n)
    return RectangleSet("cover", tuple(Rectangle(tuple(A), tuple(B)) for _, (A, B) in sorted(classes.items())))


@dataclass(frozen=True)
class TransformOutput:
    G: Graph
    case_tag: int
    bp_certificate: BicliqueCovering
    chi_threshold: int
    k: int
    m: int
    degree: int
    vertex_map: tuple[tuple[int, int, int], ...]
    details: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return {
            "case": self.case_tag,
            "graph": self.G.to_json(),
            "bp_certificate": self.bp_certificate.to_json(),
            "chi_threshold": self.chi_threshold,
            "k": self.k,
            "m": self.m,
            "degree": self.degree,
            "vertex_map": [list(t) for t in self.vertex_map],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, obj: dict) -> "TransformOutput":
        try:
            return cls(
                G=Graph.from_json(obj["graph"]),
                case_tag=int(obj["case"]),
                bp_certificate=BicliqueCovering.from_json(obj["bp_certificate"]),
                chi_threshold=int(obj["chi_threshold"]),
                k=int(obj["k"]),
                m=int(obj["m"]),
                degree=int(obj["degree"]),
                vertex_map=tuple(tuple(int(x) for x in t) for t in obj["vertex_map"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed transform JSON: {exc}") from exc


def _check_input(M: BoolMatrix) -> int:
    if M.rows != M.cols:
        raise TransformError(f"matrix must be square, got {M.rows}x{M.cols}")
    d = is_regular(M)
    if d is None:
        raise TransformError("matrix is not regular")
    if not 0 < d < M.rows:
        raise TransformError(f"need 0 < d < n, got d={d}, n={M.rows}")
    return d


def _copy(v: int, b: int, nn: int) -> int:
    return b * nn + v


def transform(
    M: BoolMatrix,
    budgets: Budgets = Budgets(),
    *,
    m: int | None = None,
    partition: RectangleSet | None = None,
    force_case: int | None = None,
) -> TransformOutput:
    """Run the construction.

    ``m`` (the Boolean rank of the complement) may be supplied to skip its
    exact computation; ``partition`` likewise replaces the binary-rank
    solve and must then be a minimum partition for the size bounds to be
    the advertised ones.  ``force_case`` builds the requested case's graph
    regardless of the chromatic test; regularity and the certificate bounds
    still hold, the chromatic bound is only guaranteed for the natural case.
    """
    d = _check_input(M)
    n = M.rows
    nn = n * n
    if m is not None and m < 1:
        # the complement of a d-regular matrix with d < n has a one
        raise TransformError(f"m must be positive, got {m}")

    if partition is None:
        res = binary_rank(M, budgets.rank_nodes)
        if not res.optimal:
            raise StageError("binary_rank", f"budget exhausted (best {res.value})")
        partition = res.certificate
    k = len(partition)
    if m is None:
        res = boolean_rank(complement(M), budgets.rank_nodes)
        if not res.optimal:
            raise StageError("boolean_rank", f"budget exhausted (best {res.value})")
        m = res.value
    T = cube_root_ceil(m)

    bundle = build_bundle(M, partition)
    try:
        col2 = optimal_coloring(bundle.H0_2, budgets.chi_nodes)
    except RuntimeError as exc:
        raise StageError("chi(H0_2)", str(exc)) from exc
    chi2 = max(col2) + 1 if col2 else 0
    case = 1 if chi2**3 >= m else 2
    if force_case is not None:
        if force_case not in (1, 2):
            raise TransformError("force_case must be 1 or 2")
        case = force_case

    details = {"chi_H0_2": chi2, "d": d, "n": n}
    if case == 1:
        G, cert, copies = _case1(bundle, details)
        degree = d * d
    else:
        G, cert, copies = _case2(bundle, col2, T, budgets, details, forced=force_case is not None)
        degree = 2 * n * d

    vertex_map = tuple((v // n, v % n, b) for b in range(copies) for v in range(nn))
    return TransformOutput(G, case, cert, T, k, m, degree, vertex_map, details)


def _case1(bundle: HGraphBundle, details: dict) -> tuple[Graph, BicliqueCovering, int]:
    nn = bundle.H.n
    C_prime: list[Biclique] = []
    for bc in bundle.C.bicliques:
        inter = bc.A & bc.B
        for A, B in ((inter, inter), (inter, bc.B - bc.A), (bc.A - bc.B, bc.B)):
            if A and B:
                C_prime.append(Biclique(A, B))
    equal = [bc for bc in C_prime if bc.A == bc.B]
    rest = [bc for bc in C_prime if bc.A != bc.B]

    cnt_eq = coverage_counts(equal)
    cnt_rest = coverage_counts(rest)
    if set(cnt_eq) & set(cnt_rest):
        raise StageError("case1", "an edge is covered by both C'' and C' \\ C''")
    F = Graph(nn, [e for e in bundle.H.edges if e not in cnt_eq])
    if not F.is_simple:
        raise StageError("case1", "F has a loop")
    rest_cov = BicliqueCovering(2, rest)
    if not verify_covering(F, rest_cov):
        raise StageError("case1", "C' \\ C'' is not a 2-covering of F")
    F2, P2 = partition_from_t_covering(F, rest_cov)

    edges = []
    for b in (0, 1):
        edges += [(_copy(u, b, nn), _copy(v, b, nn)) for u, v in F2.edges]
    cross = []
    for bc in equal:
        for x, y in bc.oriented_edges():
            edges.append((_copy(x, 0, nn), _copy(y, 1, nn)))
        cross.append(Biclique([_copy(x, 0, nn) for x in bc.A], [_copy(x, 1, nn) for x in bc.A]))
    G = Graph(2 * nn, edges)
    cert = [
        Biclique([_copy(x, b, nn) for x in bc.A], [_copy(x, b, nn) for x in bc.B])
        for b in (0, 1)
        for bc in P2.bicliques
    ] + cross
    details.update(c_prime=len(C_prime), c_equal=len(equal), bp_F2=len(P2), F2_edges=len(F2.edges))
    return G, BicliqueCovering(1, cert), 2


def _case2(
    bundle: HGraphBundle, col2: list[int], T: int, budgets: Budgets, details: dict, forced: bool
) -> tuple[Graph, BicliqueCovering, int]:
    nn = bundle.H.n
    V0 = bundle.V0
    classes: dict[int, list[int]] = {}
    for t, c in enumerate(col2):
        classes.setdefault(c, []).append(t)
    best_c, best_chi = None, -1
    for c in sorted(classes):
        sub, _ = bundle.H0_1.induced(classes[c])
        try:
            chi = chromatic_number(sub, budgets.chi_nodes)
        except RuntimeError as exc:
            raise StageError("chi(H0_1[S])", str(exc)) from exc
        if chi > best_chi:
            best_c, best_chi = c, chi
    if best_chi < T:
        why = "forced case 2 has no colour class reaching the threshold" if forced else (
            "no colour class of H0_2 reaches the threshold; contradicts chi(H0) >= m"
        )
        raise StageError("case2", why)
    S = frozenset(V0[t] for t in classes[best_c])

    # cyclic 3-partite graph over the copies
    prime = []
    for bc in bundle.C.bicliques:
        for b in range(3):
            b2 = (b + 1) % 3
            prime.append(
                (bc, b, b2, Biclique([_copy(x, b, nn) for x in bc.A], [_copy(y, b2, nn) for y in bc.B]))
            )
    G_prime = Graph(3 * nn, [e for _, _, _, B in prime for e in B.oriented_edges()])
    if not verify_covering(G_prime, BicliqueCovering(1, [B for *_, B in prime])):
        raise StageError("case2", "cyclic bicliques do not partition G'")

    S_all = {_copy(x, b, nn) for x in S for b in range(3)}
    edges = [e for e in G_prime.edges if not (e[0] in S_all and e[1] in S_all)]
    inner = [e for e in bundle.H.edges if e[0] in S and e[1] in S]
    for b in range(3):
        edges += [(_copy(u, b, nn), _copy(v, b, nn)) for u, v in inner]
    G = Graph(3 * nn, edges)

    cert = []
    for bc, b, b2, _ in prime:
        A_out, A_in = bc.A - S, bc.A & S
        parts = ((A_out, bc.B), (A_in, bc.B - S))
        for A, B in parts:
            if A and B:
                cert.append(Biclique([_copy(x, b, nn) for x in A], [_copy(y, b2, nn) for y in B]))
    for b in range(3):
        for bc in bundle.C.bicliques:
            A, B = bc.A & S, bc.B & S
            if A and B:
                cert.append(Biclique([_copy(x, b, nn) for x in A], [_copy(y, b, nn) for y in B]))
    details.update(S=sorted(S), chi_H0_1_S=best_chi)
    return G, BicliqueCovering(1, cert), 3


# verification ---------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class VerifyReport:
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
        }

    def lines(self) -> list[str]:
        return [f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}" for c in self.checks]


def verify_output(
    M: BoolMatrix, out: TransformOutput, budgets: Budgets = Budgets(), *, recheck_ranks: bool = True
) -> VerifyReport:
    """Check every claim of a transform output independently of how it was built."""
    checks: list[Check] = []
    add = lambda name, ok, detail="": checks.append(Check(name, bool(ok), detail))  # noqa: E731

    try:
        d = _check_input(M)
    except TransformError as exc:
        add("input", False, str(exc))
        return VerifyReport(tuple(checks))
    n = M.rows
    G = out.G
    copies = {1: 2, 2: 3}.get(out.case_tag)
    add("case", copies is not None, f"case {out.case_tag}")
    if copies is None:
        return VerifyReport(tuple(checks))

    expected_deg = d * d if out.case_tag == 1 else 2 * n * d
    add("vertex_map", len(out.vertex_map) == G.n == copies * n * n, f"{G.n} vertices")
    add("simple", G.is_simple)
    deg = G.regular_degree()
    add("regular", deg == expected_deg, f"degree {deg}, expected {expected_deg}")
    add("degree_field", out.degree == expected_deg, f"reported {out.degree}")

    cert = out.bp_certificate
    try:
        ok = cert.t == 1 and verify_covering(G, cert)
    except ValueError as exc:
        ok = False
        detail = str(exc)
    else:
        detail = f"{len(cert)} bicliques"
    add("bp_certificate", ok, detail)
    k = out.k
    if out.case_tag == 1:
        size_ok = len(cert) <= 2 * (4 * k) ** 2 + k <= 33 * k * k
        bound = f"<= 2(4k)^2+k = {2 * (4 * k) ** 2 + k} <= 33k^2 = {33 * k * k}"
    else:
        size_ok = len(cert) <= 9 * k
        bound = f"<= 9k = {9 * k}"
    add("bp_size", size_ok, f"{len(cert)} {bound}")

    if recheck_ranks:
        rb = binary_rank(M, budgets.rank_nodes)
        add("k", rb.optimal and rb.value == k, f"R_bin(M) = {rb.value}{'' if rb.optimal else ' (non-optimal)'}, reported {k}")
        rc = boolean_rank(complement(M), budgets.rank_nodes)
        add("m", rc.optimal and rc.value == out.m, f"R_bool(~M) = {rc.value}{'' if rc.optimal else ' (non-optimal)'}, reported {out.m}")

    T = out.chi_threshold
    add("chi_threshold", T >= 0 and T**3 >= out.m and (T == 0 or (T - 1) ** 3 < out.m), f"T = {T}, m = {out.m}")
    if T >= 1 and not G.is_simple:
        add("chi_lower_bound", False, "chromatic number undefined: G has loops")
    elif T >= 1:
        try:
            colorable = find_coloring(G, T - 1, budgets.chi_nodes) is not None
            add("chi_lower_bound", not colorable, f"G is {'' if colorable else 'not '}{T - 1}-colorable")
        except RuntimeError as exc:
            add("chi_lower_bound", False, f"undecided: {exc}")
    return VerifyReport(tuple(checks))
