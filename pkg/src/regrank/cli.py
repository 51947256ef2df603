"""Command-line interface: ``python -m regrank <subcommand> ...``.

Exit codes: 0 success, 1 verification failure (or an exact solver that ran
out of budget), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import boolfn, entropy, gadget, graph, matrix, rank, transform

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _read_json(path: str) -> dict:
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON: {exc}") from exc


def _read_matrix(path: str) -> matrix.BoolMatrix:
    try:
        return matrix.parse_matrix(_read_text(path))
    except matrix.MatrixFormatError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _read_tt(path: str) -> boolfn.TruthTable:
    try:
        return boolfn.parse_truth_table(_read_text(path))
    except boolfn.TruthTableFormatError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _budget(args) -> int | None:
    if args.budget == 0:
        print("warning: --budget 0 means unlimited; exact solvers may run for a very long time", file=sys.stderr)
        return None
    return args.budget


def _canon(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


# subcommands -----------------------------------------------------------------------------


def cmd_rank(args) -> int:
    M = _read_matrix(args.matrix)
    if args.mode == "real":
        print(matrix.real_rank(M))
        return EXIT_OK
    solver = rank.binary_rank if args.mode == "binary" else rank.boolean_rank
    res = solver(M, _budget(args))
    print(res.value)
    if args.cert:
        _write(args.cert, res.certificate.dumps() + "\n")
    if not res.optimal:
        print(f"budget exhausted after {res.nodes} nodes; {res.value} is only an upper bound", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_compose(args) -> int:
    f = _read_tt(args.f)
    g = gadget.gadget_by_name(args.gadget, args.ell)
    M = gadget.compose(f, g)
    _write(args.output, matrix.serialize_matrix(M))
    return EXIT_OK


def cmd_gadget(args) -> int:
    g = gadget.gadget_by_name(args.name, args.ell)
    if args.output:
        _write(args.output, matrix.serialize_matrix(g.table, comment=f"ell={args.ell}"))
    if args.check == "unbiased":
        ok = gadget.is_strongly_unbiased(g)
        print(f"regular degree {matrix.is_regular(g.table)}; strongly unbiased: {'yes' if ok else 'no'}")
    elif args.check == "disc":
        if g.side <= gadget.EXACT_DISC_MAX_SIDE:
            value, how = gadget.discrepancy_exact(g), "exact"
        else:
            value, how = gadget.discrepancy_sample(g, args.trials, args.seed), f"sampled lower bound, {args.trials} trials"
        ok = gadget.discrepancy_bound_holds(value, args.ell)
        print(f"discrepancy {value} ({how})")
        print(f"bound 2^(-({args.ell}+3)/2): {'holds' if ok else 'VIOLATED'}")
    else:
        H = gadget.hadamard(args.ell)
        ok = gadget.lindsey_check(H)
        print(f"lindsey bound on {H.side}x{H.side}: {'holds' if ok else 'VIOLATED'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_boolfn(args) -> int:
    if args.action == "measures":
        if not args.table:
            raise UsageError("boolfn measures needs a truth-table file")
        f = _read_tt(args.table)
        width, phi = boolfn.uc1_witness(f)
        print(_canon({"C0": boolfn.c0(f), "C1": boolfn.c1(f), "UC1": width}), end="")
        if args.dnf:
            _write(args.dnf, phi.dumps(f.n) + "\n")
        return EXIT_OK
    if args.n is None:
        raise UsageError("boolfn gap needs --n")
    res = boolfn.gap_search(args.n, args.search_budget, seed=args.seed, parallel=args.parallel)
    print(_canon({
        "f": str(res.f), "n": args.n, "UC1": res.uc1, "C0": res.c0, "gap": res.gap,
        "examined": res.examined, "complete": res.complete,
    }), end="")
    return EXIT_OK


def cmd_lift(args) -> int:
    try:
        phi, n = boolfn.Dnf.from_json(_read_json(args.dnf))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not boolfn.is_unambiguous(phi, n):
        print("DNF is not unambiguous", file=sys.stderr)
        return EXIT_FAIL
    phi = boolfn.Dnf(phi.clauses, True)
    g = gadget.gadget_by_name(args.gadget, args.ell)
    P = gadget.lifted_partition(phi, g, n)
    _write(args.output, P.dumps() + "\n")
    print(f"{len(P)} rectangles (bound {gadget.lifted_partition_size_bound(phi, args.ell)})", file=sys.stderr)
    return EXIT_OK


def _transform_budgets(args) -> transform.Budgets:
    b = _budget(args)
    return transform.Budgets(b, b)


def cmd_transform(args) -> int:
    M = _read_matrix(args.matrix)
    try:
        out = transform.transform(M, _transform_budgets(args), m=args.m)
    except transform.TransformError as exc:
        raise UsageError(str(exc)) from exc
    except transform.StageError as exc:
        print(f"transform failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _write(args.output, out.dumps() + "\n")
    print(f"case {out.case_tag}: {out.G.n} vertices, degree {out.degree}, "
          f"{len(out.bp_certificate)} bicliques, chi >= {out.chi_threshold}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    if len(args.files) != 2:
        raise UsageError("verify takes two files")
    a, b = args.files
    try:
        if args.what == "rectangles":
            M = _read_matrix(a)
            S = rank.RectangleSet.from_json(_read_json(b))
            try:
                ok = rank.verify_rectangles(M, S)
            except IndexError as exc:
                print(f"FAIL {exc}")
                return EXIT_FAIL
            print(f"{'PASS' if ok else 'FAIL'} {S.kind} of {len(S)} rectangles")
            return EXIT_OK if ok else EXIT_FAIL
        if args.what == "covering":
            G = graph.Graph.from_json(_read_json(a))
            C = graph.BicliqueCovering.from_json(_read_json(b))
            try:
                ok = graph.verify_covering(G, C)
            except ValueError as exc:
                print(f"FAIL {exc}")
                return EXIT_FAIL
            print(f"{'PASS' if ok else 'FAIL'} {C.t}-covering with {len(C)} bicliques")
            return EXIT_OK if ok else EXIT_FAIL
        M = _read_matrix(a)
        out = transform.TransformOutput.from_json(_read_json(b))
    except (ValueError, graph.GraphError) as exc:
        raise UsageError(str(exc)) from exc
    report = transform.verify_output(M, out, _transform_budgets(args), recheck_ranks=not args.no_rank_check)
    for line in report.lines():
        print(line)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_graph(args) -> int:
    try:
        G = graph.Graph.from_json(_read_json(args.graph))
    except (ValueError, graph.GraphError) as exc:
        raise UsageError(str(exc)) from exc
    budget = _budget(args)
    if args.action == "chi":
        try:
            col = graph.optimal_coloring(G, budget)
        except graph.GraphError as exc:
            raise UsageError(str(exc)) from exc
        except graph.BudgetExhausted as exc:
            print(f"budget exhausted: {exc}", file=sys.stderr)
            return EXIT_FAIL
        print(max(col) + 1 if col else 0)
        if args.cert:
            _write(args.cert, _canon({"coloring": col}))
        return EXIT_OK
    res = graph.bp_exact(G, budget)
    print(res.value)
    if args.cert:
        _write(args.cert, res.covering.dumps() + "\n")
    if not res.optimal:
        print("budget exhausted; value is only an upper bound", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_gen(args) -> int:
    M = matrix.random_regular(args.n, args.d, args.seed)
    _write(args.output, matrix.serialize_matrix(M))
    return EXIT_OK


def cmd_entropy(args) -> int:
    g = gadget.gadget_by_name(args.gadget, args.ell)
    D = entropy.fiber_distribution(g, args.n, args.z)
    if args.independent:
        D = entropy.independent_copies(D)
    if args.tool == "min-entropy":
        h = entropy.min_entropy(D)
        print(_canon({"max_prob": str(h.max_prob), "bits": round(h.bits, 12)}), end="")
        return EXIT_OK
    if args.tool == "gap":
        S = _blocks(args.S, args.n)
        print(_canon({"S": list(S), "gap": str(entropy.uniformity_gap(D, g, S))}), end="")
        return EXIT_OK
    delta = _fraction(args.delta)
    if args.tool == "dense":
        r = entropy.is_delta_dense(D, delta)
        print(_canon({"dense": r.dense, "witness": list(r.witness) if r.witness else None}), end="")
        return EXIT_OK
    r = entropy.find_dense_restriction(D, delta)
    print(_canon({
        "fixed": list(r.fixed),
        "alpha": [list(r.alpha[0]), list(r.alpha[1])],
        "support": len(r.conditioned.weights),
    }), end="")
    return EXIT_OK


def _fraction(text: str | None) -> Fraction:
    if text is None:
        raise UsageError("--delta is required for this tool")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad rational {text!r}") from exc


def _blocks(text: str | None, n: int) -> tuple[int, ...]:
    if not text:
        return tuple(range(1, n + 1))
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad block list {text!r}") from exc


# parser -----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=rank.DEFAULT_NODE_BUDGET,
                        help="search-node budget for exact solvers (0 = unlimited)")
    common.add_argument("--parallel", action="store_true", help="use parallel modes where available")

    p = argparse.ArgumentParser(prog="regrank", description="Binary and Boolean rank toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("rank", parents=[common], help="real, binary or Boolean rank of a matrix")
    s.add_argument("matrix")
    s.add_argument("--mode", choices=["real", "binary", "boolean"], required=True)
    s.add_argument("--cert", help="write the certificate JSON here")
    s.set_defaults(func=cmd_rank)

    s = sub.add_parser("compose", parents=[common], help="matrix of f composed with a gadget")
    s.add_argument("--f", required=True, help="truth-table file")
    s.add_argument("--gadget", choices=["gl", "ip"], required=True)
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("gadget", parents=[common], help="gadget checks")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--name", choices=["gl", "ip"], default="gl")
    s.add_argument("--check", choices=["unbiased", "disc", "lindsey"], required=True,
                   help="lindsey runs on the order-ell Hadamard matrix regardless of --name")
    s.add_argument("--trials", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output", help="also write the gadget table")
    s.set_defaults(func=cmd_gadget)

    s = sub.add_parser("boolfn", parents=[common], help="certificate measures of Boolean functions")
    s.add_argument("action", choices=["measures", "gap"])
    s.add_argument("table", nargs="?")
    s.add_argument("--dnf", help="write an optimal unambiguous DNF here")
    s.add_argument("--n", type=int)
    s.add_argument("--search-budget", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_boolfn)

    s = sub.add_parser("lift-partition", parents=[common], help="partition from an unambiguous DNF")
    s.add_argument("--dnf", required=True)
    s.add_argument("--gadget", choices=["gl", "ip"], required=True)
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("transform", parents=[common], help="regular matrix to regular graph")
    s.add_argument("matrix")
    s.add_argument("--m", type=int, help="precomputed Boolean rank of the complement")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("verify", parents=[common], help="verify a certificate")
    s.add_argument("--what", choices=["rectangles", "covering", "transform"], required=True)
    s.add_argument("files", nargs="+", help="matrix+cert, graph+covering, or matrix+transform output")
    s.add_argument("--no-rank-check", action="store_true", help="trust the k and m fields of a transform output")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("graph", parents=[common], help="chromatic or biclique partition number")
    s.add_argument("action", choices=["chi", "bp"])
    s.add_argument("graph")
    s.add_argument("--cert")
    s.set_defaults(func=cmd_graph)

    s = sub.add_parser("gen", parents=[common], help="random d-regular matrix")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("entropy", parents=[common], help="min-entropy tools on gadget fibers")
    s.add_argument("tool", choices=["min-entropy", "dense", "gap", "restrict"])
    s.add_argument("--gadget", choices=["gl", "ip"], default="gl")
    s.add_argument("--ell", type=int, default=1)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--z", required=True, help="target bit string, e.g. 01")
    s.add_argument("--delta")
    s.add_argument("--S", help="comma-separated 1-based blocks (default: all)")
    s.add_argument("--independent", action="store_true", help="use independent copies of X and Y")
    s.set_defaults(func=cmd_entropy)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, entropy.EntropyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
