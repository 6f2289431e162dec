"""Command line interface: ``bellpoly {vertices,facets,classify,violate,check}``.

Exit codes: 0 success, 1 check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from bellpoly import checks, io, quantum
from bellpoly.hull import METHOD_ALIASES, DegenerateInputError, facets
from bellpoly.scenario import Scenario, vertex_matrix
from bellpoly.symmetry import NotClosedError, orbit_decompose

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

NAMED_INEQUALITIES = {
    "chsh": (checks.S22, quantum.CHSH),
    "s33": (checks.S33, quantum.S33),
}


class UsageError(Exception):
    pass


def _scenario(args) -> Scenario:
    if not args.scenario:
        raise UsageError("--scenario is required")
    try:
        return Scenario.parse(args.scenario)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load_vertices(args):
    if args.inp:
        return io.read_vertices(args.inp)
    sc = _scenario(args)
    return sc, vertex_matrix(sc)


def cmd_vertices(args) -> int:
    sc = _scenario(args)
    n = io.write_vertices(args.out, sc, vertex_matrix(sc))
    if args.out:
        print(n)
    return EXIT_OK


def cmd_facets(args) -> int:
    sc, V = _load_vertices(args)
    F = facets(V, METHOD_ALIASES[args.method], scenario=sc, workers=args.workers)
    io.write_facets(args.out, sc, F, stream_threshold=args.stream_threshold)
    print(len(F), file=sys.stdout if args.out else sys.stderr)
    return EXIT_OK


def cmd_classify(args) -> int:
    if args.inp:
        sc, F = io.read_facets(args.inp)
    else:
        sc = _scenario(args)
        F = facets(vertex_matrix(sc), METHOD_ALIASES[args.method], scenario=sc, workers=args.workers)
    summary = io.class_summary(orbit_decompose(F, sc), sc)
    io.write_json(args.out, summary)
    if args.out:
        print(len(summary))
    return EXIT_OK


def _load_inequality(args):
    if args.ineq:
        if args.ineq.lower() in NAMED_INEQUALITIES:
            return NAMED_INEQUALITIES[args.ineq.lower()]
        try:
            return io.parse_inequality(args.ineq)
        except (ValueError, json.JSONDecodeError) as exc:
            raise UsageError(f"bad --ineq: {exc}") from None
    if args.inp:
        sc, rows = io.read_facets(args.inp)
        if not rows:
            raise UsageError(f"{args.inp} holds no inequality")
        if args.index >= len(rows):
            raise UsageError(f"--index {args.index} out of range ({len(rows)} inequalities)")
        return sc, rows[args.index]
    raise UsageError("give --ineq or --in")


def cmd_violate(args) -> int:
    sc, ineq = _load_inequality(args)
    if sc.n_sites != 2:
        raise UsageError("violate needs a two-site inequality")
    report = {"scenario": str(sc), "inequality": list(ineq)}
    objectives = ["value", "ratio"] if args.objective == "both" else [args.objective]
    results = {o: quantum.optimize_violation(ineq, sc, o, seed=args.seed, restarts=args.restarts) for o in objectives}
    main = results.get("value") or results["ratio"]
    report.update(main.report())
    if "ratio" in results:
        report["ratio"] = results["ratio"].ratio
        report["ratio_config"] = results["ratio"].config.angles()
    report["converged"] = all(r.converged for r in results.values())
    report["violated"] = main.value < -1e-9
    report.pop("objective")
    io.write_json(args.out, report)
    return EXIT_OK


def _print_table(results: list[checks.CheckResult]) -> None:
    rows = [("case", "quantity", "expected", "computed", "time[s]", "status")]
    for r in results:
        computed = f"{r.computed:.9g}" if isinstance(r.computed, float) else str(r.computed)
        rows.append((r.case, r.quantity, str(r.expected), computed, f"{r.seconds:.2f}", "PASS" if r.passed else "FAIL"))
    widths = [max(len(row[k]) for row in rows) for k in range(len(rows[0]))]
    for row in rows:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))


def cmd_check(args) -> int:
    cases = list(checks.CASES) if args.case == "all" else [args.case]
    results: list[checks.CheckResult] = []
    for case in cases:
        if case == "2n":
            for n in [args.n] if args.n else [3, 4]:
                results += checks.check_2n(n)
        elif case == "s222":
            methods = [METHOD_ALIASES[args.method]] if args.method else ["adjacency_decomposition", "double_description"]
            results += checks.check_s222(methods, workers=args.workers)
        elif case == "quantum":
            results += checks.check_quantum(seed=args.seed)
        else:
            results += checks.CASES[case]()
    if args.json:
        json.dump([r.__dict__ for r in results], sys.stdout, indent=2, default=str)
        print()
    else:
        _print_table(results)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bellpoly", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, method=True):
        sp.add_argument("--scenario", help='site observable counts, e.g. "3,3" or "2,2,2"')
        sp.add_argument("--in", dest="inp", help="input file")
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=os.cpu_count() or 1)
        sp.add_argument("--json", action="store_true")
        if method:
            sp.add_argument("--method", choices=sorted(METHOD_ALIASES), default="dd")

    sp = sub.add_parser("vertices", help="write the vertex file of a scenario")
    common(sp, method=False)
    sp.set_defaults(func=cmd_vertices)

    sp = sub.add_parser("facets", help="enumerate facets (from --in vertex file or --scenario)")
    common(sp)
    sp.add_argument("--stream-threshold", type=int, default=10_000)
    sp.set_defaults(func=cmd_facets)

    sp = sub.add_parser("classify", help="orbit classes of a facet file as JSON")
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("violate", help="singlet violation of a two-site inequality")
    common(sp, method=False)
    sp.add_argument("--ineq", help='"chsh", "s33" or a JSON tensor like [[2,0,0],[0,-1,-1],[0,-1,1]]')
    sp.add_argument("--index", type=int, default=0, help="line of the --in facet file to use")
    sp.add_argument("--objective", choices=["value", "ratio", "both"], default="both")
    sp.add_argument("--restarts", type=int, default=100)
    sp.set_defaults(func=cmd_violate)

    sp = sub.add_parser("check", help="run the reproduction checks")
    common(sp, method=False)
    sp.add_argument("--case", choices=["all", *checks.CASES], default="all")
    sp.add_argument("--n", type=int, help="n for the 2n case (default: 3 and 4)")
    sp.add_argument("--method", choices=sorted(METHOD_ALIASES), help="s222 hull method (default: both)")
    sp.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"bellpoly: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"bellpoly: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DegenerateInputError, NotClosedError) as exc:
        print(f"bellpoly: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
