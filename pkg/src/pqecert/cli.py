"""Command-line front end.

Exit codes: 0 solved/verified, 1 verification failure, 2 usage or parse
error, 3 timeout.
"""

import argparse
import sys

from . import engine, oracle, pqeio

VERIFY_Y_CAP = 20


def _read_text(path):
    with open(path) as fh:
        return fh.read()


def cmd_solve(args):
    try:
        doc = pqeio.parse_pqdimacs(_read_text(args.file))
    except (OSError, pqeio.PqdimacsError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    if args.qe:
        doc = pqeio.PqdimacsDoc(nvars=doc.nvars, f1=doc.f1 + doc.f2,
                                f2=[], y=doc.y)
    try:
        qf = doc.to_quant_formula()
    except ValueError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    sol, _ = engine.take_out(qf, time_limit=args.time_limit)
    if sol.status == engine.TIMEDOUT:
        print("error: time limit exceeded", file=sys.stderr)
        return 3
    clauses = sol.clauses
    if args.noise_filter and sol.status == engine.SOLVED:
        clauses = oracle.noise_filter(clauses, qf.f2)
        sol = engine.Solution(status=sol.status, clauses=clauses,
                              stats=sol.stats)
    text = pqeio.write_solution(sol, doc.nvars)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    if args.verify:
        if len(qf.y) > VERIFY_Y_CAP:
            print("warning: verification refused, |Y|=%d exceeds %d"
                  % (len(qf.y), VERIFY_Y_CAP), file=sys.stderr)
            return 0
        check = [()] if sol.status == engine.UNSAT else clauses
        if not oracle.verify_solution(qf, check):
            print("error: solution failed verification", file=sys.stderr)
            return 1
        print("c verified", file=sys.stderr)
    return 0


def cmd_sat(args):
    try:
        nvars, clauses = pqeio.parse_dimacs(_read_text(args.file))
    except (OSError, pqeio.PqdimacsError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    try:
        verdict = engine.sat_via_pqe(clauses, nvars,
                                     time_limit=args.time_limit)
    except engine.PqeTimeout:
        print("error: time limit exceeded", file=sys.stderr)
        return 3
    print(verdict)
    return 0


def cmd_propgen(args):
    from .propgen import pipeline
    return pipeline.run_cli(args)


def cmd_fifo(args):
    from .propgen import circuit
    c = circuit.build_fifo(args.n, args.p, args.val, buggy=args.buggy)
    text = circuit.write_aag(c)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="pqecert",
        description="partial quantifier elimination via certificate clauses")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="take F1 out of a PQDIMACS instance")
    p.add_argument("file")
    p.add_argument("--out", help="also write the solution CNF to this file")
    p.add_argument("--verify", action="store_true",
                   help="check the solution with the semantic oracle")
    p.add_argument("--noise-filter", action="store_true",
                   help="drop solution clauses implied by F2 alone")
    p.add_argument("--time-limit", type=float, default=None, metavar="S")
    p.add_argument("--qe", action="store_true",
                   help="full QE: treat every clause as part of F1")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sat", help="decide a DIMACS CNF via PQE")
    p.add_argument("file")
    p.add_argument("--time-limit", type=float, default=None, metavar="S")
    p.set_defaults(func=cmd_sat)

    p = sub.add_parser("propgen",
                       help="generate and check properties of a circuit")
    p.add_argument("aag", help="AIGER ASCII circuit model")
    p.add_argument("--frames", type=int, default=3, metavar="K")
    p.add_argument("--max-targets", type=int, default=20, metavar="N")
    p.add_argument("--per-target-timeout", type=float, default=10.0,
                   metavar="S")
    p.add_argument("--seed", type=int, default=0, metavar="R")
    p.add_argument("--order", choices=["file", "random"], default="file")
    p.add_argument("--var-order", choices=["asc", "desc"], default="asc",
                   help="decision order of the quantified variables")
    p.add_argument("--spec", metavar="CNF",
                   help="specification CNF over state vars")
    p.add_argument("--expect", metavar="BUILTIN|CNF",
                   help="reachability expectation for badness flagging")
    p.add_argument("--external-mc", metavar="CMD",
                   help="model checker command with {property} {aag} slots")
    p.add_argument("--report", metavar="PREFIX",
                   help="write PREFIX.txt, PREFIX.tsv and PREFIX.png")
    p.set_defaults(func=cmd_propgen)

    p = sub.add_parser("fifo", help="emit a FIFO circuit as AIGER ASCII")
    p.add_argument("--n", type=int, default=4, help="number of elements")
    p.add_argument("--p", type=int, default=3, help="bits per element")
    p.add_argument("--val", type=int, default=1,
                   help="constant the buggy variant cannot enqueue")
    p.add_argument("--buggy", action="store_true")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_fifo)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return args.func(args)
    except ValueError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
