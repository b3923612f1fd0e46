"""End-to-end property generation: take selected clauses out of an
unrolling, keep each solution clause as a single-clause property over
the final state, test those as invariants, and flag bad ones.

The report comes in three forms: line-oriented text, a TSV table and a
matplotlib summary figure.
"""

import sys
import time
from dataclasses import dataclass, field

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .. import engine, oracle, pqeio
from ..formula import normalize_clause
from . import reach
from .circuit import read_aag
from .unroll import select_targets, unroll


@dataclass
class TargetResult:
    target: tuple
    status: str
    clauses: list
    seconds: float


@dataclass
class CandidateRow:
    clause: tuple          # over signed 1-based latch indices
    held_locally: bool
    invariant: object = "unknown"      # True / False / "unknown"
    implied_by_spec: object = "unknown"
    bad: object = "unknown"
    counterexample: list = None


@dataclass
class PropertyReport:
    frames: int
    rows: list = field(default_factory=list)
    target_results: list = field(default_factory=list)

    def counts(self):
        inv = sum(1 for r in self.rows if r.invariant is True)
        bad = sum(1 for r in self.rows if r.bad is True)
        timeouts = sum(1 for t in self.target_results
                       if t.status == engine.TIMEDOUT)
        return {"targets": len(self.target_results), "timeouts": timeouts,
                "candidates": len(self.rows), "invariants": inv, "bad": bad}


def state_clause(u, clause):
    """Map a solution clause over frame-k CNF vars to signed 1-based
    latch indices."""
    back = {v: i for i, v in u.frame_vars[u.k].items()}
    return normalize_clause(
        [(1 if l > 0 else -1) * (back[abs(l)] + 1) for l in clause])


def gen_local_props(u, targets, per_target_budget=None, noise=False,
                    var_order="asc"):
    """Run take_out per target with F1 = {target}; returns (properties,
    per-target results) where properties maps each latch-space clause to
    the targets that produced it.

    var_order picks the decision order of the quantified variables:
    "asc" decides early-frame variables first, "desc" late-frame ones.
    Which order learns useful free clauses sooner depends on the
    circuit, so it is exposed as a knob.

    Clauses from timed-out targets are kept too: at that point they are
    free clauses the engine added to F1 as conflict certificates, so
    each one is implied by the unrolling even though the redundancy
    proof of the target itself did not finish."""
    if var_order not in ("asc", "desc"):
        raise ValueError("var_order must be 'asc' or 'desc'")
    props = {}
    results = []
    for target in targets:
        qf = u.to_quant_formula(target)
        xo = None if var_order == "asc" else sorted(qf.x, reverse=True)
        t0 = time.monotonic()
        sol, _ = engine.take_out(qf, time_limit=per_target_budget,
                                 x_order=xo)
        dt = time.monotonic() - t0
        clauses = [cl for cl in sol.clauses if cl]
        if noise and clauses:
            clauses = oracle.noise_filter(clauses, qf.f2)
        results.append(TargetResult(target=target, status=sol.status,
                                    clauses=clauses, seconds=dt))
        for c in clauses:
            props.setdefault(state_clause(u, c), []).append(target)
    return props, results


def flag_bad(rows, expectation=None, spec_clauses=None):
    """Fill implied_by_spec and bad for the invariant=True rows.

    expectation is None, a clause list over latch indices describing the
    states the designer expects to be reachable, or a pair
    ("vars", var_set) meaning every valuation of those latch variables
    is expected (clauses over other variables stay unknown).
    """
    for r in rows:
        if r.invariant is not True:
            continue
        if spec_clauses is not None:
            r.implied_by_spec = oracle.entails(spec_clauses, r.clause)
            if r.implied_by_spec:
                r.bad = False
                continue
        if expectation is None:
            continue
        if isinstance(expectation, tuple) and expectation[0] == "vars":
            if all(abs(l) in expectation[1] for l in r.clause):
                # a clause is never a tautology, so some expected
                # valuation falsifies it
                r.bad = True
            continue
        negated = [(-l,) for l in r.clause]
        r.bad = oracle.dpll_sat(list(expectation) + negated) is not None
    return rows


def build_report(c, u, props, results, expectation=None, spec_clauses=None,
                 external_mc=None):
    rows = [CandidateRow(clause=q, held_locally=True) for q in sorted(props)]
    rch = None
    if len(c.latches) <= reach.BFS_LATCH_CAP:
        rch = reach.bfs(c)
    for r in rows:
        r.invariant, r.counterexample = reach.check_invariant(
            c, r.clause, reach=rch, external_mc=external_mc)
    flag_bad(rows, expectation=expectation, spec_clauses=spec_clauses)
    return PropertyReport(frames=u.k, rows=rows, target_results=results)


def _fmt_clause(clause):
    return " ".join(str(l) for l in clause)


def report_text(rep: PropertyReport, latch_names=None):
    counts = rep.counts()
    lines = ["property report, %d frames" % rep.frames]
    lines.append("targets %d, timeouts %d, candidates %d, invariants %d, bad %d"
                 % (counts["targets"], counts["timeouts"],
                    counts["candidates"], counts["invariants"], counts["bad"]))
    for r in rep.rows:
        lines.append("clause [%s] local=%s invariant=%s implied_by_spec=%s bad=%s"
                     % (_fmt_clause(r.clause), r.held_locally, r.invariant,
                        r.implied_by_spec, r.bad))
        if r.counterexample is not None and latch_names:
            last = r.counterexample[-1]
            bits = ["%s=%d" % (latch_names[i], (last >> i) & 1)
                    for i in range(len(latch_names))]
            lines.append("  counterexample depth %d, state %s"
                         % (len(r.counterexample) - 1, " ".join(bits)))
    return "\n".join(lines) + "\n"


def report_tsv(rep: PropertyReport):
    lines = ["clause\tlocal\tinvariant\timplied_by_spec\tbad"]
    for r in rep.rows:
        lines.append("%s\t%s\t%s\t%s\t%s" % (_fmt_clause(r.clause),
                                             r.held_locally, r.invariant,
                                             r.implied_by_spec, r.bad))
    return "\n".join(lines) + "\n"


def report_figure(rep: PropertyReport, path):
    counts = rep.counts()
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    keys = ["targets", "timeouts", "candidates", "invariants", "bad"]
    ax1.bar(range(len(keys)), [counts[k] for k in keys], color="steelblue")
    ax1.set_xticks(range(len(keys)))
    ax1.set_xticklabels(keys, rotation=30, ha="right")
    ax1.set_ylabel("count")
    ax1.set_title("pipeline summary (%d frames)" % rep.frames)
    times = [t.seconds for t in rep.target_results]
    if times:
        ax2.hist(times, bins=min(20, max(5, len(times) // 2)),
                 color="darkorange")
    ax2.set_xlabel("seconds per target")
    ax2.set_ylabel("targets")
    ax2.set_title("take_out runtime")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def _parse_expectation(arg, c):
    if arg is None:
        return None
    if arg == "fifo-data":
        data_vars = set(i + 1 for i, name in enumerate(c.latch_names)
                        if name.startswith("data"))
        if not data_vars:
            raise ValueError("no data latches found for fifo-data expectation")
        return ("vars", data_vars)
    with open(arg) as fh:
        _, clauses = pqeio.parse_dimacs(fh.read())
    return clauses


def run_cli(args):
    try:
        with open(args.aag) as fh:
            c = read_aag(fh.read())
    except (OSError, ValueError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    spec_clauses = None
    if args.spec:
        with open(args.spec) as fh:
            _, spec_clauses = pqeio.parse_dimacs(fh.read())
    expectation = _parse_expectation(args.expect, c)
    u = unroll(c, args.frames)
    targets = select_targets(u, max_targets=args.max_targets,
                             order=args.order, seed=args.seed)
    props, results = gen_local_props(u, targets,
                                     per_target_budget=args.per_target_timeout,
                                     var_order=args.var_order)
    rep = build_report(c, u, props, results, expectation=expectation,
                       spec_clauses=spec_clauses, external_mc=args.external_mc)
    text = report_text(rep, latch_names=c.latch_names)
    sys.stdout.write(text)
    if args.report:
        with open(args.report + ".txt", "w") as fh:
            fh.write(text)
        with open(args.report + ".tsv", "w") as fh:
            fh.write(report_tsv(rep))
        report_figure(rep, args.report + ".png")
    return 0
