"""PQDIMACS reader/writer.

The format is a minimal extension of DIMACS CNF:

    c optional comments
    p pqe <nvars> <n_f1> <n_f2>
    y <id> <id> ... 0
    <n_f1 clauses of F1, one per line, 0-terminated>
    <n_f2 clauses of F2, one per line, 0-terminated>

Variables listed on the `y` line are free; all others are existentially
quantified. F1 membership is positional: the first n_f1 clauses.
"""

from dataclasses import dataclass

from .formula import QuantFormula, TautologyError, normalize_clause
from . import engine


class PqdimacsError(ValueError):
    """Parse error with a 1-based line number."""

    def __init__(self, line, message):
        super().__init__("line %d: %s" % (line, message))
        self.line = line


@dataclass
class PqdimacsDoc:
    nvars: int
    f1: list
    f2: list
    y: list  # sorted free-var ids

    def to_quant_formula(self) -> QuantFormula:
        return QuantFormula(nvars=self.nvars, f1=self.f1, f2=self.f2,
                            y=frozenset(self.y))


def _parse_clause_line(tokens, lineno, nvars):
    if not tokens or tokens[-1] != "0":
        raise PqdimacsError(lineno, "clause not terminated by 0")
    lits = []
    for t in tokens[:-1]:
        try:
            l = int(t)
        except ValueError:
            raise PqdimacsError(lineno, "bad literal %r" % t)
        if l == 0:
            raise PqdimacsError(lineno, "literal 0 inside clause")
        if abs(l) > nvars:
            raise PqdimacsError(lineno, "variable %d exceeds nvars=%d"
                                % (abs(l), nvars))
        if l in lits:
            raise PqdimacsError(lineno, "duplicate literal %d" % l)
        lits.append(l)
    try:
        return normalize_clause(lits)
    except TautologyError as e:
        raise PqdimacsError(lineno, str(e))


def parse_pqdimacs(text: str) -> PqdimacsDoc:
    header = None
    yline = None
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tokens = line.split()
        if header is None:
            if tokens[:2] != ["p", "pqe"] or len(tokens) != 5:
                raise PqdimacsError(lineno, "expected header 'p pqe <nvars> <n_f1> <n_f2>'")
            try:
                nvars, n_f1, n_f2 = (int(t) for t in tokens[2:])
            except ValueError:
                raise PqdimacsError(lineno, "non-integer header field")
            if nvars < 0 or n_f1 < 0 or n_f2 < 0:
                raise PqdimacsError(lineno, "negative header field")
            header = (nvars, n_f1, n_f2)
            continue
        if yline is None:
            if tokens[0] != "y" or tokens[-1] != "0":
                raise PqdimacsError(lineno, "expected free-var line 'y <id>... 0'")
            y = []
            for t in tokens[1:-1]:
                try:
                    v = int(t)
                except ValueError:
                    raise PqdimacsError(lineno, "bad variable id %r" % t)
                if not 1 <= v <= header[0]:
                    raise PqdimacsError(lineno, "free variable %d out of range" % v)
                if v in y:
                    raise PqdimacsError(lineno, "duplicate free variable %d" % v)
                y.append(v)
            yline = sorted(y)
            continue
        clauses.append((lineno, _parse_clause_line(tokens, lineno, header[0])))
    if header is None:
        raise PqdimacsError(1, "missing header")
    if yline is None:
        raise PqdimacsError(1, "missing free-var line")
    nvars, n_f1, n_f2 = header
    if len(clauses) != n_f1 + n_f2:
        raise PqdimacsError(clauses[-1][0] if clauses else 1,
                            "expected %d clauses, found %d"
                            % (n_f1 + n_f2, len(clauses)))
    seen = {}
    for lineno, c in clauses:
        if c in seen:
            raise PqdimacsError(lineno, "duplicate clause %s (first at line %d)"
                                % (" ".join(map(str, c)), seen[c]))
        seen[c] = lineno
    f1 = [c for _, c in clauses[:n_f1]]
    f2 = [c for _, c in clauses[n_f1:]]
    return PqdimacsDoc(nvars=nvars, f1=f1, f2=f2, y=yline)


def _clause_line(c):
    return " ".join(str(l) for l in c) + " 0"


def write_pqdimacs(doc: PqdimacsDoc) -> str:
    out = ["p pqe %d %d %d" % (doc.nvars, len(doc.f1), len(doc.f2))]
    out.append("y " + " ".join(str(v) for v in sorted(doc.y)) + " 0"
               if doc.y else "y 0")
    for c in doc.f1 + doc.f2:
        out.append(_clause_line(c))
    return "\n".join(out) + "\n"


def write_solution(sol, nvars: int) -> str:
    """Solution as DIMACS CNF over the original variable ids; an
    unsatisfiable formula yields the single empty clause."""
    out = ["c status %s" % sol.status]
    for key in sorted(sol.stats):
        out.append("c stats %s %d" % (key, sol.stats[key]))
    if sol.status == engine.UNSAT:
        out.append("p cnf %d 1" % nvars)
        out.append("0")
    else:
        out.append("p cnf %d %d" % (nvars, len(sol.clauses)))
        for c in sol.clauses:
            out.append(_clause_line(c))
    return "\n".join(out) + "\n"


def parse_dimacs(text: str):
    """Plain DIMACS CNF (for the `sat` subcommand); returns (nvars, clauses)."""
    nvars = None
    nclauses = None
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tokens = line.split()
        if nvars is None:
            if tokens[:2] != ["p", "cnf"] or len(tokens) != 4:
                raise PqdimacsError(lineno, "expected header 'p cnf <nvars> <nclauses>'")
            try:
                nvars, nclauses = int(tokens[2]), int(tokens[3])
            except ValueError:
                raise PqdimacsError(lineno, "non-integer header field")
            continue
        clauses.append(_parse_clause_line(tokens, lineno, nvars))
    if nvars is None:
        raise PqdimacsError(1, "missing header")
    if nclauses is not None and len(clauses) != nclauses:
        raise PqdimacsError(1, "expected %d clauses, found %d"
                            % (nclauses, len(clauses)))
    return nvars, clauses
