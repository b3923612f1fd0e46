"""Core representation of partially quantified CNF formulas.

Literals are signed DIMACS-style integers: variable ids are positive
integers 1..nvars, a negative integer denotes the negated variable.
A clause is a tuple of literals sorted by variable id; tautologies and
duplicate literals are rejected at construction, so tuple equality is
logical identity.
"""

from dataclasses import dataclass, field


class TautologyError(ValueError):
    """Raised when a clause contains opposite literals of some variable."""


def normalize_clause(lits) -> tuple:
    """Sort literals by variable id and deduplicate.

    Raises TautologyError if the clause contains both polarities of a
    variable (such clauses are never manipulated by the solver).
    """
    seen = {}
    for l in lits:
        if l == 0:
            raise ValueError("literal 0 is not allowed in a clause")
        v = abs(l)
        if v in seen:
            if seen[v] != l:
                raise TautologyError("tautologous clause: %d and %d" % (seen[v], l))
        else:
            seen[v] = l
    return tuple(seen[v] for v in sorted(seen))


def lit_value(lit: int, assignment: dict):
    """Value of a literal under a (partial) var -> bool assignment.

    Returns True/False when the variable is assigned, None otherwise.
    """
    val = assignment.get(abs(lit))
    if val is None:
        return None
    return val if lit > 0 else not val


def cofactor_clause(clause: tuple, assignment: dict):
    """Clause cofactor: True if satisfied, else the clause with the
    falsified literals removed."""
    out = []
    for l in clause:
        v = lit_value(l, assignment)
        if v is True:
            return True
        if v is None:
            out.append(l)
    return tuple(out)


def cofactor_formula(clauses, assignment: dict):
    """Formula cofactor: drop satisfied clauses, reduce the rest."""
    out = []
    for c in clauses:
        cc = cofactor_clause(c, assignment)
        if cc is not True:
            out.append(cc)
    return out


def is_resolvable(c1: tuple, c2: tuple, pivot: int) -> bool:
    """True iff c1, c2 have opposite literals of exactly one variable,
    and that variable is the pivot."""
    clashes = []
    s2 = set(c2)
    for l in c1:
        if -l in s2:
            clashes.append(abs(l))
            if len(clashes) > 1:
                return False
    return clashes == [pivot]


def resolve(c1: tuple, c2: tuple, pivot: int) -> tuple:
    """Resolvent of c1 and c2 on pivot.

    Raises ValueError when the clauses are unresolvable on pivot
    (opposite literals of two or more variables, or pivot absent).
    """
    if not is_resolvable(c1, c2, pivot):
        raise ValueError("clauses not resolvable on variable %d" % pivot)
    lits = [l for l in c1 if abs(l) != pivot]
    lits += [l for l in c2 if abs(l) != pivot]
    return normalize_clause(lits)


def clause_vars(clause: tuple):
    return set(abs(l) for l in clause)


@dataclass
class QuantFormula:
    """An existentially quantified CNF: exists X [F1 and F2].

    X holds the quantified variables, Y the free (unquantified) ones.
    F1/F2 membership is positional and preserved by the solver: the
    solution consists of free clauses accumulated in F1.
    """

    nvars: int
    f1: list = field(default_factory=list)
    f2: list = field(default_factory=list)
    y: frozenset = frozenset()

    def __post_init__(self):
        self.f1 = [normalize_clause(c) for c in self.f1]
        self.f2 = [normalize_clause(c) for c in self.f2]
        self.y = frozenset(self.y)
        seen = set()
        for c in self.f1 + self.f2:
            for l in c:
                if abs(l) > self.nvars:
                    raise ValueError("variable %d exceeds nvars=%d" % (abs(l), self.nvars))
            if c in seen:
                raise ValueError("duplicate clause across F1/F2: %s" % (c,))
            seen.add(c)
        bad = self.y - set(range(1, self.nvars + 1))
        if bad:
            raise ValueError("free variables out of range: %s" % sorted(bad))

    @property
    def x(self) -> frozenset:
        return frozenset(range(1, self.nvars + 1)) - self.y

    def is_free_clause(self, clause: tuple) -> bool:
        """A clause is free iff it mentions no quantified variable."""
        return all(abs(l) in self.y for l in clause)

    def all_clauses(self):
        return self.f1 + self.f2
