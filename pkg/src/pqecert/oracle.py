"""Brute-force semantic checkers used to validate every solver claim.

Everything here is intentionally independent of the solver in engine.py:
plain DPLL plus exhaustive enumeration over the free variables. Verdicts
are exact; when an enumeration would be too large the oracle refuses
(EnumerationBudgetError) rather than sampling.
"""

from itertools import product

from .formula import cofactor_formula, lit_value, normalize_clause

ENUM_BUDGET = 20  # max free variables the per-subspace checkers enumerate


class EnumerationBudgetError(RuntimeError):
    """Raised instead of ever returning an unverified verdict."""


def dpll_sat(clauses, assumptions=None):
    """Complete DPLL with unit propagation.

    Returns a satisfying assignment (var -> bool dict, only the forced
    and decided vars) or None if unsatisfiable. Intended for small
    formulas (tens of variables).
    """
    assign = dict(assumptions) if assumptions else {}
    simplified = cofactor_formula(clauses, assign) if assign else [tuple(c) for c in clauses]
    result = _dpll(simplified, {})
    if result is None:
        return None
    result.update(assign)
    return result


def _dpll(clauses, assign):
    # unit propagation
    while True:
        unit = None
        for c in clauses:
            if len(c) == 0:
                return None
            if len(c) == 1:
                unit = c[0]
                break
        if unit is None:
            break
        assign[abs(unit)] = unit > 0
        clauses = cofactor_formula(clauses, {abs(unit): unit > 0})
    if not clauses:
        return assign
    # branch on the most frequent variable
    counts = {}
    for c in clauses:
        for l in c:
            counts[abs(l)] = counts.get(abs(l), 0) + 1
    v = max(counts, key=lambda k: (counts[k], -k))
    for val in (True, False):
        sub = cofactor_formula(clauses, {v: val})
        branch = dict(assign)
        branch[v] = val
        res = _dpll(sub, branch)
        if res is not None:
            return res
    return None


def entails(clauses, clause) -> bool:
    """True iff the clause set implies the clause (F and not-C is unsat)."""
    negated = [(-l,) for l in clause]
    return dpll_sat(list(clauses) + negated) is None


def _check_budget(y):
    if len(y) > ENUM_BUDGET:
        raise EnumerationBudgetError(
            "refusing to enumerate %d free variables (budget %d)" % (len(y), ENUM_BUDGET))


def _full_assignments(y):
    yv = sorted(y)
    for bits in product((False, True), repeat=len(yv)):
        yield dict(zip(yv, bits))


def es_implies(f, g, y) -> bool:
    """Does f es-imply the clause set g with respect to the free vars y?

    True iff for every full assignment to y, the cofactors of f-and-g
    and of f alone are equisatisfiable.
    """
    _check_budget(y)
    f = list(f)
    g = list(g)
    for ya in _full_assignments(y):
        f_y = cofactor_formula(f, ya)
        if dpll_sat(f_y) is None:
            continue  # f unsat here, f&g unsat too
        if dpll_sat(cofactor_formula(f + g, ya)) is None:
            return False
    return True


def naive_qe(f, x, y):
    """Truth table of exists-x.f over y, as the canonical maxterm CNF.

    One maxterm (the clause falsified exactly at that row) per
    y-assignment where the cofactor of f is unsatisfiable.
    """
    _check_budget(y)
    f = list(f)
    out = []
    for ya in _full_assignments(y):
        if dpll_sat(cofactor_formula(f, ya)) is None:
            maxterm = normalize_clause([-v if val else v for v, val in ya.items()])
            out.append(maxterm)
    return out


def eval_clauses(clauses, assignment) -> bool:
    """Evaluate a clause set under a full assignment of its variables."""
    return all(any(lit_value(l, assignment) for l in c) for c in clauses)


def verify_solution(qf, solution_clauses) -> bool:
    """Check the defining property of a PQE solution: in every subspace
    of the free variables, F1-and-F2 and solution-and-F2 are
    equisatisfiable."""
    _check_budget(qf.y)
    orig = qf.f1 + qf.f2
    repl = list(solution_clauses) + list(qf.f2)
    for ya in _full_assignments(qf.y):
        sat_orig = dpll_sat(cofactor_formula(orig, ya)) is not None
        sat_repl = dpll_sat(cofactor_formula(repl, ya)) is not None
        if sat_orig != sat_repl:
            return False
    return True


def noise_filter(solution_clauses, f2):
    """Drop solution clauses implied by F2 alone; the remainder is still
    a solution (solutions are closed under removing such clauses)."""
    return [q for q in solution_clauses if not entails(f2, q)]
