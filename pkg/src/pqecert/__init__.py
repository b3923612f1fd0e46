"""Partial quantifier elimination for propositional CNF via certificate
clauses, with a property-generation pipeline for sequential circuits."""

from .formula import QuantFormula, normalize_clause, resolve, TautologyError
from .engine import (Solver, Solution, Certificate, take_out, sat_via_pqe,
                     PqeTimeout, SOLVED, UNSAT, TIMEDOUT, CONFLICT, NONCONFLICT)

__all__ = [
    "QuantFormula", "normalize_clause", "resolve", "TautologyError",
    "Solver", "Solution", "Certificate", "take_out", "sat_via_pqe",
    "PqeTimeout", "SOLVED", "UNSAT", "TIMEDOUT", "CONFLICT", "NONCONFLICT",
]
