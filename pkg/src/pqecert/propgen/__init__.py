"""Property generation for sequential circuits: unroll, take clauses out
by PQE, test the resulting single-clause properties as invariants, and
flag the ones that a designer would call bad."""

from .circuit import Circuit, build_fifo, add_stutter, read_aag, write_aag
from .unroll import Unrolling, encode, unroll, select_targets
from .reach import bfs, diameter, check_invariant, diameter_leq
from .pipeline import PropertyReport, gen_local_props, flag_bad

__all__ = [
    "Circuit", "build_fifo", "add_stutter", "read_aag", "write_aag",
    "Unrolling", "encode", "unroll", "select_targets",
    "bfs", "diameter", "check_invariant", "diameter_leq",
    "PropertyReport", "gen_local_props", "flag_bad",
]
