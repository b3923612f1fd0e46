"""Time-frame expansion of a circuit into CNF.

Each transition copy is the Tseitin encoding of the netlist; latch,
input and gate variables are fresh per frame. The frame-k state
variables are the free variables of the resulting quantified formula,
everything else is quantified.
"""

import random
from dataclasses import dataclass

from ..formula import QuantFormula, normalize_clause
from .circuit import topo_ands


@dataclass
class Unrolling:
    circuit: object
    k: int
    nvars: int
    frame_vars: list   # per frame 0..k: latch index -> CNF var
    input_vars: list   # per frame 0..k-1: input index -> CNF var
    cnf: list          # all clauses of F_k
    init_clauses: list  # per init frame: the init unit clauses
    y: frozenset       # CNF vars of the frame-k state
    decision_order: list  # quantified vars worth deciding, in order

    def to_quant_formula(self, target=None) -> QuantFormula:
        """F_k as a QuantFormula; with a target clause, F1 = {target}
        and F2 = the rest, otherwise F1 is empty."""
        if target is None:
            return QuantFormula(nvars=self.nvars, f1=[], f2=list(self.cnf),
                                y=self.y)
        rest = [c for c in self.cnf if c != target]
        if len(rest) == len(self.cnf):
            raise ValueError("target clause not in the unrolling")
        return QuantFormula(nvars=self.nvars, f1=[target], f2=rest, y=self.y)


def encode(c, var_of, emit):
    """Tseitin clauses of one transition copy.

    var_of maps aiger variables (inputs, latches, gates, plus 0 for the
    constant) to CNF vars; emit receives each clause.
    """
    def cl(lit):
        v = var_of[lit >> 1]
        return -v if lit & 1 else v

    for lhs, a, b in c.ands:
        g, la, lb = cl(lhs), cl(a), cl(b)
        emit((-g, la))
        emit((-g, lb))
        emit((g, -la, -lb))


def unroll(c, k: int, init_frames=(0,)) -> Unrolling:
    """F_k = I(S_0) and T(S_0,S_1) and ... and T(S_{k-1},S_k).

    init_frames lists the frames whose states are constrained to the
    initial condition (the diameter check uses (0, 1)).
    """
    if k < 1:
        raise ValueError("need k >= 1")
    nvars = 0

    def fresh():
        nonlocal nvars
        nvars += 1
        return nvars

    const = fresh()  # stands for the aiger constant true
    frame_vars = [{i: fresh() for i in range(len(c.latches))}
                  for _ in range(k + 1)]
    input_vars = [{i: fresh() for i in range(len(c.inputs))}
                  for _ in range(k)]
    order = topo_ands(c)

    clauses = {}

    def emit(lits):
        clauses.setdefault(normalize_clause(lits), None)

    emit((const,))
    init_clauses = []
    for j in init_frames:
        units = []
        for i, (_, _, init) in enumerate(c.latches):
            if init == 0:
                units.append((-frame_vars[j][i],))
            elif init == 1:
                units.append((frame_vars[j][i],))
        for u in units:
            emit(u)
        init_clauses.append(units)
    for j in range(k):
        var_of = {0: const}
        for i, lit in enumerate(c.inputs):
            var_of[lit >> 1] = input_vars[j][i]
        for i, (lit, _, _) in enumerate(c.latches):
            var_of[lit >> 1] = frame_vars[j][i]
        for a in order:
            var_of[a[0] >> 1] = fresh()
        encode(c, var_of, emit)
        for i, (_, nlit, _) in enumerate(c.latches):
            s1 = frame_vars[j + 1][i]
            nv = var_of[nlit >> 1]
            nl = -nv if nlit & 1 else nv
            emit((-s1, nl))
            emit((s1, -nl))
    # deciding the frame-0 state and then the inputs frame by frame lets
    # every other variable be assigned by propagation
    decision_order = list(frame_vars[0].values())
    for j in range(k):
        decision_order.extend(input_vars[j].values())
    return Unrolling(circuit=c, k=k, nvars=nvars, frame_vars=frame_vars,
                     input_vars=input_vars, cnf=list(clauses),
                     init_clauses=init_clauses,
                     y=frozenset(frame_vars[k].values()),
                     decision_order=decision_order)


def select_targets(u: Unrolling, max_targets=None, order="file", seed=0):
    """Clauses of F_k mentioning a frame-k state variable, in file order
    or in a seeded shuffle."""
    targets = [c for c in u.cnf if any(abs(l) in u.y for l in c)]
    if order == "random":
        random.Random(seed).shuffle(targets)
    elif order != "file":
        raise ValueError("order must be 'file' or 'random'")
    if max_targets is not None:
        targets = targets[:max_targets]
    return targets
