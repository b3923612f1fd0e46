"""Exact reachability analysis by breadth-first search over the state
space (bit-packed, numpy-vectorized) and the PQE-based diameter check.

States are integers whose bit i is the value of latch i. The BFS caps
out at 24 latches; beyond that check_invariant either delegates to an
external model checker command or answers "unknown".
"""

import os
import shlex
import subprocess
import tempfile

import numpy as np

from .. import engine, oracle
from .circuit import add_stutter, topo_ands, write_aag
from .unroll import unroll

BFS_LATCH_CAP = 24


class Reach:
    """BFS result: reached bitmap, distance and predecessor per state."""

    def __init__(self, nlatches):
        self.nlatches = nlatches
        size = 1 << nlatches
        self.reached = np.zeros(size, dtype=bool)
        self.dist = np.full(size, -1, dtype=np.int32)
        self.pred = np.full(size, -1, dtype=np.int64)
        self.diameter = 0

    def trace_to(self, state):
        """Initial-to-state path as a list of packed states."""
        out = [int(state)]
        while self.pred[out[-1]] >= 0:
            out.append(int(self.pred[out[-1]]))
        out.reverse()
        return out


def _next_states(c, topo, states):
    """All successors of the packed states, one per input valuation.

    Returns an array of length len(states) * 2^I where block s*2^I..
    holds the successors of states[s]."""
    ninputs = len(c.inputs)
    m = 1 << ninputs
    n = len(states)
    total = n * m
    vals = {0: np.zeros(total, dtype=bool)}
    combos = np.arange(m, dtype=np.uint64)
    for i, lit in enumerate(c.inputs):
        vals[lit >> 1] = np.tile((combos >> np.uint64(i)) & np.uint64(1) == 1, n)
    for i, (lit, _, _) in enumerate(c.latches):
        bit = (states >> np.uint64(i)) & np.uint64(1) == 1
        vals[lit >> 1] = np.repeat(bit, m)

    def lv(lit):
        v = vals[lit >> 1]
        return ~v if lit & 1 else v

    for lhs, a, b in topo:
        vals[lhs >> 1] = lv(a) & lv(b)
    out = np.zeros(total, dtype=np.uint64)
    for i, (_, nlit, _) in enumerate(c.latches):
        out |= lv(nlit).astype(np.uint64) << np.uint64(i)
    return out


def _initial_states(c):
    fixed = 0
    free_bits = []
    for i, (_, _, init) in enumerate(c.latches):
        if init == 1:
            fixed |= 1 << i
        elif init is None:
            free_bits.append(i)
    states = np.array([fixed], dtype=np.uint64)
    for i in free_bits:
        states = np.concatenate([states, states | np.uint64(1 << i)])
    return states


def bfs(c) -> Reach:
    nlatches = len(c.latches)
    if nlatches > BFS_LATCH_CAP:
        raise ValueError("refusing BFS over %d latches (cap %d)"
                         % (nlatches, BFS_LATCH_CAP))
    topo = topo_ands(c)
    r = Reach(nlatches)
    frontier = np.unique(_initial_states(c))
    r.reached[frontier] = True
    r.dist[frontier] = 0
    depth = 0
    m = 1 << len(c.inputs)
    while len(frontier):
        succ = _next_states(c, topo, frontier)
        preds = np.repeat(frontier, m)
        uniq, first = np.unique(succ, return_index=True)
        new_mask = ~r.reached[uniq]
        new = uniq[new_mask]
        if len(new) == 0:
            break
        depth += 1
        r.reached[new] = True
        r.dist[new] = depth
        r.pred[new] = preds[first[new_mask]]
        r.diameter = depth
        frontier = new
    return r


def diameter(c) -> int:
    """Largest BFS distance of any reachable state."""
    return bfs(c).diameter


def _falsifying_states(reach, q):
    """Reached states where the clause q (over signed 1-based latch
    indices) is false."""
    idx = np.nonzero(reach.reached)[0].astype(np.uint64)
    sat = np.zeros(len(idx), dtype=bool)
    for lit in q:
        bit = (idx >> np.uint64(abs(lit) - 1)) & np.uint64(1) == 1
        sat |= bit if lit > 0 else ~bit
    return idx[~sat]


def _run_external_mc(command, c, q):
    """Delegate to a model-checker command with {property} and {aag}
    placeholders; exit 0 means the invariant holds, 1 means it fails,
    anything else is unknown."""
    with tempfile.TemporaryDirectory() as td:
        aag_path = os.path.join(td, "model.aag")
        prop_path = os.path.join(td, "property.cnf")
        with open(aag_path, "w") as fh:
            fh.write(write_aag(c))
        with open(prop_path, "w") as fh:
            fh.write(" ".join(str(l) for l in q) + " 0\n")
        cmd = [t.replace("{property}", prop_path).replace("{aag}", aag_path)
               for t in shlex.split(command)]
        try:
            rc = subprocess.run(cmd, capture_output=True).returncode
        except OSError:
            return "unknown", None
    if rc == 0:
        return True, None
    if rc == 1:
        return False, None
    return "unknown", None


def check_invariant(c, q, reach=None, external_mc=None):
    """Is the clause q (signed 1-based latch indices) true in every
    reachable state?

    Returns (True, None), (False, counterexample trace) or
    ("unknown", None) when the state space exceeds the BFS cap and no
    external checker is configured.
    """
    if len(c.latches) > BFS_LATCH_CAP:
        if external_mc:
            return _run_external_mc(external_mc, c, q)
        return "unknown", None
    if reach is None:
        reach = bfs(c)
    bad = _falsifying_states(reach, q)
    if len(bad) == 0:
        return True, None
    witness = bad[np.argmin(reach.dist[bad])]
    return False, reach.trace_to(witness)


def diameter_leq(c, m: int, time_limit=None) -> bool:
    """PQE-based one-sided diameter check: True implies every reachable
    state is reachable within m steps.

    Stuttering is added by construction. The unrolling spans m+1
    transition copies with the initial condition asserted at frames 0
    and 1; the frame-1 copy is taken out and the check passes iff each
    solution clause is already implied by the rest of the formula.
    """
    if m < 1:
        raise ValueError("need m >= 1")
    cs = add_stutter(c)
    u = unroll(cs, m + 1, init_frames=(0, 1))
    f1 = u.init_clauses[1]
    if not f1:
        return True
    f1_set = set(f1)
    from ..formula import QuantFormula
    qf = QuantFormula(nvars=u.nvars, f1=f1,
                      f2=[cl for cl in u.cnf if cl not in f1_set], y=u.y)
    sol, _ = engine.take_out(qf, time_limit=time_limit,
                             x_order=u.decision_order)
    if sol.status == engine.TIMEDOUT:
        raise engine.PqeTimeout("diameter check timed out")
    clauses = [()] if sol.status == engine.UNSAT else sol.clauses
    return all(oracle.entails(qf.f2, q) for q in clauses)
