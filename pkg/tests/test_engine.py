import random

import pytest

from pqecert import engine, oracle
from pqecert.engine import CONFLICT, NONCONFLICT, Solver, take_out
from pqecert.formula import QuantFormula

# the three worked reference instances (transliterated; y1=1, x2=2, x3=3,
# and x1=1 for the third one)
INSTANCE_A = QuantFormula(3, f1=[(-2, 3)], f2=[(1, 2), (1, -3)], y={1})
INSTANCE_B = QuantFormula(3, f1=[(1, 2)], f2=[(-2, 3), (-1, -3)], y={1})
INSTANCE_C = QuantFormula(3, f1=[(-2, 3)], f2=[(-1, 2), (-1, -3)], y={1})


def events_of(solver, *kinds):
    return [e for e in solver.events if e[0] in kinds]


def test_instance_a_solution_and_certificates():
    sol, s = take_out(INSTANCE_A, record=True)
    assert sol.status == engine.SOLVED
    assert sol.clauses == [(1,)]
    learned = events_of(s, "learned")
    # conflict certificate y1 first, then the blocked certificate for x2
    assert learned[0] == ("learned", (1,), CONFLICT)
    assert ("added", (1,), "F1") in s.events
    assert learned[-1] == ("learned", (-2,), NONCONFLICT)


def test_instance_a_blocked_event():
    sol, s = take_out(INSTANCE_A, record=True)
    blocked = events_of(s, "blocked")
    assert len(blocked) == 1
    _, target, w, assign, cert_clause, alive = blocked[0]
    assert target == (-2, 3)
    assert w == 2
    assert cert_clause == (-1, -2)


def test_instance_b_nested_level():
    sol, s = take_out(INSTANCE_B, record=True)
    assert sol.status == engine.SOLVED
    assert sol.clauses == []
    learned = [e[1:] for e in events_of(s, "learned")]
    # the nested level proves C2 first (K = y1 or x3), then the target
    assert ((1, 3), NONCONFLICT) in learned
    assert learned[-1] == ((1, 2), NONCONFLICT)
    assert not events_of(s, "added")


def test_instance_c_special_clause():
    sol, s = take_out(INSTANCE_C, record=True)
    assert sol.status == engine.SOLVED
    assert sol.clauses == [(-1,)]
    assert ("special", (-1,)) in s.events
    assert ("added", (-1,), "F1") in s.events
    # the final nonconflict certificate is not added to F
    final = events_of(s, "learned")[-1]
    assert final == ("learned", (-2,), NONCONFLICT)
    added = [e[1] for e in events_of(s, "added")]
    assert (-2,) not in added


def test_unsat_formula_yields_empty_clause():
    qf = QuantFormula(2, f1=[(1,), (-1, 2)], f2=[(-2,)], y=frozenset())
    sol, _ = take_out(qf)
    assert sol.status == engine.UNSAT
    assert sol.clauses == [()]


def test_already_free_f1_untouched():
    qf = QuantFormula(3, f1=[(1,)], f2=[(2, 3)], y={1})
    sol, _ = take_out(qf)
    assert sol.status == engine.SOLVED
    assert sol.clauses == [(1,)]


def test_timeout_reports_status():
    rng = random.Random(0)
    cls = set()
    for _ in range(300):
        vs = rng.sample(range(1, 25), 3)
        cls.add(tuple(sorted((v if rng.random() < 0.5 else -v for v in vs),
                             key=abs)))
    qf = QuantFormula(24, f1=list(cls)[:40], f2=list(cls)[40:], y={1, 2})
    sol, _ = take_out(qf, time_limit=0.0)
    assert sol.status == engine.TIMEDOUT


def test_x_order_rejects_duplicates():
    with pytest.raises(ValueError):
        Solver(INSTANCE_A, x_order=[2, 2])


def test_x_order_changes_decisions_not_result():
    sol1, _ = take_out(INSTANCE_A)
    sol2, _ = take_out(INSTANCE_A, x_order=[3, 2])
    assert sol1.clauses == sol2.clauses


def test_added_clauses_implied_by_original():
    rng = random.Random(11)
    for _ in range(150):
        nv = rng.randint(2, 10)
        y = frozenset(rng.sample(range(1, nv + 1), rng.randint(0, nv // 2)))
        cls = set()
        for _ in range(60):
            if len(cls) >= rng.randint(3, 25):
                break
            vs = rng.sample(range(1, nv + 1), rng.randint(1, min(3, nv)))
            cls.add(tuple(sorted((v if rng.random() < 0.5 else -v
                                  for v in vs), key=abs)))
        cls = list(cls)
        k = rng.randint(0, len(cls))
        qf = QuantFormula(nv, f1=cls[:k], f2=cls[k:], y=y)
        orig = qf.all_clauses()
        sol, s = take_out(qf, record=True, time_limit=10)
        for e in s.events:
            if e[0] == "added":
                assert oracle.entails(orig, e[1]), (qf, e)


def test_solution_verified_by_oracle():
    rng = random.Random(13)
    for _ in range(150):
        nv = rng.randint(2, 10)
        y = frozenset(rng.sample(range(1, nv + 1), rng.randint(0, min(5, nv))))
        cls = set()
        for _ in range(60):
            if len(cls) >= rng.randint(3, 25):
                break
            vs = rng.sample(range(1, nv + 1), rng.randint(1, min(4, nv)))
            cls.add(tuple(sorted((v if rng.random() < 0.5 else -v
                                  for v in vs), key=abs)))
        cls = list(cls)
        k = rng.randint(0, len(cls))
        qf = QuantFormula(nv, f1=cls[:k], f2=cls[k:], y=y)
        sol, _ = take_out(qf, time_limit=10)
        chk = [()] if sol.status == engine.UNSAT else sol.clauses
        assert oracle.verify_solution(qf, chk), qf


def test_sat_via_pqe_small():
    assert engine.sat_via_pqe([(1, 2), (-1, 2), (-2,)], 2) == "UNSAT"
    assert engine.sat_via_pqe([(1, 2), (-1, 2)], 2) == "SAT"
    assert engine.sat_via_pqe([(-1,)], 1) == "SAT"  # no all-positive clause


def test_sat_via_pqe_agrees_with_dpll():
    rng = random.Random(3)
    for _ in range(200):
        nv = rng.randint(2, 10)
        cls = set()
        for _ in range(rng.randint(2, 30)):
            vs = rng.sample(range(1, nv + 1), min(3, nv))
            cls.add(tuple(sorted((v if rng.random() < 0.5 else -v
                                  for v in vs), key=abs)))
        cls = list(cls)
        want = "SAT" if oracle.dpll_sat(cls) is not None else "UNSAT"
        assert engine.sat_via_pqe(cls, nv) == want


def test_solver_stats_populated():
    sol, s = take_out(INSTANCE_A)
    assert s.stats["targets"] == 1
    assert s.stats["blocked_events"] >= 1
    assert s.stats["conflict_certs"] >= 1
