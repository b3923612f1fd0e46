import random
from itertools import product

import pytest

from pqecert import oracle
from pqecert.formula import QuantFormula, cofactor_formula


def brute_sat(clauses, nvars):
    for bits in product((False, True), repeat=nvars):
        a = dict(zip(range(1, nvars + 1), bits))
        if all(any((l > 0) == a[abs(l)] for l in c) for c in clauses):
            return True
    return False


def rand_cnf(rng, nvars, ncl, width=3):
    out = set()
    for _ in range(ncl * 3):
        if len(out) >= ncl:
            break
        vs = rng.sample(range(1, nvars + 1), rng.randint(1, min(width, nvars)))
        out.add(tuple(sorted((v if rng.random() < 0.5 else -v for v in vs),
                             key=abs)))
    return list(out)


def test_dpll_agrees_with_truth_table():
    rng = random.Random(7)
    for _ in range(300):
        nv = rng.randint(1, 6)
        f = rand_cnf(rng, nv, rng.randint(1, 12))
        model = oracle.dpll_sat(f)
        assert (model is not None) == brute_sat(f, nv)
        if model is not None:
            full = {v: model.get(v, False) for v in range(1, nv + 1)}
            assert all(any((l > 0) == full[abs(l)] for l in c) for c in f)


def test_dpll_with_assumptions():
    f = [(1, 2), (-1, 2)]
    assert oracle.dpll_sat(f, {2: False}) is None
    m = oracle.dpll_sat(f, {1: True})
    assert m[1] is True


def test_entails():
    f = [(1, 2), (-1, 2)]
    assert oracle.entails(f, (2,))
    assert not oracle.entails(f, (1,))
    assert oracle.entails([()], (1,))


def test_es_implies_trivial_cases():
    # a clause implied outright is es-implied
    assert oracle.es_implies([(1, 2), (-1, 2)], [(2,)], {2})
    # x=2 quantified: f = (x), g = (not x) is not es-implied (f&g unsat, f sat)
    assert not oracle.es_implies([(2,)], [(-2,)], {1})


def test_naive_qe_maxterms():
    # exists x2 [(y1 or x2) and (y1 or not x2)] == y1
    f = [(1, 2), (1, -2)]
    assert oracle.naive_qe(f, {2}, {1}) == [(1,)]
    # no unsat row -> empty CNF
    assert oracle.naive_qe([(1, 2)], {2}, {1}) == []


def test_naive_qe_matches_cofactor_sat():
    rng = random.Random(21)
    for _ in range(100):
        nv = rng.randint(2, 6)
        y = set(rng.sample(range(1, nv + 1), rng.randint(1, nv - 1)))
        x = set(range(1, nv + 1)) - y
        f = rand_cnf(rng, nv, rng.randint(1, 10))
        qe = set(oracle.naive_qe(f, x, y))
        for bits in product((False, True), repeat=len(y)):
            ya = dict(zip(sorted(y), bits))
            sat = oracle.dpll_sat(cofactor_formula(f, ya)) is not None
            maxterm = tuple(sorted((-v if val else v for v, val in ya.items()),
                                   key=abs))
            assert (maxterm in qe) == (not sat)


def test_verify_solution_accepts_and_rejects():
    qf = QuantFormula(3, f1=[(-2, 3)], f2=[(1, 2), (1, -3)], y={1})
    assert oracle.verify_solution(qf, [(1,)])
    assert not oracle.verify_solution(qf, [(-1,)])
    assert not oracle.verify_solution(qf, [])


def test_enumeration_budget():
    qf = QuantFormula(25, f1=[], f2=[], y=set(range(1, 22)))
    with pytest.raises(oracle.EnumerationBudgetError):
        oracle.verify_solution(qf, [])


def test_noise_filter():
    f2 = [(1,), (2, 3)]
    kept = oracle.noise_filter([(1, 2), (3, 4)], f2)
    assert kept == [(3, 4)]
