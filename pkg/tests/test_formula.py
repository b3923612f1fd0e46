import pytest
from hypothesis import given, strategies as st

from pqecert.formula import (QuantFormula, TautologyError, clause_vars,
                             cofactor_clause, cofactor_formula, is_resolvable,
                             lit_value, normalize_clause, resolve)


def test_normalize_sorts_by_variable():
    assert normalize_clause([3, -1, 2]) == (-1, 2, 3)


def test_normalize_deduplicates():
    assert normalize_clause([2, -1, 2]) == (-1, 2)


def test_normalize_rejects_tautology():
    with pytest.raises(TautologyError):
        normalize_clause([1, -1])


def test_normalize_rejects_zero():
    with pytest.raises(ValueError):
        normalize_clause([1, 0])


def test_lit_value():
    a = {1: True, 2: False}
    assert lit_value(1, a) is True
    assert lit_value(-1, a) is False
    assert lit_value(-2, a) is True
    assert lit_value(3, a) is None


def test_cofactor_clause():
    assert cofactor_clause((1, -2, 3), {2: False}) is True
    assert cofactor_clause((1, -2, 3), {2: True}) == (1, 3)
    assert cofactor_clause((1,), {1: False}) == ()


def test_cofactor_formula_drops_satisfied():
    f = [(1, 2), (-1, 3), (2, 3)]
    assert cofactor_formula(f, {1: True}) == [(3,), (2, 3)]


def test_resolve_basic():
    assert resolve((1, 2), (-1, 3), 1) == (2, 3)


def test_resolve_requires_single_clash():
    assert not is_resolvable((1, 2), (-1, -2), 1)
    with pytest.raises(ValueError):
        resolve((1, 2), (-1, -2), 1)


def test_resolve_requires_pivot_presence():
    with pytest.raises(ValueError):
        resolve((1, 2), (-1, 3), 2)


def test_clause_vars():
    assert clause_vars((-3, 1)) == {1, 3}


def test_quant_formula_partitions_vars():
    qf = QuantFormula(4, f1=[(1, 2)], f2=[(-3, 4)], y={1, 2})
    assert qf.x == frozenset({3, 4})
    assert qf.is_free_clause((1, 2))
    assert not qf.is_free_clause((1, 3))


def test_quant_formula_rejects_out_of_range():
    with pytest.raises(ValueError):
        QuantFormula(2, f1=[(1, 3)], y={1})
    with pytest.raises(ValueError):
        QuantFormula(2, y={5})


def test_quant_formula_rejects_duplicate_clause():
    with pytest.raises(ValueError):
        QuantFormula(2, f1=[(1, 2)], f2=[(2, 1)], y={1})


clauses_st = st.lists(
    st.integers(min_value=1, max_value=6).flatmap(
        lambda v: st.sampled_from([v, -v])),
    min_size=1, max_size=5)


@given(clauses_st)
def test_normalize_idempotent(lits):
    try:
        c = normalize_clause(lits)
    except TautologyError:
        return
    assert normalize_clause(c) == c
    assert list(c) == sorted(c, key=abs)


@given(clauses_st, st.dictionaries(st.integers(1, 6), st.booleans()))
def test_cofactor_preserves_truth(lits, assign):
    try:
        c = normalize_clause(lits)
    except TautologyError:
        return
    cc = cofactor_clause(c, assign)
    full = dict(assign)
    for l in c:
        full.setdefault(abs(l), False)
    truth = any(lit_value(l, full) for l in c)
    if cc is True:
        assert truth
    else:
        assert truth == any(lit_value(l, full) for l in cc)
