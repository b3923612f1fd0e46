import os

import pytest

from pqecert import cli
from pqecert.propgen import unroll, select_targets
from pqecert.propgen.circuit import Builder, build_fifo, neg, write_aag
from pqecert.propgen.pipeline import (CandidateRow, build_report,
                                      flag_bad, gen_local_props, report_figure,
                                      report_text, report_tsv, state_clause)


def toggler():
    b = Builder()
    s = b.add_latch(0, "s")
    b.set_next(s, neg(s))
    return b.circuit()


def test_state_clause_mapping():
    u = unroll(toggler(), 2)
    v = u.frame_vars[2][0]
    assert state_clause(u, (v,)) == (1,)
    assert state_clause(u, (-v,)) == (-1,)


def test_gen_local_props_records_targets():
    u = unroll(toggler(), 2)
    targets = select_targets(u)
    props, results = gen_local_props(u, targets, per_target_budget=10)
    assert len(results) == len(targets)
    assert all(r.status == "solved" for r in results)
    # s flips twice, so frame 2 is forced to s=0: the property (not s)
    assert (-1,) in props


def test_gen_local_props_var_order():
    u = unroll(toggler(), 2)
    targets = select_targets(u)
    props_a, _ = gen_local_props(u, targets, per_target_budget=10)
    props_d, _ = gen_local_props(u, targets, per_target_budget=10,
                                 var_order="desc")
    assert set(props_a) == set(props_d)
    with pytest.raises(ValueError):
        gen_local_props(u, targets, var_order="frames")


def test_flag_bad_with_var_expectation():
    rows = [CandidateRow(clause=(-1,), held_locally=True, invariant=True),
            CandidateRow(clause=(-2,), held_locally=True, invariant=True),
            CandidateRow(clause=(3,), held_locally=True, invariant=False)]
    flag_bad(rows, expectation=("vars", {1}))
    assert rows[0].bad is True
    assert rows[1].bad == "unknown"  # clause not over the expected vars
    assert rows[2].bad == "unknown"  # not an invariant


def test_flag_bad_with_cnf_expectation():
    rows = [CandidateRow(clause=(-1,), held_locally=True, invariant=True)]
    # expectation: only states with latch 1 low are expected reachable
    flag_bad(rows, expectation=[(-1,)])
    assert rows[0].bad is False


def test_flag_bad_spec_implication_excludes():
    rows = [CandidateRow(clause=(-1,), held_locally=True, invariant=True)]
    flag_bad(rows, expectation=("vars", {1}), spec_clauses=[(-1,)])
    assert rows[0].implied_by_spec is True
    assert rows[0].bad is False


def test_build_report_end_to_end():
    c = toggler()
    u = unroll(c, 2)
    props, results = gen_local_props(u, select_targets(u),
                                     per_target_budget=10)
    rep = build_report(c, u, props, results, expectation=("vars", {1}))
    assert rep.counts()["timeouts"] == 0
    by_clause = {r.clause: r for r in rep.rows}
    # (not s) is not an invariant of the toggler (state 1 is reachable)
    assert by_clause[(-1,)].invariant is False
    assert by_clause[(-1,)].counterexample == [0, 1]


def test_report_writers(tmp_path):
    c = toggler()
    u = unroll(c, 2)
    props, results = gen_local_props(u, select_targets(u),
                                     per_target_budget=10)
    rep = build_report(c, u, props, results)
    text = report_text(rep, latch_names=c.latch_names)
    assert "property report" in text
    tsv = report_tsv(rep)
    header = tsv.splitlines()[0].split("\t")
    assert header == ["clause", "local", "invariant", "implied_by_spec", "bad"]
    assert len(tsv.splitlines()) == len(rep.rows) + 1
    fig = tmp_path / "rep.png"
    report_figure(rep, str(fig))
    assert fig.stat().st_size > 0


def test_propgen_cli(tmp_path, capsys):
    aag = tmp_path / "tog.aag"
    aag.write_text(write_aag(toggler()))
    prefix = str(tmp_path / "rep")
    rc = cli.main(["propgen", str(aag), "--frames", "2",
                   "--per-target-timeout", "5", "--report", prefix])
    out, _ = capsys.readouterr()
    assert rc == 0
    assert "property report" in out
    for ext in (".txt", ".tsv", ".png"):
        assert os.path.exists(prefix + ext)


def test_propgen_cli_deterministic(tmp_path, capsys):
    aag = tmp_path / "tog.aag"
    aag.write_text(write_aag(toggler()))
    rc = cli.main(["propgen", str(aag), "--frames", "2"])
    out1, _ = capsys.readouterr()
    rc = cli.main(["propgen", str(aag), "--frames", "2"])
    out2, _ = capsys.readouterr()
    assert out1 == out2


def test_propgen_cli_fifo_data_expectation(tmp_path, capsys):
    aag = tmp_path / "fifo.aag"
    aag.write_text(write_aag(build_fifo(2, 2, 1, buggy=True)))
    rc = cli.main(["propgen", str(aag), "--frames", "1",
                   "--max-targets", "6", "--expect", "fifo-data"])
    out, _ = capsys.readouterr()
    assert rc == 0


def test_propgen_cli_bad_file(capsys):
    rc = cli.main(["propgen", "/nonexistent.aag"])
    capsys.readouterr()
    assert rc == 2
