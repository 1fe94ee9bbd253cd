import json
from fractions import Fraction as F

import pytest

from paramlp.errors import DimensionMismatchError, ModeError, ParamLpError, SchemaError
from paramlp.models import InstanceSpec, SuiteSpec
from paramlp.services import linalg, storage
from paramlp.services.bench import run_bench
from paramlp.services.generators import (
    SplitMix64,
    fixture,
    gen_klee_minty,
    gen_random_bounded,
    gen_random_pair,
    klee_minty_start,
)
from paramlp.services.parametric import DUAL, PRIMAL, sweep
from paramlp.services.pivotpath import parametric_path_solve
from paramlp.services.simplex import BLAND, Basis, solve


def _write(path, document):
    path.write_text(json.dumps(document))
    return path


# ── Generators ──


def test_splitmix64_stream():
    rng = SplitMix64(0)
    assert rng.next() == 0xE220A8397B1DCDAF
    assert SplitMix64(7).integers(5, -9, 9) == SplitMix64(7).integers(5, -9, 9)
    assert all(-9 <= k <= 9 for k in SplitMix64(3).integers(50, -9, 9))


def test_klee_minty_bounds():
    assert gen_klee_minty(1).A == ((1, 1),)
    assert klee_minty_start(3) == Basis((3, 4, 5))
    for D in (0, 13):
        with pytest.raises(DimensionMismatchError):
            gen_klee_minty(D)


def test_random_bounded_is_deterministic_and_certified(exact):
    lp = gen_random_bounded(2, 5, 42)
    assert lp == gen_random_bounded(2, 5, 42)
    assert lp.name == "random_m2_n5_s42"
    x0, w, y = lp.meta["x0"], lp.meta["w"], lp.meta["y"]
    assert linalg.matvec(exact, lp.A, x0) == lp.b
    assert linalg.add(linalg.rmatvec(exact, lp.A, w, lp.n), y) == lp.c
    assert all(v >= 0 for v in x0 + y)


def test_random_bounded_rejects_bad_shapes():
    with pytest.raises(DimensionMismatchError):
        gen_random_bounded(3, 3, 1)
    with pytest.raises(DimensionMismatchError):
        gen_random_bounded(1, 31, 1)


def test_random_pair_shape():
    pair = gen_random_pair(5, 3)
    assert (pair.m, pair.l, pair.r) == (3, 1, 1)
    assert pair.assumption_clean
    assert pair == gen_random_pair(5, 3)


def test_unknown_fixture():
    with pytest.raises(ParamLpError):
        fixture("T9")


# ── Storage ──


def test_pair_round_trip(tmp_path, t1_pair, exact):
    path = tmp_path / "t1.json"
    storage.save_pair(t1_pair, path)
    assert storage.load_pair(path, exact) == t1_pair


def test_lp_round_trip_keeps_rationals(tmp_path, exact):
    path = _write(tmp_path / "lp.json", {"name": "thirds", "A": [["1/3", 1, 0]], "b": ["2/3"], "c": [1, 1, 1]})
    lp = storage.load_lp(path, exact)
    assert lp.A == ((F(1, 3), 1, 0),)
    storage.save_lp(lp, tmp_path / "copy.json")
    assert storage.load_lp(tmp_path / "copy.json", exact) == lp


def test_decomposition_round_trip(tmp_path, t1_pair, exact):
    for side in (PRIMAL, DUAL):
        decomposition = sweep(t1_pair, side)
        path = tmp_path / f"{side}.json"
        storage.save_decomposition(decomposition, path)
        assert storage.load_decomposition(path, exact) == decomposition


def test_decimal_strings_are_rejected_in_exact_mode(tmp_path, exact):
    path = _write(tmp_path / "lp.json", {"A": [[1, 1]], "b": ["0.333"], "c": [1, 1]})
    with pytest.raises(ModeError):
        storage.load_lp(path, exact)
    path = _write(tmp_path / "lp2.json", {"A": [[1, 1]], "b": [0.5], "c": [1, 1]})
    with pytest.raises(ModeError):
        storage.load_lp(path, exact)


def test_schema_errors(tmp_path, exact):
    path = _write(tmp_path / "lp.json", {"A": [[1, 1]], "b": [1]})
    with pytest.raises(SchemaError):
        storage.load_lp(path, exact)

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SchemaError):
        storage.load_lp(bad, exact)

    path = _write(tmp_path / "nopair.json", {"A": [[1, 1, 1]], "b": [3], "c": [1, 1, 1]})
    with pytest.raises(SchemaError):
        storage.load_pair(path, exact)

    path = _write(tmp_path / "suite.json", {"instances": [{"kind": "klee_minty"}]})
    with pytest.raises(SchemaError):
        storage.load_suite(path)


def test_path_report_document(t1_lp):
    _, report = parametric_path_solve(t1_lp)
    doc = storage.path_report_document(report)
    assert doc.breakpoints == ["1/3"]
    assert doc.optimal_value == 0
    assert doc.t_max == 4


def test_trace_is_written(tmp_path, t1_lp):
    path = tmp_path / "trace.json"
    storage.save_trace(solve(t1_lp, BLAND).trace, path)
    data = json.loads(path.read_text())
    assert data["rule"] == "bland"
    assert [step["enter"] for step in data["steps"]] == [1, 2]


# ── Bench ──


def test_bench_t1_under_both_rules(tmp_path):
    suite = SuiteSpec(instances=[InstanceSpec(kind="fixture", name="T1")], rules=["bland", "parametric"])
    report = run_bench(suite, tmp_path / "report.json")
    assert [(r.instance, r.rule) for r in report.records] == [("T1", "bland"), ("T1", "parametric")]
    assert [r.optimal_value for r in report.records] == [0, 0]
    assert all(r.optimal_verified and r.brute_force_agrees for r in report.records)
    assert report.pivots_by_rule == {"bland": 2, "parametric": 1}
    assert report.total_pivots == 3
    assert report.bound_summary.holds == 1
    assert report.bound_summary.max_ratio == "1/3"
    assert storage.load_bench_report(tmp_path / "report.json") == report


def test_bench_klee_minty_dantzig():
    suite = SuiteSpec(
        instances=[InstanceSpec(kind="klee_minty", D=D) for D in (3, 4, 5)],
        rules=["dantzig"],
    )
    report = run_bench(suite)
    assert [r.instance for r in report.records] == ["klee_minty_D3", "klee_minty_D4", "klee_minty_D5"]
    assert [r.pivots for r in report.records] == [7, 15, 31]
    assert report.bound_summary is None


def test_bench_random_instances_agree_with_brute_force():
    suite = SuiteSpec(
        instances=[InstanceSpec(kind="random_bounded", m=2, n=5, seed=seed) for seed in (1, 2, 3)],
        rules=["bland", "dantzig", "parametric"],
    )
    report = run_bench(suite)
    assert len(report.records) == 9
    assert all(r.brute_force_agrees for r in report.records)


def test_bench_skips_parametric_rule_without_spare_columns():
    suite = SuiteSpec(instances=[InstanceSpec(kind="klee_minty", D=1)], rules=["parametric"])
    assert run_bench(suite).records == []


def test_empty_suite():
    report = run_bench(SuiteSpec())
    assert report.records == []
    assert report.total_pivots == 0
    assert report.bound_summary is None
