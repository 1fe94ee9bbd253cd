import json

import pytest

from paramlp.main import EXIT_ASSUMPTION, EXIT_ERROR, EXIT_INFEASIBLE, EXIT_OK, EXIT_UNBOUNDED, main
from paramlp.services import simplex
from paramlp.services.lp import KktVerdict, Violation

T1_PAIR = {"name": "T1", "A": [[1, 1, 1]], "b": [3], "c": [2, 1, 0], "d": [1, 1, 1], "B": [[1, -1, 0]]}


def _write(path, document):
    path.write_text(json.dumps(document))
    return str(path)


def _output(capsys):
    return json.loads(capsys.readouterr().out)


def test_gen_and_solve_klee_minty(tmp_path, capsys):
    path = str(tmp_path / "km2.json")
    assert main(["gen", "--kind", "klee-minty", "--D", "2", "-o", path]) == EXIT_OK
    capsys.readouterr()

    assert main(["solve", path, "--rule", "dantzig", "--start", "2,3"]) == EXIT_OK
    out = _output(capsys)
    assert out["status"] == "optimal"
    assert out["objective"] == -100
    assert out["pivots"] == 3
    assert out["verified"] is True


def test_solve_writes_a_trace(tmp_path, capsys):
    path = _write(tmp_path / "t1.json", T1_PAIR)
    trace = tmp_path / "trace.json"
    assert main(["solve", path, "--trace", str(trace)]) == EXIT_OK
    assert _output(capsys)["x"] == [0, 0, 3]
    assert len(json.loads(trace.read_text())["steps"]) == 2


def test_solve_exit_codes(tmp_path, capsys):
    infeasible = _write(tmp_path / "inf.json", {"A": [[1, 1]], "b": [-1], "c": [1, 1]})
    assert main(["solve", infeasible]) == EXIT_INFEASIBLE
    assert _output(capsys)["status"] == "infeasible"

    unbounded = _write(tmp_path / "unb.json", {"A": [[1, -1]], "b": [1], "c": [0, -1]})
    assert main(["solve", unbounded]) == EXIT_UNBOUNDED
    assert _output(capsys)["ray"] == [1, 1]


def test_solve_parametric(tmp_path, capsys):
    path = _write(tmp_path / "t1.json", T1_PAIR)
    assert main(["solve", path, "--rule", "parametric"]) == EXIT_OK
    out = _output(capsys)
    assert out["pivots_phase2"] == 1
    assert out["breakpoints"] == ["1/3"]
    assert out["optimal_verified"] is True


def test_solve_float_mode(tmp_path, capsys):
    path = _write(tmp_path / "t1.json", T1_PAIR)
    assert main(["solve", path, "--arith", "float"]) == EXIT_OK
    assert _output(capsys)["objective"] == pytest.approx(0.0, abs=1e-9)


def test_sweep(tmp_path, capsys):
    path = _write(tmp_path / "t1.json", T1_PAIR)
    output = tmp_path / "dual.json"
    assert main(["sweep", path, "--side", "dual", "-o", str(output)]) == EXIT_OK
    out = _output(capsys)
    assert out["transition_points"] == ["-1/3"]
    assert [iv["image"] for iv in out["intervals"]] == ["1/2", -1]
    assert output.exists()


def test_sweep_assumption_violated(tmp_path, capsys):
    path = _write(tmp_path / "neg.json", {**T1_PAIR, "c": [-1, 1, 0]})
    assert main(["sweep", path]) == EXIT_ASSUMPTION


def test_phi_and_psi(tmp_path, capsys):
    path = _write(tmp_path / "t1.json", T1_PAIR)
    assert main(["phi", path, "--u=-1/3"]) == EXIT_OK
    out = _output(capsys)
    assert (out["lo"], out["hi"]) == (-1, "1/2")

    lp = _write(tmp_path / "lp.json", {key: T1_PAIR[key] for key in ("name", "A", "b", "c")})
    block = _write(tmp_path / "block.json", {"d": T1_PAIR["d"], "B": T1_PAIR["B"]})
    assert main(["psi", lp, "--pair", block, "--v", "0"]) == EXIT_OK
    out = _output(capsys)
    assert (out["lo"], out["hi"]) == ("-1/3", "-1/3")


def test_negative_parameter_as_a_separate_value(tmp_path, capsys):
    path = _write(tmp_path / "t1.json", T1_PAIR)
    assert main(["phi", path, "--u", "-1/3"]) == EXIT_OK
    out = _output(capsys)
    assert (out["lo"], out["hi"]) == (-1, "1/2")

    assert main(["psi", path, "--v", "-1"]) == EXIT_OK
    assert _output(capsys)["lo"] == "-1/3"


def test_parameter_help_shows_the_negative_form(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["phi", "--help"])
    assert excinfo.value.code == 0
    assert "-1/3" in capsys.readouterr().out


def test_unverified_optimum_exits_with_one(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(simplex, "kkt_check", lambda lp, cert: KktVerdict(ok=False, violations=(Violation("stationarity", "forced"),)))
    path = _write(tmp_path / "t1.json", T1_PAIR)
    assert main(["solve", path, "--arith", "float"]) == EXIT_ERROR
    assert _output(capsys)["verified"] is False
    assert main(["solve", path]) == EXIT_ERROR


def test_psi_outside_theta_is_an_error(tmp_path, capsys):
    path = _write(tmp_path / "t1.json", T1_PAIR)
    assert main(["psi", path, "--v", "1"]) == EXIT_ERROR


def test_bench(tmp_path, capsys):
    suite = _write(tmp_path / "suite.json", {"instances": [{"kind": "fixture", "name": "T1"}], "rules": ["bland"]})
    report = tmp_path / "out" / "report.json"
    assert main(["bench", "--suite", suite, "--report", str(report)]) == EXIT_OK
    data = json.loads(report.read_text())
    assert data["total_pivots"] == 2


def test_errors_exit_with_one(tmp_path, capsys):
    assert main(["solve", str(tmp_path / "missing.json")]) == EXIT_ERROR
    bad = _write(tmp_path / "bad.json", {"A": [[1, 1]], "b": ["0.5"], "c": [1, 1]})
    assert main(["solve", bad]) == EXIT_ERROR
    assert main(["gen", "--kind", "random", "-o", str(tmp_path / "x.json")]) == EXIT_ERROR


@pytest.mark.parametrize("argv", [[], ["solve"], ["solve", "x.json", "--rule", "steepest"], ["frobnicate"]])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(argv)
    assert excinfo.value.code == EXIT_ERROR
