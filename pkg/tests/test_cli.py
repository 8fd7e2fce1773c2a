import json

import pytest

from qsystems.cli import EXIT_BAD_INPUT, EXIT_CHECK_FAILED, EXIT_OK, EXIT_SOLVER, main, parse_nu, InputError
from qsystems.qsolve import QSystemSpec, tridiagonal_chain_spec
from qsystems.series import TruncatedSeries

from oracles import lambert_newton


@pytest.fixture
def lambert(tmp_path):
    path = tmp_path / "lambert.json"
    path.write_text(json.dumps(QSystemSpec.standard([[2]]).to_json()))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def coeffs(series_json, n):
    f = TruncatedSeries.from_json(series_json)
    return [f.coefficient((k,)) for k in range(n + 1)]


# -- solve ---------------------------------------------------------------------

def test_solve_lambert(capsys, lambert):
    code, out, _ = run(capsys, "solve", "--spec", lambert, "--cutoff", "4")
    assert code == EXIT_OK
    data = json.loads(out)
    assert coeffs(data["1"], 4) == lambert_newton(4)


def test_solve_algebra_a1(capsys):
    code, out, _ = run(capsys, "solve", "--algebra", "A1", "--cutoff", "3")
    assert code == EXIT_OK
    data = json.loads(out)
    for m in (1, 2, 3):
        assert TruncatedSeries.from_json(data[f"(1,{m})"]).terms == {(k,): 1 for k in range(m + 1)}


def test_solve_window_spec_file(capsys, tmp_path):
    path = tmp_path / "chain.json"
    path.write_text(json.dumps(tridiagonal_chain_spec(3).to_json()))
    code, out, _ = run(capsys, "solve", "--spec", str(path), "--cutoff", "3")
    assert code == EXIT_OK
    assert set(json.loads(out)) == {"1", "2", "3"}


def test_solve_empty_spec(capsys, tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("")
    code, _, err = run(capsys, "solve", "--spec", str(path))
    assert code == EXIT_BAD_INPUT
    assert "empty" in err


def test_solve_missing_and_invalid_spec(capsys, tmp_path):
    assert run(capsys, "solve", "--spec", str(tmp_path / "nope.json"))[0] == EXIT_BAD_INPUT
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "solve", "--spec", str(bad))[0] == EXIT_BAD_INPUT
    singular = tmp_path / "singular.json"
    singular.write_text(json.dumps({"kind": "finite-general", "indices": [1, 2],
                                    "D": [["1", "2"], ["2", "4"]], "G": [["0", "0"], ["0", "0"]]}))
    assert run(capsys, "solve", "--spec", str(singular))[0] == EXIT_BAD_INPUT


def test_solve_needs_one_source(capsys, lambert):
    assert run(capsys, "solve")[0] == EXIT_BAD_INPUT
    assert run(capsys, "solve", "--spec", lambert, "--algebra", "A1")[0] == EXIT_BAD_INPUT


def test_bad_algebra(capsys):
    assert run(capsys, "solve", "--algebra", "Q7")[0] == EXIT_BAD_INPUT
    assert run(capsys, "solve", "--algebra", "B3^3")[0] == EXIT_BAD_INPUT


def test_solver_precondition_exit_code(capsys, tmp_path):
    # a specialized window smaller than the requested cutoff
    from qsystems.liedata import algebra, kr_matrices
    path = tmp_path / "short.json"
    path.write_text(json.dumps(kr_matrices(algebra("A", 1), 2).to_json()))
    code, _, err = run(capsys, "solve", "--spec", str(path), "--cutoff", "5")
    assert code == EXIT_SOLVER
    assert "window" in err


# -- series --------------------------------------------------------------------

def test_series_K0_a1(capsys):
    code, out, _ = run(capsys, "series", "K", "--algebra", "A1", "--nu", "", "--cutoff", "8")
    assert code == EXIT_OK
    assert TruncatedSeries.from_json(json.loads(out)).terms == {(0,): 1, (1,): -1}


def test_series_R_matches_solve(capsys, lambert):
    _, out_r, _ = run(capsys, "series", "R", "--spec", lambert, "--nu", "1", "--cutoff", "4")
    _, out_s, _ = run(capsys, "solve", "--spec", lambert, "--cutoff", "4")
    assert TruncatedSeries.from_json(json.loads(out_r)) == TruncatedSeries.from_json(json.loads(out_s)["1"])


def test_series_K_ratio_a2(capsys):
    _, out1, _ = run(capsys, "series", "K", "--algebra", "A2", "--nu", "(1,1):1", "--cutoff", "6")
    _, out0, _ = run(capsys, "series", "K", "--algebra", "A2", "--cutoff", "6")
    K1 = TruncatedSeries.from_json(json.loads(out1))
    K0 = TruncatedSeries.from_json(json.loads(out0))
    assert (K1 * K0.pow(-1)).terms == {(0, 0): 1, (1, 0): 1, (1, 1): 1}


def test_series_table(capsys, lambert):
    code, out, _ = run(capsys, "series", "R", "--spec", lambert, "--nu", "1", "--cutoff", "3", "--table")
    assert code == EXIT_OK
    assert [r["R"] for r in json.loads(out)] == ["1/1", "-1/1", "2/1", "-5/1"]


def test_series_bad_nu(capsys):
    assert run(capsys, "series", "K", "--algebra", "A2", "--nu", "(1,1):x")[0] == EXIT_BAD_INPUT
    assert run(capsys, "series", "K", "--algebra", "A2", "--nu", "(1,1):1,,")[0] == EXIT_BAD_INPUT


# -- verify --------------------------------------------------------------------

def test_verify_a2(capsys):
    code, out, _ = run(capsys, "verify", "--algebra", "A2", "--cutoff", "8")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["algebra"] == "A2"
    assert all(c["status"] != "fail" for c in report["checks"])


def test_verify_a2_twisted(capsys):
    code, out, _ = run(capsys, "verify", "--algebra", "A2^2", "--cutoff", "8")
    assert code == EXIT_OK
    names = {c["name"]: c for c in json.loads(out)["checks"]}
    assert names["denominator"]["status"] == "pass"
    assert names["denominator"]["gating"]


def test_verify_cutoff_zero(capsys):
    assert run(capsys, "verify", "--algebra", "A1", "--cutoff", "0")[0] == EXIT_BAD_INPUT


def test_cutoff_cap(capsys, monkeypatch):
    monkeypatch.setenv("QSYS_MAX_CUTOFF", "5")
    code, _, err = run(capsys, "verify", "--algebra", "A1", "--cutoff", "6")
    assert code == EXIT_BAD_INPUT
    assert "QSYS_MAX_CUTOFF" in err


def test_pretty_output(capsys):
    code, out, _ = run(capsys, "verify", "--algebra", "A1", "--cutoff", "4", "--pretty")
    assert code == EXIT_OK
    assert out.splitlines()[0].startswith("PASS")


# -- decompose -----------------------------------------------------------------

def mults(out):
    return {tuple(e["weight"]): e["multiplicity"] for e in json.loads(out)["multiplicities"]}


def test_decompose_a1(capsys):
    code, out, _ = run(capsys, "decompose", "--algebra", "A1", "--nu", "(1,1):2", "--cutoff", "6")
    assert code == EXIT_OK
    assert mults(out) == {(2,): "1/1", (0,): "1/1"}


def test_decompose_a2(capsys):
    code, out, _ = run(capsys, "decompose", "--algebra", "A2", "--nu", "(1,1):1,(2,1):1", "--cutoff", "6")
    assert code == EXIT_OK
    assert mults(out) == {(1, 1): "1/1", (0, 0): "1/1"}


def test_decompose_trivial(capsys):
    code, out, _ = run(capsys, "decompose", "--algebra", "B2", "--cutoff", "3")
    assert code == EXIT_OK
    assert mults(out) == {(0, 0): "1/1"}


def test_decompose_nondominant(capsys):
    assert run(capsys, "decompose", "--algebra", "A2", "--nu", "(1,1):-1")[0] == EXIT_BAD_INPUT


# -- identities ----------------------------------------------------------------

def test_identities(capsys):
    code, out, _ = run(capsys, "identities")
    assert code == EXIT_OK
    names = [c["name"] for c in json.loads(out)["checks"]]
    assert "denom7(n=1)" in names and "denom12(n=2)" in names and "denom13(n=3)" in names


def test_identities_rank_error(capsys):
    assert run(capsys, "identities", "--which", "denom12", "--rank", "1")[0] == EXIT_BAD_INPUT


# -- contracts -----------------------------------------------------------------

def test_out_file_round_trip(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "solve", "--algebra", "B2", "--cutoff", "4", "--out", str(target))
    assert code == EXIT_OK and out == ""
    data = json.loads(target.read_text())
    for v in data.values():
        assert TruncatedSeries.from_json(v).to_json() == v


def test_determinism(capsys):
    args = ("verify", "--algebra", "C2", "--cutoff", "5", "--seed", "4")
    first = run(capsys, *args)[1]
    second = run(capsys, *args)[1]
    assert first == second


def test_exit_code_constants():
    assert (EXIT_OK, EXIT_CHECK_FAILED, EXIT_BAD_INPUT, EXIT_SOLVER) == (0, 1, 2, 3)


def test_parse_nu():
    assert parse_nu("(1,1):2,(2,3):1/2") == {(1, 1): 2, (2, 3): 0.5}
    assert parse_nu("(1,2)") == {(1, 2): 1}
    assert parse_nu("") == {}
    with pytest.raises(InputError):
        parse_nu("(1,1):")


def test_gating_failure_exit_code(capsys, monkeypatch):
    from qsystems import cli
    from qsystems.report import FAIL, Check, Discrepancy, VerificationReport

    def broken(alg, cutoff, **kwargs):
        report = VerificationReport(alg.name, cutoff)
        report.add(Check("denominator", FAIL, Discrepancy({"y1": 1}, 1, -1)))
        return report

    monkeypatch.setattr(cli, "verify", broken)
    code, out, err = run(capsys, "verify", "--algebra", "A1", "--cutoff", "4")
    assert code == EXIT_CHECK_FAILED
    assert json.loads(out)["checks"][0]["witness"]["exp"] == {"y1": 1}
    assert "gating" in err


def test_informational_failure_keeps_exit_zero(capsys, monkeypatch):
    from qsystems import cli
    from qsystems.report import FAIL, PASS, Check, Discrepancy, VerificationReport

    def soft(alg, cutoff, **kwargs):
        report = VerificationReport(alg.name, cutoff)
        report.add(Check("residual", PASS))
        report.add(Check("jacobian-denominator", FAIL, Discrepancy({"y1": 2}, 0, 1), gating=False))
        return report

    monkeypatch.setattr(cli, "verify", soft)
    assert run(capsys, "verify", "--algebra", "G2", "--cutoff", "4")[0] == EXIT_OK
