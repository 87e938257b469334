import json

import pytest

from rebit_moments.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_exact_first_moment(capsys):
    code, out, _ = run(capsys, "exact", "--m", "1")
    assert code == EXIT_OK
    res = json.loads(out)["result"]
    assert res["moment"] == "-1/858"
    assert res["coefficients"] == ["-1/5", "0/1", "34/125", "0/1", "-1/5"]


def test_closed_form(capsys):
    code, out, _ = run(capsys, "exact", "--m", "1", "--closed-form", "complex")
    assert code == EXIT_OK and json.loads(out)["result"]["moment"] == "1/3876"


def test_usage_errors(capsys):
    assert run(capsys, "exact", "--m", "9")[0] == EXIT_USAGE
    assert run(capsys, "exact", "--kind", "trace")[0] == EXIT_USAGE
    assert run(capsys, "sample", "--samples", "0")[0] == EXIT_USAGE
    assert run(capsys, "sample", "--threads", "0")[0] == EXIT_USAGE
    assert run(capsys, "recon", "--method", "provost-ha", "--k", "13")[0] == EXIT_USAGE
    assert run(capsys, "nonsense")[0] == EXIT_USAGE
    assert run(capsys, "sample", "--scenario", "complex-15d", "--measure", "Bures")[0] == EXIT_USAGE


def test_thread_environment_variable(capsys, monkeypatch):
    monkeypatch.setenv("REBIT_MOMENTS_THREADS", "many")
    assert run(capsys, "sample", "--samples", "100")[0] == EXIT_USAGE


def test_sample_output_is_identical_across_threads(capsys):
    args = ("sample", "--samples", "40000", "--seed", "5", "--functional", "det")
    _, one, _ = run(capsys, *args, "--threads", "1")
    _, four, _ = run(capsys, *args, "--threads", "4")
    assert one == four
    assert json.loads(one)["result"]["det"]["sample_count"] == 40000


def test_sample_csv(capsys):
    code, out, _ = run(capsys, "sample", "--samples", "1e3", "--format", "csv", "--functional", "det",
                       "--functional", "detPT")
    lines = out.strip().splitlines()
    assert code == EXIT_OK and len(lines) == 5


def test_verify_exact_tier_passes(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--tier", "exact", "--output", str(tmp_path / "v.json"))
    assert code == EXIT_OK
    assert "[FAIL]" not in out
    assert json.loads((tmp_path / "v.json").read_text())["command"] == "verify"


def test_recon_and_fit(capsys, tmp_path):
    code, out, _ = run(capsys, "recon", "--k", "1", "--grid", str(tmp_path / "g.csv"))
    assert code == EXIT_OK
    assert json.loads(out)["result"]["estimate"] == pytest.approx(6736 / 7293)
    assert len((tmp_path / "g.csv").read_text().splitlines()) == 1002
    code, out, _ = run(capsys, "fit", "--family", "beta")
    assert code == EXIT_OK and json.loads(out)["result"]["estimate"] == pytest.approx(0.41831490, abs=1e-8)


def test_report_writes_files(capsys, tmp_path):
    assert run(capsys, "report", "fig5", "--output", str(tmp_path))[0] == EXIT_OK
    assert (tmp_path / "fig5.json").exists() and (tmp_path / "fig5_poly9_density.csv").exists()


def test_exit_code_constants():
    assert (EXIT_OK, EXIT_FAIL, EXIT_USAGE) == (0, 1, 2)
