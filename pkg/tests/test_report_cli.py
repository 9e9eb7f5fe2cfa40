import json
import re

import numpy as np
import pytest

from crown.cli import EXIT_USAGE, main, run
from crown.report import VerificationReport, matrix_wire, vector_wire


def _report(**overrides):
    base = dict(
        command="verify-convexity",
        group={"family": "sl", "n": 2},
        omega={"shape": "scale", "scale": 1.0, "radius": None},
        seed=7,
        samples_requested=10,
        samples_completed=9,
        samples_indeterminate=1,
        violations=0,
        min_margin=0.25,
        worst_witness=None,
        wall_time_ms=3,
        tolerance_set={"membership_tol": 1e-9},
        extras={"max_arg_step": 0.1},
    )
    base.update(overrides)
    return VerificationReport(**base)


def test_report_invariant_enforced():
    with pytest.raises(ValueError):
        _report(samples_completed=5)
    with pytest.raises(ValueError):
        _report(violations=50)


def test_report_exit_codes():
    assert _report(samples_indeterminate=0, samples_completed=10).exit_code == 0
    assert _report(violations=2).exit_code == 2
    assert _report().exit_code == 3


def test_wire_formats():
    v = vector_wire(np.array([1.0, 2.0 - 1.0j]))
    assert v == [[1.0, 0.0], [2.0, -1.0]]
    m = matrix_wire(np.array([[1.0, 1j], [0.0, 2.0]]))
    assert m["rows"] == 2 and m["cols"] == 2
    assert m["data"][1] == [0.0, 1.0]


def test_report_json_roundtrip_and_csv():
    rep = _report()
    parsed = json.loads(rep.to_json())
    assert parsed["violations"] == 0
    assert parsed["tolerance_set"]["membership_tol"] == 1e-9
    csv = rep.to_csv()
    lines = csv.strip().split("\n")
    assert len(lines) == 2
    assert "tol.membership_tol" in lines[0]


def _strip_timing(text):
    return re.sub(r'"wall_time_ms": \d+', '"wall_time_ms": 0', text)


def test_cli_determinism_byte_identical():
    argv = ["verify-convexity", "--group", "sl:2", "--omega", "scale:1.0",
            "--samples", "150", "--seed", "7", "--tol", "1e-9", "--format", "json"]
    code1, out1, _ = run(argv)
    code2, out2, _ = run(argv)
    assert code1 == code2 == 0
    assert _strip_timing(out1) == _strip_timing(out2)


def test_cli_hull_example():
    code, out, _ = run(["hull", "--group", "sp:2", "--x", "0.5,0.2", "--y", "0.6,0.0"])
    report = json.loads(out)
    assert report["extras"]["verdict"] == "outside"
    assert abs(report["min_margin"] + 0.1) < 1e-12
    assert code == 0


def test_cli_decompose_real_and_complex():
    code, out, _ = run(["decompose", "--group", "sl:2",
                        "--entries", "1,0,1,1"])
    rep = json.loads(out)
    assert code == 0
    assert rep["extras"]["reconstruction_residual"] < 1e-10
    code, out, _ = run(["decompose", "--group", "sl:2",
                        "--entries", "1,0,1,1", "--x", "0.3,-0.3"])
    rep = json.loads(out)
    assert code == 0
    assert rep["extras"]["path_steps"] >= 1


def test_cli_siegel_fixed_point():
    code, out, _ = run(["siegel", "--n", "2", "--samples", "1", "--seed", "1"])
    rep = json.loads(out)
    assert code == 0
    assert rep["extras"]["min_im_chi"] > 0
    assert rep["extras"]["fixture_min_im_chi"] == 1.0
    assert rep["extras"]["fixture_error"] <= 1e-12


def test_cli_lemma24():
    code, out, _ = run(["lemma24", "--group", "sl:2", "--samples", "50", "--seed", "2"])
    rep = json.loads(out)
    assert code == 0
    assert rep["extras"]["min_im_n"] > 1e-10


def test_cli_usage_error_exit_code(capsys):
    assert main(["no-such-command"]) == EXIT_USAGE
    assert main(["hull", "--group", "zz:9", "--x", "1", "--y", "1"]) == EXIT_USAGE
    assert main([]) == EXIT_USAGE
    # wrong entry count and a path too short to reach the boundary
    assert main(["decompose", "--group", "sl:2", "--entries", "1,0,1"]) == EXIT_USAGE
    assert main(["boundary", "--group", "sl:2", "--steps", "3"]) == EXIT_USAGE


def test_cli_indeterminate_exit_code(capsys):
    # one-iteration ascents cannot converge; flagged runs exit with code 3
    code = main(["critical-points", "--group", "sl:2", "--runs", "2",
                 "--max-iter", "1", "--seed", "5"])
    assert code == 3


def test_cli_threads_env_end_to_end(monkeypatch):
    argv = ["verify-convexity", "--group", "sl:2", "--samples", "600", "--seed", "4"]
    monkeypatch.delenv("CROWN_THREADS", raising=False)
    _, serial, _ = run(argv)
    monkeypatch.setenv("CROWN_THREADS", "3")
    _, threaded, _ = run(argv)
    assert _strip_timing(serial) == _strip_timing(threaded)


def test_cli_out_file(tmp_path):
    target = tmp_path / "report.json"
    code = main(["hull", "--group", "sl:2", "--x", "0.1,-0.1", "--y", "0,0",
                 "--out", str(target)])
    assert code == 0
    assert json.loads(target.read_text())["extras"]["verdict"] == "inside"


def test_cli_csv_format():
    code, out, _ = run(["verify-kostant", "--group", "sl:2", "--samples", "50",
                        "--seed", "3", "--format", "csv"])
    assert code == 0
    header, row = out.strip().split("\n")
    assert header.split(",")[0] == "command"
    assert row.split(",")[0] == "verify-kostant"


def test_cli_boundary_report():
    code, out, _ = run(["boundary", "--group", "sl:2", "--omega", "scale:0.8",
                        "--steps", "12", "--seed", "3"])
    rep = json.loads(out)
    assert code == 0
    assert rep["extras"]["spearman"] > 0.9
    dists = rep["extras"]["output_distances"]
    assert all(b < a for a, b in zip(dists, dists[1:]))


def test_thread_env_parsing(monkeypatch):
    from crown.parallel import thread_count
    monkeypatch.delenv("CROWN_THREADS", raising=False)
    assert thread_count() == 1
    monkeypatch.setenv("CROWN_THREADS", "4")
    assert thread_count() == 4
    monkeypatch.setenv("CROWN_THREADS", "0")
    with pytest.raises(ValueError):
        thread_count()


def test_threaded_run_matches_serial(monkeypatch):
    import crown
    from conftest import context
    ctx = context("sl:2")
    rep1 = crown.verify_complex_convexity(ctx, crown.OmegaSpec("scale", scale=1.0),
                                          600, seed=4, threads=1)
    rep4 = crown.verify_complex_convexity(ctx, crown.OmegaSpec("scale", scale=1.0),
                                          600, seed=4, threads=4)
    assert rep1.min_margin == rep4.min_margin
    assert rep1.violations == rep4.violations
    assert rep1.worst_witness == rep4.worst_witness
