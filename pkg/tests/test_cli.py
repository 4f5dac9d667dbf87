"""Command-line interface: exit codes, report shapes, determinism."""

import json

import pytest

from fuchsian.cli import main


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def run_json(capsys, *argv):
    rc, out, err = run(capsys, *argv)
    return rc, json.loads(out), err


# -- check ---------------------------------------------------------------


def test_check_remark3(capsys):
    rc, rep, _ = run_json(capsys, "check", "remark3")
    assert rc == 0
    res = rep["results"]
    assert res["exponents_exact"] == ["-2", "-1"]
    assert res["h_exact"] == "9/20"
    assert res["decay_applicable"] is True
    assert res["unique_formal"] is True


def test_check_remark2(capsys):
    rc, rep, _ = run_json(capsys, "check", "remark2")
    assert rc == 0
    res = rep["results"]
    assert res["exponents_exact"] == ["-1", "0"]
    assert res["h_exact"] is None
    assert res["decay_applicable"] is False


def test_check_unknown_name_fails_cleanly(capsys):
    rc, out, err = run(capsys, "check", "not_an_instance")
    assert rc == 2
    assert "not_an_instance" in err


def test_check_file_input(tmp_path, capsys):
    doc = {
        "name": "toy", "m": 2, "n": 1,
        "terms": [{"coeff": [-3, 1, 0, 1], "t_pow": 0, "x_pows": [0],
                   "z_pows": [{"i": 1, "alpha": [0], "pow": 1}]},
                  {"coeff": [-2, 1, 0, 1], "t_pow": 0, "x_pows": [0],
                   "z_pows": [{"i": 0, "alpha": [0], "pow": 1}]}],
        "truncation": {"K_t": 6, "K_x": 8, "K_z": 3},
    }
    p = tmp_path / "toy.json"
    p.write_text(json.dumps(doc))
    rc, rep, _ = run_json(capsys, "check", str(p))
    assert rc == 0
    assert rep["results"]["exponents_exact"] == ["-2", "-1"]
    assert rep["input"]["sha256"]


# -- solve ---------------------------------------------------------------


def test_solve_forced_instance(capsys):
    rc, rep, _ = run_json(capsys, "solve", "remark3_forced", "--order", "4")
    assert rc == 0
    res = rep["results"]
    assert res["terms"] == [{"coeff": [1, 6, 0, 1], "t_pow": 1, "x_pows": [0]}]
    assert res["verified"] is True
    assert res["order"] == 4


def test_solve_homogeneous_is_zero(capsys):
    rc, rep, _ = run_json(capsys, "solve", "remark3", "--order", "4")
    assert rc == 0
    assert rep["results"]["terms"] == []


# -- certify -------------------------------------------------------------


def test_certify_reports_honest_violations(capsys):
    rc, rep, _ = run_json(capsys, "certify", "remark3", "--grid", "12x12")
    # the barrier inequality fails for a test function that is not a
    # solution; the command reports it and exits nonzero
    assert rc == 1
    barrier = rep["results"]["barrier"]
    assert not barrier["checks"]["barrier_dineq"]["ok"]
    assert barrier["checks"]["growth_bound_le_h"]["ok"]
    assert barrier["checks"]["phi_vs_q"]["ok"]
    assert barrier["checks"]["dphi_vs_dq"]["ok"]
    assert barrier["checks"]["envelope"]["ok"]
    chars = rep["results"]["characteristics"]
    assert chars["status"] == "extended-to-floor"
    assert chars["weighted_decay"]["ok"]
    assert chars["radius_bounds"]["ok"]
    assert chars["reaches_origin"]["ok"]
    assert rep["results"]["params_certificate"]["ok"]
    assert rep["ok"] is False


def test_certify_hypothesis_violated_exits_two(capsys):
    rc, out, err = run(capsys, "certify", "remark2", "--grid", "8x8")
    assert rc == 2
    rep = json.loads(out)
    assert rep["error"]["type"] == "HypothesisViolated"


def test_certify_deterministic_output(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    rc1, *_ = run(capsys, "certify", "remark3", "--grid", "10x10",
                  "--out", str(a))
    rc2, *_ = run(capsys, "certify", "remark3", "--grid", "10x10",
                  "--out", str(b))
    assert rc1 == rc2 == 1
    assert a.read_bytes() == b.read_bytes()


def test_certify_seeded_w_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "certify", "remark3", "--grid", "8x8", "--seed", "7",
        "--out", str(a))
    run(capsys, "certify", "remark3", "--grid", "8x8", "--seed", "7",
        "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_certify_corrupted_eps00_flags_growth_bound(capsys):
    rc, rep, _ = run_json(capsys, "certify", "remark3", "--grid", "10x10",
                          "--eps00", "9/2")
    assert rc == 1
    chk = rep["results"]["barrier"]["checks"]["growth_bound_le_h"]
    assert not chk["ok"]
    assert chk["violations"] == 100


def test_certify_explicit_w(capsys):
    rc, rep, _ = run_json(capsys, "certify", "remark3", "--grid", "8x8",
                          "--w", "1/2,1,2")
    assert rc in (0, 1)
    assert rep["results"]["w_terms"] == [
        {"coeff": [1, 2, 0, 1], "t_pow": 1, "x_pows": [2]}]


def test_certify_malformed_w_exits_two(capsys):
    rc, rep, _ = run_json(capsys, "certify", "remark3", "--w", "bogus")
    assert rc == 2
    assert rep["error"]["type"] == "InputError"
    assert "coeff,tpow" in rep["error"]["message"]


def test_certify_csv_samples(tmp_path, capsys):
    csv = tmp_path / "path.csv"
    rc, rep, _ = run_json(capsys, "certify", "remark3", "--grid", "8x8",
                          "--csv", str(csv))
    lines = csv.read_text().strip().splitlines()
    assert lines[0] == "t,rho,q,weighted_q"
    assert len(lines) - 1 == rep["results"]["characteristics"]["samples"]
    first = lines[1].split(",")
    assert len(first) == 4
    float(first[0]), float(first[1]), float(first[2]), float(first[3])


def test_certify_timings_are_deterministic_counters(capsys):
    rc, rep, _ = run_json(capsys, "certify", "remark3", "--grid", "8x8")
    t = rep["timings"]
    assert t["grid_points"] == 64
    assert t["phi_evals"] > 0
    assert t["coefficient_evals"] > 0
    assert t["ode_steps_accepted"] > 0
    assert t["ode_steps_rejected"] >= 0


# -- verify-example ------------------------------------------------------


def test_verify_example_remark2(capsys):
    rc, rep, _ = run_json(capsys, "verify-example", "remark2")
    assert rc == 0
    res = rep["results"]
    assert res["residual_numeric"]["ok"]
    # the machinery must refuse this instance: a characteristic exponent
    # sits on the imaginary axis
    assert res["hypothesis_rejection"]["ok"]
    assert res["decay_profile"]["ok"]


def test_verify_example_remark3(capsys):
    rc, rep, _ = run_json(capsys, "verify-example", "remark3")
    assert rc == 0
    res = rep["results"]
    assert res["residual_symbolic"]["zero"]
    assert res["decay_constant"]["ok"]


def test_verify_example_remark3_forced(capsys):
    rc, rep, _ = run_json(capsys, "verify-example", "remark3_forced")
    assert rc == 0
    res = rep["results"]
    assert res["residual_symbolic"]["zero"]
    assert res["solver_match"]["ok"]


# -- misc ----------------------------------------------------------------


def test_version_field_present(capsys):
    rc, rep, _ = run_json(capsys, "check", "remark3")
    import fuchsian
    assert rep["version"] == fuchsian.__version__
    assert rep["command"] == "check"


def test_console_script_entry_point():
    import subprocess, sys
    out = subprocess.run([sys.executable, "-m", "fuchsian.cli", "check",
                          "remark3"], capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["results"]["h_exact"] == "9/20"
