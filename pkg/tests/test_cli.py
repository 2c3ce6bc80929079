"""Command-line surface: exit codes, reports, reproducibility, precedence.

Each command is driven in-process through main(argv).  Exit codes are
part of the contract: 0 success, 1 failed verification, 2 usage errors,
3 refused preconditions.
"""

import json

import numpy as np
import pytest

from diffeolab import calibrated_bump, holder, to_dict
from diffeolab.cli import EXIT_OK, EXIT_REFUSED, EXIT_USAGE, EXIT_VERIFY, main


def run(*argv):
    return main(list(argv))


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def read_csv(path):
    comments, header, rows = [], None, []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                comments.append(line)
            elif header is None:
                header = line.split(",")
            elif line:
                rows.append(line.split(","))
    return comments, header, rows


# -- exit codes --------------------------------------------------------------------

def test_exit_codes_are_distinct(tmp_path):
    codes = {EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_REFUSED}
    assert codes == {0, 1, 2, 3}
    out = str(tmp_path)
    assert run("modulus", "analyze", "--alpha", "holder:0.5",
               "--out", out) == EXIT_OK
    assert run("nonsense-command") == EXIT_USAGE
    assert run("modulus", "analyze", "--alpha", "weird:1") == EXIT_USAGE
    # an oversized displacement must be refused, not reported as failure
    assert run("mather", "lambda", "--eps", "0.3",
               "--out", out) == EXIT_REFUSED


def test_help_exits_cleanly(capsys):
    assert run("--help") == EXIT_OK
    assert "diffeolab" in capsys.readouterr().out


# -- analysis commands ----------------------------------------------------------------

def test_modulus_analyze_writes_verdict(tmp_path):
    out = str(tmp_path)
    assert run("modulus", "analyze", "--alpha", "holder:0.5",
               "--out", out) == EXIT_OK
    verdict = read_json(tmp_path / "modulus_verdict.json")
    assert verdict["tameness"]["sup_tame"]["verdict"] == "Yes"
    assert verdict["tameness"]["sub_tame"]["verdict"] == "Yes"
    assert verdict["laws"]["passed"] is True
    assert "run_config" in verdict


def test_diffeo_check_round_trip(tmp_path):
    out = str(tmp_path)
    assert run("diffeo", "check", "--preset", "smooth_bump_displacement",
               "--eps", "1e-3", "--out", out) == EXIT_OK
    report = read_json(tmp_path / "diffeo_check.json")
    assert report["inverse_residual"] <= 1e-9
    assert report["serialization_gap"] == 0.0


def test_norms_measure_report(tmp_path):
    out = str(tmp_path)
    assert run("norms", "measure", "--preset", "smooth_bump_displacement",
               "--eps", "1e-3", "--out", out) == EXIT_OK
    report = read_json(tmp_path / "norm_report.json")
    assert report["report"]["sup_dev"][0] == pytest.approx(1e-3, rel=1e-6)


def test_flow_chart_residuals(tmp_path):
    out = str(tmp_path)
    assert run("flow", "chart", "--b", "0.5", "--samples", "101",
               "--out", out) == EXIT_OK
    report = read_json(tmp_path / "flow_chart.json")
    assert report["intertwining_residual"] <= 1e-7
    assert report["support_fix_residual"] <= 1e-7


def test_mather_gamma_and_omega(tmp_path):
    out = str(tmp_path)
    assert run("mather", "gamma", "--out", out) == EXIT_OK
    gamma = read_json(tmp_path / "gamma_report.json")
    assert gamma["equivariance_residual"] <= 1e-9
    assert run("mather", "omega", "--out", out) == EXIT_OK
    omega = read_json(tmp_path / "omega_report.json")
    assert omega["roundtrip_c0"] <= 1e-6


def test_mather_lambda_certificate(tmp_path):
    out = str(tmp_path)
    assert run("mather", "lambda", "--out", out) == EXIT_OK
    report = read_json(tmp_path / "lambda_report.json")
    assert report["residual"] <= 1e-5
    assert report["ok"] is True


def test_psi_sweep_table(tmp_path):
    out = str(tmp_path)
    assert run("mather", "psi", "--sweep", "1,2,4,8", "--out", out) == EXIT_OK
    comments, header, rows = read_csv(tmp_path / "psi_sweep.csv")
    assert header == ["A", "norm_in", "norm_out", "plain_ratio",
                      "rescale_factor", "ratio", "rolled_slope"]
    assert [r[0] for r in rows] == ["1", "2", "4", "8"]
    ratios = [float(r[5]) for r in rows]
    assert all(b < a for a, b in zip(ratios, ratios[1:]))
    assert any(c.startswith("# seed=") for c in comments)


# -- the verification battery -----------------------------------------------------------

def test_verify_battery_is_deterministic(tmp_path):
    out = str(tmp_path)
    assert run("verify", "--suite", "all", "--seed", "7",
               "--out", out) == EXIT_OK
    first = (tmp_path / "verify_report.json").read_bytes()
    assert run("verify", "--suite", "all", "--seed", "7",
               "--out", out) == EXIT_OK
    second = (tmp_path / "verify_report.json").read_bytes()
    assert first == second
    report = json.loads(first)
    assert report["ok"] is True
    assert all(s["ok"] for s in report["suites"].values())


def test_verify_rejects_unknown_suite(tmp_path):
    assert run("verify", "--suite", "nosuch",
               "--out", str(tmp_path)) == EXIT_USAGE


# -- the fixed-point pipeline ------------------------------------------------------------

def test_fixpoint_round_trip_and_tamper(tmp_path):
    out = str(tmp_path)
    fin = tmp_path / "f.json"
    fin.write_text(json.dumps(to_dict(calibrated_bump(1e-3, holder(0.5)))))
    chain_path = tmp_path / "chain.json"
    assert run("perfect", "fixpoint", "--in", str(fin), "--A", "4",
               "--out-chain", str(chain_path), "--out", out) == EXIT_OK
    assert run("perfect", "verify", str(chain_path), "--report",
               str(tmp_path / "vr.json"), "--out", out) == EXIT_OK
    assert read_json(tmp_path / "vr.json")["ok"] is True

    chain = read_json(chain_path)
    chain["maps"]["witness"]["jets"][40][0] += 1e-3
    bad_path = tmp_path / "tampered.json"
    bad_path.write_text(json.dumps(chain))
    assert run("perfect", "verify", str(bad_path), "--out", out) == EXIT_VERIFY


# -- tables and configuration --------------------------------------------------------------

def test_emit_plots_lcm_and_tameness(tmp_path):
    out = str(tmp_path)
    assert run("emit-plots", "--tables", "lcm,tameness",
               "--out", out) == EXIT_OK
    _, header, rows = read_csv(tmp_path / "lcm_sandwich.csv")
    assert header == ["t", "mu", "beta0", "two_mu"]
    for r in rows:
        mu, beta0, two_mu = float(r[1]), float(r[2]), float(r[3])
        assert mu - 1e-12 <= beta0 <= two_mu + 1e-12
    _, header2, rows2 = read_csv(tmp_path / "tameness_functionals.csv")
    assert header2 == ["s", "t", "F_sup", "G_sub"]
    for r in rows2:
        s, t, f_sup = float(r[0]), float(r[1]), float(r[2])
        assert abs(f_sup - t ** (1.0 - s)) <= 1e-10


def test_emit_plots_rejects_unknown_table(tmp_path):
    assert run("emit-plots", "--tables", "nope",
               "--out", str(tmp_path)) == EXIT_USAGE


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps(
        {"A": 8, "seed": 42, "tol": {"fix_max_iter": 50}}))
    out = str(tmp_path)
    assert run("modulus", "analyze", "--config", str(cfg_path),
               "--A", "2", "--out", out) == EXIT_OK
    echoed = capsys.readouterr().out
    assert "A=2" in echoed  # the flag wins
    assert "seed=42" in echoed  # the file fills the rest
    verdict = read_json(tmp_path / "modulus_verdict.json")
    assert verdict["run_config"]["A"] == 2
    assert verdict["run_config"]["seed"] == 42
    assert verdict["run_config"]["tol"]["fix_max_iter"] == 50


def test_tolerance_override_flag(tmp_path):
    out = str(tmp_path)
    assert run("modulus", "analyze", "--tol-fix-max-iter", "17",
               "--out", out) == EXIT_OK
    verdict = read_json(tmp_path / "modulus_verdict.json")
    assert verdict["run_config"]["tol"]["fix_max_iter"] == 17
