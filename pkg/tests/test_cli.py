"""Command-line interface: subcommands, exit codes, JSON contracts."""

from __future__ import annotations

import json
import math

import pytest

from snvsim.cli import main
from snvsim.scenarios import OUTPUT_DIR_ENV, available_scenarios
from snvsim.spectra import SpectralLine, frequency_grid, synthesize_spectrum, write_spectrum_csv

FIVE_FOLD_PER_DAY = 7.0631350272


@pytest.fixture(autouse=True)
def _isolated_output(tmp_path, monkeypatch):
    """Keep accidental default-root writes out of the working tree."""
    monkeypatch.chdir(tmp_path)


def _run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --------------------------------------------------------------------------
# list / run
# --------------------------------------------------------------------------

def test_list_shows_every_scenario(capsys):
    code, out, err = _run(capsys, ["list"])
    assert code == 0 and err == ""
    lines = [line for line in out.splitlines() if line.strip()]
    assert len(lines) == len(available_scenarios())
    for name in available_scenarios():
        assert any(line.startswith(name) for line in lines)


def test_run_prints_summary_and_writes_artifacts(capsys, tmp_path):
    out_root = tmp_path / "artifacts"
    code, out, err = _run(capsys, ["run", "fig3c", "--output-dir", str(out_root)])
    assert code == 0 and err == ""
    summary = json.loads(out)
    assert summary["scenario"] == "fig3c"
    assert summary["all_pass"] is True
    for entry in summary["entries"]:
        assert {"quantity", "simulated", "paper_value", "tolerance", "pass"} <= set(entry)
    assert (out_root / "fig3c" / "coincidences.csv").is_file()
    assert (out_root / "fig3c" / "summary.json").is_file()
    five_fold = next(e for e in summary["entries"] if e["quantity"] == "five_fold_events_per_day")
    assert math.isclose(five_fold["simulated"], FIVE_FOLD_PER_DAY, rel_tol=1e-12)


def test_run_applies_config_overrides(capsys, tmp_path):
    code, out, _ = _run(
        capsys,
        ["run", "fig3c", "duration_s=43200", "--output-dir", str(tmp_path / "half")],
    )
    assert code == 0
    summary = json.loads(out)
    assert math.isclose(summary["config"]["duration_s"], 43200, rel_tol=0)
    five_fold = next(e for e in summary["entries"] if e["quantity"] == "five_fold_events_per_day")
    assert math.isclose(five_fold["simulated"], FIVE_FOLD_PER_DAY / 2.0, rel_tol=1e-12)
    assert five_fold["pass"] is True


def test_run_unknown_scenario_fails_with_catalog(capsys, tmp_path):
    code, out, err = _run(capsys, ["run", "no_such_thing", "--output-dir", str(tmp_path)])
    assert code == 2 and out == ""
    payload = json.loads(err)
    assert "no_such_thing" in payload["error"]
    assert payload["available_scenarios"] == available_scenarios()


def test_run_unknown_override_key_fails(capsys, tmp_path):
    code, _, err = _run(
        capsys, ["run", "g2", "not_a_key=1", "--output-dir", str(tmp_path)]
    )
    assert code == 2
    assert "not_a_key" in json.loads(err)["error"]


def test_run_malformed_override_fails(capsys, tmp_path):
    code, _, err = _run(capsys, ["run", "g2", "seed:7", "--output-dir", str(tmp_path)])
    assert code == 2
    assert "key=value" in json.loads(err)["error"]


def test_output_dir_env_var_and_flag_precedence(capsys, tmp_path, monkeypatch):
    env_root = tmp_path / "from_env"
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(env_root))
    code, _, _ = _run(capsys, ["run", "fig3c"])
    assert code == 0
    assert (env_root / "fig3c" / "summary.json").is_file()

    flag_root = tmp_path / "from_flag"
    code, _, _ = _run(capsys, ["run", "fig3c", "--output-dir", str(flag_root)])
    assert code == 0
    assert (flag_root / "fig3c" / "summary.json").is_file()
    assert not (env_root / "fig3c" / "coincidences.csv").read_text() == ""  # env run untouched


# --------------------------------------------------------------------------
# fit
# --------------------------------------------------------------------------

def _doublet_csv(tmp_path):
    x = frequency_grid(-800e6, 800e6, 2e6)
    lines = [SpectralLine(-226e6, 70e6, 1.0), SpectralLine(226e6, 70e6, 1.0)]
    spectrum = synthesize_spectrum(lines, x, noise_sigma=0.05, seed=21)
    data_path = tmp_path / "doublet.csv"
    write_spectrum_csv(spectrum, data_path)
    return data_path


def test_fit_subcommand_converges_on_doublet(capsys, tmp_path):
    request = {
        "model": "lorentzian_multi",
        "model_args": {"n_lines": 2},
        "data_file": str(_doublet_csv(tmp_path)),
        "init": [80e6, -200e6, 0.9, 210e6, 1.1],
    }
    request_path = tmp_path / "request.json"
    request_path.write_text(json.dumps(request))
    code, out, err = _run(capsys, ["fit", str(request_path)])
    assert code == 0 and err == ""
    payload = json.loads(out)
    assert payload["status"] == "converged"
    assert payload["model"] == "lorentzian_multi"
    assert payload["param_names"] == ["fwhm", "center_1", "amplitude_1", "center_2", "amplitude_2"]
    assert abs(payload["params"][1] - (-226e6)) < 2e6
    assert abs(payload["params"][3] - 226e6) < 2e6
    assert abs(payload["params"][0] - 70e6) < 0.05 * 70e6
    assert len(payload["uncertainties"]) == 5


def test_fit_request_validation_errors(capsys, tmp_path):
    data = _doublet_csv(tmp_path)

    def failing(request):
        path = tmp_path / "bad_request.json"
        path.write_text(json.dumps(request))
        code, out, err = _run(capsys, ["fit", str(path)])
        assert code == 2 and out == ""
        return json.loads(err)["error"]

    assert "unknown model" in failing({"model": "nope", "data_file": str(data)})
    assert "data_file" in failing({"model": "gaussian"})
    assert "unknown fit-request keys" in failing(
        {"model": "gaussian", "data_file": str(data), "extra": 1}
    )
    code, _, err = _run(capsys, ["fit", str(tmp_path / "missing.json")])
    assert code == 2
    assert "missing.json" in json.loads(err)["error"]

    not_json = tmp_path / "not.json"
    not_json.write_text("{broken")
    code, _, _ = _run(capsys, ["fit", str(not_json)])
    assert code == 2


def test_fit_respects_bounds_with_null_endpoints(capsys, tmp_path):
    request = {
        "model": "lorentzian_multi",
        "model_args": {"n_lines": 1},
        "data_file": str(_singlet_csv(tmp_path)),
        "init": [80e6, 10e6, 1.0],
        "bounds": [[1e6, None], [None, None], [0.0, None]],
    }
    path = tmp_path / "bounded.json"
    path.write_text(json.dumps(request))
    code, out, _ = _run(capsys, ["fit", str(path)])
    assert code == 0
    payload = json.loads(out)
    assert payload["status"] == "converged"
    assert abs(payload["params"][1]) < 2e6


def _singlet_csv(tmp_path):
    x = frequency_grid(-500e6, 500e6, 2e6)
    spectrum = synthesize_spectrum([SpectralLine(0.0, 70e6, 1.0)], x, noise_sigma=0.03, seed=5)
    path = tmp_path / "singlet.csv"
    write_spectrum_csv(spectrum, path)
    return path


# --------------------------------------------------------------------------
# budget
# --------------------------------------------------------------------------

def test_budget_subcommand_matches_frozen_total(capsys):
    code, out, err = _run(capsys, ["budget", "/root/pkg/configs/table_s1.cfg"])
    assert code == 0 and err == ""
    report = json.loads(out)
    assert abs(report["total_fraction"] - 0.017459139672) < 1e-12
    assert len(report["stages"]) == 7
    assert math.isclose(
        report["total_loss_db"], -10.0 * math.log10(report["total_fraction"]), rel_tol=1e-12
    )


def test_budget_subcommand_override_rescales_total(capsys):
    code, out, _ = _run(
        capsys, ["budget", "/root/pkg/configs/table_s1.cfg", "stage_detector_efficiency=1.0"]
    )
    assert code == 0
    report = json.loads(out)
    assert math.isclose(report["total_fraction"], 0.017459139672 / 0.68, rel_tol=1e-12)


def test_budget_subcommand_error_paths(capsys, tmp_path):
    code, _, err = _run(capsys, ["budget", str(tmp_path / "missing.cfg")])
    assert code == 2
    assert "missing.cfg" in json.loads(err)["error"]

    no_stages = tmp_path / "empty.cfg"
    no_stages.write_text("other = 1\n")
    code, _, err = _run(capsys, ["budget", str(no_stages)])
    assert code == 2
    assert "stage_" in json.loads(err)["error"]
