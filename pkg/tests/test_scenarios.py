"""Scenario registry: green runs, artifact contracts, byte-level reproducibility."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path

import pytest

from snvsim.scenarios import (
    SCENARIOS,
    available_scenarios,
    run_scenario,
    summary_row,
)

ALL_NAMES = [
    "fig1d",
    "fig1e",
    "fig2a",
    "fig2b",
    "fig2c",
    "fig2d",
    "fig3a",
    "fig3b",
    "fig3c",
    "fig4b",
    "fig4c",
    "table_s1",
    "loss_chain",
    "rabi",
    "lifetime",
    "g2",
    "isotopes",
]

ENTRY_KEYS = {"quantity", "simulated", "paper_value", "tolerance", "pass"}


def _tree_digest(root: Path) -> dict:
    """Relative path -> sha256 of every file under root."""
    return {
        str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


def test_registry_is_complete_and_ordered():
    assert available_scenarios() == ALL_NAMES
    for name in ALL_NAMES:
        assert SCENARIOS[name].description
        assert SCENARIOS[name].defaults


@pytest.mark.parametrize("name", ALL_NAMES)
def test_scenario_runs_green_with_contract_artifacts(name, scenario_output_root):
    result = run_scenario(name, output_root=scenario_output_root / "all" / name)
    assert result.all_pass, [row for row in result.rows if not row["pass"]]
    assert result.rows, "every scenario reports at least one summary entry"

    summary_path = result.out_dir / "summary.json"
    report_path = result.out_dir / "report.txt"
    assert summary_path.is_file() and report_path.is_file()

    summary = json.loads(summary_path.read_text())
    assert summary["scenario"] == name
    assert summary["all_pass"] is True
    for entry in summary["entries"]:
        assert ENTRY_KEYS <= set(entry)
        assert set(entry) - ENTRY_KEYS <= {"note"}
        assert isinstance(entry["pass"], bool)
        assert isinstance(entry["simulated"], (int, float))

    for relative in result.artifacts.values():
        # Artifacts may be single files or directories of per-scan outputs.
        assert (result.out_dir / relative).exists()

    # The human-readable report carries a pass column for every entry.
    report = report_path.read_text()
    for entry in summary["entries"]:
        assert entry["quantity"] in report
    assert " yes" in report and " NO" not in report


@pytest.mark.parametrize("name", ["fig1e", "fig2a", "fig3b", "g2"])
def test_rerun_is_byte_identical(name, scenario_output_root):
    first = run_scenario(name, output_root=scenario_output_root / "rerun_a" / name)
    second = run_scenario(name, output_root=scenario_output_root / "rerun_b" / name)
    digest_a = _tree_digest(first.out_dir)
    digest_b = _tree_digest(second.out_dir)
    assert digest_a and digest_a == digest_b


def test_seed_change_alters_random_artifacts(scenario_output_root):
    base = run_scenario("g2", output_root=scenario_output_root / "seed_a")
    moved = run_scenario("g2", {"seed": 54}, output_root=scenario_output_root / "seed_b")
    assert (base.out_dir / "g2.csv").read_bytes() != (moved.out_dir / "g2.csv").read_bytes()


def test_unknown_scenario_names_available_ones():
    with pytest.raises(ValueError, match="fig2a"):
        run_scenario("not_a_scenario")


def test_unknown_override_key_names_allowed_ones(scenario_output_root):
    with pytest.raises(ValueError, match="unknown config keys"):
        run_scenario("g2", {"not_a_key": 1}, output_root=scenario_output_root / "bad")


def test_config_file_selects_scenario(scenario_output_root, tmp_path):
    cfg = tmp_path / "custom_g2.cfg"
    cfg.write_text("scenario = g2\nbackground = 0.10\n")
    result = run_scenario(str(cfg), output_root=scenario_output_root / "from_file")
    assert result.name == "g2"
    g2_zero = next(r for r in result.rows if r["quantity"] == "g2_zero")
    assert math.isclose(g2_zero["simulated"], 0.10, rel_tol=1e-12)

    headless = tmp_path / "no_selector.cfg"
    headless.write_text("background = 0.1\n")
    with pytest.raises(ValueError, match="does not select a scenario"):
        run_scenario(str(headless), output_root=scenario_output_root / "from_file")


def test_fig4b_fit_artifact_contract(scenario_output_root):
    result = run_scenario("fig4b", output_root=scenario_output_root / "fig4b_keys")
    payload = json.loads((result.out_dir / "reflection_fit.json").read_text())
    assert set(payload) == {"c", "f", "gamma_h_mhz", "contrast", "residual_norm"}
    assert payload["f"] == 0.95
    assert abs(payload["c"] - 0.027) < 0.004
    assert abs(payload["gamma_h_mhz"] - 70.0) < 7.0


def test_fig2a_manifest_lists_every_scan(scenario_output_root):
    result = run_scenario("fig2a", output_root=scenario_output_root / "fig2a_manifest")
    with open(result.out_dir / "manifest.csv", newline="") as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) == 35
    for row in rows:
        assert (result.out_dir / row["file"]).is_file()
    fields = [float(row["field_mt"]) for row in rows]
    assert fields == sorted(fields)


def test_table_s1_and_loss_chain_frozen_values(scenario_output_root):
    budget = run_scenario("table_s1", output_root=scenario_output_root / "frozen")
    by_name = {row["quantity"]: row["simulated"] for row in budget.rows}
    assert math.isclose(by_name["total_efficiency_pct"], 1.7459139672, rel_tol=1e-12)
    assert math.isclose(by_name["predicted_over_measured"], 1.7459139672 / 1.40, rel_tol=1e-12)

    chain = run_scenario("loss_chain", output_root=scenario_output_root / "frozen")
    by_name = {row["quantity"]: row["simulated"] for row in chain.rows}
    assert math.isclose(by_name["single_pass_pct"], 51.96152422706632, rel_tol=1e-12)
    assert math.isclose(by_name["corrected_coupling_pct"], 56.93910665897446, rel_tol=1e-12)
    assert math.isclose(by_name["taper_half_angle_deg"], 1.562224916842398, rel_tol=1e-12)


def test_summary_row_pass_logic():
    row = summary_row("x", 1.05, 1.0, 0.1)
    assert row["pass"] is True and "note" not in row
    assert summary_row("x", 1.2, 1.0, 0.1)["pass"] is False
    noted = summary_row("x", 1.0, None, None, passed=True, note="window check")
    assert noted["note"] == "window check"
    with pytest.raises(ValueError, match="explicit pass"):
        summary_row("x", 1.0, None, None)
