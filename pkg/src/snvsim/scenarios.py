"""Named desk-scale experiment scenarios with reproducible artifacts.

Each scenario reproduces one published panel or table at synthetic-data
scale: it synthesizes data from the model stack, runs the same analysis an
experiment would (fits, thresholds, budgets), writes its data artifacts as
CSV, and records a machine-readable ``summary.json`` whose entries each
carry ``{quantity, simulated, paper_value, tolerance, pass}`` plus a plain
``report.txt``.

Reproducibility
---------------
All randomness in a scenario flows from its single integer config key
``seed``.  The k-th independent random component of a scenario (the order
is documented per runner) uses the stream
``numpy.random.SeedSequence(seed, spawn_key=(k,))``; nothing else consumes
randomness, so reruns with the same config are byte-identical, including
every artifact file.

Output locations
----------------
``run_scenario`` writes to ``<root>/<scenario-name>/``, where the root is
(in precedence order) the explicit ``output_root`` argument, the
``SNVSIM_OUTPUT_DIR`` environment variable, or ``./snvsim_output``.

Configuration
-------------
Every scenario has a complete built-in default config (dimensioned keys
carry unit suffixes, e.g. ``linewidth_mhz``).  A config file selects its
scenario with a ``scenario = <name>`` key; command-line ``key=value``
pairs override both.  Unknown keys are rejected.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import config as config_mod
from . import optical_dynamics, photon_budget, spin_hamiltonian, waveguide_qed
from .config import field_t, fraction, frequency_hz, integer, number, time_s
from .fitting import (
    FitResult,
    fit,
    make_contrast_saturation,
    make_damped_rabi,
    make_exponential,
    make_gaussian,
    make_lorentzian_multi,
    make_reflection_dip,
    make_saturation,
    poisson_sigma,
)
from .spectra import (
    SpectralLine,
    Spectrum,
    eom_background_correction,
    frequency_grid,
    sample_inhomogeneous_ensemble,
    synthesize_spectrum,
    write_spectrum_csv,
)
from .units import TWO_PI, sigma_to_fwhm

#: Environment variable overriding the default artifact root directory.
OUTPUT_DIR_ENV = "SNVSIM_OUTPUT_DIR"

_DEFAULT_OUTPUT_ROOT = "snvsim_output"


# --------------------------------------------------------------------------
# plumbing


def _stream(seed: int, index: int) -> np.random.SeedSequence:
    """The documented per-component random stream (see module docstring)."""
    return np.random.SeedSequence(seed, spawn_key=(index,))


def _rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(_stream(seed, index))


def _fmt_cell(value) -> str:
    """Deterministic CSV cell rendering (floats via repr round-trip)."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt_cell(cell) for cell in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def summary_row(
    quantity: str,
    simulated: float,
    paper_value: float | None,
    tolerance: float | None,
    passed: bool | None = None,
    note: str = "",
) -> dict:
    """One summary entry; pass defaults to |simulated - paper_value| <= tolerance."""
    if passed is None:
        if paper_value is None or tolerance is None:
            raise ValueError(f"{quantity}: need explicit pass when reference is open-ended")
        passed = abs(simulated - paper_value) <= tolerance
    row = {
        "quantity": quantity,
        "simulated": float(simulated),
        "paper_value": None if paper_value is None else float(paper_value),
        "tolerance": None if tolerance is None else float(tolerance),
        "pass": bool(passed),
    }
    if note:
        row["note"] = note
    return row


def _fit_payload(result: FitResult, param_names) -> dict:
    payload = result.as_dict()
    payload["param_names"] = list(param_names)
    return payload


@dataclass(frozen=True)
class Scenario:
    """A named, self-configured scenario runner."""

    name: str
    description: str
    defaults: dict
    runner: Callable[[dict, Path], tuple[list, dict, list]]


@dataclass(frozen=True)
class ScenarioResult:
    """Everything a scenario run produced."""

    name: str
    out_dir: Path
    rows: list
    artifacts: dict
    notes: list

    @property
    def all_pass(self) -> bool:
        return all(row["pass"] for row in self.rows)


# --------------------------------------------------------------------------
# fig1d — inhomogeneous ensemble


_FIG1D_DEFAULTS = {
    "seed": 11,
    "n_emitters": 10000,
    "inhomogeneous_fwhm_ghz": 90.0,
    "hyperfine_splitting_mhz": 452.0,
    "bin_width_ghz": 2.0,
}


def _run_fig1d(cfg: dict, out_dir: Path):
    """Streams: 0 = emitter ensemble draw."""
    seed = integer(cfg, "seed")
    n = integer(cfg, "n_emitters")
    fwhm = frequency_hz(cfg, "inhomogeneous_fwhm")
    split = frequency_hz(cfg, "hyperfine_splitting")
    bin_width = frequency_hz(cfg, "bin_width")

    pairs = sample_inhomogeneous_ensemble(0.0, fwhm, n, split, seed=_stream(seed, 0))
    centers = np.array([(lo.center_hz + hi.center_hz) / 2.0 for lo, hi in pairs])
    empirical_fwhm = sigma_to_fwhm(float(np.std(centers, ddof=1)))
    edges = np.arange(-2.5 * fwhm, 2.5 * fwhm + bin_width, bin_width)
    counts, edges = np.histogram(centers, bins=edges)
    mids = 0.5 * (edges[:-1] + edges[1:])

    # Unweighted fit: weighting by observed counts would bias the width low
    # (downward-fluctuating bins get overweighted at these count levels).
    model = make_gaussian(init=(0.0, fwhm, float(counts.max())))
    result = fit(model, (mids, counts.astype(float)))
    fitted_fwhm = abs(result.params[1])

    _write_csv(out_dir / "distribution.csv", ["freq_hz", "intensity"], zip(mids, counts))
    _write_json(out_dir / "gaussian_fit.json", _fit_payload(result, model.param_names))

    rows = [
        summary_row("inhomogeneous_fwhm_ghz", empirical_fwhm / 1e9, 90.0, 1.8),
    ]
    artifacts = {"distribution": "distribution.csv", "gaussian_fit": "gaussian_fit.json"}
    notes = [
        f"{n} emitter centers drawn from the inhomogeneous distribution and histogrammed "
        f"in {bin_width / 1e9:g} GHz bins; the summary row uses the moment estimator of "
        f"the width, the Gaussian fit ({fitted_fwhm / 1e9:.2f} GHz) is kept as an artifact."
    ]
    return rows, artifacts, notes


# --------------------------------------------------------------------------
# fig1e — zero-field doublet


_FIG1E_DEFAULTS = {
    "seed": 12,
    "zero_field_splitting_mhz": 452.0,
    "slope_ghz_per_t": 5.41,
    "linewidth_mhz": 70.0,
    "snr": 20.0,
    "grid_span_mhz": 1600.0,
    "grid_step_mhz": 2.0,
}


def _run_fig1e(cfg: dict, out_dir: Path):
    """Streams: 0 = spectrum noise."""
    seed = integer(cfg, "seed")
    split = frequency_hz(cfg, "zero_field_splitting")
    slope = number(cfg, "slope_ghz_per_t") * 1e9
    fwhm = frequency_hz(cfg, "linewidth")
    snr = number(cfg, "snr")
    span = frequency_hz(cfg, "grid_span")
    step = frequency_hz(cfg, "grid_step")

    params = spin_hamiltonian.sn117_ground()
    hamiltonian = spin_hamiltonian.build_ground_hamiltonian(params, (0.0, 0.0, 0.0))
    energies = spin_hamiltonian.eigenenergies_hz(hamiltonian)
    _write_csv(out_dir / "levels.csv", ["level", "energy_hz"], enumerate(energies))

    transition = spin_hamiltonian.OpticalTransitionParams.from_cyclic_hz(split, slope)
    detunings = spin_hamiltonian.optical_transition_detunings(transition, 0.0)
    lines = [SpectralLine(center_hz=c, fwhm_hz=fwhm, amplitude=0.5) for c in detunings]
    x = frequency_grid(-span / 2.0, span / 2.0, step)
    spectrum = synthesize_spectrum(lines, x, noise_sigma=1.0 / snr, seed=_stream(seed, 0))
    write_spectrum_csv(spectrum, out_dir / "spectrum.csv")

    model = make_lorentzian_multi(n_lines=2).with_init(
        (fwhm, -split / 2.0, 1.0, split / 2.0, 1.0)
    )
    result = fit(model, spectrum)
    fitted_split = result.params[3] - result.params[1]
    fitted_fwhm = result.params[0]
    _write_json(out_dir / "doublet_fit.json", _fit_payload(result, model.param_names))

    rows = [
        summary_row("hyperfine_splitting_mhz", fitted_split / 1e6, 452.0, 7.0),
        summary_row("optical_linewidth_mhz", fitted_fwhm / 1e6, 70.0, 3.5),
    ]
    artifacts = {
        "levels": "levels.csv",
        "spectrum": "spectrum.csv",
        "doublet_fit": "doublet_fit.json",
    }
    notes = [
        "levels.csv lists the eight zero-field eigenenergies of the full "
        "electron-nuclear ground manifold; the doublet splitting equals the "
        "ground/excited difference of longitudinal hyperfine couplings."
    ]
    return rows, artifacts, notes


# --------------------------------------------------------------------------
# fig2a — field sweep of the optical quartet


_FIG2A_DEFAULTS = {
    "seed": 21,
    "n_scans": 35,
    "field_start_mt": 0.0,
    "field_step_mt": 4.3,
    "zero_field_splitting_mhz": 452.0,
    "slope_ghz_per_t": 5.41,
    "linewidth_mhz": 70.0,
    "snr": 15.0,
    "grid_span_ghz": 2.4,
    "grid_step_mhz": 5.0,
}


def _run_fig2a(cfg: dict, out_dir: Path):
    """Streams: k = noise of scan k (k = 0 .. n_scans-1)."""
    seed = integer(cfg, "seed")
    n_scans = integer(cfg, "n_scans")
    b_start = field_t(cfg, "field_start")
    b_step = field_t(cfg, "field_step")
    split = frequency_hz(cfg, "zero_field_splitting")
    slope = number(cfg, "slope_ghz_per_t") * 1e9
    fwhm = frequency_hz(cfg, "linewidth")
    snr = number(cfg, "snr")
    span = frequency_hz(cfg, "grid_span")
    step = frequency_hz(cfg, "grid_step")

    transition = spin_hamiltonian.OpticalTransitionParams.from_cyclic_hz(split, slope)
    x = frequency_grid(-span / 2.0, span / 2.0, step)
    scans_dir = out_dir / "scans"
    scans_dir.mkdir(exist_ok=True)

    fields = np.array([b_start + k * b_step for k in range(n_scans)])
    manifest_rows = []
    center_rows = []
    spans = np.empty(n_scans)
    for k, bz in enumerate(fields):
        detunings = spin_hamiltonian.optical_transition_detunings(transition, bz)
        lines = [SpectralLine(center_hz=c, fwhm_hz=fwhm, amplitude=1.0) for c in detunings]
        spectrum = synthesize_spectrum(lines, x, noise_sigma=1.0 / snr, seed=_stream(seed, k))
        filename = f"scan_{k:02d}.csv"
        write_spectrum_csv(spectrum, scans_dir / filename)
        manifest_rows.append((k, f"scans/{filename}", bz * 1e3))

        init = [fwhm]
        for c in detunings:
            init += [c, 1.0]
        model = make_lorentzian_multi(n_lines=4).with_init(init)
        result = fit(model, spectrum)
        centers = np.sort([result.params[1 + 2 * j] for j in range(4)])
        spans[k] = centers[-1] - centers[0]
        center_rows.append((k, bz * 1e3, *centers, spans[k], result.status))

    coeffs, cov = np.polyfit(fields, spans, 1, cov=True)
    slope_fit, intercept_fit = coeffs
    slope_se, intercept_se = np.sqrt(np.diag(cov))
    crossing_mt = spin_hamiltonian.inner_line_crossing_field_t(transition) * 1e3

    _write_csv(out_dir / "manifest.csv", ["order", "file", "field_mt"], manifest_rows)
    _write_csv(
        out_dir / "line_centers.csv",
        ["scan", "field_mt", "center_1_hz", "center_2_hz", "center_3_hz", "center_4_hz",
         "span_hz", "fit_status"],
        center_rows,
    )
    _write_json(
        out_dir / "span_regression.json",
        {
            "slope_hz_per_t": float(slope_fit),
            "slope_se_hz_per_t": float(slope_se),
            "intercept_hz": float(intercept_fit),
            "intercept_se_hz": float(intercept_se),
            "n_scans": n_scans,
        },
    )

    rows = [
        summary_row("splitting_slope_ghz_per_t", slope_fit / 1e9, 5.41, 0.1623),
        summary_row("zero_field_splitting_mhz", intercept_fit / 1e6, 452.0, 5.0),
        summary_row("inner_line_crossing_mt", crossing_mt, 84.0, 2.0),
    ]
    artifacts = {
        "scan_manifest": "manifest.csv",
        "line_centers": "line_centers.csv",
        "span_regression": "span_regression.json",
    }
    notes = [
        "The outer-line span equals splitting + slope * field at every field, on "
        "both sides of the inner-line crossing, so the linear regression needs no "
        "per-regime line assignment.",
        f"Scans within one linewidth of the crossing (~{crossing_mt:.1f} mT) have "
        "unresolved inner lines; their inner-center estimates are degenerate but "
        "unused by the regression.",
    ]
    return rows, artifacts, notes


# --------------------------------------------------------------------------
# fig2b — splitting across emitters


_FIG2B_DEFAULTS = {
    "seed": 22,
    "n_emitters": 12,
    "splitting_mean_mhz": 452.0,
    "splitting_sigma_mhz": 7.0,
    "linewidth_mhz": 70.0,
    "snr": 15.0,
    "grid_span_mhz": 1200.0,
    "grid_step_mhz": 2.0,
}


def _run_fig2b(cfg: dict, out_dir: Path):
    """Streams: 0 = ensemble draw, 1+k = spectrum noise of emitter k."""
    seed = integer(cfg, "seed")
    n = integer(cfg, "n_emitters")
    split_mean = frequency_hz(cfg, "splitting_mean")
    split_sigma = frequency_hz(cfg, "splitting_sigma")
    fwhm = frequency_hz(cfg, "linewidth")
    snr = number(cfg, "snr")
    span = frequency_hz(cfg, "grid_span")
    step = frequency_hz(cfg, "grid_step")

    pairs = sample_inhomogeneous_ensemble(
        0.0,
        0.0,
        n,
        split_mean,
        seed=_stream(seed, 0),
        split_sigma_hz=split_sigma,
        line_fwhm_hz=fwhm,
    )
    x = frequency_grid(-span / 2.0, span / 2.0, step)
    spectra_dir = out_dir / "spectra"
    spectra_dir.mkdir(exist_ok=True)

    emitter_rows = []
    fitted_splits = np.empty(n)
    for k, (lo, hi) in enumerate(pairs):
        spectrum = synthesize_spectrum([lo, hi], x, noise_sigma=1.0 / snr, seed=_stream(seed, 1 + k))
        write_spectrum_csv(spectrum, spectra_dir / f"emitter_{k:02d}.csv")
        model = make_lorentzian_multi(n_lines=2).with_init(
            (fwhm, -split_mean / 2.0, 1.0, split_mean / 2.0, 1.0)
        )
        result = fit(model, spectrum)
        fitted_splits[k] = result.params[3] - result.params[1]
        true_split = hi.center_hz - lo.center_hz
        emitter_rows.append((k, true_split, fitted_splits[k]))

    mean_split = float(np.mean(fitted_splits))
    std_split = float(np.std(fitted_splits, ddof=1))
    _write_csv(
        out_dir / "emitters.csv",
        ["emitter", "true_split_hz", "fitted_split_hz"],
        emitter_rows,
    )

    tolerance = 3.0 * (split_sigma / 1e6) / math.sqrt(n)
    rows = [
        summary_row("mean_splitting_mhz", mean_split / 1e6, split_mean / 1e6, tolerance),
    ]
    artifacts = {"emitters": "emitters.csv", "spectra_dir": "spectra"}
    notes = [
        f"Sample standard deviation of the fitted splittings: {std_split / 1e6:.2f} MHz "
        f"(ensemble sigma {split_sigma / 1e6:g} MHz, n = {n}).",
        "The splitting is emitter-independent at the few-MHz level, identifying it "
        "as an intrinsic hyperfine coupling rather than a strain or field artifact.",
    ]
    return rows, artifacts, notes


# --------------------------------------------------------------------------
# fig2c — optical pumping initialization


_FIG2C_DEFAULTS = {
    "seed": 23,
    "steady_fidelity": 0.986,
    "calibration_time_us": 30.0,
    "calibration_fidelity": 0.980,
    "n_points": 60,
    "max_time_us": 30.0,
    "noise_sigma": 0.003,
}


def _run_fig2c(cfg: dict, out_dir: Path):
    """Streams: 0 = trace noise."""
    seed = integer(cfg, "seed")
    f_inf = fraction(cfg, "steady_fidelity")
    t_cal = time_s(cfg, "calibration_time")
    f_cal = fraction(cfg, "calibration_fidelity")
    n_points = integer(cfg, "n_points")
    t_max = time_s(cfg, "max_time")
    noise = number(cfg, "noise_sigma")

    tau = optical_dynamics.pumping_time_constant(t_cal, f_cal, f_inf)
    pump = optical_dynamics.PumpingModel(f_infinity=f_inf, tau_pump=tau)
    t = np.linspace(0.0, t_max, n_points)
    y_true = optical_dynamics.pumping_fidelity(t, pump)
    y = y_true + _rng(seed, 0).normal(0.0, noise, size=t.size)
    y_err = np.full(t.size, noise)

    t_us = t * 1e6
    model = make_exponential(init=(0.9, -0.4, 5.0))
    result = fit(model, (t_us, y, y_err))
    fitted_f_inf = result.params[0]
    fitted_tau_us = result.params[2]

    _write_csv(out_dir / "pumping.csv", ["t_ns", "value"], zip(t * 1e9, y))
    _write_json(out_dir / "exponential_fit.json", _fit_payload(result, model.param_names))

    rows = [
        summary_row("steady_state_fidelity", fitted_f_inf, f_inf, 0.005),
        summary_row(
            "pump_time_constant_us",
            fitted_tau_us,
            tau * 1e6,
            0.1 * tau * 1e6,
            note="reference derived from the calibration point, not directly reported",
        ),
    ]
    artifacts = {"pumping": "pumping.csv", "exponential_fit": "exponential_fit.json"}
    notes = [
        f"Pump time constant calibrated to {tau * 1e6:.2f} us from the single "
        f"({t_cal * 1e6:g} us, {f_cal:g}) endpoint measurement.",
    ]
    return rows, artifacts, notes


# --------------------------------------------------------------------------
# fig2d — nuclear depolarization


_FIG2D_DEFAULTS = {
    "seed": 24,
    "nuclear_t1_s": 1.25,
    "initial_fidelity": 0.986,
    "max_time_s": 5.0,
    "n_points": 40,
    "noise_sigma": 0.01,
}


def _run_fig2d(cfg: dict, out_dir: Path):
    """Streams: 0 = trace noise."""
    seed = integer(cfg, "seed")
    t1n = time_s(cfg, "nuclear_t1")
    f_init = fraction(cfg, "initial_fidelity")
    t_max = time_s(cfg, "max_time")
    n_points = integer(cfg, "n_points")
    noise = number(cfg, "noise_sigma")

    t = np.linspace(0.0, t_max, n_points)
    y_true = optical_dynamics.nuclear_polarization_decay(t, t1n, f_init)
    y = y_true + _rng(seed, 0).normal(0.0, noise, size=t.size)
    y_err = np.full(t.size, noise)

    model = make_exponential(init=(0.5, 0.5, 1.0))
    result = fit(model, (t, y, y_err))

    _write_csv(out_dir / "depolarization.csv", ["t_ns", "value"], zip(t * 1e9, y))
    _write_json(out_dir / "exponential_fit.json", _fit_payload(result, model.param_names))

    rows = [
        summary_row("nuclear_t1_s", result.params[2], t1n, 0.1 * t1n),
        summary_row("equilibrium_fidelity", result.params[0], 0.5, 0.02),
    ]
    artifacts = {
        "depolarization": "depolarization.csv",
        "exponential_fit": "exponential_fit.json",
    }
    notes = ["The polarization relaxes to the unpolarized value 1/2, not to zero."]
    return rows, artifacts, notes


# --------------------------------------------------------------------------
# fig3a — fluorescence saturation


_FIG3A_DEFAULTS = {
    "seed": 31,
    "saturation_power_pw": 120.0,
    "max_rate_mcps": 1.34,
    "power_min_pw": 1.0,
    "power_max_pw": 2000.0,
    "n_points": 30,
    "noise_rel": 0.03,
}


def _run_fig3a(cfg: dict, out_dir: Path):
    """Streams: 0 = relative rate noise."""
    seed = integer(cfg, "seed")
    p_sat = config_mod.power_w(cfg, "saturation_power")
    i_inf = number(cfg, "max_rate_mcps") * 1e6
    p_min = config_mod.power_w(cfg, "power_min")
    p_max = config_mod.power_w(cfg, "power_max")
    n_points = integer(cfg, "n_points")
    noise_rel = number(cfg, "noise_rel")

    sp = optical_dynamics.SaturationParams(p_sat=p_sat, i_infinity=i_inf)
    powers = np.geomspace(p_min, p_max, n_points)
    y_true = optical_dynamics.saturation_intensity(powers, sp)
    y = y_true * (1.0 + _rng(seed, 0).normal(0.0, noise_rel, size=powers.size))
    y_err = noise_rel * y_true

    powers_pw = powers * 1e12
    model = make_saturation(init=(8.0e5, 60.0))
    result = fit(model, (powers_pw, y, y_err))

    _write_csv(out_dir / "saturation.csv", ["power_pw", "rate_cps"], zip(powers_pw, y))
    _write_json(out_dir / "saturation_fit.json", _fit_payload(result, model.param_names))

    rows = [
        summary_row("saturation_power_pw", result.params[1], 120.0, 12.0),
        summary_row("max_rate_mcps", result.params[0] / 1e6, 1.34, 0.07),
    ]
    artifacts = {"saturation": "saturation.csv", "saturation_fit": "saturation_fit.json"}
    notes = []
    return rows, artifacts, notes


# --------------------------------------------------------------------------
# fig3b — single-shot readout


_FIG3B_DEFAULTS = {
    "seed": 32,
    "mean_bright": 1.83,
    "mean_dark": 0.13,
    "fidelity_target": 0.80,
    "n_pulses": 150,
    "trials": 100000,
}


def _run_fig3b(cfg: dict, out_dir: Path):
    """Streams: the readout simulator spawns SeedSequence(seed) children 0/1
    for the bright/dark ensembles (same spawn convention as the module rule).
    """
    seed = integer(cfg, "seed")
    mean_bright = number(cfg, "mean_bright")
    mean_dark = number(cfg, "mean_dark")
    target = fraction(cfg, "fidelity_target")
    n_pulses = integer(cfg, "n_pulses")
    trials = integer(cfg, "trials")

    model = photon_budget.calibrate_readout_model(mean_bright, mean_dark, target, n_pulses)
    histograms = photon_budget.simulate_readout(model, trials, seed)
    bright, dark = histograms["bright"], histograms["dark"]

    fidelity_k1 = photon_budget.threshold_fidelity(bright, dark, 1)
    best = photon_budget.optimal_threshold(bright, dark)
    poisson_bright = photon_budget.poisson_reference_histogram(mean_bright)
    poisson_dark = photon_budget.poisson_reference_histogram(mean_dark)
    poisson_f = photon_budget.threshold_fidelity(poisson_bright, poisson_dark, 1)

    width = max(len(bright.counts), len(dark.counts))
    hist_rows = [
        (
            n,
            bright.counts[n] if n < len(bright.counts) else 0.0,
            dark.counts[n] if n < len(dark.counts) else 0.0,
        )
        for n in range(width)
    ]
    _write_csv(out_dir / "histograms.csv", ["n", "count_bright", "count_dark"], hist_rows)
    _write_csv(
        out_dir / "thresholds.csv",
        ["k", "fidelity"],
        [(k, photon_budget.threshold_fidelity(bright, dark, k)) for k in range(width + 1)],
    )
    _write_json(
        out_dir / "calibration.json",
        {
            "p_detect": model.p_detect,
            "p_flip_bright": model.p_flip_bright,
            "p_flip_dark": model.p_flip_dark,
            "dark_rate": model.dark_rate,
            "n_pulses": model.n_pulses,
            "analytic_fidelity_k1": photon_budget.analytic_threshold_fidelity_k1(model),
        },
    )

    rows = [
        summary_row("readout_fidelity_k1", fidelity_k1, target, 0.01),
        summary_row("optimal_threshold_photons", best["k"], 1.0, 0.0),
        summary_row(
            "poisson_reference_fidelity_k1",
            poisson_f,
            0.859,
            0.001,
            note="Poisson statistics at the same means; model-derived reference",
        ),
        summary_row("mean_bright_counts", bright.mean(), mean_bright, 0.02),
        summary_row("mean_dark_counts", dark.mean(), mean_dark, 0.005),
    ]
    artifacts = {
        "histograms": "histograms.csv",
        "thresholds": "thresholds.csv",
        "calibration": "calibration.json",
    }
    notes = [
        "The spin-flip tail during readout pushes the threshold-1 fidelity below "
        "the flip-free Poisson reference at the same mean counts.",
    ]
    return rows, artifacts, notes


# --------------------------------------------------------------------------
# fig3c — N-photon coincidences


_FIG3C_DEFAULTS = {
    "repetition_rate_mhz": 0.38,
    "duty_cycle": 0.40,
    "efficiency": 0.014,
    "duration_s": 86400.0,
    "max_fold": 5,
}


def _run_fig3c(cfg: dict, out_dir: Path):
    """Deterministic (no random streams)."""
    rate = number(cfg, "repetition_rate_mhz") * 1e6
    duty = fraction(cfg, "duty_cycle")
    eta = fraction(cfg, "efficiency")
    duration = time_s(cfg, "duration")
    max_fold = integer(cfg, "max_fold")

    folds = list(range(1, max_fold + 1))
    expected = [
        photon_budget.nfold_coincidence_expectation(rate, eta, duty, duration, n) for n in folds
    ]
    _write_csv(out_dir / "coincidences.csv", ["n", "expected_events"], zip(folds, expected))

    five_fold = expected[-1] if max_fold == 5 else photon_budget.nfold_coincidence_expectation(
        rate, eta, duty, duration, 5
    )
    rows = [
        summary_row(
            "five_fold_events_per_day",
            five_fold,
            None,
            None,
            passed=3.0 <= five_fold <= 15.0,
            note="reported qualitatively as multiple events per day; pass window [3, 15]",
        ),
    ]
    artifacts = {"coincidences": "coincidences.csv"}
    notes = [
        "The expectation is log-linear in the fold number with slope ln(efficiency); "
        "each extra simultaneous photon costs a factor of the end-to-end efficiency.",
    ]
    return rows, artifacts, notes


# --------------------------------------------------------------------------
# fig4b — waveguide reflection dip


_FIG4B_DEFAULTS = {
    "seed": 42,
    "cooperativity": 0.027,
    "input_coupling": 0.95,
    "linewidth_mhz": 70.0,
    "grid_span_mhz": 1000.0,
    "grid_step_mhz": 2.0,
    "noise_sigma": 0.01,
}


def _run_fig4b(cfg: dict, out_dir: Path):
    """Streams: 0 = raw-trace noise."""
    seed = integer(cfg, "seed")
    coop = number(cfg, "cooperativity")
    f_in = fraction(cfg, "input_coupling")
    gamma_h = frequency_hz(cfg, "linewidth")
    span = frequency_hz(cfg, "grid_span")
    step = frequency_hz(cfg, "grid_step")
    noise = number(cfg, "noise_sigma")

    model = waveguide_qed.ReflectionModel(cooperativity=coop, f_in=f_in, gamma_h_hz=gamma_h)
    delta = frequency_grid(-span / 2.0, span / 2.0, step)
    r_norm = waveguide_qed.normalized_reflection(delta, model)

    # The sideband-modulation measurement sees half signal, half static
    # background; synthesize the raw trace, then correct it back out.
    reference = Spectrum(x=delta, y=np.ones_like(delta))
    raw_clean = reference.y * (r_norm + 1.0) / 2.0
    raw = raw_clean + _rng(seed, 0).normal(0.0, noise / 2.0, size=delta.size)
    raw_spectrum = Spectrum(x=delta, y=raw)
    corrected = eom_background_correction(raw_spectrum, reference)
    corrected = Spectrum(x=delta, y=corrected.y, y_err=np.full(delta.size, noise))

    fit_model = make_reflection_dip(init=(0.05, 100.0e6), fix_f_in=f_in)
    result = fit(fit_model, corrected)
    c_fit, gamma_fit = result.params
    r0_fit = waveguide_qed.on_resonance_reflection(c_fit, f_in)
    contrast_fit = 1.0 - r0_fit
    fwhm_fit = gamma_fit * (1.0 + c_fit)

    _write_csv(out_dir / "reflection_raw.csv", ["delta_mhz", "r_norm"], zip(delta / 1e6, raw))
    _write_csv(
        out_dir / "reflection.csv", ["delta_mhz", "r_norm"], zip(delta / 1e6, corrected.y)
    )
    _write_json(
        out_dir / "reflection_fit.json",
        {
            "c": float(c_fit),
            "f": float(f_in),
            "gamma_h_mhz": float(gamma_fit / 1e6),
            "contrast": float(contrast_fit),
            "residual_norm": float(result.residual_norm),
        },
    )

    rows = [
        summary_row("cooperativity", c_fit, 0.027, 0.004),
        summary_row("dip_contrast", contrast_fit, 0.11, 0.015),
        summary_row("dip_fwhm_mhz", fwhm_fit / 1e6, 72.0, 4.0),
    ]
    artifacts = {
        "reflection_raw": "reflection_raw.csv",
        "reflection": "reflection.csv",
        "reflection_fit": "reflection_fit.json",
    }
    notes = [
        "reflection_raw.csv carries the halved dip of the sideband-modulated "
        "measurement; reflection.csv is after the 2*(raw/reference) - 1 correction.",
        "The input-coupling ratio is held fixed in the fit; it is constrained by "
        "an independent calibration, not by the dip shape.",
    ]
    return rows, artifacts, notes


# --------------------------------------------------------------------------
# fig4c — contrast vs saturation


_FIG4C_DEFAULTS = {
    "seed": 43,
    "cooperativity": 0.027,
    "input_coupling": 0.95,
    "s_min": 0.01,
    "s_max": 10.0,
    "n_points": 25,
    "noise_sigma": 0.005,
}


def _run_fig4c(cfg: dict, out_dir: Path):
    """Streams: 0 = contrast noise."""
    seed = integer(cfg, "seed")
    coop = number(cfg, "cooperativity")
    f_in = fraction(cfg, "input_coupling")
    s_min = number(cfg, "s_min")
    s_max = number(cfg, "s_max")
    n_points = integer(cfg, "n_points")
    noise = number(cfg, "noise_sigma")

    model = waveguide_qed.ReflectionModel(cooperativity=coop, f_in=f_in, gamma_h_hz=70.0e6)
    r0 = waveguide_qed.dip_contrast(model)
    s = np.geomspace(s_min, s_max, n_points)
    y = waveguide_qed.contrast_vs_saturation(s, r0) + _rng(seed, 0).normal(
        0.0, noise, size=s.size
    )
    y_err = np.full(s.size, noise)

    fit_model = make_contrast_saturation(init=(0.05,))
    result = fit(fit_model, (s, y, y_err))

    _write_csv(out_dir / "contrast_saturation.csv", ["saturation", "contrast"], zip(s, y))
    _write_json(out_dir / "contrast_fit.json", _fit_payload(result, fit_model.param_names))

    rows = [
        summary_row("low_power_contrast", result.params[0], 0.11, 0.017),
    ]
    artifacts = {
        "contrast_saturation": "contrast_saturation.csv",
        "contrast_fit": "contrast_fit.json",
    }
    notes = [
        "Contrast rolls off as 1/(1+s) with the saturation parameter; the fit "
        "extrapolates the low-power dip contrast.",
    ]
    return rows, artifacts, notes


# --------------------------------------------------------------------------
# table_s1 — detection-efficiency budget


_TABLE_S1_DEFAULTS = {
    "stage_pi_pulse_fidelity": 0.80,
    "stage_quantum_efficiency": 0.79,
    "stage_phonon_sideband_fraction": 0.43,
    "stage_waveguide_coupling": 0.325,
    "stage_fibre_coupling": 0.57,
    "stage_setup_transmission": 0.51,
    "stage_detector_efficiency": 0.68,
    "measured_efficiency": 0.0140,
}


def _run_table_s1(cfg: dict, out_dir: Path):
    """Deterministic (no random streams)."""
    budget = config_mod.budget_from_config(cfg)
    measured = fraction(cfg, "measured_efficiency")
    report = photon_budget.budget_report(budget)
    total = report["total_fraction"]

    _write_json(out_dir / "budget.json", report)
    _write_csv(
        out_dir / "budget.csv",
        ["stage", "fraction", "loss_db", "cumulative_fraction", "cumulative_loss_db"],
        [
            (r["stage"], r["fraction"], r["loss_db"], r["cumulative_fraction"], r["cumulative_loss_db"])
            for r in report["stages"]
        ],
    )

    ratio = total / measured
    rows = [
        summary_row("total_efficiency_pct", total * 100.0, 1.7, 0.1),
        summary_row(
            "predicted_over_measured",
            ratio,
            None,
            None,
            passed=0.5 <= ratio <= 2.0,
            note="measured end-to-end efficiency 1.40(5)%; agreement expected within a factor ~2",
        ),
    ]
    artifacts = {"budget": "budget.json", "budget_table": "budget.csv"}
    notes = [
        f"Stage product {total * 100.0:.3f}% vs measured {measured * 100.0:.2f}% "
        f"(ratio {ratio:.2f}).",
    ]
    return rows, artifacts, notes


# --------------------------------------------------------------------------
# loss_chain — fibre-coupling loss accounting


_LOSS_CHAIN_DEFAULTS = {
    "measured_roundtrip": 0.27,
    "correction_splice": "db 0.04",
    "correction_facet_scattering": "fraction 0.96",
    "correction_fibre_attenuation": "db_per_km 12 15",
    "taper_etch_rate_um_min": 1.5,
    "taper_pull_rate_um_min": 55.0,
}


def _run_loss_chain(cfg: dict, out_dir: Path):
    """Deterministic (no random streams)."""
    chain = config_mod.loss_chain_from_config(cfg)
    single_pass = photon_budget.single_pass_from_roundtrip(chain.measured_roundtrip)
    corrected = photon_budget.apply_loss_chain(chain)
    taper = photon_budget.taper_half_angle_deg(
        number(cfg, "taper_etch_rate_um_min"), number(cfg, "taper_pull_rate_um_min")
    )

    _write_json(
        out_dir / "loss_chain.json",
        {
            "measured_roundtrip": chain.measured_roundtrip,
            "single_pass": single_pass,
            "corrections": [
                {
                    "name": c.name,
                    "kind": c.kind,
                    "value": c.value,
                    "length_m": c.length_m,
                    "transmission": c.transmission(),
                }
                for c in chain.corrections
            ],
            "corrected_coupling": corrected,
            "taper_half_angle_deg": taper,
        },
    )

    rows = [
        summary_row("single_pass_pct", single_pass * 100.0, 52.0, 2.0),
        summary_row("corrected_coupling_pct", corrected * 100.0, 57.0, 6.0),
        summary_row("taper_half_angle_deg", taper, 1.5, 0.5),
    ]
    artifacts = {"loss_chain": "loss_chain.json"}
    notes = [
        "The corrected value divides documented per-pass losses (splice, facet "
        "scattering, fibre attenuation) out of the square-rooted roundtrip "
        "transmission.",
    ]
    return rows, artifacts, notes


# --------------------------------------------------------------------------
# rabi — damped optical Rabi oscillation


_RABI_DEFAULTS = {
    "seed": 51,
    "rabi_frequency_mhz": 230.0,
    "optical_t1_ns": 4.7,
    "max_time_ns": 15.0,
    "n_points": 301,
    "noise_sigma": 0.02,
}


def _run_rabi(cfg: dict, out_dir: Path):
    """Streams: 0 = trace noise."""
    seed = integer(cfg, "seed")
    omega = TWO_PI * frequency_hz(cfg, "rabi_frequency")
    t1 = time_s(cfg, "optical_t1")
    t_max = time_s(cfg, "max_time")
    n_points = integer(cfg, "n_points")
    noise = number(cfg, "noise_sigma")

    calibration = optical_dynamics.pi_pulse_calibration(omega, t1)
    t = np.linspace(0.0, t_max, n_points)
    y = optical_dynamics.rabi_population(t, omega, t1) + _rng(seed, 0).normal(
        0.0, noise, size=t.size
    )
    y_err = np.full(t.size, noise)

    t_ns = t * 1e9
    model = make_damped_rabi(init=(TWO_PI * 0.2, 6.0))
    result = fit(model, (t_ns, y, y_err))
    fitted_omega_mhz = result.params[0] * 1e3 / TWO_PI
    fitted_t1_ns = result.params[1]

    _write_csv(out_dir / "rabi.csv", ["t_ns", "value"], zip(t_ns, y))
    _write_json(out_dir / "rabi_fit.json", _fit_payload(result, model.param_names))
    _write_json(
        out_dir / "pi_calibration.json",
        {"t_pi_ns": calibration["t_pi"] * 1e9, "fidelity": calibration["fidelity"]},
    )

    rows = [
        summary_row(
            "pi_pulse_fidelity",
            calibration["fidelity"],
            0.815,
            0.001,
            note="model-derived reference; the measured preparation fidelity is 0.80(1)",
        ),
        summary_row(
            "pi_time_ns",
            calibration["t_pi"] * 1e9,
            2.17,
            0.01,
            note="model-derived reference",
        ),
        summary_row("fitted_rabi_frequency_mhz", fitted_omega_mhz, 230.0, 4.6),
        summary_row("fitted_optical_t1_ns", fitted_t1_ns, 4.7, 0.47),
    ]
    artifacts = {
        "rabi": "rabi.csv",
        "rabi_fit": "rabi_fit.json",
        "pi_calibration": "pi_calibration.json",
    }
    notes = [
        "The measured optimal pulse (~1.8 ns) is shorter than this rate-equation "
        "model's 2.17 ns; finite pulse shape and detuning effects are outside the "
        "model, so model-derived references are quoted for the calibration rows.",
    ]
    return rows, artifacts, notes


# --------------------------------------------------------------------------
# lifetime — spontaneous emission decay


_LIFETIME_DEFAULTS = {
    "seed": 52,
    "lifetime_ns": 5.56,
    "max_time_ns": 30.0,
    "n_points": 120,
    "peak_counts": 3000.0,
}


def _run_lifetime(cfg: dict, out_dir: Path):
    """Streams: 0 = Poisson counting noise."""
    seed = integer(cfg, "seed")
    tau = time_s(cfg, "lifetime")
    t_max = time_s(cfg, "max_time")
    n_points = integer(cfg, "n_points")
    peak = number(cfg, "peak_counts")

    t = np.linspace(0.0, t_max, n_points)
    expected = peak * optical_dynamics.spontaneous_decay(t, tau)
    counts = _rng(seed, 0).poisson(expected).astype(float)

    t_ns = t * 1e9
    model = make_exponential(init=(0.0, peak * 0.8, 5.0))
    result = fit(model, (t_ns, counts, poisson_sigma(counts)))
    fitted_tau_ns = result.params[2]
    fourier_mhz = optical_dynamics.fourier_limit(tau) / 1e6

    _write_csv(out_dir / "decay.csv", ["t_ns", "value"], zip(t_ns, counts))
    _write_json(out_dir / "decay_fit.json", _fit_payload(result, model.param_names))

    rows = [
        summary_row("fitted_lifetime_ns", fitted_tau_ns, tau * 1e9, 0.02 * tau * 1e9),
        summary_row("fourier_limit_mhz", fourier_mhz, 28.6, 0.1),
    ]
    artifacts = {"decay": "decay.csv", "decay_fit": "decay_fit.json"}
    notes = [
        "The Fourier-limited linewidth 1/(2 pi tau) uses the configured lifetime; "
        "the fitted lifetime checks the synthetic counting pipeline against it.",
    ]
    return rows, artifacts, notes


# --------------------------------------------------------------------------
# g2 — intensity autocorrelation


_G2_DEFAULTS = {
    "seed": 53,
    "rabi_frequency_mhz": 230.0,
    "optical_t1_ns": 4.7,
    "background": 0.052,
    "max_delay_ns": 20.0,
    "step_ns": 0.1,
    "noise_sigma": 0.03,
}


def _run_g2(cfg: dict, out_dir: Path):
    """Streams: 0 = correlation noise."""
    seed = integer(cfg, "seed")
    omega = TWO_PI * frequency_hz(cfg, "rabi_frequency")
    t1 = time_s(cfg, "optical_t1")
    background = fraction(cfg, "background")
    max_delay = time_s(cfg, "max_delay")
    step = time_s(cfg, "step")
    noise = number(cfg, "noise_sigma")

    n_side = int(round(max_delay / step))
    tau = np.arange(-n_side, n_side + 1) * step
    y = optical_dynamics.g2_autocorrelation(tau, omega, t1, background)
    y_noisy = y + _rng(seed, 0).normal(0.0, noise, size=tau.size)

    g2_zero = optical_dynamics.g2_autocorrelation(0.0, omega, t1, background)

    _write_csv(out_dir / "g2.csv", ["t_ns", "value"], zip(tau * 1e9, y_noisy))

    rows = [
        summary_row("g2_zero", g2_zero, 0.052, 0.004),
        summary_row(
            "single_emitter_criterion",
            g2_zero,
            None,
            None,
            passed=g2_zero < 0.5,
            note="g2(0) < 0.5 certifies a single emitter",
        ),
    ]
    artifacts = {"g2": "g2.csv"}
    notes = [
        "g2(0) equals the uncorrelated-background fraction exactly in this model; "
        "the Rabi ringing at short delay reflects coherent re-excitation.",
    ]
    return rows, artifacts, notes


# --------------------------------------------------------------------------
# isotopes — splitting predictions


_ISOTOPES_DEFAULTS = {
    "reference_splitting_mhz": 452.0,
    "reference_isotope": "sn117",
}


def _run_isotopes(cfg: dict, out_dir: Path):
    """Deterministic (no random streams)."""
    split_ref = frequency_hz(cfg, "reference_splitting")
    isotope_ref = str(cfg.get("reference_isotope", "sn117"))

    predictions = spin_hamiltonian.isotope_splitting_predictions_hz(split_ref, isotope_ref)
    _write_csv(
        out_dir / "isotope_splittings.csv",
        ["isotope", "gamma_n_mhz_per_t", "splitting_mhz"],
        [
            (
                isotope,
                spin_hamiltonian.NUCLEAR_GYROMAGNETIC_HZ_PER_T[isotope] / 1e6,
                predictions[isotope] / 1e6,
            )
            for isotope in sorted(predictions)
        ],
    )

    rows = [
        summary_row("sn115_predicted_splitting_mhz", predictions["sn115"] / 1e6, 415.0, 5.0),
        summary_row("sn119_predicted_splitting_mhz", predictions["sn119"] / 1e6, 475.0, 5.0),
    ]
    artifacts = {"isotope_splittings": "isotope_splittings.csv"}
    notes = [
        "The contact hyperfine coupling scales with the nuclear gyromagnetic "
        "ratio, so sibling-isotope splittings follow from the measured one and "
        "tabulated ratios.",
    ]
    return rows, artifacts, notes


# --------------------------------------------------------------------------
# registry and runner


_SCENARIOS = [
    Scenario(
        name="fig1d",
        description="Inhomogeneous distribution of emitter optical frequencies with Gaussian fit (Fig. 1d).",
        defaults=_FIG1D_DEFAULTS,
        runner=_run_fig1d,
    ),
    Scenario(
        name="fig1e",
        description="Zero-field resonant-excitation doublet of a single register, with the ground-manifold level table (Fig. 1e).",
        defaults=_FIG1E_DEFAULTS,
        runner=_run_fig1e,
    ),
    Scenario(
        name="fig2a",
        description="Optical line quartet versus magnetic field; slope and zero-field splitting from the outer-line span (Fig. 2a).",
        defaults=_FIG2A_DEFAULTS,
        runner=_run_fig2a,
    ),
    Scenario(
        name="fig2b",
        description="Hyperfine splitting across an ensemble of emitters (Fig. 2b).",
        defaults=_FIG2B_DEFAULTS,
        runner=_run_fig2b,
    ),
    Scenario(
        name="fig2c",
        description="Nuclear-spin initialization fidelity versus optical pumping time (Fig. 2c).",
        defaults=_FIG2C_DEFAULTS,
        runner=_run_fig2c,
    ),
    Scenario(
        name="fig2d",
        description="Nuclear polarization relaxation toward the unpolarized state (Fig. 2d).",
        defaults=_FIG2D_DEFAULTS,
        runner=_run_fig2d,
    ),
    Scenario(
        name="fig3a",
        description="Detected fluorescence saturation versus resonant drive power (Fig. 3a).",
        defaults=_FIG3A_DEFAULTS,
        runner=_run_fig3a,
    ),
    Scenario(
        name="fig3b",
        description="Single-shot spin-readout photon histograms and threshold fidelity (Fig. 3b).",
        defaults=_FIG3B_DEFAULTS,
        runner=_run_fig3b,
    ),
    Scenario(
        name="fig3c",
        description="Expected N-photon coincidence events per day of acquisition (Fig. 3c).",
        defaults=_FIG3C_DEFAULTS,
        runner=_run_fig3c,
    ),
    Scenario(
        name="fig4b",
        description="Waveguide reflection dip with sideband-background correction and model fit (Fig. 4b).",
        defaults=_FIG4B_DEFAULTS,
        runner=_run_fig4b,
    ),
    Scenario(
        name="fig4c",
        description="Reflection-dip contrast versus drive saturation (Fig. 4c).",
        defaults=_FIG4C_DEFAULTS,
        runner=_run_fig4c,
    ),
    Scenario(
        name="table_s1",
        description="End-to-end detection-efficiency budget, stage by stage (Table S1).",
        defaults=_TABLE_S1_DEFAULTS,
        runner=_run_table_s1,
    ),
    Scenario(
        name="loss_chain",
        description="Fibre-coupling efficiency from a roundtrip transmission with documented loss corrections (Table S1 supporting analysis).",
        defaults=_LOSS_CHAIN_DEFAULTS,
        runner=_run_loss_chain,
    ),
    Scenario(
        name="rabi",
        description="Damped optical Rabi oscillation with pi-pulse calibration and model fit (optical pulse calibration, supporting Fig. 2).",
        defaults=_RABI_DEFAULTS,
        runner=_run_rabi,
    ),
    Scenario(
        name="lifetime",
        description="Excited-state lifetime decay and the Fourier-limited linewidth it implies (supporting measurement for Fig. 1e).",
        defaults=_LIFETIME_DEFAULTS,
        runner=_run_lifetime,
    ),
    Scenario(
        name="g2",
        description="Second-order intensity autocorrelation with background floor (single-emitter check for Fig. 1).",
        defaults=_G2_DEFAULTS,
        runner=_run_g2,
    ),
    Scenario(
        name="isotopes",
        description="Predicted optical splittings for the sibling spin-1/2 isotopes (isotope assignment analysis, supporting Fig. 2b).",
        defaults=_ISOTOPES_DEFAULTS,
        runner=_run_isotopes,
    ),
]

SCENARIOS: dict[str, Scenario] = {s.name: s for s in _SCENARIOS}


def available_scenarios() -> list[str]:
    """Scenario names in registry order."""
    return [s.name for s in _SCENARIOS]


def _resolve(target: str) -> tuple[Scenario, dict]:
    """Resolve a scenario name or config-file path to (scenario, file config)."""
    if target in SCENARIOS:
        return SCENARIOS[target], {}
    path = Path(target)
    if path.is_file():
        file_cfg = config_mod.load_config(path)
        name = file_cfg.pop("scenario", None)
        if name is None:
            raise ValueError(f"config file {target} does not select a scenario (scenario = <name>)")
        if name not in SCENARIOS:
            raise ValueError(
                f"unknown scenario {name!r} in {target}; available: "
                + ", ".join(available_scenarios())
            )
        return SCENARIOS[name], file_cfg
    raise ValueError(
        f"unknown scenario {target!r}; available: " + ", ".join(available_scenarios())
    )


def _validated_config(scenario: Scenario, file_cfg: dict, overrides: dict) -> dict:
    cfg = config_mod.merged(config_mod.merged(scenario.defaults, file_cfg), overrides)
    unknown = sorted(set(cfg) - set(scenario.defaults))
    if unknown:
        raise ValueError(
            f"unknown config keys for scenario {scenario.name!r}: {', '.join(unknown)}; "
            f"allowed: {', '.join(sorted(scenario.defaults))}"
        )
    return cfg


def _write_report(
    out_dir: Path, scenario: Scenario, rows: list, artifacts: dict, notes: list
) -> None:
    lines = [f"scenario: {scenario.name}", scenario.description, ""]
    header = f"{'quantity':<34} {'simulated':>14} {'reference':>12} {'tolerance':>10}  pass"
    lines += [header, "-" * len(header)]
    for row in rows:
        ref = "-" if row["paper_value"] is None else f"{row['paper_value']:.6g}"
        tol = "-" if row["tolerance"] is None else f"{row['tolerance']:.3g}"
        lines.append(
            f"{row['quantity']:<34} {row['simulated']:>14.6g} {ref:>12} {tol:>10}  "
            + ("yes" if row["pass"] else "NO")
        )
    if notes:
        lines += ["", "notes:"]
        lines += [f"  - {note}" for note in notes]
    if artifacts:
        lines += ["", "artifacts:"]
        lines += [f"  - {key}: {value}" for key, value in artifacts.items()]
    (out_dir / "report.txt").write_text("\n".join(lines) + "\n")


def run_scenario(target: str, overrides: dict | None = None, output_root=None) -> ScenarioResult:
    """Run one scenario by name or config-file path and write its artifacts.

    ``overrides`` are already-parsed config values (the CLI passes its
    ``key=value`` pairs through :func:`snvsim.config.parse_overrides`).
    """
    scenario, file_cfg = _resolve(target)
    cfg = _validated_config(scenario, file_cfg, dict(overrides or {}))
    root = Path(output_root or os.environ.get(OUTPUT_DIR_ENV, _DEFAULT_OUTPUT_ROOT))
    out_dir = root / scenario.name
    out_dir.mkdir(parents=True, exist_ok=True)

    rows, artifacts, notes = scenario.runner(cfg, out_dir)
    summary = {
        "scenario": scenario.name,
        "description": scenario.description,
        "config": cfg,
        "entries": rows,
        "artifacts": artifacts,
        "notes": notes,
        "all_pass": all(row["pass"] for row in rows),
    }
    _write_json(out_dir / "summary.json", summary)
    _write_report(out_dir, scenario, rows, artifacts, notes)
    return ScenarioResult(
        name=scenario.name, out_dir=out_dir, rows=rows, artifacts=artifacts, notes=notes
    )
