"""Detection-efficiency accounting and photon-counting readout statistics.

Four related pieces of bookkeeping around detected photons:

* multiplicative efficiency budgets (ordered named stages whose product is
  the end-to-end detection efficiency),
* loss-chain extraction of a single coupling efficiency from a measured
  roundtrip transmission with documented corrections,
* Monte-Carlo single-shot spin readout with threshold discrimination, and
* expected N-photon coincidence counts.

All efficiencies are linear power fractions in (0, 1]; dB values convert
via 10^(-dB/10).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.stats import poisson

from .units import db_to_fraction, fraction_to_db


@dataclass(frozen=True)
class EfficiencyBudget:
    """Ordered multiplicative budget of named efficiency stages."""

    stages: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        if not self.stages:
            raise ValueError("budget must contain at least one stage")
        for name, value in self.stages:
            if not 0.0 < value <= 1.0:
                raise ValueError(f"stage {name!r} must be in (0, 1], got {value}")

    @classmethod
    def from_pairs(cls, pairs) -> "EfficiencyBudget":
        return cls(stages=tuple((str(name), float(value)) for name, value in pairs))


def total_detection_efficiency(budget: EfficiencyBudget) -> float:
    """Product of all budget stages: the end-to-end detection efficiency."""
    product = 1.0
    for _, value in budget.stages:
        product *= value
    return product


def budget_report(budget: EfficiencyBudget) -> dict:
    """Per-stage and cumulative budget values in fraction and dB."""
    rows = []
    cumulative = 1.0
    for name, value in budget.stages:
        cumulative *= value
        rows.append(
            {
                "stage": name,
                "fraction": value,
                "loss_db": fraction_to_db(value),
                "cumulative_fraction": cumulative,
                "cumulative_loss_db": fraction_to_db(cumulative),
            }
        )
    return {"stages": rows, "total_fraction": cumulative, "total_loss_db": fraction_to_db(cumulative)}


@dataclass(frozen=True)
class LossCorrection:
    """One documented correction applied to a measured transmission.

    ``kind`` selects the interpretation of ``value``:
      * ``"fraction"``  — multiplicative transmission in (0, 1]
      * ``"db"``        — attenuation in dB (>= 0)
      * ``"db_per_km"`` — distributed attenuation; requires ``length_m``
    """

    name: str
    kind: str
    value: float
    length_m: float = 0.0

    def transmission(self) -> float:
        """Transmitted fraction this correction accounts for."""
        if self.kind == "fraction":
            if not 0.0 < self.value <= 1.0:
                raise ValueError(f"correction {self.name!r}: fraction must be in (0, 1]")
            return self.value
        if self.kind == "db":
            if self.value < 0.0:
                raise ValueError(f"correction {self.name!r}: dB loss must be >= 0")
            return db_to_fraction(self.value)
        if self.kind == "db_per_km":
            if self.value < 0.0 or self.length_m < 0.0:
                raise ValueError(f"correction {self.name!r}: dB/km and length must be >= 0")
            return db_to_fraction(self.value * self.length_m / 1000.0)
        raise ValueError(f"correction {self.name!r}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class LossChain:
    """A measured roundtrip transmission plus per-pass corrections."""

    measured_roundtrip: float
    corrections: tuple[LossCorrection, ...] = ()

    def __post_init__(self) -> None:
        if not 0.0 < self.measured_roundtrip <= 1.0:
            raise ValueError(
                f"measured roundtrip must be in (0, 1], got {self.measured_roundtrip}"
            )


def single_pass_from_roundtrip(roundtrip: float) -> float:
    """Single forward-pass transmission sqrt(roundtrip)."""
    if not 0.0 < roundtrip <= 1.0:
        raise ValueError(f"roundtrip must be in (0, 1], got {roundtrip}")
    return math.sqrt(roundtrip)


def apply_loss_chain(chain: LossChain) -> float:
    """Extract the single-pass coupling efficiency from a roundtrip measurement.

    The measured single pass sqrt(roundtrip) bundles the coupling of
    interest with every other per-pass loss; dividing the documented
    corrections back out isolates the coupling.  A result above 1 means the
    corrections overexplain the measurement and raises an error.
    """
    efficiency = single_pass_from_roundtrip(chain.measured_roundtrip)
    for correction in chain.corrections:
        efficiency /= correction.transmission()
    if efficiency > 1.0:
        raise ValueError(
            f"loss chain inconsistent: corrections imply coupling efficiency {efficiency:.4g} > 1"
        )
    return efficiency


def taper_half_angle_deg(etch_rate_um_min: float, pull_rate_um_min: float) -> float:
    """Half-angle (degrees) of a fibre taper from its etch and pull rates.

    While pulled at ``pull_rate`` during etching at ``etch_rate``, the
    radius shrinks by etch_rate over an axial length pull_rate, giving a
    cone of half-angle arctan(etch/pull).
    """
    if pull_rate_um_min <= 0.0:
        raise ValueError(f"pull rate must be positive, got {pull_rate_um_min}")
    if etch_rate_um_min < 0.0:
        raise ValueError(f"etch rate must be >= 0, got {etch_rate_um_min}")
    return math.degrees(math.atan(etch_rate_um_min / pull_rate_um_min))


@dataclass(frozen=True)
class ReadoutModel:
    """Generative model of pulsed single-shot spin readout.

    Per readout window, ``n_pulses`` excitation pulses are applied.  On
    each pulse a bright spin yields a detected photon with probability
    ``p_detect`` and afterwards flips to dark with probability
    ``p_flip_bright``; a dark spin yields no signal and flips to bright
    with probability ``p_flip_dark`` (zero by default, so a dark spin
    yields background only).  An independent Poisson background with mean
    ``dark_rate`` counts per window adds to both cases.
    """

    p_detect: float
    p_flip_bright: float = 0.0
    p_flip_dark: float = 0.0
    n_pulses: int = 150
    dark_rate: float = 0.0

    def __post_init__(self) -> None:
        for name in ("p_detect", "p_flip_bright", "p_flip_dark"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")
        if self.n_pulses < 1:
            raise ValueError(f"n_pulses must be >= 1, got {self.n_pulses}")
        if self.dark_rate < 0.0:
            raise ValueError(f"dark_rate must be >= 0, got {self.dark_rate}")


@dataclass(frozen=True)
class PhotonHistogram:
    """Counts of readout windows by detected photon number 0, 1, 2, ...

    ``counts`` may be fractional so exact reference distributions (e.g.
    Poisson probabilities times trials) fit the same container.
    """

    counts: tuple[float, ...]
    total_trials: float

    def __post_init__(self) -> None:
        if not self.counts:
            raise ValueError("histogram must have at least one bin")
        if any(c < 0.0 for c in self.counts):
            raise ValueError("histogram counts must be >= 0")
        total = math.fsum(self.counts)
        if not math.isclose(total, self.total_trials, rel_tol=1e-9, abs_tol=1e-9):
            raise ValueError(
                f"histogram counts sum to {total}, expected total_trials = {self.total_trials}"
            )

    @classmethod
    def from_samples(cls, photon_numbers: np.ndarray) -> "PhotonHistogram":
        samples = np.asarray(photon_numbers, dtype=int)
        counts = np.bincount(samples)
        return cls(counts=tuple(float(c) for c in counts), total_trials=float(samples.size))

    def probabilities(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.total_trials

    def mean(self) -> float:
        p = self.probabilities()
        return float(np.dot(np.arange(p.size), p))

    def variance(self) -> float:
        p = self.probabilities()
        n = np.arange(p.size)
        mean = float(np.dot(n, p))
        return float(np.dot((n - mean) ** 2, p))

    def tail_probability(self, k: int) -> float:
        """P(n >= k) under this histogram."""
        if k <= 0:
            return 1.0
        p = self.probabilities()
        if k >= p.size:
            return 0.0
        return float(np.sum(p[k:]))


def poisson_reference_histogram(mu: float, n_max: int | None = None, total_trials: float = 1.0) -> PhotonHistogram:
    """Poisson(mu) photon-number distribution in histogram form.

    Bins run to ``n_max`` with all residual tail mass folded into the last
    bin so the counts still sum to ``total_trials`` exactly.
    """
    if mu < 0.0:
        raise ValueError(f"mu must be >= 0, got {mu}")
    if n_max is None:
        n_max = max(20, int(mu + 10.0 * math.sqrt(mu + 1.0)))
    pmf = poisson.pmf(np.arange(n_max + 1), mu)
    pmf[-1] += poisson.sf(n_max, mu)
    counts = pmf * total_trials
    return PhotonHistogram(counts=tuple(float(c) for c in counts), total_trials=float(total_trials))


def readout_partition_seed(seed: int, partition_index: int) -> np.random.SeedSequence:
    """Deterministic sub-seed for partition ``partition_index`` of a readout run."""
    return np.random.SeedSequence(entropy=seed, spawn_key=(partition_index,))


def _simulate_photon_counts(
    model: ReadoutModel,
    trials: int,
    start_bright: bool,
    rng: np.random.Generator,
) -> np.ndarray:
    bright = np.full(trials, start_bright)
    signal = np.zeros(trials, dtype=np.int64)
    for _ in range(model.n_pulses):
        detected = bright & (rng.random(trials) < model.p_detect)
        signal += detected
        flips_down = bright & (rng.random(trials) < model.p_flip_bright)
        flips_up = ~bright & (rng.random(trials) < model.p_flip_dark)
        bright = (bright & ~flips_down) | flips_up
    background = rng.poisson(model.dark_rate, size=trials)
    return signal + background


def simulate_readout(model: ReadoutModel, trials: int, seed: int) -> dict[str, PhotonHistogram]:
    """Monte-Carlo photon-count histograms for bright- and dark-prepared spins.

    Deterministic for a fixed ``seed``; the bright and dark ensembles use
    independent child streams of the same seed.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    bright_seq, dark_seq = np.random.SeedSequence(seed).spawn(2)
    bright_counts = _simulate_photon_counts(model, trials, True, np.random.default_rng(bright_seq))
    dark_counts = _simulate_photon_counts(model, trials, False, np.random.default_rng(dark_seq))
    return {
        "bright": PhotonHistogram.from_samples(bright_counts),
        "dark": PhotonHistogram.from_samples(dark_counts),
    }


def merge_histograms(parts: list[PhotonHistogram]) -> PhotonHistogram:
    """Combine per-partition histograms by bin-wise addition."""
    if not parts:
        raise ValueError("nothing to merge")
    width = max(len(p.counts) for p in parts)
    counts = np.zeros(width)
    total = 0.0
    for p in parts:
        counts[: len(p.counts)] += p.counts
        total += p.total_trials
    return PhotonHistogram(counts=tuple(float(c) for c in counts), total_trials=total)


def threshold_fidelity(bright: PhotonHistogram, dark: PhotonHistogram, k: int) -> float:
    """Average discrimination fidelity at photon threshold ``k``.

        F(k) = 1/2 [ P(n >= k | bright) + P(n < k | dark) ]

    At k = 0 every window classifies as bright and F = 1/2 exactly.
    """
    return 0.5 * (bright.tail_probability(k) + (1.0 - dark.tail_probability(k)))


def optimal_threshold(bright: PhotonHistogram, dark: PhotonHistogram) -> dict[str, float]:
    """Exhaustive scan for the fidelity-maximizing threshold, ties to smallest k.

    Returns ``{"k": threshold, "fidelity": value}``.  A best fidelity at or
    below 1/2 signals inverted (or indistinguishable) state labels.
    """
    k_max = max(len(bright.counts), len(dark.counts))
    best_k, best_f = 0, threshold_fidelity(bright, dark, 0)
    for k in range(1, k_max + 1):
        f = threshold_fidelity(bright, dark, k)
        if f > best_f + 1e-15:
            best_k, best_f = k, f
    return {"k": best_k, "fidelity": best_f}


def mean_signal_counts(p_detect: float, p_flip_bright: float, n_pulses: int) -> float:
    """Expected signal photons from a bright spin, excluding background.

    The spin survives pulse i bright with probability (1-q)^(i-1), so the
    mean is p * (1 - (1-q)^n) / q, continuously extended at q = 0.  The
    expm1/log1p form keeps the ratio accurate when q is tiny, where the
    direct power would round to 1 and cancel to zero.
    """
    if p_flip_bright == 0.0:
        return p_detect * n_pulses
    if p_flip_bright == 1.0:
        return p_detect  # detection precedes the flip, so pulse 1 still counts
    survival_log = n_pulses * math.log1p(-p_flip_bright)
    return p_detect * (-math.expm1(survival_log)) / p_flip_bright


def zero_signal_probability(p_detect: float, p_flip_bright: float, n_pulses: int) -> float:
    """Probability a bright spin yields no signal photon in the whole window.

    Conditioning on the pulse after which the spin flips (detection happens
    before the flip channel on each pulse):

        P(0) = sum_{m=1}^{n-1} q (1-q)^(m-1) (1-p)^m  +  (1-q)^(n-1) (1-p)^n
    """
    p, q, n = p_detect, p_flip_bright, n_pulses
    if q == 0.0:
        return (1.0 - p) ** n
    if p == 0.0:
        return 1.0
    r = (1.0 - q) * (1.0 - p)
    head = q * (1.0 - p) * (1.0 - r ** (n - 1)) / (1.0 - r)
    return head + r ** (n - 1) * (1.0 - p)


def analytic_threshold_fidelity_k1(model: ReadoutModel) -> float:
    """Closed-form F(k=1) for the readout model with p_flip_dark = 0.

    P(0 | bright) = P(no signal) * P(no background); P(0 | dark) is the
    Poisson zero of the background alone.
    """
    if model.p_flip_dark != 0.0:
        raise ValueError("closed form only valid for one-way (bright->dark) flips")
    p_zero_background = math.exp(-model.dark_rate)
    p_zero_bright = (
        zero_signal_probability(model.p_detect, model.p_flip_bright, model.n_pulses)
        * p_zero_background
    )
    return 0.5 * ((1.0 - p_zero_bright) + p_zero_background)


def calibrate_readout_model(
    mean_bright: float,
    mean_dark: float,
    fidelity_target: float,
    n_pulses: int = 150,
) -> ReadoutModel:
    """Find (p_detect, p_flip_bright) reproducing measured readout statistics.

    The background rate equals the dark-state mean; for each candidate flip
    probability the detection probability is fixed by the bright-state mean
    and the flip probability is then solved so the closed-form one-photon
    threshold fidelity matches ``fidelity_target``.  Requires the target to
    lie below the flip-free fidelity (flips only ever hurt).
    """
    if mean_dark < 0.0 or mean_bright <= mean_dark:
        raise ValueError("need mean_bright > mean_dark >= 0")
    signal_mean = mean_bright - mean_dark

    def p_detect_for(q: float) -> float:
        if q == 0.0:
            return signal_mean / n_pulses
        return signal_mean * q / (1.0 - (1.0 - q) ** n_pulses)

    def fidelity_error(q: float) -> float:
        model = ReadoutModel(
            p_detect=p_detect_for(q),
            p_flip_bright=q,
            n_pulses=n_pulses,
            dark_rate=mean_dark,
        )
        return analytic_threshold_fidelity_k1(model) - fidelity_target

    no_flip_error = fidelity_error(0.0)
    if no_flip_error < 0.0:
        raise ValueError(
            f"target fidelity {fidelity_target} exceeds the flip-free maximum "
            f"{fidelity_target + no_flip_error:.4f}"
        )
    # The fidelity decreases from the flip-free value as q grows; bracket
    # the root while p_detect_for(q) is still a valid probability.
    q_hi = 0.1
    while fidelity_error(q_hi) > 0.0:
        q_next = q_hi + 0.1
        if q_next >= 1.0 or p_detect_for(q_next) > 1.0:
            raise ValueError(
                f"target fidelity {fidelity_target} is not reachable by any flip probability"
            )
        q_hi = q_next
    q_star = brentq(fidelity_error, 1e-12, q_hi, xtol=1e-14)
    return ReadoutModel(
        p_detect=p_detect_for(q_star),
        p_flip_bright=q_star,
        n_pulses=n_pulses,
        dark_rate=mean_dark,
    )


def nfold_coincidence_expectation(
    pulse_rate_hz: float,
    eta: float,
    duty: float,
    duration_s: float,
    n: int,
) -> float:
    """Expected N-fold coincidence events in ``duration_s`` of acquisition.

    Attempt-wise independent detection: duty * rate * duration attempts,
    each yielding N consecutive detections with probability eta^N, so the
    expectation is log-linear in N with slope ln(eta).
    """
    if pulse_rate_hz <= 0.0 or duration_s <= 0.0:
        raise ValueError("rate and duration must be positive")
    if not 0.0 < eta <= 1.0 or not 0.0 < duty <= 1.0:
        raise ValueError("eta and duty must be in (0, 1]")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return duty * pulse_rate_hz * duration_s * eta**n
