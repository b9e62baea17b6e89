"""Reflection of a waveguide-coupled emitter behind a broadband mirror.

The emitter acts as a weakly coupled scatterer inside a single-sided,
broadband cavity formed by the waveguide and its Bragg reflector.  Near
resonance the reflected amplitude is

    r(delta) = 1 - (2 f_in) / (1 + C / (1 + 2 i delta / gamma_h))

with cooperativity C, input-coupling ratio f_in = kappa_in/kappa_tot, and
homogeneous linewidth gamma_h.  Measured spectra are normalized to the
far-detuned intensity |r(inf)|^2 = (1 - 2 f_in)^2.

The zero-detuning contrast is quadratic in C, so inverting it has two
branches; the default (small-C) branch keeps the sign of the on-resonance
amplitude equal to the far-detuned one and is valid up to the branch
boundary C* = 2 f_in - 1 where the reflection dips to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ReflectionModel:
    """Parameters of the emitter-waveguide reflection line shape.

    Attributes
    ----------
    cooperativity:
        Emitter-mode cooperativity C (dimensionless, >= 0).
    f_in:
        Input coupling ratio kappa_in/kappa_tot in (0, 1].
    gamma_h_hz:
        Homogeneous linewidth (cyclic Hz) of the optical transition.
    """

    cooperativity: float = 0.027
    f_in: float = 0.95
    gamma_h_hz: float = 70.0e6

    def __post_init__(self) -> None:
        if self.cooperativity < 0.0:
            raise ValueError(f"cooperativity must be >= 0, got {self.cooperativity}")
        if not 0.0 < self.f_in <= 1.0:
            raise ValueError(f"f_in must be in (0, 1], got {self.f_in}")
        if self.gamma_h_hz <= 0.0:
            raise ValueError(f"gamma_h_hz must be positive, got {self.gamma_h_hz}")


@dataclass(frozen=True)
class BetaDecomposition:
    """Factorization of the total guided-mode coupling efficiency.

    beta_tot = beta_cav * eta_dw * eta_qe * eta_orb, where beta_cav is the
    guided-mode fraction of emitted photons, eta_dw the fraction emitted
    into the zero-phonon line, eta_qe the radiative quantum efficiency and
    eta_orb the branching ratio into the addressed orbital transition.
    """

    beta_cav: float = 0.32
    eta_dw: float = 0.57
    eta_qe: float = 1.0
    eta_orb: float = 0.65
    gamma0_hz: float = 28.6e6

    def __post_init__(self) -> None:
        for name in ("beta_cav", "eta_dw", "eta_qe", "eta_orb"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")
        if self.gamma0_hz <= 0.0:
            raise ValueError(f"gamma0_hz must be positive, got {self.gamma0_hz}")

    @property
    def beta_tot(self) -> float:
        return self.beta_cav * self.eta_dw * self.eta_qe * self.eta_orb


def reflection_amplitude(delta_hz, model: ReflectionModel):
    """Complex reflected amplitude r(delta) at detuning ``delta_hz`` (cyclic Hz)."""
    delta = np.asarray(delta_hz, dtype=float)
    emitter = 1.0 + model.cooperativity / (1.0 + 2.0j * delta / model.gamma_h_hz)
    out = 1.0 - 2.0 * model.f_in / emitter
    return complex(out) if np.isscalar(delta_hz) else out


def normalized_reflection_params(delta_hz, cooperativity: float, f_in: float, gamma_h_hz: float):
    """Normalized reflected intensity from bare parameters (no container).

    Formula core shared by :func:`normalized_reflection` and the fit-model
    registry; performs no validation so optimizers may probe freely.
    """
    reference = 1.0 - 2.0 * f_in
    if reference == 0.0:
        raise ValueError("f_in = 0.5 makes the far-detuned reference intensity zero")
    delta = np.asarray(delta_hz, dtype=float)
    r = 1.0 - 2.0 * f_in / (1.0 + cooperativity / (1.0 + 2.0j * delta / gamma_h_hz))
    out = np.abs(r) ** 2 / reference**2
    return float(out) if np.isscalar(delta_hz) else out


def normalized_reflection(delta_hz, model: ReflectionModel):
    """Reflected intensity normalized to its far-detuned value.

    |r(delta)|^2 / |r(inf)|^2 with r(inf) = 1 - 2 f_in; tends to 1 at large
    detuning.  Undefined at f_in = 1/2 where the reference vanishes.
    """
    return normalized_reflection_params(
        delta_hz, model.cooperativity, model.f_in, model.gamma_h_hz
    )


def on_resonance_reflection(cooperativity: float, f_in: float) -> float:
    """Normalized reflected intensity at zero detuning.

        R(0) = ((1 - 2 f_in/(1+C)) / (1 - 2 f_in))^2
    """
    if f_in == 0.5:
        raise ValueError("f_in = 0.5 makes the far-detuned reference intensity zero")
    return ((1.0 - 2.0 * f_in / (1.0 + cooperativity)) / (1.0 - 2.0 * f_in)) ** 2


def dip_contrast(model: ReflectionModel) -> float:
    """Depth 1 - R(0) of the normalized on-resonance reflection dip."""
    return 1.0 - on_resonance_reflection(model.cooperativity, model.f_in)


def dip_fwhm_hz(model: ReflectionModel) -> float:
    """Full width at half depth of the normalized reflection dip.

    The contrast 1 - R(delta) is an exact Lorentzian in detuning for this
    model, of width gamma_h * (1 + C).
    """
    return model.gamma_h_hz * (1.0 + model.cooperativity)


def branch_boundary_cooperativity(f_in: float) -> float:
    """Cooperativity C* = 2 f_in - 1 at which the on-resonance reflection vanishes.

    Below C* the on-resonance amplitude keeps the sign of the far-detuned
    amplitude (small-C branch) and the dip deepens with C; beyond it the
    amplitude changes sign and the dip fills back in.
    """
    return 2.0 * f_in - 1.0


def cooperativity_from_contrast(
    r_norm0: float,
    f_in: float,
    small_c_branch: bool = True,
) -> float:
    """Invert the on-resonance normalized reflection for the cooperativity.

    The zero-detuning intensity determines |1 - 2 f_in/(1+C)| only up to
    sign, giving two roots:

        C = 2 f_in / (1 -+ (1 - 2 f_in) sqrt(r_norm0)) - 1

    The default small-C branch (minus sign variant, on-resonance amplitude
    same sign as far-detuned) round-trips with ``on_resonance_reflection``
    for C <= 2 f_in - 1; set ``small_c_branch=False`` for the other root.
    """
    if not 0.0 < r_norm0 <= 1.0:
        raise ValueError(f"r_norm0 must be in (0, 1], got {r_norm0}")
    if f_in == 0.5:
        raise ValueError("f_in = 0.5 makes the far-detuned reference intensity zero")
    sign = 1.0 if small_c_branch else -1.0
    denominator = 1.0 - sign * (1.0 - 2.0 * f_in) * math.sqrt(r_norm0)
    if denominator <= 0.0:
        raise ValueError(
            f"contrast {r_norm0} is not attainable on this branch for f_in = {f_in}"
        )
    c = 2.0 * f_in / denominator - 1.0
    if c < 0.0:
        raise ValueError(
            f"contrast {r_norm0} with f_in = {f_in} implies negative cooperativity {c:.3g} "
            "on this branch"
        )
    return c


def beta_total(cooperativity: float, gamma_h_hz: float, gamma0_hz: float) -> float:
    """Total guided-mode coupling beta_tot = C * gamma_h / gamma0.

    The emitter-mode interaction rate is C * gamma_h; dividing by the total
    decay rate gives the fraction of decays into the guided mode.
    """
    if gamma_h_hz <= 0.0 or gamma0_hz <= 0.0:
        raise ValueError("linewidths must be positive")
    if cooperativity < 0.0:
        raise ValueError(f"cooperativity must be >= 0, got {cooperativity}")
    beta = cooperativity * gamma_h_hz / gamma0_hz
    if beta > 1.0:
        raise ValueError(f"parameters imply unphysical beta_tot = {beta:.3g} > 1")
    return beta


def quantum_efficiency_bound(decomposition: BetaDecomposition, beta_tot: float) -> float:
    """Radiative quantum efficiency implied by a measured beta_tot.

        eta_qe = beta_tot / (beta_cav * eta_dw * eta_orb)

    A lower bound: any unmodeled interference or loss only raises the true
    value.
    """
    denominator = decomposition.beta_cav * decomposition.eta_dw * decomposition.eta_orb
    if denominator <= 0.0:
        raise ValueError("beta_cav, eta_dw and eta_orb must all be positive")
    if beta_tot < 0.0:
        raise ValueError(f"beta_tot must be >= 0, got {beta_tot}")
    return beta_tot / denominator


def contrast_vs_saturation(saturation, r0_contrast: float):
    """Reflection contrast R(0)/(1+s) at saturation parameter ``saturation``."""
    s = np.asarray(saturation, dtype=float)
    if np.any(s < 0.0):
        raise ValueError("saturation parameter must be >= 0")
    out = r0_contrast / (1.0 + s)
    return float(out) if np.isscalar(saturation) else out
