"""Closed-form optical dynamics of the driven two-level transition.

Spontaneous decay, damped Rabi oscillations with pi-pulse calibration,
intensity autocorrelation, fluorescence saturation, optical-pumping
initialization, and nuclear polarization decay.

The damped Rabi model used throughout is

    rho_ee(t) = 1/2 * [1 - (cos(Omega t) + sin(Omega t)/(Omega T1)) * exp(-t/T1)]

which starts from the ground state, saturates to 1/2, and has its extrema
exactly at Omega t = k pi; the population transferred by a resonant pi
pulse is therefore (1 + exp(-pi/(Omega T1))) / 2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .units import TWO_PI, fourier_limited_fwhm_hz


@dataclass(frozen=True)
class EmitterOpticalParams:
    """Optical parameters of the emitter.

    Attributes
    ----------
    tau_sp:
        Spontaneous (radiative) lifetime in seconds.
    gamma0_hz:
        Fourier-limited linewidth in cyclic Hz; should equal
        1/(2 pi tau_sp) — a >10% violation triggers a warning.
    gamma_h_hz:
        Homogeneous linewidth in cyclic Hz; cannot beat the Fourier limit.
    rabi_omega:
        Resonant Rabi frequency in rad/s.
    t1_optical:
        Optical relaxation time entering the damped Rabi model, seconds.
    """

    tau_sp: float = 5.56e-9
    gamma0_hz: float = 28.6e6
    gamma_h_hz: float = 70.0e6
    rabi_omega: float = TWO_PI * 230.0e6
    t1_optical: float = 4.7e-9

    def __post_init__(self) -> None:
        if self.tau_sp <= 0.0 or self.t1_optical <= 0.0:
            raise ValueError("lifetimes must be positive")
        if self.gamma_h_hz < self.gamma0_hz:
            raise ValueError(
                f"homogeneous linewidth {self.gamma_h_hz} Hz cannot be below the "
                f"Fourier limit {self.gamma0_hz} Hz"
            )
        limit = fourier_limit(self.tau_sp)
        if abs(self.gamma0_hz - limit) > 0.10 * limit:
            warnings.warn(
                f"gamma0_hz = {self.gamma0_hz:.4g} deviates more than 10% from the "
                f"Fourier limit 1/(2 pi tau_sp) = {limit:.4g} Hz",
                stacklevel=2,
            )


@dataclass(frozen=True)
class PumpingModel:
    """Exponential optical-pumping approach to a steady-state fidelity."""

    f_infinity: float
    tau_pump: float
    f0: float = 0.5

    def __post_init__(self) -> None:
        if not 0.5 <= self.f_infinity <= 1.0:
            raise ValueError(f"f_infinity must be in [0.5, 1], got {self.f_infinity}")
        if self.tau_pump <= 0.0:
            raise ValueError(f"tau_pump must be positive, got {self.tau_pump}")


@dataclass(frozen=True)
class SaturationParams:
    """Fluorescence saturation curve parameters."""

    p_sat: float = 120.0e-12
    i_infinity: float = 1.34e6

    def __post_init__(self) -> None:
        if self.p_sat <= 0.0 or self.i_infinity <= 0.0:
            raise ValueError("saturation power and limiting intensity must be positive")


def spontaneous_decay(t_s, tau_s: float):
    """Excited-state population exp(-t/tau) after pulsed excitation."""
    if tau_s <= 0.0:
        raise ValueError(f"lifetime must be positive, got {tau_s}")
    t = np.asarray(t_s, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("time must be non-negative")
    out = np.exp(-t / tau_s)
    return float(out) if np.isscalar(t_s) else out


def fourier_limit(tau_sp: float) -> float:
    """Fourier-limited linewidth 1/(2 pi tau) in cyclic Hz."""
    return fourier_limited_fwhm_hz(tau_sp)


def rabi_population(t_s, omega: float, t1: float):
    """Damped-Rabi excited population starting from the ground state.

    ``omega`` is the angular Rabi frequency (rad/s), ``t1`` the optical
    relaxation time (s).  Evaluated through sin(x)/x so small Omega*t is
    exact; the steady state is 1/2.
    """
    if omega <= 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    if t1 <= 0.0:
        raise ValueError(f"t1 must be positive, got {t1}")
    t = np.asarray(t_s, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("time must be non-negative")
    phase = omega * t
    # sin(omega t) / (omega t1) == (t / t1) * sinc(omega t / pi)
    ringdown = np.cos(phase) + (t / t1) * np.sinc(phase / np.pi)
    out = 0.5 * (1.0 - ringdown * np.exp(-t / t1))
    return float(out) if np.isscalar(t_s) else out


def pi_pulse_calibration(omega: float, t1: float) -> dict[str, float]:
    """Duration and fidelity of the population-maximizing resonant pulse.

    Located by bounded numeric maximization of ``rabi_population`` over one
    full Rabi period (0, 2 pi / omega], which keeps the operation correct if
    the model ever grows terms that move the extremum off omega*t = pi.
    Returns ``{"t_pi": seconds, "fidelity": population}``.
    """
    period = TWO_PI / omega
    result = minimize_scalar(
        lambda t: -rabi_population(t, omega, t1),
        bounds=(1e-6 * period, period),
        method="bounded",
        options={"xatol": 1e-9 * period, "maxiter": 500},
    )
    t_pi = float(result.x)
    return {"t_pi": t_pi, "fidelity": float(rabi_population(t_pi, omega, t1))}


def g2_autocorrelation(tau_s, omega: float, t1: float, background: float = 0.0):
    """Second-order intensity autocorrelation of the driven transition.

    The ideal antibunched correlation is the normalized re-excitation
    transient 2*rho_ee(tau); uncorrelated background counts fold in as one
    affine parameter:

        g2(tau) = (1 - background) * 2 rho_ee(tau) + background

    so g2(0) = background exactly and g2 -> 1 at long delay.
    """
    if not 0.0 <= background < 1.0:
        raise ValueError(f"background must be in [0, 1), got {background}")
    ideal = 2.0 * rabi_population(np.abs(np.asarray(tau_s, dtype=float)), omega, t1)
    out = (1.0 - background) * ideal + background
    return float(out) if np.isscalar(tau_s) else out


def saturation_intensity(p_w, sp: SaturationParams):
    """Detected fluorescence rate i_infinity / (1 + p_sat/p) at drive power ``p_w``."""
    p = np.asarray(p_w, dtype=float)
    if np.any(p <= 0.0):
        raise ValueError("power must be positive")
    out = sp.i_infinity / (1.0 + sp.p_sat / p)
    return float(out) if np.isscalar(p_w) else out


def pumping_fidelity(t_s, pm: PumpingModel):
    """Initialization fidelity after pumping for ``t_s`` seconds.

    Single-exponential approach from the unpolarized start ``pm.f0`` to the
    steady state ``pm.f_infinity``.
    """
    t = np.asarray(t_s, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("time must be non-negative")
    out = pm.f_infinity - (pm.f_infinity - pm.f0) * np.exp(-t / pm.tau_pump)
    return float(out) if np.isscalar(t_s) else out


def pumping_time_constant(t_s: float, fidelity: float, f_infinity: float, f0: float = 0.5) -> float:
    """Calibrate the pumping time constant from one (duration, fidelity) point."""
    if not f0 <= fidelity < f_infinity:
        raise ValueError(
            f"fidelity {fidelity} must lie in [{f0}, {f_infinity}) to be reachable"
        )
    return t_s / math.log((f_infinity - f0) / (f_infinity - fidelity))


def nuclear_polarization_decay(t_s, t1n: float, f_init: float):
    """Nuclear initialization fidelity relaxing to the unpolarized value 1/2.

        f(t) = 1/2 + (f_init - 1/2) * exp(-t / t1n)
    """
    if t1n <= 0.0:
        raise ValueError(f"t1n must be positive, got {t1n}")
    t = np.asarray(t_s, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("time must be non-negative")
    out = 0.5 + (f_init - 0.5) * np.exp(-t / t1n)
    return float(out) if np.isscalar(t_s) else out
