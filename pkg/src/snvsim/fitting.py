"""Damped nonlinear least-squares fitting over a registry of named models.

The engine minimizes the weighted sum of squares

    cost(p) = sum_i ((y_i - model(p, x_i)) / y_err_i)^2

by iterating damped normal equations (J'J + lam * diag(J'J)) step = J'r with
a multiplicative damping schedule (x10 on a rejected step, /10 on an
accepted one).  Using diag(J'J) rather than the identity for the damping
makes every step equivariant under per-parameter rescaling, so fits behave
identically when data and model are expressed in rescaled units.

Convergence is declared when an accepted step reduces the cost by less than
``tol`` relatively, or when the scale-invariant gradient
max_i |g_i|/sqrt((J'J)_ii) falls below ``tol``.  Everything is pure and
deterministic: identical inputs produce bit-identical results.

The registry provides the eight named model functions used across the
toolkit; shapes owned by the physics modules delegate to them so a fitted
curve and the forward model can never drift apart.  Registry conventions:
``damped_rabi`` works in nanoseconds and ``saturation`` in picowatts so
that default finite-difference steps (1e-6 * max(|p|, 1)) stay well inside
parameter scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from . import optical_dynamics, spin_hamiltonian, waveguide_qed
from .units import TWO_PI

_UNBOUNDED = (-math.inf, math.inf)


@dataclass(frozen=True)
class ModelSpec:
    """A named model function with parameter metadata.

    ``evaluator(params, x) -> y`` must be finite on the data domain for any
    in-bounds parameter vector.  ``bounds`` are inclusive per-parameter
    (lo, hi) boxes; a degenerate box (lo == hi) freezes a parameter.
    """

    name: str
    param_names: tuple[str, ...]
    init: tuple[float, ...]
    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    bounds: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self) -> None:
        if len(self.init) != len(self.param_names):
            raise ValueError(
                f"model {self.name!r}: {len(self.param_names)} parameters but "
                f"{len(self.init)} initial values"
            )
        if self.bounds is not None:
            if len(self.bounds) != len(self.param_names):
                raise ValueError(f"model {self.name!r}: bounds/parameter count mismatch")
            for (lo, hi), p0, pname in zip(self.bounds, self.init, self.param_names):
                if lo > hi:
                    raise ValueError(f"model {self.name!r}: empty bounds for {pname}")
                if not lo <= p0 <= hi:
                    raise ValueError(
                        f"model {self.name!r}: initial {pname} = {p0} outside bounds [{lo}, {hi}]"
                    )

    def with_init(self, init: Sequence[float]) -> "ModelSpec":
        """Copy of this model with a different initial guess."""
        return replace(self, init=tuple(float(v) for v in init))

    def bounds_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        bounds = self.bounds or tuple(_UNBOUNDED for _ in self.param_names)
        lo = np.array([b[0] for b in bounds], dtype=float)
        hi = np.array([b[1] for b in bounds], dtype=float)
        return lo, hi


@dataclass(frozen=True)
class FitOptions:
    """Iteration controls for :func:`fit`."""

    max_iter: int = 200
    tol: float = 1e-10
    damping_init: float = 1e-3

    def __post_init__(self) -> None:
        if self.max_iter < 1 or self.tol <= 0.0 or self.damping_init <= 0.0:
            raise ValueError("max_iter >= 1, tol > 0 and damping_init > 0 required")


@dataclass(frozen=True)
class FitResult:
    """Outcome of a damped least-squares fit.

    ``cost_trace`` lists the cost after the initial evaluation and after
    every accepted step (rejected proposals do not appear), so it is
    non-increasing by construction.  ``residual_norm`` is sqrt(cost).
    ``status`` is one of converged / max-iterations / singular.
    """

    params: tuple[float, ...]
    uncertainties: tuple[float, ...]
    covariance: np.ndarray
    cost: float
    residual_norm: float
    status: str
    iterations: int
    cost_trace: tuple[float, ...]
    message: str = ""

    def as_dict(self) -> dict:
        """JSON-ready summary of the fit."""
        return {
            "params": list(self.params),
            "uncertainties": list(self.uncertainties),
            "cost": self.cost,
            "residual_norm": self.residual_norm,
            "status": self.status,
            "iterations": self.iterations,
            "message": self.message,
        }


def poisson_sigma(y) -> np.ndarray:
    """Default per-point uncertainty sqrt(max(y, 1)) for Poisson count data."""
    return np.sqrt(np.maximum(np.asarray(y, dtype=float), 1.0))


def _extract_xy(data) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    """Accept a Spectrum-like object (.x/.y/.y_err) or an (x, y[, y_err]) tuple."""
    if hasattr(data, "x") and hasattr(data, "y"):
        x = np.asarray(data.x, dtype=float)
        y = np.asarray(data.y, dtype=float)
        y_err = getattr(data, "y_err", None)
    elif isinstance(data, (tuple, list)) and len(data) in (2, 3):
        x = np.asarray(data[0], dtype=float)
        y = np.asarray(data[1], dtype=float)
        y_err = data[2] if len(data) == 3 else None
    else:
        raise TypeError("data must expose .x/.y or be an (x, y[, y_err]) tuple")
    if y_err is not None:
        y_err = np.asarray(y_err, dtype=float)
        if np.any(y_err <= 0.0):
            raise ValueError("y_err must be strictly positive")
    return x, y, y_err


def _checked_eval(evaluator, params: np.ndarray, x: np.ndarray) -> np.ndarray:
    y = np.asarray(evaluator(params, x), dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError(
            f"model evaluation produced non-finite values at parameters {params.tolist()}"
        )
    return y


def numeric_jacobian(
    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray],
    params,
    x,
    step_scale: float = 1e-6,
) -> np.ndarray:
    """Central-difference Jacobian d model / d params on the grid ``x``.

    Per-parameter step h_i = step_scale * max(|p_i|, 1); the truncation
    error of each entry is O(h_i^2).
    """
    p = np.asarray(params, dtype=float)
    x = np.asarray(x, dtype=float)
    jacobian = np.empty((x.size, p.size))
    for i in range(p.size):
        h = step_scale * max(abs(p[i]), 1.0)
        p_hi = p.copy()
        p_lo = p.copy()
        p_hi[i] += h
        p_lo[i] -= h
        jacobian[:, i] = (_checked_eval(evaluator, p_hi, x) - _checked_eval(evaluator, p_lo, x)) / (2.0 * h)
    return jacobian


def _scaled_gradient_norm(gradient: np.ndarray, normal_diag: np.ndarray) -> float:
    scale = np.sqrt(np.maximum(normal_diag, 1e-300))
    return float(np.max(np.abs(gradient) / scale)) if gradient.size else 0.0


def fit(model: ModelSpec, data, options: FitOptions | None = None) -> FitResult:
    """Locally minimize the weighted sum of squared residuals.

    ``data`` is a Spectrum-like object or (x, y[, y_err]) tuple; points
    without uncertainties weight as y_err = 1.  The initial guess is
    ``model.init`` and must be in bounds; steps are projected back into the
    bounds box.
    """
    opts = options or FitOptions()
    x, y, y_err = _extract_xy(data)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if y_err is None:
        y_err = np.ones_like(y)
    n_params = len(model.param_names)
    if x.size < n_params:
        raise ValueError(f"{x.size} data points cannot constrain {n_params} parameters")

    lo, hi = model.bounds_arrays()
    params = np.asarray(model.init, dtype=float)
    if np.any(params < lo) or np.any(params > hi):
        raise ValueError(f"initial guess {params.tolist()} outside bounds")

    def cost_of(p: np.ndarray) -> tuple[float, np.ndarray]:
        residual = (y - _checked_eval(model.evaluator, p, x)) / y_err
        return float(residual @ residual), residual

    cost, residual = cost_of(params)
    cost_trace = [cost]
    damping = opts.damping_init
    status = "max-iterations"
    message = ""
    iterations = 0

    for iterations in range(1, opts.max_iter + 1):
        jacobian = numeric_jacobian(model.evaluator, params, x) / y_err[:, None]
        normal = jacobian.T @ jacobian
        gradient = jacobian.T @ residual
        normal_diag = np.diag(normal).copy()

        if _scaled_gradient_norm(gradient, normal_diag) < opts.tol:
            status = "converged"
            message = "gradient below tolerance"
            break

        # Floor the Marquardt scaling so frozen/degenerate directions stay solvable.
        diag_floor = max(float(normal_diag.max()), 1e-300) * 1e-14
        scaling = np.maximum(normal_diag, diag_floor)

        stepped = False
        while True:
            try:
                step = np.linalg.solve(normal + damping * np.diag(scaling), gradient)
            except np.linalg.LinAlgError:
                step = None
            if step is not None and np.all(np.isfinite(step)):
                candidate = np.clip(params + step, lo, hi)
                new_cost, new_residual = cost_of(candidate)
                if new_cost <= cost:
                    relative_drop = (cost - new_cost) / max(cost, 1e-300)
                    params, cost, residual = candidate, new_cost, new_residual
                    cost_trace.append(cost)
                    damping = max(damping / 10.0, 1e-300)
                    stepped = True
                    if relative_drop < opts.tol:
                        status = "converged"
                        message = "relative cost reduction below tolerance"
                    break
            # Rejected (or unsolvable) step: escalate the damping.
            damping *= 10.0
            if damping > 1e15:
                break

        if not stepped and status != "converged":
            if cost_trace[-1] != cost:  # pragma: no cover - defensive
                cost_trace.append(cost)
            status = "singular"
            message = (
                "normal equations remained unsolvable or made no progress up to "
                f"damping {damping:.1e}"
            )
            break
        if status == "converged":
            break

    uncertainties, covariance = _curvature_uncertainties(model, params, x, y_err, cost)
    return FitResult(
        params=tuple(float(p) for p in params),
        uncertainties=uncertainties,
        covariance=covariance,
        cost=cost,
        residual_norm=math.sqrt(cost),
        status=status,
        iterations=iterations,
        cost_trace=tuple(cost_trace),
        message=message,
    )


def _curvature_uncertainties(
    model: ModelSpec,
    params: np.ndarray,
    x: np.ndarray,
    y_err: np.ndarray,
    cost: float,
) -> tuple[tuple[float, ...], np.ndarray]:
    """1-sigma uncertainties from the residual-weighted normal-equations curvature."""
    n_params = params.size
    jacobian = numeric_jacobian(model.evaluator, params, x) / y_err[:, None]
    normal = jacobian.T @ jacobian
    dof = max(x.size - n_params, 1)
    variance_scale = cost / dof
    try:
        covariance = variance_scale * np.linalg.inv(normal)
        uncertainties = tuple(float(v) for v in np.sqrt(np.maximum(np.diag(covariance), 0.0)))
    except np.linalg.LinAlgError:
        covariance = np.full((n_params, n_params), np.inf)
        uncertainties = tuple(math.inf for _ in range(n_params))
    return uncertainties, covariance


# --------------------------------------------------------------------------
# Model registry
# --------------------------------------------------------------------------

def lorentzian_profile(x, center: float, fwhm: float, amplitude: float):
    """Peak-normalized Lorentzian amplitude / (1 + (2 (x - center)/fwhm)^2)."""
    u = 2.0 * (np.asarray(x, dtype=float) - center) / fwhm
    return amplitude / (1.0 + u * u)


def gaussian_profile(x, center: float, fwhm: float, amplitude: float):
    """Peak-normalized Gaussian with full width at half maximum ``fwhm``."""
    u = (np.asarray(x, dtype=float) - center) / fwhm
    return amplitude * np.exp(-4.0 * math.log(2.0) * u * u)


def make_lorentzian_multi(
    n_lines: int = 1,
    shared_fwhm: bool = True,
    init: Sequence[float] | None = None,
) -> ModelSpec:
    """Sum of Lorentzian lines on a flat zero baseline (x in Hz).

    Shared-width layout (default, one homogeneous linewidth):
    [fwhm, center_1, amplitude_1, ..., center_n, amplitude_n];
    independent-width layout: [center_i, fwhm_i, amplitude_i] per line.
    """
    if n_lines < 1:
        raise ValueError(f"n_lines must be >= 1, got {n_lines}")
    if shared_fwhm:
        names = ["fwhm"]
        defaults = [70.0e6]
        bounds = [(1e-300, math.inf)]
        for i in range(1, n_lines + 1):
            names += [f"center_{i}", f"amplitude_{i}"]
            offset = (i - (n_lines + 1) / 2.0) / max(n_lines - 1, 1)
            defaults += [452.0e6 * offset, 1.0]
            bounds += [_UNBOUNDED, _UNBOUNDED]

        def evaluator(params, x, n=n_lines):
            fwhm = params[0]
            total = np.zeros_like(np.asarray(x, dtype=float))
            for k in range(n):
                total = total + lorentzian_profile(x, params[1 + 2 * k], fwhm, params[2 + 2 * k])
            return total

    else:
        names, defaults, bounds = [], [], []
        for i in range(1, n_lines + 1):
            names += [f"center_{i}", f"fwhm_{i}", f"amplitude_{i}"]
            offset = (i - (n_lines + 1) / 2.0) / max(n_lines - 1, 1)
            defaults += [452.0e6 * offset, 70.0e6, 1.0]
            bounds += [_UNBOUNDED, (1e-300, math.inf), _UNBOUNDED]

        def evaluator(params, x, n=n_lines):
            total = np.zeros_like(np.asarray(x, dtype=float))
            for k in range(n):
                total = total + lorentzian_profile(
                    x, params[3 * k], params[3 * k + 1], params[3 * k + 2]
                )
            return total

    return ModelSpec(
        name="lorentzian_multi",
        param_names=tuple(names),
        init=tuple(init) if init is not None else tuple(defaults),
        evaluator=evaluator,
        bounds=tuple(bounds),
    )


def make_gaussian(init: Sequence[float] | None = None) -> ModelSpec:
    """Single Gaussian [center, fwhm, amplitude] (x in Hz)."""
    return ModelSpec(
        name="gaussian",
        param_names=("center", "fwhm", "amplitude"),
        init=tuple(init) if init is not None else (0.0, 90.0e9, 1.0),
        evaluator=lambda p, x: gaussian_profile(x, p[0], p[1], p[2]),
        bounds=(_UNBOUNDED, (1e-300, math.inf), _UNBOUNDED),
    )


def make_exponential(init: Sequence[float] | None = None) -> ModelSpec:
    """Exponential relaxation [baseline, amplitude, tau]: y = baseline + amplitude e^(-x/tau).

    x and tau share whatever unit the caller picks (ns for optical decay,
    s for nuclear depolarization).
    """
    return ModelSpec(
        name="exponential",
        param_names=("baseline", "amplitude", "tau"),
        init=tuple(init) if init is not None else (0.0, 1.0, 5.56),
        evaluator=lambda p, x: p[0] + p[1] * np.exp(-np.asarray(x, dtype=float) / p[2]),
        bounds=(_UNBOUNDED, _UNBOUNDED, (1e-300, math.inf)),
    )


def make_damped_rabi(init: Sequence[float] | None = None) -> ModelSpec:
    """Damped Rabi population [omega_rad_per_ns, t1_ns] (x = time in ns)."""
    return ModelSpec(
        name="damped_rabi",
        param_names=("omega_rad_per_ns", "t1_ns"),
        init=tuple(init) if init is not None else (TWO_PI * 0.230, 4.7),
        evaluator=lambda p, x: optical_dynamics.rabi_population(
            np.asarray(x, dtype=float) * 1e-9, p[0] * 1e9, p[1] * 1e-9
        ),
        bounds=((1e-6, math.inf), (1e-6, math.inf)),
    )


def make_saturation(init: Sequence[float] | None = None) -> ModelSpec:
    """Fluorescence saturation [i_infinity, p_sat_pw] (x = power in pW)."""

    def evaluator(p, x):
        power = np.asarray(x, dtype=float)
        return p[0] / (1.0 + p[1] / power)

    return ModelSpec(
        name="saturation",
        param_names=("i_infinity", "p_sat_pw"),
        init=tuple(init) if init is not None else (1.34e6, 120.0),
        evaluator=evaluator,
        bounds=((1e-300, math.inf), (1e-300, math.inf)),
    )


def make_abs_cosine(init: Sequence[float] | None = None) -> ModelSpec:
    """Rectified cosine [amplitude, phi0]: y = |amplitude cos(x + phi0)| (x in rad)."""
    return ModelSpec(
        name="abs_cosine",
        param_names=("amplitude", "phi0"),
        init=tuple(init) if init is not None else (5.41, 0.0),
        evaluator=lambda p, x: spin_hamiltonian.angular_splitting_rate(p[0], p[1], x),
        bounds=((0.0, math.inf), (-TWO_PI, TWO_PI)),
    )


def make_reflection_dip(
    init: Sequence[float] | None = None,
    fix_f_in: float | None = None,
) -> ModelSpec:
    """Normalized reflection dip (x = detuning in Hz).

    Full layout [cooperativity, f_in, gamma_h_hz]; passing ``fix_f_in``
    removes the input-coupling ratio from the fit (it is usually
    constrained externally) leaving [cooperativity, gamma_h_hz].
    """
    if fix_f_in is None:
        return ModelSpec(
            name="reflection_dip",
            param_names=("cooperativity", "f_in", "gamma_h_hz"),
            init=tuple(init) if init is not None else (0.027, 0.95, 70.0e6),
            evaluator=lambda p, x: waveguide_qed.normalized_reflection_params(x, p[0], p[1], p[2]),
            bounds=((0.0, math.inf), (0.500001, 1.0), (1e-300, math.inf)),
        )
    f_in = float(fix_f_in)
    return ModelSpec(
        name="reflection_dip",
        param_names=("cooperativity", "gamma_h_hz"),
        init=tuple(init) if init is not None else (0.027, 70.0e6),
        evaluator=lambda p, x: waveguide_qed.normalized_reflection_params(x, p[0], f_in, p[1]),
        bounds=((0.0, math.inf), (1e-300, math.inf)),
    )


def make_contrast_saturation(init: Sequence[float] | None = None) -> ModelSpec:
    """Contrast roll-off [r0_contrast] vs saturation parameter (x = s)."""
    return ModelSpec(
        name="contrast_saturation",
        param_names=("r0_contrast",),
        init=tuple(init) if init is not None else (0.11,),
        evaluator=lambda p, x: waveguide_qed.contrast_vs_saturation(x, p[0]),
        bounds=((0.0, 1.0),),
    )


def model_registry() -> dict[str, Callable[..., ModelSpec]]:
    """All named model factories, keyed by registry name."""
    return {
        "lorentzian_multi": make_lorentzian_multi,
        "gaussian": make_gaussian,
        "exponential": make_exponential,
        "damped_rabi": make_damped_rabi,
        "saturation": make_saturation,
        "abs_cosine": make_abs_cosine,
        "reflection_dip": make_reflection_dip,
        "contrast_saturation": make_contrast_saturation,
    }
