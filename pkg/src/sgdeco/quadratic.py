"""Trap-frequency (quadratic) noise.

The noise enters as ``x'' + (w0^2 + dw2(t)) x = a(t)``. This module holds
the first-order Pinney and Ermakov solutions, a direct ODE oracle for them,
the displacement fluctuation of each arm, and the contrast loss that
follows from it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math
import warnings

import numpy as np
from scipy import integrate

from .dynamics import ArmTrajectory, _index_of, _noise_array, _shared_grid, midpoint_values
from .errors import ScenarioMismatchError, SingularityError
from .fourier import finite_time_transform
from .noise import NoiseTrace, Psd, evaluate_psd, plan_synthesis, synthesize_batch, trial_seed
from .params import PhysParams
from .quantum import GaussianArmState
from .response import (TransferFunction, VarianceReport, transfer_closed_form_FN,
                       variance_from_psd)

PERTURBATIVE_LIMIT = 0.1
RHO_GUARD = 0.1


def _trace_arrays(noise, dt: float | None = None) -> tuple[np.ndarray, float]:
    if isinstance(noise, NoiseTrace):
        return noise.samples, noise.dt
    arr = np.asarray(noise, dtype=float)
    if dt is None:
        raise ValueError("dt is required for array noise input")
    return arr, float(dt)


def _warn_strength(params: PhysParams, arr: np.ndarray) -> None:
    peak = float(np.max(np.abs(arr))) if arr.size else 0.0
    if peak > PERTURBATIVE_LIMIT * params.omega0**2:
        warnings.warn(f"|dw2| reaches {peak / params.omega0**2:.3g} w0^2; first-order results "
                      "are unreliable above 0.1 w0^2", RuntimeWarning, stacklevel=3)


def _cumulative(values: np.ndarray, dt: float) -> np.ndarray:
    return integrate.cumulative_trapezoid(values, dx=dt, axis=-1, initial=0.0)


# -- first-order Pinney and Ermakov solutions ---------------------------------

@dataclass(frozen=True)
class PinneySeries:
    """First-order Pinney solutions and their derivatives on the noise grid."""

    times: np.ndarray
    y1: np.ndarray
    y1_dot: np.ndarray
    y2: np.ndarray
    y2_dot: np.ndarray

    def wronskian(self) -> np.ndarray:
        return self.y1 * self.y2_dot - self.y2 * self.y1_dot


def pinney_series(params: PhysParams, noise, dt: float | None = None) -> PinneySeries:
    """First-order solutions of ``y'' + (w0^2 + dw2) y = 0`` at every grid time.

    Expanding ``sin w0 (t - s)`` turns each convolution into cumulative
    trapezoid integrals of ``dw2`` against ``cos^2``, ``sin cos`` and ``sin^2``.
    """
    arr, dt = _trace_arrays(noise, dt)
    _warn_strength(params, arr)
    w0 = params.omega0
    t = np.arange(arr.shape[-1]) * dt
    c, s = np.cos(w0 * t), np.sin(w0 * t)
    c_cc = _cumulative(arr * c * c, dt)
    c_sc = _cumulative(arr * s * c, dt)
    c_ss = _cumulative(arr * s * s, dt)
    y1 = c - (s * c_cc - c * c_sc) / w0
    y1_dot = -w0 * s - (c * c_cc + s * c_sc)
    y2 = s - (s * c_sc - c * c_ss) / w0
    y2_dot = w0 * c - (c * c_sc + s * c_ss)
    return PinneySeries(t, y1, y1_dot, y2, y2_dot)


def pinney_perturbative(params: PhysParams, noise: NoiseTrace, t: float) -> tuple[float, float]:
    """``(y1(t), y2(t))`` to first order in ``dw2``.

    Raises
    ------
    OutOfRangeError
        If ``t`` is not a time of the trace.
    """
    k = _index_of(noise.times, t)
    ps = pinney_series(params, noise)
    return float(ps.y1[k]), float(ps.y2[k])


@dataclass(frozen=True)
class SqueezeParams:
    """Leading-order squeeze ``delta_rho`` and shear rate ``delta_rho_dot`` at time ``t``."""

    delta_rho: float
    delta_rho_dot: float
    t: float = 0.0


def delta_rho_series(params: PhysParams, noise, dt: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """``(delta_rho, delta_rho_dot)`` at every grid time.

    ``delta_rho(t) = -(1 / 2 w0) int dw2(s) sin 2 w0 (t - s) ds`` and
    ``delta_rho_dot(t) = -int dw2(s) cos 2 w0 (t - s) ds``.
    """
    arr, dt = _trace_arrays(noise, dt)
    _warn_strength(params, arr)
    w2 = 2.0 * params.omega0
    t = np.arange(arr.shape[-1]) * dt
    c, s = np.cos(w2 * t), np.sin(w2 * t)
    c_c = _cumulative(arr * c, dt)
    c_s = _cumulative(arr * s, dt)
    rho = -(s * c_c - c * c_s) / w2
    rho_dot = -(c * c_c + s * c_s)
    return rho, rho_dot


def ermakov_rho_perturbative(params: PhysParams, noise: NoiseTrace, t: float) -> SqueezeParams:
    """First-order scale-factor correction at time ``t``."""
    k = _index_of(noise.times, t)
    rho, rho_dot = delta_rho_series(params, noise)
    return SqueezeParams(float(rho[k]), float(rho_dot[k]), float(noise.times[k]))


@dataclass(frozen=True)
class ErmakovSolution:
    """Scale factor and Pinney pair on a grid.

    For ``method == "perturbative"`` the arrays come from first-order
    formulas and ``rho = 1 + delta_rho``. For ``"ode-oracle"`` they come from
    RK4 integration; ``residual`` then holds the largest
    ``|rho'' + w^2 rho - w0^2 / rho^3|`` with ``rho''`` from central
    differences of ``rho_dot``.
    """

    times: np.ndarray
    rho: np.ndarray
    rho_dot: np.ndarray
    delta_rho: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    method: str
    y1_dot: np.ndarray | None = None
    y2_dot: np.ndarray | None = None
    residual: float = 0.0

    def wronskian(self) -> np.ndarray:
        if self.y1_dot is None or self.y2_dot is None:
            raise ValueError("derivatives of the Pinney pair are not stored")
        return self.y1 * self.y2_dot - self.y2 * self.y1_dot

    def table(self) -> tuple[list[str], np.ndarray]:
        cols = ["t", "rho", "rho_dot", "delta_rho", "y1", "y2"]
        return cols, np.column_stack([self.times, self.rho, self.rho_dot, self.delta_rho,
                                      self.y1, self.y2])


def ermakov_perturbative(params: PhysParams, noise: NoiseTrace) -> ErmakovSolution:
    """First-order :class:`ErmakovSolution` on the noise grid."""
    rho, rho_dot = delta_rho_series(params, noise)
    ps = pinney_series(params, noise)
    return ErmakovSolution(ps.times, 1.0 + rho, rho_dot, rho, ps.y1, ps.y2, "perturbative",
                           ps.y1_dot, ps.y2_dot)


def _ermakov_rhs(state: np.ndarray, w2: float, w0sq: float) -> np.ndarray:
    rho, rd, y1, y1d, y2, y2d = state
    return np.array([rd, -w2 * rho + w0sq / rho**3, y1d, -w2 * y1, y2d, -w2 * y2])


def ermakov_ode_oracle(params: PhysParams, noise: NoiseTrace, t_f: float | None = None,
                       dt: float | None = None) -> ErmakovSolution:
    """Direct RK4 integration of the Ermakov and Pinney equations.

    Starts from ``rho = 1``, ``rho' = 0``, ``(y1, y1') = (1, 0)`` and
    ``(y2, y2') = (0, w0)``. The step is the noise grid spacing; ``dt`` may
    only be an integer multiple of it, in which case the noise is subsampled.
    The frequency at half steps is cubic-interpolated from the samples.

    Raises
    ------
    SingularityError
        If ``rho`` drops below 0.1, where the ``1 / rho^3`` term blows up.
    """
    arr = noise.samples
    step = 1
    if dt is not None:
        ratio = dt / noise.dt
        step = int(round(ratio))
        if step < 1 or abs(ratio - step) > 1e-9:
            raise ValueError("dt must be a positive integer multiple of the noise spacing")
        arr = arr[::step]
    h = noise.dt * step
    n = arr.size
    if t_f is not None:
        n = min(n, int(round(t_f / h)) + 1)
        arr = arr[:n]
    _warn_strength(params, arr)
    w0sq = params.omega0**2
    w_nodes = w0sq + arr
    w_mid = w0sq + midpoint_values(arr)
    out = np.empty((n, 6))
    y = np.array([1.0, 0.0, 1.0, 0.0, 0.0, params.omega0])
    out[0] = y
    for k in range(n - 1):
        k1 = _ermakov_rhs(y, w_nodes[k], w0sq)
        k2 = _ermakov_rhs(y + 0.5 * h * k1, w_mid[k], w0sq)
        k3 = _ermakov_rhs(y + 0.5 * h * k2, w_mid[k], w0sq)
        k4 = _ermakov_rhs(y + h * k3, w_nodes[k + 1], w0sq)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if y[0] < RHO_GUARD:
            raise SingularityError(f"scale factor fell to {y[0]:.3g} at t = {(k + 1) * h:.4g}")
        out[k + 1] = y
    times = np.arange(n) * h
    rho, rd = out[:, 0], out[:, 1]
    residual = 0.0
    if n >= 3:
        rdd = (rd[2:] - rd[:-2]) / (2.0 * h)
        res = rdd + w_nodes[1:-1] * rho[1:-1] - w0sq / rho[1:-1] ** 3
        residual = float(np.max(np.abs(res)))
    return ErmakovSolution(times, rho, rd, rho - 1.0, out[:, 2], out[:, 4], "ode-oracle",
                           out[:, 3], out[:, 5], residual)


# -- displacement and contrast ------------------------------------------------

def _ideal_weight(x_plus: ArmTrajectory, x_minus: ArmTrajectory | None) -> np.ndarray:
    if x_minus is None:
        return x_plus.alpha.real
    _shared_grid(x_plus, x_minus)
    return x_plus.alpha.real - x_minus.alpha.real


def delta_alpha_quadratic(params: PhysParams, noise, x_plus: ArmTrajectory,
                          x_minus: ArmTrajectory | None = None, t: float | None = None,
                          dt: float | None = None):
    """Displacement caused by ``dw2`` along ideal trajectories.

    ``-(i / w0) exp(-i w0 t) int_0^t dw2(s) Re[alpha0(s)] exp(i w0 s) ds``,
    where ``alpha0`` is the single-arm coordinate, or the difference
    ``alpha_+ - alpha_-`` when ``x_minus`` is given. ``noise`` may be a
    trace or a batch array with time on the last axis. ``t`` defaults to the
    end of the grid.

    Raises
    ------
    GridError
        If the noise and trajectory grids differ.
    """
    times = x_plus.times
    arr = _noise_array(noise, times.size, x_plus.dt)
    weight = _ideal_weight(x_plus, x_minus)
    k = times.size - 1 if t is None else _index_of(times, t)
    w0 = params.omega0
    dtt = x_plus.dt
    phase = np.exp(1j * w0 * times[: k + 1])
    wts = np.full(k + 1, dtt)
    wts[0] = wts[-1] = 0.5 * dtt
    if k == 0:
        wts[:] = 0.0
    integral = arr[..., : k + 1] @ (wts * weight[: k + 1] * phase)
    out = -(1j / w0) * np.exp(-1j * w0 * times[k]) * integral
    return complex(out) if np.ndim(out) == 0 else out


def quadratic_transfer_closed_form(params: PhysParams, omega):
    """Constant-gradient contrast filter ``(2 m dA^2 w0^3 / hbar) sin^2(N pi W / w0) / (W^2 (W^2 - w0^2)^2)``.

    Equal to ``m / (2 hbar w0)`` times the dephasing filter ``F_N``.
    """
    return params.m / (2.0 * params.hbar * params.omega0) * transfer_closed_form_FN(params, omega)


def quadratic_transfer(params: PhysParams, x_plus: ArmTrajectory | None = None,
                       x_minus: ArmTrajectory | None = None, omegas=None) -> TransferFunction:
    """``F(W) = |(1 / w0) int_0^tf Re[dalpha0(s)] exp(i W s) ds|^2``.

    Built from the sampled ideal trajectories when given, otherwise from the
    constant-gradient closed form.
    """
    w0 = params.omega0
    grid = np.linspace(0.0, 4.0 * w0, 801) if omegas is None else np.asarray(omegas, dtype=float)
    if x_plus is None:
        ev = lambda w, _p=params: quadratic_transfer_closed_form(_p, w)  # noqa: E731
        return TransferFunction(grid, ev(grid), "quadratic-contrast", ev,
                                lobe_spacing=w0 / params.n_periods, resonances=(w0,))
    weight = _ideal_weight(x_plus, x_minus) / w0
    dt = x_plus.dt
    span = float(x_plus.times[-1] - x_plus.times[0])

    def ev(w, _s=weight, _dt=dt):
        return np.abs(finite_time_transform(_s, _dt, np.abs(np.asarray(w, dtype=float)))) ** 2

    return TransferFunction(grid, ev(grid), "quadratic-contrast", ev,
                            lobe_spacing=2.0 * math.pi / span, resonances=(w0,),
                            max_omega=math.pi / dt)


def shifted_transfer(transfer: TransferFunction, omega0: float) -> TransferFunction:
    """Even filter ``[F(W - w0) + F(W + w0)] / 2`` seen by the noise spectrum.

    The displacement integral carries ``exp(i w0 s)``, so a noise component
    at ``W`` probes the trajectory spectrum at ``W - w0``.
    """
    base = transfer

    def ev(w, _f=base, _w0=omega0):
        w = np.asarray(w, dtype=float)
        return 0.5 * (np.real(_f(w - _w0)) + np.real(_f(w + _w0)))

    grid = transfer.omegas
    res = tuple(sorted({omega0, 2.0 * omega0} | {r + omega0 for r in transfer.resonances}))
    upper = transfer.max_omega - omega0 if math.isfinite(transfer.max_omega) else math.inf
    return TransferFunction(grid, ev(grid), "quadratic-contrast", ev,
                            lobe_spacing=transfer.lobe_spacing, resonances=res, max_omega=upper)


def quadratic_contrast_closed_form(params: PhysParams, psd: Psd) -> float:
    """``m N^2 pi^2 dA^2 S(w0) / (hbar w0^6)``."""
    n = params.n_periods
    return params.m * n**2 * math.pi**2 * params.delta_a**2 * evaluate_psd(psd, params.omega0) / (
        params.hbar * params.omega0**6)


@dataclass(frozen=True)
class ContrastEstimate:
    """``-E[log C]`` from one estimator; ``stderr`` is 0 for deterministic modes."""

    value: float
    stderr: float
    mode: str
    extras: dict = field(default_factory=dict)


def _is_closure(params: PhysParams, t_f: float | None) -> bool:
    return t_f is None or math.isclose(t_f, params.t_closure, rel_tol=1e-9)


def quadratic_contrast(params: PhysParams, psd_omega2: Psd, mode: str = "quadrature",
                       x_plus: ArmTrajectory | None = None, x_minus: ArmTrajectory | None = None,
                       t_f: float | None = None, n_trials: int = 10_000, master_seed: int = 0,
                       dt: float | None = None, block: int = 512) -> ContrastEstimate:
    """Contrast loss ``-E[log C]`` from quadratic noise.

    Parameters
    ----------
    mode : {"quadrature", "closed-form", "monte-carlo"}
        ``quadrature`` integrates ``(1/2) int S(W) F(W - w0) dW`` (the exact
        second moment of the first-order displacement). ``closed-form``
        evaluates the resonant pole estimate. ``monte-carlo`` averages
        ``|d_alpha_+ - d_alpha_-|^2 / 2`` over synthesized traces.
    x_plus, x_minus : ArmTrajectory, optional
        Ideal arms. Defaults to the constant-gradient arms on ``[0, t_f]``.

    Raises
    ------
    ScenarioMismatchError
        For the closed form outside the constant-gradient closure scenario,
        or an unknown mode.
    """
    from .dynamics import ideal_trajectories

    if mode == "closed-form":
        if x_plus is not None or not _is_closure(params, t_f):
            raise ScenarioMismatchError("the closed form needs the constant-gradient arms "
                                        "closing at t_f = 2 pi N / w0")
        return ContrastEstimate(quadratic_contrast_closed_form(params, psd_omega2), 0.0, mode)
    if mode == "quadrature":
        if x_plus is None and _is_closure(params, t_f):
            base = quadratic_transfer(params)
        else:
            if x_plus is None:
                x_plus, x_minus = ideal_trajectories(params, t_f, dt)
            base = quadratic_transfer(params, x_plus, x_minus)
        rep: VarianceReport = variance_from_psd(psd_omega2, shifted_transfer(base, params.omega0),
                                                prefactor=0.5)
        return ContrastEstimate(rep.quadrature_value, 0.0, mode,
                                {"quadrature_error": rep.quadrature_error})
    if mode == "monte-carlo":
        if x_plus is None:
            x_plus, x_minus = ideal_trajectories(params, t_f, dt)
        span = float(x_plus.times[-1])
        plan = plan_synthesis(psd_omega2, span, x_plus.dt)
        if plan.n != x_plus.n:
            raise ScenarioMismatchError("noise grid does not match the trajectory grid")
        seeds = [trial_seed(master_seed, j) for j in range(n_trials)]
        neg_log = np.empty(n_trials)
        for start in range(0, n_trials, block):
            traces = synthesize_batch(plan, seeds[start:start + block])
            d = delta_alpha_quadratic(params, traces, x_plus, x_minus)
            neg_log[start:start + traces.shape[0]] = 0.5 * np.abs(d) ** 2
        mean = float(neg_log.mean())
        stderr = float(neg_log.std(ddof=1) / math.sqrt(n_trials)) if n_trials > 1 else 0.0
        mean_c = float(np.mean(np.exp(-neg_log)))
        return ContrastEstimate(mean, stderr, mode, {"mean_contrast": mean_c,
                                                     "n_trials": n_trials})
    raise ScenarioMismatchError(f"unknown contrast mode {mode!r}")


# -- squeeze invariance -------------------------------------------------------

def squeeze_map(sq: SqueezeParams, omega0: float) -> np.ndarray:
    """Symplectic matrix of the leading-order squeeze-then-shear on ``(x, p)`` quadratures."""
    squeeze = np.diag([math.exp(sq.delta_rho), math.exp(-sq.delta_rho)])
    shear = np.array([[1.0, 0.0], [sq.delta_rho_dot / omega0, 1.0]])
    return squeeze @ shear


def gaussian_overlap(mean_a: np.ndarray, cov_a: np.ndarray, mean_b: np.ndarray,
                     cov_b: np.ndarray) -> float:
    """``|<a|b>|`` for pure one-mode Gaussian states (vacuum covariance ``I / 2``)."""
    total = cov_a + cov_b
    d = mean_a - mean_b
    fid = math.exp(-0.5 * float(d @ np.linalg.solve(total, d))) / math.sqrt(np.linalg.det(total))
    return math.sqrt(fid)


def squeeze_unitarity_check(sq: SqueezeParams, state_pair: tuple[GaussianArmState, GaussianArmState],
                            omega0: float = 1.0) -> float:
    """``|overlap before - overlap after|`` when both states get the same squeeze and shear."""
    a, b = state_pair
    s = squeeze_map(sq, omega0)
    before = gaussian_overlap(a.mean_quadratures(), a.covariance(), b.mean_quadratures(),
                              b.covariance())
    after = gaussian_overlap(s @ a.mean_quadratures(), s @ a.covariance() @ s.T,
                             s @ b.mean_quadratures(), s @ b.covariance() @ s.T)
    return abs(before - after)
