"""Classical arm trajectories and the phase and displacement fluctuations they carry."""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
from scipy import integrate

from .errors import GridError, OutOfRangeError
from .noise import NoiseTrace
from .params import PhysParams


@dataclass(frozen=True, eq=False)
class ArmTrajectory:
    """Sampled trajectory of one arm.

    ``alpha = sqrt(m w0 / 2 hbar) (x + i v / w0)`` is stored alongside
    ``x`` and ``v``. ``accel`` is the total applied acceleration (drive plus
    noise) when known; the action integral needs it.
    """

    times: np.ndarray
    x: np.ndarray
    v: np.ndarray
    alpha: np.ndarray
    drive_label: str
    accel: np.ndarray | None = None
    omega0: float | None = None

    def __post_init__(self) -> None:
        n = np.shape(self.times)[0]
        for name in ("x", "v", "alpha"):
            if np.shape(getattr(self, name)) != (n,):
                raise GridError(f"trajectory field {name!r} does not match the time grid")
        if self.accel is not None and np.shape(self.accel) != (n,):
            raise GridError("trajectory acceleration does not match the time grid")
        if self.drive_label not in ("plus", "minus"):
            raise ValueError("drive_label must be 'plus' or 'minus'")
        for name in ("times", "x", "v", "alpha", "accel"):
            arr = getattr(self, name)
            if arr is not None:
                arr.setflags(write=False)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def n(self) -> int:
        return self.times.size

    def index_of(self, t: float) -> int:
        """Grid index of time ``t``; raises if ``t`` is off the grid."""
        return _index_of(self.times, t)


def _index_of(times: np.ndarray, t: float) -> int:
    dt = times[1] - times[0]
    k = (t - times[0]) / dt
    j = int(round(k))
    if j < 0 or j >= times.size or abs(k - j) > 1e-6:
        raise OutOfRangeError(f"t = {t!r} is not a sample of the grid [{times[0]}, {times[-1]}] "
                              f"with step {dt}")
    return j


def time_grid(t_f: float, dt: float) -> np.ndarray:
    """Uniform grid on ``[0, t_f]`` with step closest to ``dt`` that divides ``t_f``."""
    if not (t_f > 0 and dt > 0):
        raise GridError("t_f and dt must be positive")
    n = int(round(t_f / dt)) + 1
    if n < 2:
        raise GridError("grid needs at least two samples")
    return np.linspace(0.0, t_f, n)


def make_trajectory(params: PhysParams, times, x, v, label: str, accel=None) -> ArmTrajectory:
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    alpha = params.alpha_scale * (x + 1j * v / params.omega0)
    acc = None if accel is None else np.asarray(accel, dtype=float)
    return ArmTrajectory(np.asarray(times, dtype=float), x, v, alpha, label, acc, params.omega0)


def ideal_trajectories(params: PhysParams, t_f: float | None = None,
                       dt: float | None = None) -> tuple[ArmTrajectory, ArmTrajectory]:
    """Closed-form arms ``x_pm = A_pm (1 - cos w0 t)`` under the constant gradient.

    ``t_f`` defaults to ``2 pi N / w0`` and ``dt`` to a two-hundredth of a period.
    """
    t_f = params.t_closure if t_f is None else float(t_f)
    dt = params.period / 200.0 if dt is None else float(dt)
    t = time_grid(t_f, dt)
    w0 = params.omega0
    c, s = np.cos(w0 * t), np.sin(w0 * t)
    arms = []
    for label, amp in (("plus", params.a_plus), ("minus", params.a_minus)):
        accel = np.full_like(t, amp * w0**2)
        arms.append(make_trajectory(params, t, amp * (1.0 - c), amp * w0 * s, label, accel))
    return arms[0], arms[1]


def constant_drive(params: PhysParams, label: str, times) -> np.ndarray:
    """Acceleration ``A_pm w0^2`` of the constant-gradient drive on a grid."""
    amp = params.a_plus if label == "plus" else params.a_minus
    return np.full(np.shape(times), amp * params.omega0**2)


def midpoint_values(samples: np.ndarray) -> np.ndarray:
    """Cubic interpolation at interval midpoints (exact for cubic polynomials)."""
    f = np.asarray(samples, dtype=float)
    n = f.shape[-1]
    if n < 4:
        return 0.5 * (f[..., 1:] + f[..., :-1])
    mid = np.empty(f.shape[:-1] + (n - 1,))
    mid[..., 1:-1] = (-f[..., :-3] + 9.0 * f[..., 1:-2] + 9.0 * f[..., 2:-1] - f[..., 3:]) / 16.0
    mid[..., 0] = (5.0 * f[..., 0] + 15.0 * f[..., 1] - 5.0 * f[..., 2] + f[..., 3]) / 16.0
    mid[..., -1] = (5.0 * f[..., -1] + 15.0 * f[..., -2] - 5.0 * f[..., -3] + f[..., -4]) / 16.0
    return mid


def forcing_samples(forcing, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Values of a forcing term at grid points and interval midpoints.

    ``forcing`` may be ``None`` (zero), a scalar, an array on the grid, a
    :class:`NoiseTrace` on the grid, or a callable of time.
    """
    n = times.size
    if forcing is None:
        return np.zeros(n), np.zeros(n - 1)
    if callable(forcing) and not isinstance(forcing, NoiseTrace):
        mids = 0.5 * (times[1:] + times[:-1])
        return (np.asarray(forcing(times), dtype=float) * np.ones(n),
                np.asarray(forcing(mids), dtype=float) * np.ones(n - 1))
    if isinstance(forcing, NoiseTrace):
        _check_trace(forcing, times)
        arr = forcing.samples
    else:
        arr = np.asarray(forcing, dtype=float)
        if arr.ndim == 0:
            return np.full(n, float(arr)), np.full(n - 1, float(arr))
        if arr.shape != (n,):
            raise GridError(f"forcing has {arr.shape} samples but the grid has {n}")
    return arr, midpoint_values(arr)


def _check_trace(trace: NoiseTrace, times: np.ndarray) -> None:
    dt = times[1] - times[0]
    if trace.n != times.size or not math.isclose(trace.dt, dt, rel_tol=1e-9):
        raise GridError(f"noise grid (n={trace.n}, dt={trace.dt}) does not match the trajectory "
                        f"grid (n={times.size}, dt={dt})")


def rk4_oscillator(omega0: float, times: np.ndarray, force: np.ndarray, force_mid: np.ndarray,
                   x0: float, v0: float) -> tuple[np.ndarray, np.ndarray]:
    """Classical RK4 for ``x'' = -w0^2 x + f(t)`` with forcing sampled at nodes and midpoints."""
    n = times.size
    h = times[1] - times[0]
    w2 = omega0 * omega0
    x = np.empty(n)
    v = np.empty(n)
    x[0], v[0] = x0, v0
    for k in range(n - 1):
        xk, vk = x[k], v[k]
        fa, fm, fb = force[k], force_mid[k], force[k + 1]
        k1x, k1v = vk, -w2 * xk + fa
        k2x, k2v = vk + 0.5 * h * k1v, -w2 * (xk + 0.5 * h * k1x) + fm
        k3x, k3v = vk + 0.5 * h * k2v, -w2 * (xk + 0.5 * h * k2x) + fm
        k4x, k4v = vk + h * k3v, -w2 * (xk + h * k3x) + fb
        x[k + 1] = xk + h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        v[k + 1] = vk + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
    return x, v


def integrate_trajectory(params: PhysParams, times, drive, noise: NoiseTrace | None = None,
                         x0: float = 0.0, v0: float = 0.0, label: str = "plus") -> ArmTrajectory:
    """RK4 solution of ``x'' = -w0^2 x + a(t) + da(t)``.

    Parameters
    ----------
    times : array_like
        Uniform time grid.
    drive : scalar, array_like or callable
        Deterministic acceleration ``a(t)``.
    noise : NoiseTrace, optional
        Acceleration noise on the same grid.

    Raises
    ------
    GridError
        If the drive or noise does not share the grid.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise GridError("times must be a 1-D grid of at least two points")
    if not np.allclose(np.diff(times), times[1] - times[0], rtol=1e-9, atol=0):
        raise GridError("times must be uniformly spaced")
    fa, fa_mid = forcing_samples(drive, times)
    na, na_mid = forcing_samples(noise, times)
    x, v = rk4_oscillator(params.omega0, times, fa + na, fa_mid + na_mid, x0, v0)
    return make_trajectory(params, times, x, v, label, fa + na)


def _shared_grid(*trajs: ArmTrajectory) -> np.ndarray:
    t0 = trajs[0].times
    for tr in trajs[1:]:
        if tr.times.shape != t0.shape or not np.allclose(tr.times, t0, rtol=0, atol=1e-12 * max(1.0, t0[-1])):
            raise GridError("trajectories do not share a time grid")
    return t0


def _noise_array(noise, n: int, dt: float) -> np.ndarray:
    if isinstance(noise, NoiseTrace):
        if noise.n != n or not math.isclose(noise.dt, dt, rel_tol=1e-9):
            raise GridError(f"noise grid (n={noise.n}, dt={noise.dt}) does not match the "
                            f"trajectory grid (n={n}, dt={dt})")
        return noise.samples
    arr = np.asarray(noise, dtype=float)
    if arr.shape[-1] != n:
        raise GridError(f"noise has {arr.shape[-1]} samples, trajectory grid has {n}")
    return arr


def trapezoid_weights(n: int, dt: float) -> np.ndarray:
    w = np.full(n, dt)
    w[0] = w[-1] = 0.5 * dt
    return w


def delta_phi(params: PhysParams, noise, x_plus: ArmTrajectory, x_minus: ArmTrajectory,
              noise_minus=None) -> float | np.ndarray:
    """Phase fluctuation ``(m/hbar) int (da_+ x_+ - da_- x_-) dt`` along unperturbed arms.

    With ``noise_minus`` omitted the same noise drives both arms and this is
    ``(m/hbar) int da (x_+ - x_-) dt``. Passing ``noise_minus = -noise``
    gives the anti-correlated coupling, whose weight is ``x_+ + x_-``.
    ``noise`` may be a trace or an array whose last axis is time (a batch).
    """
    t = _shared_grid(x_plus, x_minus)
    dt = t[1] - t[0]
    w = trapezoid_weights(t.size, dt)
    da_p = _noise_array(noise, t.size, dt)
    da_m = da_p if noise_minus is None else _noise_array(noise_minus, t.size, dt)
    scale = params.m / params.hbar
    if noise_minus is None:
        return scale * (da_p @ (w * (x_plus.x - x_minus.x)))
    return scale * (da_p @ (w * x_plus.x) - da_m @ (w * x_minus.x))


def delta_alpha_series(params: PhysParams, noise, dt: float | None = None) -> np.ndarray:
    """``d_alpha(t_k)`` at every grid time by cumulative complex trapezoid.

    ``d_alpha(t) = i sqrt(m / 2 hbar w0) exp(-i w0 t) int_0^t da(s) exp(i w0 s) ds``.
    """
    if isinstance(noise, NoiseTrace):
        arr, dt = noise.samples, noise.dt
    else:
        arr = np.asarray(noise, dtype=float)
        if dt is None:
            raise ValueError("dt is required for array noise input")
    t = np.arange(arr.shape[-1]) * dt
    w0 = params.omega0
    phase = np.exp(1j * w0 * t)
    cum = integrate.cumulative_trapezoid(arr * phase, dx=dt, axis=-1, initial=0.0)
    pref = 1j * math.sqrt(params.m / (2.0 * params.hbar * w0))
    return pref * np.conj(phase) * cum


def delta_alpha(params: PhysParams, noise: NoiseTrace, t: float) -> complex:
    """Displacement fluctuation at time ``t`` (must be a grid time).

    Raises
    ------
    OutOfRangeError
        If ``t`` lies outside the trace or off its grid.
    """
    k = _index_of(noise.times, t)
    dt = noise.dt
    w0 = params.omega0
    seg = noise.samples[: k + 1]
    tt = np.arange(k + 1) * dt
    vals = seg * np.exp(1j * w0 * tt)
    if k == 0:
        acc = 0.0
    else:
        acc = dt * (vals.sum() - 0.5 * (vals[0] + vals[-1]))
    pref = 1j * math.sqrt(params.m / (2.0 * params.hbar * w0))
    return complex(pref * np.exp(-1j * w0 * tt[-1]) * acc)


def total_derivative_check(params: PhysParams, ideal: ArmTrajectory, perturbed: ArmTrajectory,
                           drive=None) -> tuple[float, float]:
    """Test that the first-order action change from ``dx`` is a pure boundary term.

    Returns the Simpson-rule integral of
    ``m (x' dx' - w0^2 x dx + a dx)`` over the grid and the boundary value
    ``m x' dx`` evaluated between the first and last sample.
    ``drive`` defaults to ``ideal.accel``.
    """
    t = _shared_grid(ideal, perturbed)
    if drive is None:
        if ideal.accel is None:
            raise ValueError("drive is required when the ideal trajectory carries no acceleration")
        drive = ideal.accel
    a, _ = forcing_samples(drive, t)
    dx = perturbed.x - ideal.x
    dv = perturbed.v - ideal.v
    m = params.m
    integrand = m * (ideal.v * dv - params.omega0**2 * ideal.x * dx + a * dx)
    channel = float(integrate.simpson(integrand, x=t))
    boundary = float(m * (ideal.v[-1] * dx[-1] - ideal.v[0] * dx[0]))
    return channel, boundary


def trajectories_table(x_plus: ArmTrajectory, x_minus: ArmTrajectory) -> tuple[list[str], np.ndarray]:
    """Column names and rows for CSV export of an arm pair."""
    t = _shared_grid(x_plus, x_minus)
    cols = ["t", "x_plus", "v_plus", "x_minus", "v_minus"]
    return cols, np.column_stack([t, x_plus.x, x_plus.v, x_minus.x, x_minus.v])

