"""Finite-time Fourier transforms of sampled signals.

The transform ``X(w) = int_0^T x(t) exp(i w t) dt`` is evaluated by integrating
the piecewise-linear interpolant of the samples exactly (a linear Filon rule),
optionally followed by one Richardson step on the half-resolution grid.
"""

from __future__ import annotations

import numpy as np
import scipy.fft

from .errors import GridError

_SERIES_LIMIT = 0.05


def _filon_weights(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Interior weight ``W`` and left half-cell weight ``H`` for step phase ``theta``."""
    theta = np.asarray(theta, dtype=float)
    w = np.empty_like(theta)
    h = np.empty(theta.shape, dtype=complex)
    small = np.abs(theta) < _SERIES_LIMIT
    ts = theta[small]
    t2 = ts * ts
    w[small] = 1.0 - t2 / 12.0 + t2 * t2 / 360.0 - t2 ** 3 / 20160.0
    its = 1j * ts
    h[small] = (0.5 + its / 6.0 + its**2 / 24.0 + its**3 / 120.0 + its**4 / 720.0
                + its**5 / 5040.0 + its**6 / 40320.0)
    tl = theta[~small]
    w[~small] = 2.0 * (1.0 - np.cos(tl)) / tl**2
    h[~small] = 1j / tl + (1.0 - np.exp(1j * tl)) / tl**2
    return w, h


def _linear_rule(raw: np.ndarray, first: np.ndarray, last: np.ndarray,
                 theta: np.ndarray, n: int, dt: float) -> np.ndarray:
    w, h = _filon_weights(theta)
    end_phase = np.exp(1j * theta * (n - 1))
    return dt * (w * raw + (h - w) * first + (np.conj(h) - w) * end_phase * last)


def _direct_sum(samples: np.ndarray, theta: np.ndarray, chunk: int = 256) -> np.ndarray:
    n = samples.shape[-1]
    idx = np.arange(n)
    out = np.empty(samples.shape[:-1] + theta.shape, dtype=complex)
    flat_theta = theta.ravel()
    flat_out = out.reshape(samples.shape[:-1] + (-1,))
    for start in range(0, flat_theta.size, chunk):
        th = flat_theta[start:start + chunk]
        phase = np.exp(1j * np.outer(idx, th))
        flat_out[..., start:start + chunk] = samples @ phase
    return out


def _check_samples(samples) -> np.ndarray:
    samples = np.asarray(samples)
    if samples.shape[-1] < 2:
        raise GridError("need at least two samples for a finite-time transform")
    return samples


def finite_time_transform(samples, dt: float, omegas, richardson: bool = True) -> np.ndarray:
    """Transform at arbitrary angular frequencies.

    Parameters
    ----------
    samples : array_like
        Signal values on ``t_k = k dt``; the last axis is time.
    dt : float
        Sample spacing.
    omegas : array_like
        Angular frequencies at which to evaluate.
    richardson : bool
        Combine with the transform of every second sample to cancel the
        leading ``O(dt^2)`` error. Requires an odd sample count; silently
        skipped otherwise.

    Returns
    -------
    ndarray
        Complex transform values with shape ``samples.shape[:-1] + omegas.shape``.
    """
    samples = _check_samples(samples)
    omegas = np.asarray(omegas, dtype=float)
    flat = omegas.ravel()
    n = samples.shape[-1]
    first, last = samples[..., :1], samples[..., -1:]
    theta = flat * dt
    out = _linear_rule(_direct_sum(samples, theta), first, last, theta, n, dt)
    if richardson and n % 2 == 1 and n >= 5:
        coarse_samples = samples[..., ::2]
        theta2 = 2.0 * theta
        coarse = _linear_rule(_direct_sum(coarse_samples, theta2), first, last, theta2,
                              coarse_samples.shape[-1], 2 * dt)
        out = (4.0 * out - coarse) / 3.0
    return out.reshape(samples.shape[:-1] + omegas.shape)


def finite_time_transform_fft(samples, dt: float, pad_factor: int = 8,
                              richardson: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Transform on the zero-padded FFT grid ``w_k = 2 pi k / (M dt)``.

    ``M`` is the smallest fast length at least ``pad_factor`` times the
    sample count. Only non-negative frequencies are returned; for real input
    the negative half follows by conjugation. With ``richardson`` the grid
    stops at half the Nyquist frequency, where the coarse transform ends.

    Returns
    -------
    omegas, values : ndarray
    """
    samples = _check_samples(samples)
    if pad_factor < 1:
        raise ValueError("pad_factor must be >= 1")
    n = samples.shape[-1]
    use_rich = richardson and n % 2 == 1 and n >= 5
    size = scipy.fft.next_fast_len(max(int(pad_factor) * n, n), real=False)
    if use_rich and size % 2:
        size = scipy.fft.next_fast_len(size + 1)
        while size % 2:
            size = scipy.fft.next_fast_len(size + 1)
    n_out = size // 4 + 1 if use_rich else size // 2 + 1
    k = np.arange(n_out)
    theta = 2.0 * np.pi * k / size
    raw = scipy.fft.ifft(samples, n=size, axis=-1)[..., :n_out] * size
    fine = _linear_rule(raw, samples[..., :1], samples[..., -1:], theta, n, dt)
    omegas = theta / dt
    if not use_rich:
        return omegas, fine
    coarse_samples = samples[..., ::2]
    half = size // 2
    raw2 = scipy.fft.ifft(coarse_samples, n=half, axis=-1)[..., :n_out] * half
    theta2 = 2.0 * np.pi * k / half
    coarse = _linear_rule(raw2, samples[..., :1], samples[..., -1:], theta2,
                          coarse_samples.shape[-1], 2 * dt)
    return omegas, (4.0 * fine - coarse) / 3.0
