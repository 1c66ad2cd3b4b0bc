"""PSD models and synthesis of stationary Gaussian noise.

Spectral convention: two-sided in angular frequency with

    R(tau) = E[x(t) x(t + tau)] = int S(w) exp(-i w tau) dw,

so the variance of the process is ``int S(w) dw`` over the whole real line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
import warnings

import numpy as np
import scipy.fft
from scipy import integrate

from .errors import ConfigError, DivergentIntegralError, GridError

MAX_SAMPLES = 1 << 22
MAX_FFT_LENGTH = 1 << 25
MODES_PER_FEATURE = 8
DIRECT_MAX_ELEMENTS = 1 << 23

_MODEL_PARAMS = {
    "band-limited-white": ("s0", "omega_max"),
    "lorentzian-pair": ("s0", "omega_c", "gamma"),
    "power-law": ("s0", "k", "omega_lo", "omega_hi"),
    "gaussian-bump": ("s0", "omega_c", "width"),
}


@dataclass(frozen=True)
class Psd:
    """Even, non-negative power spectral density model.

    Use the named constructors rather than building the parameter map by hand.

    ``band-limited-white``
        ``S0`` for ``|w| <= omega_max``, zero outside.
    ``lorentzian-pair``
        ``(S0 gamma^2 / 2) [1/((w - wc)^2 + gamma^2) + 1/((w + wc)^2 + gamma^2)]``.
        Total power ``pi gamma S0``; autocorrelation
        ``pi gamma S0 cos(wc tau) exp(-gamma |tau|)``.
    ``power-law``
        ``S0 |w|^-k`` for ``omega_lo <= |w| <= omega_hi``.
    ``gaussian-bump``
        ``(S0 / 2) [G(w - wc) + G(w + wc)]`` with ``G(u) = exp(-u^2 / (2 width^2))``.
    """

    model: str
    params: tuple[tuple[str, float], ...] = field(default=())

    def __post_init__(self) -> None:
        if self.model not in _MODEL_PARAMS:
            raise ConfigError(f"psd.model must be one of {sorted(_MODEL_PARAMS)}, got {self.model!r}")
        names = _MODEL_PARAMS[self.model]
        given = dict(self.params)
        if set(given) != set(names):
            raise ConfigError(f"psd model {self.model!r} takes parameters {list(names)}, got {sorted(given)}")
        clean = []
        for name in names:
            value = float(given[name])
            if not math.isfinite(value):
                raise ConfigError(f"psd.{name} must be finite")
            if name == "s0" and value < 0:
                raise ConfigError("psd.s0 must be >= 0")
            if name in ("omega_max", "gamma", "width", "omega_hi") and value <= 0:
                raise ConfigError(f"psd.{name} must be > 0")
            if name in ("omega_c", "omega_lo") and value < 0:
                raise ConfigError(f"psd.{name} must be >= 0")
            clean.append((name, value))
        if self.model == "power-law":
            p = dict(clean)
            if p["omega_lo"] >= p["omega_hi"]:
                raise ConfigError("psd.omega_lo must be below psd.omega_hi")
        object.__setattr__(self, "params", tuple(clean))

    # -- constructors -------------------------------------------------------
    @classmethod
    def band_limited_white(cls, s0: float, omega_max: float) -> "Psd":
        return cls("band-limited-white", (("s0", s0), ("omega_max", omega_max)))

    @classmethod
    def lorentzian_pair(cls, s0: float, omega_c: float, gamma: float) -> "Psd":
        return cls("lorentzian-pair", (("s0", s0), ("omega_c", omega_c), ("gamma", gamma)))

    @classmethod
    def power_law(cls, s0: float, k: float, omega_lo: float, omega_hi: float) -> "Psd":
        return cls("power-law", (("s0", s0), ("k", k), ("omega_lo", omega_lo), ("omega_hi", omega_hi)))

    @classmethod
    def gaussian_bump(cls, s0: float, omega_c: float, width: float) -> "Psd":
        return cls("gaussian-bump", (("s0", s0), ("omega_c", omega_c), ("width", width)))

    @classmethod
    def zero(cls) -> "Psd":
        return cls.band_limited_white(0.0, 1.0)

    @classmethod
    def from_dict(cls, data: dict) -> "Psd":
        data = dict(data)
        model = data.pop("model", None)
        if model is None:
            raise ConfigError("psd.model is required")
        return cls(model, tuple(data.items()))

    def to_dict(self) -> dict:
        return {"model": self.model, **dict(self.params)}

    def __getitem__(self, name: str) -> float:
        return dict(self.params)[name]

    def scaled(self, factor: float) -> "Psd":
        """Same shape with ``S0`` multiplied by ``factor`` (for a linear coupling squared)."""
        if factor < 0:
            raise ConfigError("PSD scale factor must be >= 0")
        p = dict(self.params)
        p["s0"] *= factor
        return Psd(self.model, tuple(p.items()))

    # -- evaluation ---------------------------------------------------------
    def __call__(self, omega):
        return evaluate_psd(self, omega)

    @property
    def is_zero(self) -> bool:
        return self["s0"] == 0.0

    def support(self) -> tuple[float, float]:
        """Interval of ``|w|`` outside which S vanishes identically (upper may be inf)."""
        p = dict(self.params)
        if self.model == "band-limited-white":
            return 0.0, p["omega_max"]
        if self.model == "power-law":
            return p["omega_lo"], p["omega_hi"]
        return 0.0, math.inf

    def feature_scale(self) -> float:
        """Narrowest spectral feature, which sets the synthesis grid spacing."""
        p = dict(self.params)
        if self.model == "band-limited-white":
            return p["omega_max"] / 8.0
        if self.model == "lorentzian-pair":
            return p["gamma"]
        if self.model == "gaussian-bump":
            return p["width"]
        return p["omega_lo"] if p["omega_lo"] > 0 else p["omega_hi"] / 64.0

    def breakpoints(self) -> list[float]:
        """Non-negative frequencies where the integrand deserves a segment edge."""
        p = dict(self.params)
        if self.model == "band-limited-white":
            return [p["omega_max"]]
        if self.model == "power-law":
            return [p["omega_lo"], p["omega_hi"]]
        wc = p["omega_c"]
        w = p["gamma"] if self.model == "lorentzian-pair" else p["width"]
        pts = [wc]
        for k in (0.5, 1, 2, 4, 8, 16, 32, 64):
            pts += [wc - k * w, wc + k * w]
        return sorted(x for x in pts if x >= 0)

    def effective_upper(self, rel_tol: float = 1e-10) -> float:
        """Frequency above which the remaining power fraction is below ``rel_tol``."""
        p = dict(self.params)
        lo, hi = self.support()
        if math.isfinite(hi):
            return hi
        if self.model == "lorentzian-pair":
            # tail fraction above wc + L is about gamma / (pi L)
            return p["omega_c"] + p["gamma"] / (math.pi * rel_tol)
        # gaussian-bump
        return p["omega_c"] + p["width"] * math.sqrt(2.0 * math.log(1.0 / rel_tol)) + p["width"]


def evaluate_psd(psd: Psd, omega):
    """S(omega) for scalar or array input; exactly even and non-negative.

    A power law with ``omega_lo = 0`` and ``k > 0`` returns ``inf`` at
    ``omega = 0`` (an integrable point singularity).
    """
    w = np.abs(np.asarray(omega, dtype=float))
    p = dict(psd.params)
    s0 = p["s0"]
    if psd.model == "band-limited-white":
        out = np.where(w <= p["omega_max"], s0, 0.0)
    elif psd.model == "lorentzian-pair":
        wc, g = p["omega_c"], p["gamma"]
        out = 0.5 * s0 * g * g * (1.0 / ((w - wc) ** 2 + g * g) + 1.0 / ((w + wc) ** 2 + g * g))
    elif psd.model == "gaussian-bump":
        wc, s = p["omega_c"], p["width"]
        out = 0.5 * s0 * (np.exp(-0.5 * ((w - wc) / s) ** 2) + np.exp(-0.5 * ((w + wc) / s) ** 2))
    else:
        k, lo, hi = p["k"], p["omega_lo"], p["omega_hi"]
        inside = (w >= lo) & (w <= hi)
        with np.errstate(divide="ignore"):
            vals = s0 * np.power(np.where(w > 0, w, 0.0), -k) if k != 0 else np.full_like(w, s0)
        out = np.where(inside, vals, 0.0)
    out = np.asarray(out, dtype=float)
    return out if out.ndim else float(out)


def _check_finite_power(psd: Psd) -> None:
    if psd.model == "power-law" and psd["omega_lo"] == 0.0 and psd["k"] >= 1.0 and psd["s0"] > 0:
        raise DivergentIntegralError(
            f"power-law PSD with omega_lo = 0 and k = {psd['k']} >= 1 has infinite power")


def total_power_analytic(psd: Psd) -> float:
    """Closed-form ``int S dw`` for the shipped models."""
    _check_finite_power(psd)
    p = dict(psd.params)
    s0 = p["s0"]
    if psd.model == "band-limited-white":
        return 2.0 * s0 * p["omega_max"]
    if psd.model == "lorentzian-pair":
        wc, g = p["omega_c"], p["gamma"]
        # the half-line integral of a pair equals the full-line integral of one peak
        return math.pi * g * s0
    if psd.model == "gaussian-bump":
        return s0 * p["width"] * math.sqrt(2.0 * math.pi)
    k, lo, hi = p["k"], p["omega_lo"], p["omega_hi"]
    if k == 1.0:
        return 2.0 * s0 * math.log(hi / lo)
    return 2.0 * s0 * (hi ** (1.0 - k) - lo ** (1.0 - k)) / (1.0 - k)


def total_power_quadrature(psd: Psd) -> tuple[float, float]:
    """Adaptive quadrature of ``2 int_0^inf S dw``; returns (value, error estimate)."""
    _check_finite_power(psd)
    if psd.is_zero:
        return 0.0, 0.0
    lo, hi = psd.support()
    pts = [x for x in psd.breakpoints() if lo <= x <= hi]
    edges = sorted(set([lo] + pts + ([hi] if math.isfinite(hi) else [])))
    total = err = 0.0
    f = lambda w: evaluate_psd(psd, w)  # noqa: E731
    if psd.model == "power-law" and lo == 0.0 and psd["k"] > 0:
        # algebraic endpoint singularity at 0
        first = integrate.quad(lambda w: psd["s0"], 0.0, edges[1], weight="alg",
                               wvar=(-psd["k"], 0.0))
        total += first[0]
        err += first[1]
        edges = edges[1:]
    for a, b in zip(edges[:-1], edges[1:]):
        val, e = integrate.quad(f, a, b, limit=200, epsabs=0.0, epsrel=1e-12)
        total += val
        err += e
    if not math.isfinite(hi):
        val, e = integrate.quad(f, edges[-1], math.inf, limit=200, epsabs=0.0, epsrel=1e-12)
        total += val
        err += e
    return 2.0 * total, 2.0 * err


def total_power(psd: Psd) -> float:
    """Variance ``int S(w) dw`` of the process.

    Raises
    ------
    DivergentIntegralError
        For a power law with ``omega_lo = 0`` and ``k >= 1``.
    """
    return total_power_analytic(psd)


def power_above(psd: Psd, omega: float) -> float:
    """Two-sided power carried by ``|w| > omega``."""
    _check_finite_power(psd)
    if psd.is_zero:
        return 0.0
    lo, hi = psd.support()
    if omega >= hi:
        return 0.0
    start = max(omega, lo)
    pts = sorted(x for x in psd.breakpoints() if start < x < hi)
    edges = [start] + pts
    f = lambda w: evaluate_psd(psd, w)  # noqa: E731
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += integrate.quad(f, a, b, limit=200)[0]
    total += integrate.quad(f, edges[-1], hi, limit=200)[0]
    return 2.0 * total


def autocorrelation(psd: Psd, tau) -> np.ndarray:
    """Quadrature of ``int S(w) exp(-i w tau) dw`` (real because S is even)."""
    _check_finite_power(psd)
    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    out = np.zeros_like(taus)
    if psd.is_zero:
        return out if np.ndim(tau) else float(out[0])
    lo, hi = psd.support()
    f = lambda w: evaluate_psd(psd, w)  # noqa: E731
    pts = [x for x in psd.breakpoints() if lo <= x <= hi]
    edges = sorted(set([lo] + pts + ([hi] if math.isfinite(hi) else [])))
    for i, t in enumerate(np.abs(taus)):
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            if t == 0.0:
                total += integrate.quad(f, a, b, limit=400)[0]
            else:
                total += integrate.quad(f, a, b, weight="cos", wvar=t, limit=400)[0]
        if not math.isfinite(hi):
            if t == 0.0:
                total += integrate.quad(f, edges[-1], math.inf, limit=400)[0]
            else:
                total += integrate.quad(f, edges[-1], math.inf, weight="cos", wvar=t, limlst=200)[0]
        out[i] = 2.0 * total
    return out if np.ndim(tau) else float(out[0])


# -- synthesis --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NoiseTrace:
    """One realization sampled at ``t_k = k dt``."""

    dt: float
    samples: np.ndarray
    seed: int
    psd: Psd

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size < 2:
            raise GridError("a noise trace needs a 1-D array of at least two samples")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n) * self.dt

    @property
    def duration(self) -> float:
        return (self.n - 1) * self.dt

    def scaled(self, factor: float) -> "NoiseTrace":
        return NoiseTrace(self.dt, factor * self.samples, self.seed, self.psd.scaled(factor**2))

    def __add__(self, other: "NoiseTrace") -> "NoiseTrace":
        if not isinstance(other, NoiseTrace):
            return NotImplemented
        if other.n != self.n or not np.isclose(other.dt, self.dt, rtol=1e-12, atol=0):
            raise GridError("noise traces must share a grid to be added")
        return NoiseTrace(self.dt, self.samples + other.samples, self.seed, self.psd)


def constant_trace(value: float, duration: float, dt: float) -> NoiseTrace:
    """Deterministic constant 'noise', handy for closed-form checks."""
    n = _sample_count(duration, dt)
    return NoiseTrace(dt, np.full(n, float(value)), 0, Psd.zero())


def _sample_count(duration: float, dt: float, cap: int = MAX_SAMPLES) -> int:
    if not (dt > 0 and math.isfinite(dt)):
        raise GridError(f"dt must be positive, got {dt!r}")
    if not duration >= 2 * dt * (1 - 1e-12):
        raise GridError("duration must be at least 2 dt")
    steps = duration / dt
    n = int(round(steps)) + 1
    if n > cap:
        raise GridError(f"duration/dt = {steps:.3g} exceeds the sample cap {cap}")
    return n


@dataclass(frozen=True)
class SynthesisPlan:
    """Mode grid shared by every realization of one (psd, duration, dt).

    ``method`` is ``"fft"`` for the uniform grid ``w_j = (j + 1/2) dw``
    evaluated by one FFT of length ``fft_length``, or ``"direct"`` for an
    adaptive grid of cell midpoints ``omegas`` summed explicitly.
    ``d_omega`` is the largest cell width in either case.
    """

    n: int
    dt: float
    fft_length: int
    d_omega: float
    amplitudes: np.ndarray
    method: str = "fft"
    omegas: np.ndarray | None = None

    @property
    def n_modes(self) -> int:
        return self.amplitudes.size


def _local_scale(psd: Psd, omega: float) -> float:
    """Frequency scale on which S varies near ``omega``."""
    p = dict(psd.params)
    if psd.model == "lorentzian-pair":
        return math.hypot(omega - p["omega_c"], p["gamma"])
    if psd.model == "gaussian-bump":
        return p["width"] if abs(omega - p["omega_c"]) < 8.0 * p["width"] else math.inf
    if psd.model == "power-law":
        return max(omega, p["omega_lo"]) / max(p["k"], 1.0)
    return p.get("omega_max", math.inf) / 8.0


def adaptive_mode_grid(psd: Psd, upper: float, max_width: float,
                       modes_per_feature: int = MODES_PER_FEATURE,
                       max_cells: int | None = None) -> tuple[np.ndarray, np.ndarray] | None:
    """Cell midpoints and widths covering ``[lo, upper]`` with local refinement.

    Each cell is at most ``max_width`` wide and at most ``1/modes_per_feature``
    of the local spectral scale. Cell edges include the PSD breakpoints.
    Returns ``None`` once more than ``max_cells`` cells would be needed.
    """
    lo, hi = psd.support()
    top = min(hi, upper)
    stops = sorted({x for x in psd.breakpoints() if lo < x < top} | {top})
    edges = [lo]
    w = lo
    for stop in stops:
        while w < stop * (1 - 1e-12):
            h = min(max_width, _local_scale(psd, w) / modes_per_feature)
            h = min(h, _local_scale(psd, min(w + h, stop)) / modes_per_feature)
            h = max(h, 1e-6 * max_width)
            w = min(w + h, stop)
            if stop - w < 1e-9 * h:
                w = stop
            edges.append(w)
            if max_cells is not None and len(edges) > max_cells + 1:
                return None
    e = np.asarray(edges)
    return 0.5 * (e[1:] + e[:-1]), np.diff(e)


def plan_synthesis(psd: Psd, duration: float, dt: float,
                   max_samples: int = MAX_SAMPLES,
                   modes_per_feature: int = MODES_PER_FEATURE) -> SynthesisPlan:
    """Choose the mode grid for harmonic-superposition synthesis.

    The uniform grid is ``w_j = (j + 1/2) dw`` for ``j < M/2`` with
    ``dw = 2 pi / (M dt)``, where the FFT length ``M`` (a power of two) is
    large enough that ``dw <= 2 pi / (4 duration)`` and
    ``dw <= feature_scale / modes_per_feature``. When an adaptive grid with
    the same spacing bounds (refined only where S has fine structure) is
    cheaper to sum directly than the FFT, that grid is used instead.
    """
    _check_finite_power(psd)
    n = _sample_count(duration, dt, max_samples)
    max_width = 2.0 * math.pi / (4.0 * duration)
    target_dw = min(max_width, psd.feature_scale() / modes_per_feature)
    m_needed = max(2.0 * math.pi / (target_dw * dt), 2.0 * n)
    m = 1 << max(2, math.ceil(math.log2(m_needed - 1e-9)))
    nyquist = math.pi / dt
    if not psd.is_zero:
        missing = power_above(psd, nyquist)
        total = total_power(psd)
        if missing > 1e-3 * total:
            warnings.warn(f"Nyquist frequency {nyquist:.4g} rad/s leaves {missing / total:.2%} "
                          "of the PSD power unsynthesized", RuntimeWarning, stacklevel=3)
    # direct summation costs ~K n, the FFT ~M log2 M per trace
    budget = min(16.0 * m * math.log2(m) / n, DIRECT_MAX_ELEMENTS / n)
    grid = None if psd.is_zero else adaptive_mode_grid(psd, nyquist, max_width,
                                                       modes_per_feature, int(budget))
    if grid is not None:
        omegas, widths = grid
        amps = 2.0 * np.sqrt(np.asarray(evaluate_psd(psd, omegas)) * widths)
        return SynthesisPlan(n=n, dt=dt, fft_length=0, d_omega=float(widths.max()),
                             amplitudes=amps, method="direct", omegas=omegas)
    if m > MAX_FFT_LENGTH:
        raise GridError(f"synthesis needs an FFT of length {m}, above the cap {MAX_FFT_LENGTH}")
    d_omega = 2.0 * math.pi / (m * dt)
    omegas = (np.arange(m // 2) + 0.5) * d_omega
    amps = 2.0 * np.sqrt(np.asarray(evaluate_psd(psd, omegas)) * d_omega)
    return SynthesisPlan(n=n, dt=dt, fft_length=m, d_omega=d_omega, amplitudes=amps)


def _phases(seed: int, count: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(key=int(seed) & 0xFFFFFFFFFFFFFFFF))
    return 2.0 * np.pi * rng.random(count)


def _direct_batch(plan: SynthesisPlan, seeds: list[int]) -> np.ndarray:
    t = np.arange(plan.n) * plan.dt
    arg = np.outer(plan.omegas, t)
    cos_b, sin_b = np.cos(arg), np.sin(arg)
    phases = np.stack([_phases(s, plan.n_modes) for s in seeds])
    return (plan.amplitudes * np.cos(phases)) @ cos_b - (plan.amplitudes * np.sin(phases)) @ sin_b


def synthesize_batch(plan: SynthesisPlan, seeds) -> np.ndarray:
    """Samples for several seeds at once; row ``i`` depends only on ``seeds[i]``."""
    seeds = [int(s) for s in seeds]
    out = np.empty((len(seeds), plan.n))
    if not np.any(plan.amplitudes):
        out[:] = 0.0
        return out
    if plan.method == "direct":
        return _direct_batch(plan, seeds)
    m = plan.fft_length
    n_modes = plan.n_modes
    twiddle = np.exp(1j * np.pi * np.arange(plan.n) / m)
    rows = max(1, (1 << 21) // m)
    for start in range(0, len(seeds), rows):
        chunk = seeds[start:start + rows]
        coeffs = np.zeros((len(chunk), m), dtype=complex)
        for i, seed in enumerate(chunk):
            coeffs[i, :n_modes] = plan.amplitudes * np.exp(1j * _phases(seed, n_modes))
        series = scipy.fft.ifft(coeffs, axis=-1, norm="forward")[:, :plan.n]
        out[start:start + len(chunk)] = (twiddle * series).real
    return out


def synthesize(psd: Psd, duration: float, dt: float, seed: int,
               max_samples: int = MAX_SAMPLES) -> NoiseTrace:
    """One realization ``x(t_k) = sum_j A_j cos(w_j t_k + phi_j)``.

    ``A_j = 2 sqrt(S(w_j) dw)`` and the phases are uniform on ``[0, 2 pi)``
    from a Philox generator keyed by ``seed``, so the result is a pure
    function of ``(psd, duration, dt, seed)``.

    Raises
    ------
    GridError
        If ``duration / dt`` exceeds ``max_samples``.
    """
    plan = plan_synthesis(psd, duration, dt, max_samples)
    return NoiseTrace(dt, synthesize_batch(plan, [seed])[0], int(seed), psd)


# -- diagnostics ------------------------------------------------------------

@dataclass(frozen=True)
class Autocorrelation:
    """Pooled lag estimates next to the quadrature target."""

    taus: np.ndarray
    estimate: np.ndarray
    stderr: np.ndarray
    target: np.ndarray


def sample_autocorrelation(traces, max_lag: float) -> Autocorrelation:
    """Unbiased lag-averaged autocorrelation pooled over traces.

    Each trace contributes ``R_k = sum_i x_i x_{i+k} / (n - k)``; the
    estimate is the mean over traces and ``stderr`` the standard error of
    that mean.

    Raises
    ------
    ValueError
        With fewer than two traces.
    GridError
        If the traces do not share ``dt`` and length.
    """
    traces = list(traces)
    if len(traces) < 2:
        raise ValueError("sample_autocorrelation needs at least two traces")
    dt, n = traces[0].dt, traces[0].n
    for tr in traces[1:]:
        if tr.n != n or not np.isclose(tr.dt, dt, rtol=1e-12, atol=0):
            raise GridError("traces passed to sample_autocorrelation must share a grid")
    max_k = min(int(math.floor(max_lag / dt + 1e-9)), n - 1)
    data = np.stack([tr.samples for tr in traces])
    size = scipy.fft.next_fast_len(2 * n)
    spectrum = scipy.fft.rfft(data, n=size, axis=-1)
    raw = scipy.fft.irfft(spectrum * np.conj(spectrum), n=size, axis=-1)[:, : max_k + 1]
    per_trace = raw / (n - np.arange(max_k + 1))
    est = per_trace.mean(axis=0)
    err = per_trace.std(axis=0, ddof=1) / math.sqrt(len(traces))
    taus = np.arange(max_k + 1) * dt
    return Autocorrelation(taus, est, err, autocorrelation(traces[0].psd, taus))


def trial_seed(master_seed: int, index: int, stream: int = 0) -> int:
    """64-bit seed of trial ``index``, a pure function of ``(master_seed, index, stream)``.

    ``stream`` separates independent noise sources within one trial (for
    example the two arms under independent coupling); stream 0 is the default.
    """
    key = (int(index),) if stream == 0 else (int(index), int(stream))
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=key)
    return int(ss.generate_state(1, dtype=np.uint64)[0])
