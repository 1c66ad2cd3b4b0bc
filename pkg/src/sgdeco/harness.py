"""Scenario configuration, Monte Carlo ensembles and result files."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
import io
import json
import math
from pathlib import Path

import numpy as np
import yaml

from .dynamics import ArmTrajectory, delta_phi, ideal_trajectories, trapezoid_weights
from .errors import ConfigError, ScenarioMismatchError
from .noise import MAX_SAMPLES, Psd, plan_synthesis, synthesize_batch, trial_seed
from .params import PhysParams
from .quadratic import (delta_alpha_quadratic, quadratic_contrast_closed_form, quadratic_transfer,
                        shifted_transfer)
from .response import (closed_form_transfer, cross_transfers, sigma_alpha_closed_form,
                       sigma_alpha_quadrature, sigma_phi_residue, transfer_from_trajectories,
                       transfer_higher_order, variance_from_psd, _transfer_from_samples)
from .spin import ideal_witness

SCHEMA_VERSION = 1
NOISE_KINDS = ("acceleration", "magnetic-gradient", "quadratic")
ARM_CORRELATIONS = ("common-mode", "independent", "anti-correlated")
QUANTITIES = ("delta_phi", "sigma_phi_sq", "dephasing_factor", "abs_delta_alpha_sq",
              "contrast", "contrast_log", "neg_log_contrast", "witness")
UNITS = {"delta_phi": "rad", "sigma_phi_sq": "rad^2", "dephasing_factor": "1",
         "abs_delta_alpha_sq": "1", "contrast": "1", "contrast_log": "1",
         "neg_log_contrast": "1", "witness": "1"}
CSV_HEADER = ("name", "mc_mean", "mc_stderr", "quadrature", "closed_form", "units")
_CONFIG_FIELDS = ("params", "noise_kind", "psd", "n_trials", "t_f", "dt", "master_seed",
                  "arm_correlation", "outputs", "phi_diff")


# -- configuration ------------------------------------------------------------

@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to reproduce one ensemble run.

    ``arm_correlation`` has no default on purpose: how the noise couples to
    the two arms changes every answer, so it must be stated.
    ``t_f`` and ``dt`` default to ``2 pi N / w0`` and ``T0 / 200`` when
    ``None``. The PSD describes ``da`` for acceleration noise, ``d eta`` for
    magnetic-gradient noise and ``d w^2`` for quadratic noise.
    """

    params: PhysParams
    noise_kind: str
    psd: Psd
    n_trials: int
    arm_correlation: str
    master_seed: int = 0
    t_f: float | None = None
    dt: float | None = None
    outputs: tuple[str, ...] = QUANTITIES
    phi_diff: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.params, PhysParams):
            raise ConfigError("params must be a PhysParams")
        if not isinstance(self.psd, Psd):
            raise ConfigError("psd must be a Psd")
        if self.noise_kind not in NOISE_KINDS:
            raise ConfigError(f"noise_kind must be one of {list(NOISE_KINDS)}, got {self.noise_kind!r}")
        if self.arm_correlation not in ARM_CORRELATIONS:
            raise ConfigError(f"arm_correlation must be one of {list(ARM_CORRELATIONS)}, "
                              f"got {self.arm_correlation!r}")
        if self.noise_kind == "magnetic-gradient" and self.arm_correlation != "anti-correlated":
            raise ConfigError("arm_correlation: magnetic-gradient noise pushes the arms in opposite "
                              "directions and must be 'anti-correlated'")
        if self.noise_kind == "quadratic" and self.arm_correlation == "anti-correlated":
            raise ConfigError("arm_correlation: quadratic noise supports 'common-mode' or 'independent'")
        if isinstance(self.n_trials, bool) or int(self.n_trials) != self.n_trials or self.n_trials < 1:
            raise ConfigError(f"n_trials must be a positive integer, got {self.n_trials!r}")
        object.__setattr__(self, "n_trials", int(self.n_trials))
        if isinstance(self.master_seed, bool) or int(self.master_seed) != self.master_seed \
                or not 0 <= int(self.master_seed) < 1 << 64:
            raise ConfigError(f"master_seed must be an unsigned 64-bit integer, got {self.master_seed!r}")
        object.__setattr__(self, "master_seed", int(self.master_seed))
        for name in ("t_f", "dt"):
            val = getattr(self, name)
            if val is not None:
                if not (isinstance(val, (int, float)) and math.isfinite(val) and val > 0):
                    raise ConfigError(f"{name} must be a positive number or null, got {val!r}")
                object.__setattr__(self, name, float(val))
        outs = tuple(self.outputs)
        bad = [q for q in outs if q not in QUANTITIES]
        if bad:
            raise ConfigError(f"outputs: unknown quantities {bad}; choose from {list(QUANTITIES)}")
        object.__setattr__(self, "outputs", outs)
        object.__setattr__(self, "phi_diff", float(self.phi_diff))
        steps = self.final_time / self.step
        if steps + 1 > MAX_SAMPLES:
            raise ConfigError(f"t_f / dt = {steps:.3g} exceeds the sample cap {MAX_SAMPLES}")

    @property
    def final_time(self) -> float:
        return self.params.t_closure if self.t_f is None else self.t_f

    @property
    def step(self) -> float:
        return self.params.period / 200.0 if self.dt is None else self.dt

    @property
    def is_closure(self) -> bool:
        return math.isclose(self.final_time, self.params.t_closure, rel_tol=1e-9)

    def with_overrides(self, seed: int | None = None, trials: int | None = None) -> "ScenarioConfig":
        data = self.to_dict()
        if seed is not None:
            data["master_seed"] = seed
        if trials is not None:
            data["n_trials"] = trials
        return ScenarioConfig.from_dict(data)

    def to_dict(self) -> dict:
        return {"params": self.params.to_dict(), "noise_kind": self.noise_kind,
                "psd": self.psd.to_dict(), "n_trials": self.n_trials, "t_f": self.t_f,
                "dt": self.dt, "master_seed": self.master_seed,
                "arm_correlation": self.arm_correlation, "outputs": list(self.outputs),
                "phi_diff": self.phi_diff}

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        """Build from a plain mapping, reporting the offending field on error."""
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a mapping")
        unknown = set(data) - set(_CONFIG_FIELDS)
        if unknown:
            raise ConfigError(f"unknown configuration field(s) {sorted(unknown)}")
        for req in ("noise_kind", "psd", "n_trials", "arm_correlation"):
            if req not in data:
                raise ConfigError(f"{req} is required")
        try:
            params = PhysParams.from_dict(dict(data.get("params") or {}))
        except TypeError as exc:
            raise ConfigError(f"params: {exc}") from None
        psd_data = data["psd"]
        if not isinstance(psd_data, dict):
            raise ConfigError("psd must be a mapping with a 'model' key")
        kwargs = {k: data[k] for k in ("n_trials", "arm_correlation", "noise_kind")}
        for k in ("master_seed", "t_f", "dt", "phi_diff"):
            if k in data and data[k] is not None:
                kwargs[k] = data[k]
        if "outputs" in data and data["outputs"] is not None:
            kwargs["outputs"] = tuple(data["outputs"])
        return cls(params=params, psd=Psd.from_dict(psd_data), **kwargs)


def load_config(path: str | Path) -> ScenarioConfig:
    """Read a YAML (or JSON) scenario file."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {p}: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{p}: not valid YAML ({exc})") from None
    if isinstance(data, dict) and "config" in data and "schema_version" in data:
        data = data["config"]  # an emitted JSON summary
    return ScenarioConfig.from_dict(data)


# -- statistics ---------------------------------------------------------------

@dataclass(frozen=True)
class QuantityStats:
    mean: float
    variance: float
    stderr: float
    n: int


def sample_stats(values: np.ndarray) -> QuantityStats:
    v = np.asarray(values, dtype=float)
    n = v.size
    var = float(v.var(ddof=1)) if n > 1 else 0.0
    return QuantityStats(float(v.mean()), var, math.sqrt(var / n) if n > 1 else 0.0, n)


def variance_stats(values: np.ndarray) -> QuantityStats:
    """Sample variance as the estimate, stderr from the fourth central moment."""
    v = np.asarray(values, dtype=float)
    n = v.size
    if n < 2:
        return QuantityStats(0.0, 0.0, 0.0, n)
    d = v - v.mean()
    s2 = float(d @ d / (n - 1))
    m4 = float(np.mean(d**4))
    spread = max(m4 - s2 * s2, 0.0)
    return QuantityStats(s2, spread, math.sqrt(spread / n), n)


def phase_factor_stats(dphi: np.ndarray) -> QuantityStats:
    """``|E[exp(i dphi)]|`` with a delta-method standard error."""
    c, s = np.cos(dphi), np.sin(dphi)
    n = dphi.size
    mc, ms = float(c.mean()), float(s.mean())
    mag = math.hypot(mc, ms)
    if n < 2 or mag == 0.0:
        return QuantityStats(mag, 0.0, 0.0, n)
    cov = np.cov(np.vstack([c, s]), ddof=1)
    grad = np.array([mc, ms]) / mag
    var = float(grad @ cov @ grad)
    return QuantityStats(mag, var, math.sqrt(max(var, 0.0) / n), n)


@dataclass(frozen=True)
class EnsembleStats:
    """Per-quantity Monte Carlo statistics in the fixed :data:`QUANTITIES` order."""

    quantities: dict
    n_trials: int

    def __getitem__(self, name: str) -> QuantityStats:
        return self.quantities[name]

    def __contains__(self, name: str) -> bool:
        return name in self.quantities


@dataclass(frozen=True)
class AnalyticValue:
    quadrature: float | None
    closed_form: float | None = None
    quadrature_error: float = 0.0


@dataclass(frozen=True)
class ScenarioReport:
    """Analytic counterparts of the ensemble quantities plus derived checks."""

    config: ScenarioConfig
    analytic: dict
    checks: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> AnalyticValue:
        return self.analytic[name]


# -- per-trial kernels --------------------------------------------------------

def _final_delta_alpha(params: PhysParams, arr: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Linear-response ``d_alpha(t_f)`` for a batch of acceleration traces."""
    w0 = params.omega0
    w = trapezoid_weights(times.size, times[1] - times[0])
    phase = np.exp(1j * w0 * times)
    pref = 1j * math.sqrt(params.m / (2.0 * params.hbar * w0)) * np.exp(-1j * w0 * times[-1])
    return pref * (arr @ (w * phase))


@dataclass
class _TrialArrays:
    dphi: np.ndarray
    d_alpha: np.ndarray


def _batch_seeds(config: ScenarioConfig, start: int, stop: int, stream: int) -> list[int]:
    return [trial_seed(config.master_seed, j, stream) for j in range(start, stop)]


def _run_trials(config: ScenarioConfig, x_plus: ArmTrajectory, x_minus: ArmTrajectory,
                block: int = 512) -> _TrialArrays:
    params = config.params
    times = x_plus.times
    plan = plan_synthesis(config.psd, float(times[-1]), x_plus.dt)
    if plan.n != times.size:
        raise ScenarioMismatchError("synthesis grid does not match the trajectory grid")
    n = config.n_trials
    dphi = np.empty(n)
    dalpha = np.empty(n, dtype=complex)
    kind, corr = config.noise_kind, config.arm_correlation
    coupling = params.g_nv * params.mu_b / params.m
    for start in range(0, n, block):
        stop = min(n, start + block)
        first = synthesize_batch(plan, _batch_seeds(config, start, stop, 0))
        if corr == "independent":
            second = synthesize_batch(plan, _batch_seeds(config, start, stop, 1))
        elif corr == "anti-correlated":
            second = -first
        else:
            second = first
        if kind == "magnetic-gradient":
            first, second = coupling * first, coupling * second
        if kind == "quadratic":
            w = trapezoid_weights(times.size, x_plus.dt)
            weight_p = w * x_plus.x**2
            weight_m = w * x_minus.x**2
            dphi[start:stop] = -(params.m / (2.0 * params.hbar)) * (first @ weight_p - second @ weight_m)
            if corr == "common-mode":
                dalpha[start:stop] = delta_alpha_quadratic(params, first, x_plus, x_minus)
            else:
                dalpha[start:stop] = (delta_alpha_quadratic(params, first, x_plus)
                                      - delta_alpha_quadratic(params, second, x_minus))
        else:
            if corr == "common-mode":
                dphi[start:stop] = delta_phi(params, first, x_plus, x_minus)
                dalpha[start:stop] = 0.0
            else:
                dphi[start:stop] = delta_phi(params, first, x_plus, x_minus, noise_minus=second)
                dalpha[start:stop] = (_final_delta_alpha(params, first, times)
                                      - _final_delta_alpha(params, second, times))
    return _TrialArrays(dphi, dalpha)


def _collect_stats(config: ScenarioConfig, trials: _TrialArrays) -> EnsembleStats:
    dphi, dal = trials.dphi, trials.d_alpha
    abs2 = np.abs(dal) ** 2
    neg_log = 0.5 * abs2
    contrast = np.exp(-neg_log)
    witness = 0.5 * (1.0 + contrast * np.cos(config.phi_diff + dphi))
    nl = sample_stats(neg_log)
    c_log = math.exp(-nl.mean)
    everything = {
        "delta_phi": sample_stats(dphi),
        "sigma_phi_sq": variance_stats(dphi),
        "dephasing_factor": phase_factor_stats(dphi),
        "abs_delta_alpha_sq": sample_stats(abs2),
        "contrast": sample_stats(contrast),
        "contrast_log": QuantityStats(c_log, (c_log * nl.stderr) ** 2 * nl.n, c_log * nl.stderr, nl.n),
        "neg_log_contrast": nl,
        "witness": sample_stats(witness),
    }
    return EnsembleStats({q: everything[q] for q in QUANTITIES if q in config.outputs},
                         config.n_trials)


# -- analytic counterparts ----------------------------------------------------

def _sum_transfer(x_plus: ArmTrajectory, x_minus: ArmTrajectory, power: int = 1):
    span = float(x_plus.times[-1] - x_plus.times[0])
    res = () if x_plus.omega0 is None else (x_plus.omega0,)
    return _transfer_from_samples(x_plus.x**power + x_minus.x**power, x_plus.dt, span,
                                  np.array([0.0]), "higher-order-n", 8, res)


def _dephasing_analytic(config: ScenarioConfig, x_plus, x_minus) -> AnalyticValue:
    params, psd, corr = config.params, config.psd, config.arm_correlation
    kind = config.noise_kind
    closed = None
    if kind == "quadratic":
        pref = (params.m / (2.0 * params.hbar)) ** 2
        if corr == "common-mode":
            tf = transfer_higher_order(x_plus, x_minus, 2, np.array([0.0]))
            rep = variance_from_psd(psd, tf, pref)
        else:
            tfs = cross_transfers(x_plus, x_minus, n=2, omegas=np.array([0.0]))
            a = variance_from_psd(psd, tfs["pp"], pref)
            b = variance_from_psd(psd, tfs["mm"], pref)
            return AnalyticValue(a.quadrature_value + b.quadrature_value, None,
                                 a.quadrature_error + b.quadrature_error)
        return AnalyticValue(rep.quadrature_value, None, rep.quadrature_error)
    pref = (params.m / params.hbar) ** 2
    s = psd
    if kind == "magnetic-gradient":
        s = psd.scaled((params.g_nv * params.mu_b / params.m) ** 2)
    if corr == "common-mode":
        if config.is_closure:
            tf = closed_form_transfer(params, np.array([0.0]))
            closed = sigma_phi_residue(params, s)
        else:
            tf = transfer_from_trajectories(x_plus, x_minus, np.array([0.0]))
        rep = variance_from_psd(s, tf, pref)
        return AnalyticValue(rep.quadrature_value, closed, rep.quadrature_error)
    if corr == "anti-correlated":
        rep = variance_from_psd(s, _sum_transfer(x_plus, x_minus), pref)
        return AnalyticValue(rep.quadrature_value, None, rep.quadrature_error)
    tfs = cross_transfers(x_plus, x_minus, omegas=np.array([0.0]))
    a = variance_from_psd(s, tfs["pp"], pref)
    b = variance_from_psd(s, tfs["mm"], pref)
    return AnalyticValue(a.quadrature_value + b.quadrature_value, None,
                         a.quadrature_error + b.quadrature_error)


def _displacement_analytic(config: ScenarioConfig, x_plus, x_minus) -> AnalyticValue:
    """Analytic ``E|d_alpha_+ - d_alpha_-|^2`` at the final time."""
    params, psd, corr = config.params, config.psd, config.arm_correlation
    kind = config.noise_kind
    if kind == "quadratic":
        w0 = params.omega0
        if corr == "common-mode":
            base = quadratic_transfer(params) if (config.is_closure and params.bias_accel == 0.0) \
                else quadratic_transfer(params, x_plus, x_minus)
            rep = variance_from_psd(psd, shifted_transfer(base, w0))
            closed = 2.0 * quadratic_contrast_closed_form(params, psd) if config.is_closure else None
            return AnalyticValue(rep.quadrature_value, closed, rep.quadrature_error)
        total, err = 0.0, 0.0
        for arm in (x_plus, x_minus):
            rep = variance_from_psd(psd, shifted_transfer(quadratic_transfer(params, arm), w0))
            total += rep.quadrature_value
            err += rep.quadrature_error
        return AnalyticValue(total, None, err)
    if corr == "common-mode":
        return AnalyticValue(0.0, 0.0)
    s = psd
    if kind == "magnetic-gradient":
        s = psd.scaled((params.g_nv * params.mu_b / params.m) ** 2)
    factor = 4.0 if corr == "anti-correlated" else 2.0
    rep = sigma_alpha_quadrature(params, s, config.final_time)
    closed = factor * sigma_alpha_closed_form(params, s) if config.is_closure else None
    if kind == "magnetic-gradient":
        # the printed resonant estimate of -E[log C], doubled back to E|dalpha|^2
        closed = 2.0 * params.m * (params.g_nv * params.mu_b) ** 2 * psd(params.omega0) / (
            params.hbar * params.omega0)
    return AnalyticValue(factor * rep.quadrature_value, closed, factor * rep.quadrature_error)


def _analytic_report(config: ScenarioConfig, x_plus, x_minus, stats: EnsembleStats | None) -> ScenarioReport:
    """Analytic rows.

    ``contrast`` is the mean overlap for a circular Gaussian ``d_alpha``,
    ``1 / (1 + E|d_alpha|^2 / 2)``; ``contrast_log`` is ``exp(-E[-log C])``.
    The two differ at second order in the noise strength.
    """
    deph = _dephasing_analytic(config, x_plus, x_minus)
    disp = _displacement_analytic(config, x_plus, x_minus)

    def half(v):
        return None if v is None else 0.5 * v

    def expo(v):
        return None if v is None else math.exp(-v)

    def circular(v):
        # E exp(-|z|^2 / 2) for a circular complex Gaussian z with E|z|^2 = v
        return None if v is None else 1.0 / (1.0 + 0.5 * v)

    nl = AnalyticValue(half(disp.quadrature), half(disp.closed_form), 0.5 * disp.quadrature_error)
    cos_phi = math.cos(config.phi_diff)

    def witness(s2, c):
        if s2 is None or c is None:
            return None
        return 0.5 * (1.0 + c * math.exp(-0.5 * s2) * cos_phi)

    mean_c = AnalyticValue(circular(disp.quadrature), circular(disp.closed_form))

    everything = {
        "delta_phi": AnalyticValue(0.0, 0.0),
        "sigma_phi_sq": deph,
        "dephasing_factor": AnalyticValue(expo(half(deph.quadrature)), expo(half(deph.closed_form))),
        "abs_delta_alpha_sq": disp,
        "contrast": mean_c,
        "contrast_log": AnalyticValue(expo(nl.quadrature), expo(nl.closed_form)),
        "neg_log_contrast": nl,
        "witness": AnalyticValue(witness(deph.quadrature, mean_c.quadrature),
                                 witness(deph.closed_form, mean_c.closed_form)),
    }
    analytic = {q: everything[q] for q in QUANTITIES if q in config.outputs}
    checks: dict = {"ideal_witness": ideal_witness(config.phi_diff)}
    if stats is not None and "sigma_phi_sq" in stats and "dephasing_factor" in stats:
        s2 = stats["sigma_phi_sq"]
        df = stats["dephasing_factor"]
        predicted = math.exp(-0.5 * s2.mean)
        spread = math.hypot(df.stderr, 0.5 * predicted * s2.stderr)
        checks["gaussian_phase_average"] = {"measured": df.mean, "predicted": predicted,
                                            "stderr_propagated": spread}
    if stats is not None and "contrast" in stats and "neg_log_contrast" in stats:
        checks["contrast_estimators"] = {"mean_contrast": stats["contrast"].mean,
                                         "exp_mean_log": math.exp(-stats["neg_log_contrast"].mean)}
    return ScenarioReport(config, analytic, checks)


# -- drivers ------------------------------------------------------------------

def scenario_trajectories(config: ScenarioConfig) -> tuple[ArmTrajectory, ArmTrajectory]:
    return ideal_trajectories(config.params, config.final_time, config.step)


def run_scenario(config: ScenarioConfig, analytic: bool = True) -> tuple[EnsembleStats, ScenarioReport]:
    """Monte Carlo ensemble and its analytic comparison.

    Trial ``j`` draws its noise from ``trial_seed(master_seed, j)`` (and
    stream 1 for the second arm under independent coupling), so the ensemble
    does not depend on batching or on the order trials are evaluated in.
    """
    x_plus, x_minus = scenario_trajectories(config)
    stats = _collect_stats(config, _run_trials(config, x_plus, x_minus))
    if not analytic:
        return stats, ScenarioReport(config, {}, {})
    return stats, _analytic_report(config, x_plus, x_minus, stats)


def run_magnetic_scenario(config: ScenarioConfig) -> tuple[EnsembleStats, ScenarioReport]:
    """Magnetic-gradient noise: ``da_+- = +-(g mu_B / m) d eta``.

    The dephasing weight is ``x_+ + x_-`` (zero for an unbiased gradient).
    ``neg_log_contrast.closed_form`` is the resonant estimate
    ``m g^2 mu_B^2 S(w0) / (hbar w0)``; the ``checks`` entry
    ``max_abs_delta_phi`` records the largest per-trial phase.
    """
    if config.noise_kind != "magnetic-gradient":
        raise ScenarioMismatchError("run_magnetic_scenario needs noise_kind 'magnetic-gradient'")
    x_plus, x_minus = scenario_trajectories(config)
    trials = _run_trials(config, x_plus, x_minus)
    stats = _collect_stats(config, trials)
    report = _analytic_report(config, x_plus, x_minus, stats)
    checks = dict(report.checks)
    checks["max_abs_delta_phi"] = float(np.max(np.abs(trials.dphi)))
    checks["trajectory_sum_max"] = float(np.max(np.abs(x_plus.x + x_minus.x)))
    return stats, ScenarioReport(config, report.analytic, checks)


# -- serialization ------------------------------------------------------------

def unit_system(params: PhysParams) -> str:
    return "natural" if params.is_natural else "SI"


def _num(v) -> str:
    return "" if v is None else repr(float(v))


def results_csv(stats: EnsembleStats, report: ScenarioReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    system = unit_system(report.config.params)
    for name in QUANTITIES:
        if name not in stats.quantities and name not in report.analytic:
            continue
        st = stats.quantities.get(name)
        an = report.analytic.get(name, AnalyticValue(None))
        writer.writerow([name, _num(st.mean if st else None), _num(st.stderr if st else None),
                         _num(an.quadrature), _num(an.closed_form), f"{UNITS[name]} [{system}]"])
    return buf.getvalue()


def results_json(stats: EnsembleStats, report: ScenarioReport) -> str:
    quantities = {}
    for name in QUANTITIES:
        if name not in stats.quantities and name not in report.analytic:
            continue
        st = stats.quantities.get(name)
        an = report.analytic.get(name, AnalyticValue(None))
        quantities[name] = {
            "mc_mean": st.mean if st else None,
            "mc_variance": st.variance if st else None,
            "mc_stderr": st.stderr if st else None,
            "n": st.n if st else 0,
            "quadrature": an.quadrature,
            "quadrature_error": an.quadrature_error,
            "closed_form": an.closed_form,
            "units": UNITS[name],
        }
    doc = {"schema_version": SCHEMA_VERSION, "unit_system": unit_system(report.config.params),
           "config": report.config.to_dict(), "quantities": quantities, "checks": report.checks}
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def emit_results(stats: EnsembleStats, report: ScenarioReport, fmt: str, path: str | Path) -> None:
    """Write the results table (``csv``) or the full summary (``json``).

    Output bytes depend only on the inputs.

    Raises
    ------
    ValueError
        For an unknown format.
    OSError
        If the destination cannot be written; the message names the path.
    """
    if fmt == "csv":
        text = results_csv(stats, report)
    elif fmt == "json":
        text = results_json(stats, report)
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    write_text(path, text)


def write_text(path: str | Path, text: str) -> None:
    p = Path(path)
    try:
        with open(p, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write results to {p}: {exc.strerror}") from None
