"""Fast invariant checks run by ``sgdeco validate``.

Each check is a small deterministic computation compared against an exact
identity. The whole suite takes a few seconds.
"""
from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Callable

import numpy as np

from .dynamics import ideal_trajectories, integrate_trajectory, constant_drive, time_grid, \
    total_derivative_check
from .noise import NoiseTrace, Psd, constant_trace, evaluate_psd, synthesize, total_power, \
    total_power_quadrature, trial_seed
from .params import PhysParams
from .quadratic import (SqueezeParams, delta_rho_series, ermakov_ode_oracle,
                        squeeze_unitarity_check)
from .quantum import (GaussianArmState, coherent_density_matrix, master_evolve, position_grid,
                      purity_and_entropy)
from .response import transfer_closed_form_FN, transfer_from_trajectories
from .spin import (ideal_witness, ramsey_pulse, ramsey_pulse_from_rabi, ramsey_witness,
                   spin_density, spin_purity, witness_value)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.value:.3e} (tol {self.tolerance:.1e})"


def _result(name: str, value: float, tol: float) -> CheckResult:
    return CheckResult(name, bool(value <= tol), float(value), tol)


def check_psd_even_and_power() -> CheckResult:
    psd = Psd.lorentzian_pair(1.0, 1.0, 0.1)
    w = np.linspace(0.0, 20.0, 101)
    even = float(np.max(np.abs(np.asarray(evaluate_psd(psd, w)) - np.asarray(evaluate_psd(psd, -w)))))
    quad, _ = total_power_quadrature(psd)
    return _result("psd evenness and total power", even + abs(quad / total_power(psd) - 1.0), 1e-8)


def check_synthesis_determinism() -> CheckResult:
    psd = Psd.band_limited_white(1.0, 5.0)
    seed = trial_seed(7, 3)
    a = synthesize(psd, 20.0, 0.05, seed).samples
    b = synthesize(psd, 20.0, 0.05, seed).samples
    return _result("synthesis is a pure function of the seed", float(np.max(np.abs(a - b))), 0.0)


def check_transfer_plateau_and_resonance() -> CheckResult:
    p = PhysParams(n_periods=3, eta=0.5)
    dA2 = p.delta_a**2
    plateau = transfer_closed_form_FN(p, 1e-4 * p.omega0) / (4 * math.pi**2 * 9 * dA2 / p.omega0**2)
    res = transfer_closed_form_FN(p, p.omega0) / (math.pi**2 * 9 * dA2 / p.omega0**2)
    return _result("transfer plateau and resonance limits", abs(plateau - 1) + abs(res - 1), 1e-6)


def check_transfer_fft_matches_closed_form() -> CheckResult:
    p = PhysParams(n_periods=2)
    xp, xm = ideal_trajectories(p, dt=p.period / 2000)
    w = np.linspace(0.05, 2.0, 40) * p.omega0
    tf = transfer_from_trajectories(xp, xm, w)
    ref = transfer_closed_form_FN(p, w)
    err = float(np.max(np.abs(tf.values - ref)) / np.max(ref))
    return _result("trajectory transfer vs closed form", err, 1e-5)


def check_ramsey_layer() -> CheckResult:
    u = ramsey_pulse()
    unit = float(np.max(np.abs(u.conj().T @ u - np.eye(3))))
    rebuilt = float(np.max(np.abs(ramsey_pulse_from_rabi(1.3) - u)))
    w = ramsey_witness()
    law = max(abs(witness_value(spin_density(phi), w) - ideal_witness(phi))
              for phi in np.linspace(0.0, 2 * math.pi, 25))
    return _result("Ramsey pulse unitarity and cos^2 law", unit + rebuilt + law, 1e-12)


def check_spin_purity() -> CheckResult:
    rho = spin_density(0.4, 0.3, 0.8)
    pur, _ = purity_and_entropy(rho.matrix)
    return _result("spin purity from eigenvalues", abs(pur - spin_purity(0.8, 0.3)), 1e-12)


def check_common_mode_contrast() -> CheckResult:
    from .harness import ScenarioConfig, run_scenario
    cfg = ScenarioConfig(PhysParams(), "acceleration", Psd.band_limited_white(0.01, 10.0), 64,
                         "common-mode")
    stats, _ = run_scenario(cfg, analytic=False)
    return _result("common-mode contrast stays 1", abs(stats["contrast"].mean - 1.0), 1e-12)


def check_magnetic_zero_phase() -> CheckResult:
    from .harness import ScenarioConfig, run_magnetic_scenario
    cfg = ScenarioConfig(PhysParams(), "magnetic-gradient", Psd.band_limited_white(0.01, 10.0), 64,
                         "anti-correlated")
    _, report = run_magnetic_scenario(cfg)
    return _result("magnetic gradient leaves no phase", report.checks["max_abs_delta_phi"], 1e-10)


def check_total_derivative() -> CheckResult:
    p = PhysParams()
    t = time_grid(p.t_closure, p.period / 400)
    ideal = integrate_trajectory(p, t, constant_drive(p, "plus", t))
    noise = synthesize(Psd.band_limited_white(1e-4, 5.0), float(t[-1]), float(t[1] - t[0]), 11)
    pert = integrate_trajectory(p, t, constant_drive(p, "plus", t), noise)
    channel, boundary = total_derivative_check(p, ideal, pert)
    scale = p.m * float(np.max(np.abs(ideal.v))) * float(np.max(np.abs(pert.x - ideal.x)))
    return _result("trajectory channel is a boundary term", abs(channel - boundary) / scale, 1e-6)


def check_master_trace_purity() -> CheckResult:
    p = PhysParams()
    grid = position_grid(p, 64)
    rho0 = coherent_density_matrix(p, grid, 0.5)
    rho = master_evolve(p, rho0, None, p.period, 0.01, lam=0.0)
    err = abs(rho.trace() - rho0.trace()) + abs(rho.purity() - rho0.purity())
    return _result("unitary master step conserves trace and purity", err, 1e-6)


def check_ermakov_first_order() -> CheckResult:
    p = PhysParams()
    dt = p.period / 1000
    n = int(round(2 * p.period / dt)) + 1
    trace = constant_trace(1e-3, (n - 1) * dt, dt)
    pert, _ = delta_rho_series(p, trace)
    ode = ermakov_ode_oracle(p, trace)
    err = float(np.max(np.abs(ode.delta_rho - pert)) / np.max(np.abs(ode.delta_rho)))
    return _result("first-order scale factor vs Ermakov ODE", err, 1e-2)


def check_squeeze_overlap() -> CheckResult:
    sq = SqueezeParams(0.01, -0.02, 1.0)
    pair = (GaussianArmState(0.3 + 0.1j, 0.0), GaussianArmState(-0.2 + 0.4j, 0.0))
    return _result("squeeze preserves arm overlap", squeeze_unitarity_check(sq, pair), 1e-8)


CHECKS: tuple[Callable[[], CheckResult], ...] = (
    check_psd_even_and_power, check_synthesis_determinism, check_transfer_plateau_and_resonance,
    check_transfer_fft_matches_closed_form, check_ramsey_layer, check_spin_purity,
    check_common_mode_contrast, check_magnetic_zero_phase, check_total_derivative,
    check_master_trace_purity, check_ermakov_first_order, check_squeeze_overlap,
)


def run_validation() -> list[CheckResult]:
    return [check() for check in CHECKS]
