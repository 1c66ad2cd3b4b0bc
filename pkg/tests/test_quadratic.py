import math

import numpy as np
import pytest

from sgdeco import PhysParams, Psd, ScenarioMismatchError, SingularityError
from sgdeco.dynamics import ideal_trajectories
from sgdeco.noise import NoiseTrace, constant_trace, synthesize
from sgdeco.quadratic import (SqueezeParams, delta_alpha_quadratic, delta_rho_series,
                              ermakov_ode_oracle, ermakov_perturbative, pinney_series,
                              quadratic_contrast, quadratic_contrast_closed_form,
                              quadratic_transfer, quadratic_transfer_closed_form, squeeze_map,
                              squeeze_unitarity_check)
from sgdeco.quantum import GaussianArmState


def _const(eps, periods=2, per=1000):
    p = PhysParams()
    dt = p.period / per
    return p, constant_trace(eps, periods * p.period, dt)


def test_constant_shift_closed_form():
    p, tr = _const(1e-3)
    rho, _ = delta_rho_series(p, tr)
    t = tr.times
    np.testing.assert_allclose(rho, -(1e-3 / 4) * (1 - np.cos(2 * t)), atol=1e-8)


def test_second_order_scaling_against_ode():
    errs = []
    for eps in (2e-3, 1e-3):
        p, tr = _const(eps)
        pert, _ = delta_rho_series(p, tr)
        ode = ermakov_ode_oracle(p, tr)
        errs.append(np.max(np.abs(ode.delta_rho - pert)))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


def test_ode_invariants():
    p, tr = _const(1e-3)
    sol = ermakov_ode_oracle(p, tr)
    assert np.max(np.abs(sol.wronskian() - p.omega0)) < 1e-9
    np.testing.assert_allclose(sol.rho**2, sol.y1**2 + sol.y2**2, atol=1e-9)


def test_perturbative_wronskian_for_weak_noise():
    p = PhysParams()
    tr = synthesize(Psd.band_limited_white(1e-7, 3.0), 2 * p.period, p.period / 1000, 3)
    sol = ermakov_perturbative(p, tr)
    assert np.max(np.abs(sol.wronskian() - 1.0)) < 1e-5


def test_singular_scale_factor():
    p = PhysParams()
    # a stiff trap squeezes rho towards sqrt(w0 / w) < 0.1
    tr = constant_trace(2e4, 0.2 * p.period, p.period / 50000)
    with pytest.warns(RuntimeWarning), pytest.raises(SingularityError):
        ermakov_ode_oracle(p, tr)


def test_transfer_closed_form_matches_trajectories():
    p = PhysParams(eta=0.5)
    xp, xm = ideal_trajectories(p, dt=p.period / 2000)
    w = np.linspace(0.05, 3.0, 30)
    a = quadratic_transfer(p, xp, xm, w).values
    b = quadratic_transfer_closed_form(p, w)
    assert np.max(np.abs(a - b)) / np.max(b) < 1e-5


def test_contrast_quadrature_vs_monte_carlo():
    p = PhysParams(eta=0.5)
    psd = Psd.lorentzian_pair(1e-2, 1.0, 0.05)
    quad = quadratic_contrast(p, psd, "quadrature")
    mc = quadratic_contrast(p, psd, "monte-carlo", n_trials=4000, master_seed=2)
    assert abs(mc.value - quad.value) < 4 * mc.stderr


def test_closed_form_only_for_closure():
    p = PhysParams(eta=0.5)
    psd = Psd.lorentzian_pair(1.0, 1.0, 0.05)
    assert quadratic_contrast(p, psd, "closed-form").value == pytest.approx(
        quadratic_contrast_closed_form(p, psd))
    with pytest.raises(ScenarioMismatchError):
        quadratic_contrast(p, psd, "closed-form", t_f=1.5 * p.period)


def test_delta_alpha_linear_in_noise():
    p = PhysParams(eta=0.5)
    xp, xm = ideal_trajectories(p)
    rng = np.random.default_rng(1)
    u, v = rng.normal(size=(2, xp.n))
    lhs = delta_alpha_quadratic(p, 2 * u - v, xp, xm)
    rhs = 2 * delta_alpha_quadratic(p, u, xp, xm) - delta_alpha_quadratic(p, v, xp, xm)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_squeeze_map_is_symplectic_and_preserves_overlap():
    sq = SqueezeParams(0.02, -0.01, 1.0)
    s = squeeze_map(sq, 1.0)
    j = np.array([[0, 1], [-1, 0]])
    np.testing.assert_allclose(s @ j @ s.T, j, atol=1e-14)
    pair = (GaussianArmState(0.1 + 0.2j, 0.0), GaussianArmState(-0.3, 0.0))
    assert squeeze_unitarity_check(sq, pair) < 1e-12
