import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sgdeco import OutOfRangeError, PhysParams, Psd, synthesize
from sgdeco.dynamics import (constant_drive, delta_alpha, delta_alpha_series, delta_phi,
                             ideal_trajectories, integrate_trajectory, time_grid,
                             total_derivative_check)
from sgdeco.noise import constant_trace


def test_ideal_arms_close_after_whole_periods():
    p = PhysParams(n_periods=2, eta=0.7)
    xp, xm = ideal_trajectories(p)
    assert xp.x[0] == 0.0 and abs(xp.x[-1]) < 1e-12 and abs(xm.v[-1]) < 1e-12
    assert np.max(xp.x) == pytest.approx(2 * p.a_plus)
    np.testing.assert_allclose(xm.x, -xp.x)


def test_rk4_reproduces_closed_form_arm():
    p = PhysParams()
    t = time_grid(p.t_closure, p.period / 400)
    arm = integrate_trajectory(p, t, constant_drive(p, "plus", t))
    xp, _ = ideal_trajectories(p, dt=p.period / 400)
    assert np.max(np.abs(arm.x - xp.x)) < 1e-8


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 1000))
def test_delta_phi_is_linear_in_noise(a, b, seed):
    p = PhysParams()
    xp, xm = ideal_trajectories(p)
    n = xp.n
    rng = np.random.default_rng(seed)
    u, v = rng.normal(size=n), rng.normal(size=n)
    lhs = delta_phi(p, a * u + b * v, xp, xm)
    rhs = a * delta_phi(p, u, xp, xm) + b * delta_phi(p, v, xp, xm)
    assert lhs == pytest.approx(rhs, abs=1e-9)


def test_constant_noise_phase_closed_form():
    # constant da over one period: (m/hbar) da int (x+ - x-) dt = (m/hbar) da dA T
    p = PhysParams(eta=0.5)
    xp, xm = ideal_trajectories(p)
    phase = delta_phi(p, 0.01 * np.ones(xp.n), xp, xm)
    assert phase == pytest.approx(0.01 * p.delta_a * p.period, rel=1e-10)


def test_anti_correlated_weight_vanishes_for_symmetric_arms():
    p = PhysParams()
    xp, xm = ideal_trajectories(p)
    u = np.random.default_rng(0).normal(size=xp.n)
    assert abs(delta_phi(p, u, xp, xm, noise_minus=-u)) < 1e-12


def test_delta_alpha_matches_perturbed_trajectory():
    p = PhysParams()
    dt = p.period / 800
    t = time_grid(p.t_closure, dt)
    noise = synthesize(Psd.band_limited_white(1e-3, 4.0), float(t[-1]), float(t[1] - t[0]), 4)
    ideal = integrate_trajectory(p, t, constant_drive(p, "plus", t))
    pert = integrate_trajectory(p, t, constant_drive(p, "plus", t), noise)
    d_alpha_traj = pert.alpha[-1] - ideal.alpha[-1]
    assert delta_alpha(p, noise, float(t[-1])) == pytest.approx(d_alpha_traj, abs=1e-5 * abs(d_alpha_traj) + 1e-9)
    series = delta_alpha_series(p, noise)
    assert series[-1] == pytest.approx(delta_alpha(p, noise, float(t[-1])), abs=1e-12)


def test_delta_alpha_off_grid_time():
    tr = constant_trace(1.0, 1.0, 0.1)
    with pytest.raises(OutOfRangeError):
        delta_alpha(PhysParams(), tr, 0.55)


def test_total_derivative_identity():
    p = PhysParams()
    t = time_grid(p.t_closure, p.period / 400)
    noise = synthesize(Psd.band_limited_white(1e-4, 5.0), float(t[-1]), float(t[1] - t[0]), 8)
    ideal = integrate_trajectory(p, t, constant_drive(p, "plus", t))
    pert = integrate_trajectory(p, t, constant_drive(p, "plus", t), noise)
    channel, boundary = total_derivative_check(p, ideal, pert)
    assert abs(channel - boundary) < 1e-8
