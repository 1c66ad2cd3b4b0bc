import math

import numpy as np
import pytest

from sgdeco import PhysParams, Psd, TruncationError
from sgdeco.dynamics import ideal_trajectories
from sgdeco.response import (TransferFunction, closed_form_transfer, cross_transfers,
                             diffusion_coefficients, residue_master_integral,
                             sigma_alpha_quadrature, sigma_phi_residue, sigma_phi_smooth_limit,
                             transfer_closed_form_FN, transfer_envelope_FN,
                             transfer_from_trajectories, transfer_higher_order, variance_from_psd)


@pytest.mark.parametrize("n", [1, 3, 10])
def test_transfer_limits(n):
    p = PhysParams(n_periods=n, eta=0.5)
    d2 = p.delta_a**2
    assert transfer_closed_form_FN(p, 0.0) == pytest.approx(4 * math.pi**2 * n**2 * d2, rel=1e-14)
    assert transfer_closed_form_FN(p, 1.0) == pytest.approx(math.pi**2 * n**2 * d2, rel=1e-14)
    # continuity across the removable points
    assert transfer_closed_form_FN(p, 1.0 + 1e-7) == pytest.approx(math.pi**2 * n**2 * d2, rel=1e-5)


def test_transfer_zeros_at_lobe_nodes():
    p = PhysParams(n_periods=3)
    w = np.array([1 / 3, 2 / 3, 4 / 3, 2.0])
    assert np.max(np.abs(transfer_closed_form_FN(p, w))) < 1e-25


def test_envelope_slope():
    p = PhysParams()
    w = np.geomspace(10, 100, 50)
    slope = np.polyfit(np.log(w), np.log(transfer_envelope_FN(p, w)), 1)[0]
    assert slope == pytest.approx(-6.0, abs=0.05)


def test_trajectory_transfer_matches_closed_form():
    p = PhysParams(n_periods=3)
    xp, xm = ideal_trajectories(p)
    w = np.linspace(0.0, 2.0, 81)
    tf = transfer_from_trajectories(xp, xm, w)
    ref = transfer_closed_form_FN(p, w)
    assert np.max(np.abs(tf.values - ref)) / np.max(ref) < 1e-6


def test_higher_order_one_is_linear_transfer():
    p = PhysParams()
    xp, xm = ideal_trajectories(p)
    w = np.linspace(0.1, 3, 7)
    np.testing.assert_allclose(transfer_higher_order(xp, xm, 1, w).values,
                               transfer_from_trajectories(xp, xm, w).values, rtol=1e-12)


def test_cross_transfers_combine_to_difference():
    p = PhysParams(bias_accel=0.3)
    xp, xm = ideal_trajectories(p)
    w = np.linspace(0.1, 3, 7)
    c = cross_transfers(xp, xm, omegas=w)
    combo = c["pp"].values + c["mm"].values - 2 * np.real(c["pm"].values)
    np.testing.assert_allclose(combo, transfer_from_trajectories(xp, xm, w).values, rtol=1e-9, atol=1e-12)


def test_white_noise_variance_equals_smooth_limit():
    p = PhysParams(n_periods=2)
    psd = Psd.band_limited_white(0.01, 200.0)
    rep = variance_from_psd(psd, closed_form_transfer(p, [0.0]), (p.m / p.hbar) ** 2)
    assert rep.quadrature_value == pytest.approx(sigma_phi_smooth_limit(p, psd), rel=1e-4)


def test_truncated_tabulated_transfer_raises():
    tf = TransferFunction(np.linspace(0, 1, 11), np.ones(11), "closed-form-FN")
    with pytest.raises(TruncationError):
        variance_from_psd(Psd.band_limited_white(1.0, 10.0), tf)


def test_zero_psd_gives_zero_variance():
    p = PhysParams()
    assert variance_from_psd(Psd.zero(), closed_form_transfer(p, [0.0])).quadrature_value == 0.0


def test_residue_closed_form_value():
    p = PhysParams(n_periods=2, eta=0.5)
    psd = Psd.lorentzian_pair(1.0, 1.0, 0.1)
    s0 = float(psd(1.0))
    assert sigma_phi_residue(p, psd) == pytest.approx(4 * math.pi * 4 * s0)


def test_master_integral_smooth_limit_is_exact_for_flat_psd():
    p = PhysParams(n_periods=2)
    mi = residue_master_integral(Psd.band_limited_white(1.0, 300.0), p)
    assert mi.quadrature == pytest.approx(mi.smooth_limit, rel=1e-4)


def test_sigma_alpha_short_and_long_time():
    p = PhysParams()
    psd = Psd.band_limited_white(1.0, 20.0)
    d1, d2 = diffusion_coefficients(p, psd)
    short = sigma_alpha_quadrature(p, psd, 0.01).quadrature_value / 0.01**2
    assert short == pytest.approx(d1, rel=0.02)
    long = sigma_alpha_quadrature(p, psd, 200.0).quadrature_value / 200.0
    assert long == pytest.approx(d2, rel=0.05)
