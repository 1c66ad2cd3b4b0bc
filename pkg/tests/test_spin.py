import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sgdeco.quantum import purity_and_entropy
from sgdeco.spin import (SpinDensityMatrix, contrast_gaussian, ideal_witness, rabi_propagator,
                         ramsey_pulse, ramsey_pulse_from_rabi, ramsey_witness, spin_density,
                         spin_density_from_decay, spin_purity, witness_loss, witness_report,
                         witness_value)


def test_pulse_is_unitary_and_matches_rabi_evolution():
    u = ramsey_pulse()
    np.testing.assert_allclose(u.conj().T @ u, np.eye(3), atol=1e-14)
    for method in ("diagonal", "expm"):
        np.testing.assert_allclose(ramsey_pulse_from_rabi(0.7, method), u, atol=1e-13)


def test_propagator_group_property():
    a = rabi_propagator(1.0, 0.3) @ rabi_propagator(1.0, 0.4)
    np.testing.assert_allclose(a, rabi_propagator(1.0, 0.7), atol=1e-14)


def test_witness_is_a_projector():
    w = ramsey_witness()
    np.testing.assert_allclose(w @ w, w, atol=1e-14)
    assert np.trace(w).real == pytest.approx(1.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(-10, 10))
def test_cos_squared_law(phi):
    assert witness_value(spin_density(phi)) == pytest.approx(ideal_witness(phi), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(0, 3), st.floats(0, 1))
def test_purity_closed_form(phi, s2, c):
    rho = spin_density(phi, s2, c)
    pur, _ = purity_and_entropy(rho)
    assert pur == pytest.approx(spin_purity(c, s2), abs=1e-12)


def test_decayed_state_entropy_bounds():
    _, s = purity_and_entropy(spin_density_from_decay(0.0, 50.0))
    assert s == pytest.approx(math.log(2), abs=1e-12)
    _, s0 = purity_and_entropy(spin_density_from_decay(0.0, 0.0))
    assert abs(s0) < 1e-10


def test_density_validation():
    with pytest.raises(ValueError):
        SpinDensityMatrix(np.diag([0.6, 0.6, -0.2]))
    with pytest.raises(ValueError):
        spin_density(0.0, -0.1)
    with pytest.raises(ValueError):
        spin_density(0.0, 0.0, 1.5)


def test_witness_loss_exact_and_linear():
    loss = witness_loss(0.0, 0.02)
    assert loss.exact == pytest.approx(0.5 * math.expm1(-0.01))
    assert loss.linear == pytest.approx(-0.005)
    small = witness_loss(0.3, 1e-6, 1e-6)
    assert small.exact == pytest.approx(small.linear, rel=1e-5)


def test_report_consistency():
    rep = witness_report(0.4, 0.1, contrast=0.9)
    assert rep.recompute() == pytest.approx(rep.witness_value, abs=1e-15)
    expected = 0.5 * (1 + 0.9 * math.exp(-0.05) * math.cos(0.4))
    assert rep.witness_value == pytest.approx(expected, abs=1e-12)
    assert rep.to_dict()["delta_w"] == pytest.approx(expected - ideal_witness(0.4))


def test_contrast_gaussian_broadcasts():
    out = contrast_gaussian(np.array([0.0, 1.0]), 0.0)
    np.testing.assert_allclose(out, [1.0, math.exp(-0.5)])
