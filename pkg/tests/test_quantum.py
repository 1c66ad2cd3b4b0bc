import math

import numpy as np
import pytest

from sgdeco import GridError, PhysParams, Psd
from sgdeco.quantum import (GaussianArmState, coherent_density_matrix, coherent_overlap,
                            displaced_mixture, energy_expectation, linear_entropy,
                            localisation_rate, master_evolve, position_grid, purity_and_entropy)


@pytest.fixture(scope="module")
def setup():
    p = PhysParams()
    return p, position_grid(p, 96)


def test_coherent_state_is_pure_and_normalised(setup):
    p, grid = setup
    rho = coherent_density_matrix(p, grid, 0.7 - 0.3j)
    assert rho.trace() == pytest.approx(1.0, abs=1e-9)
    assert rho.purity() == pytest.approx(1.0, abs=1e-9)
    assert rho.hermiticity_error() < 1e-14
    pur, ent = purity_and_entropy(rho)
    assert ent < 1e-6 and linear_entropy(rho) == pytest.approx(1 - pur)


def test_coherent_energy(setup):
    p, grid = setup
    a = 0.8
    e = energy_expectation(p, coherent_density_matrix(p, grid, a))
    assert e == pytest.approx(p.hbar * p.omega0 * (a * a + 0.5), rel=1e-6)


@pytest.mark.parametrize("r", [1.0, 2.0])
def test_pure_dephasing_rate(setup, r):
    p, grid = setup
    lam = 0.05
    rho0 = coherent_density_matrix(p, grid, 0.0)
    rho = master_evolve(p, rho0, None, 1.0, 0.01, lam=lam, hamiltonian=False)
    i = int(np.argmin(np.abs(grid - r / 2)))
    j = int(np.argmin(np.abs(grid + r / 2)))
    sep = grid[i] - grid[j]
    ratio = abs(rho.values[i, j] / rho0.values[i, j])
    assert -math.log(ratio) == pytest.approx(lam * sep**2, rel=1e-10)


def test_localisation_rate():
    p = PhysParams(m=2.0)
    psd = Psd.band_limited_white(0.1, 5.0)
    assert localisation_rate(p, psd) == pytest.approx(math.pi * 4 * 0.1)


def test_grid_and_step_guards(setup):
    p, grid = setup
    rho0 = coherent_density_matrix(p, grid, 0.0)
    with pytest.raises(GridError):
        master_evolve(p, rho0, None, 1.0, 0.05, lam=0.0)
    coarse = coherent_density_matrix(p, position_grid(p, 32, points_per_width=4), 0.0)
    with pytest.raises(GridError):
        master_evolve(p, coarse, None, 1.0, 0.01, lam=0.0)


def test_displaced_mixture_purity_drops(setup):
    p, grid = setup
    rng = np.random.default_rng(0)
    alphas = 0.3 * (rng.normal(size=400) + 1j * rng.normal(size=400))
    mix = displaced_mixture(p, grid, alphas)
    assert mix.trace() == pytest.approx(1.0, abs=1e-8)
    assert mix.purity() < 0.9


def test_gaussian_state_overlap():
    a = GaussianArmState(0.2 + 0.1j, 0.0)
    b = GaussianArmState(-0.4 + 0.5j, 0.3)
    assert abs(coherent_overlap(a, b)) ** 2 == pytest.approx(math.exp(-abs(a.alpha - b.alpha) ** 2))
    np.testing.assert_allclose(a.covariance(), 0.5 * np.eye(2))
