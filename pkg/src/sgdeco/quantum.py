"""Single-arm quantum states: coherent-state evolution, fidelities and position-space decoherence."""

from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Callable

import numpy as np
import scipy.linalg

from .dynamics import ArmTrajectory, delta_alpha_series, trapezoid_weights
from .errors import GridError, OutOfRangeError
from .noise import Psd, evaluate_psd, plan_synthesis, synthesize_batch, trial_seed
from .params import PhysParams

EIGEN_FLOOR = 1e-14


# -- coherent states ----------------------------------------------------------

@dataclass(frozen=True)
class GaussianArmState:
    """Coherent state ``exp(i global_phase) |alpha>`` of one arm.

    The width is the ground-state width fixed by the trap, so the quadrature
    covariance is ``I / 2`` in units where ``x = sqrt(2) Re(alpha)`` and
    ``p = sqrt(2) Im(alpha)``.
    """

    alpha: complex
    global_phase: float = 0.0

    def covariance(self) -> np.ndarray:
        return 0.5 * np.eye(2)

    def mean_quadratures(self) -> np.ndarray:
        return math.sqrt(2.0) * np.array([self.alpha.real, self.alpha.imag])

    def wigner(self, alpha_points) -> np.ndarray:
        """Wigner function, normalised so that ``int W d^2 alpha = 1``."""
        a = np.asarray(alpha_points, dtype=complex)
        return (2.0 / math.pi) * np.exp(-2.0 * np.abs(a - self.alpha) ** 2)

    def wavefunction(self, params: PhysParams, grid) -> np.ndarray:
        return np.exp(1j * self.global_phase) * coherent_wavefunction(params, grid, self.alpha)


def coherent_wavefunction(params: PhysParams, grid, alpha: complex) -> np.ndarray:
    """Position wavefunction of ``D(alpha)|0>``."""
    x = np.asarray(grid, dtype=float)
    ell = params.ground_width
    x_a = math.sqrt(2.0) * ell * alpha.real
    p_a = math.sqrt(2.0) * params.hbar / ell * alpha.imag
    norm = (1.0 / (math.pi * ell * ell)) ** 0.25
    phase = p_a * x / params.hbar - 0.5 * x_a * p_a / params.hbar
    return norm * np.exp(-0.5 * ((x - x_a) / ell) ** 2 + 1j * phase)


def action_phase(params: PhysParams, trajectory: ArmTrajectory, k: int | None = None) -> float:
    """``(1/hbar) int L dt`` with ``L = m v^2/2 - m w0^2 x^2/2 + m a x`` up to sample ``k``."""
    if trajectory.accel is None:
        raise ValueError("the trajectory carries no acceleration; the Lagrangian needs it")
    k = trajectory.n - 1 if k is None else k
    x, v, a = trajectory.x[: k + 1], trajectory.v[: k + 1], trajectory.accel[: k + 1]
    lag = params.m * (0.5 * v * v - 0.5 * params.omega0**2 * x * x + a * x)
    if k == 0:
        return 0.0
    return float(trapezoid_weights(k + 1, trajectory.dt) @ lag) / params.hbar


def evolve_coherent(params: PhysParams, state0: GaussianArmState, trajectory: ArmTrajectory,
                    t: float) -> GaussianArmState:
    """Propagate a coherent state along a driven classical trajectory.

    ``alpha(t) = alpha_c(t) + exp(-i w0 t) (beta0 - alpha_c(0))``. The phase
    follows from the Schrodinger equation for a coherent-state ansatz,
    ``theta(t) = -w0 t / 2 + (m / 2 hbar) int a(s) x_alpha(s) ds``, where
    ``x_alpha`` is the centre of the evolving state. It equals the classical
    action of the centre path minus the boundary term ``m x v / 2 hbar``.

    Raises
    ------
    OutOfRangeError
        If ``t`` is not a sample of the trajectory grid.
    """
    if trajectory.accel is None:
        raise ValueError("the trajectory carries no acceleration; the phase needs it")
    k = trajectory.index_of(t)
    times = trajectory.times[: k + 1]
    w0 = params.omega0
    a0 = complex(trajectory.alpha[0])
    beta0 = complex(state0.alpha)
    path = trajectory.alpha[: k + 1] + np.exp(-1j * w0 * times) * (beta0 - a0)
    x_path = math.sqrt(2.0) * params.ground_width * path.real
    work = 0.0
    if k > 0:
        work = float(trapezoid_weights(k + 1, trajectory.dt) @ (trajectory.accel[: k + 1] * x_path))
    phase = state0.global_phase - 0.5 * w0 * times[-1] + 0.5 * params.m * work / params.hbar
    return GaussianArmState(complex(path[-1]), float(phase))


def coherent_overlap(a: GaussianArmState, b: GaussianArmState) -> complex:
    """``<a|b>`` including global phases."""
    inner = np.exp(-0.5 * abs(a.alpha) ** 2 - 0.5 * abs(b.alpha) ** 2 + np.conj(a.alpha) * b.alpha)
    return complex(np.exp(1j * (b.global_phase - a.global_phase)) * inner)


def single_arm_fidelity(state_ideal: GaussianArmState, delta_alpha: complex) -> float:
    """Overlap modulus between a coherent state and its copy displaced by ``delta_alpha``.

    Equals ``exp(-|delta_alpha|^2 / 2)`` for every ``state_ideal``.
    """
    shifted = GaussianArmState(state_ideal.alpha + delta_alpha, state_ideal.global_phase)
    return float(abs(coherent_overlap(state_ideal, shifted)))


def decoherence_factor(params: PhysParams, sigma_alpha_sq: float, x1, x2):
    """``exp(-(m w0 / hbar) sigma_alpha^2 (x1 - x2)^2)``."""
    if sigma_alpha_sq < 0:
        raise ValueError("sigma_alpha_sq must be >= 0")
    r = np.asarray(x1, dtype=float) - np.asarray(x2, dtype=float)
    out = np.exp(-(params.m * params.omega0 / params.hbar) * sigma_alpha_sq * r * r)
    return out if np.ndim(out) else float(out)


# -- position-space density matrices -----------------------------------------

@dataclass(frozen=True, eq=False)
class PositionDensityMatrix:
    """``rho(x1, x2)`` sampled on a uniform grid; ``sum_i rho_ii dx = 1``."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if g.ndim != 1 or g.size < 2 or v.shape != (g.size, g.size):
            raise GridError("density matrix values must be n x n on an n-point grid")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    @property
    def dx(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def operator_matrix(self) -> np.ndarray:
        """Matrix with unit trace in the grid basis (``rho * dx``)."""
        return self.values * self.dx

    def trace(self) -> float:
        return float(np.real(np.trace(self.values)) * self.dx)

    def purity(self) -> float:
        r = self.operator_matrix()
        return float(np.real(np.vdot(r.conj().T, r)))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.values - self.values.conj().T)))

    def table(self) -> tuple[list[str], np.ndarray]:
        x1, x2 = np.meshgrid(self.grid, self.grid, indexing="ij")
        return (["x1", "x2", "re", "im"],
                np.column_stack([x1.ravel(), x2.ravel(), self.values.real.ravel(),
                                 self.values.imag.ravel()]))


def position_grid(params: PhysParams, n: int = 128, points_per_width: int = 8,
                  center: float = 0.0) -> np.ndarray:
    """Symmetric grid of ``n`` points with spacing ``ground_width / points_per_width``.

    Integer multiples of the ground width are exact separations on this grid.
    """
    dx = params.ground_width / points_per_width
    return center + (np.arange(n) - n // 2) * dx


def coherent_density_matrix(params: PhysParams, grid, alpha: complex = 0.0) -> PositionDensityMatrix:
    psi = coherent_wavefunction(params, grid, complex(alpha))
    return PositionDensityMatrix(np.asarray(grid, dtype=float), np.outer(psi, psi.conj()))


def displaced_mixture(params: PhysParams, grid, alphas, chunk: int = 256) -> PositionDensityMatrix:
    """Equal-weight mixture of coherent states ``|alpha_k><alpha_k|``."""
    alphas = np.asarray(alphas, dtype=complex).ravel()
    if alphas.size == 0:
        raise ValueError("need at least one displacement")
    grid = np.asarray(grid, dtype=float)
    acc = np.zeros((grid.size, grid.size), dtype=complex)
    ell = params.ground_width
    norm = (1.0 / (math.pi * ell * ell)) ** 0.25
    for start in range(0, alphas.size, chunk):
        a = alphas[start:start + chunk, None]
        x_a = math.sqrt(2.0) * ell * a.real
        p_a = math.sqrt(2.0) * params.hbar / ell * a.imag
        psi = norm * np.exp(-0.5 * ((grid[None, :] - x_a) / ell) ** 2
                            + 1j * (p_a * grid[None, :] - 0.5 * x_a * p_a) / params.hbar)
        acc += psi.T @ psi.conj()
    return PositionDensityMatrix(grid, acc / alphas.size)


def kinetic_matrix(params: PhysParams, grid) -> np.ndarray:
    """Sinc-DVR kinetic energy on a uniform grid (spectrally accurate)."""
    grid = np.asarray(grid, dtype=float)
    n = grid.size
    dx = grid[1] - grid[0]
    i = np.arange(n)
    d = i[:, None] - i[None, :]
    with np.errstate(divide="ignore"):
        off = 2.0 * (-1.0) ** d / np.where(d == 0, 1, d) ** 2
    t = np.where(d == 0, math.pi**2 / 3.0, off)
    return params.hbar**2 / (2.0 * params.m * dx * dx) * t


def harmonic_hamiltonian(params: PhysParams, grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    return kinetic_matrix(params, grid) + np.diag(0.5 * params.m * params.omega0**2 * grid**2)


def localisation_rate(params: PhysParams, psd: Psd) -> float:
    """``Lambda = pi m^2 S(w0) / hbar^2`` of the double-commutator dissipator."""
    return math.pi * params.m**2 * evaluate_psd(psd, params.omega0) / params.hbar**2


def energy_expectation(params: PhysParams, rho: PositionDensityMatrix) -> float:
    h = harmonic_hamiltonian(params, rho.grid)
    return float(np.real(np.sum(h * rho.operator_matrix().T)))


def master_evolve(params: PhysParams, rho0: PositionDensityMatrix, psd: Psd | None, t_f: float,
                  dt: float, lam: float | None = None, hamiltonian: bool = True,
                  callback: Callable[[int, float, PositionDensityMatrix], None] | None = None,
                  stride: int = 1) -> PositionDensityMatrix:
    """Integrate ``d rho/dt = -i [H, rho] / hbar - Lambda [x, [x, rho]]`` on a grid.

    Each step is a Strang splitting: half of the exact dephasing factor
    ``exp(-Lambda (x1 - x2)^2 dt)``, one Crank-Nicolson step of the harmonic
    Hamiltonian applied on both indices, and the other half.

    Parameters
    ----------
    psd : Psd or None
        Sets ``Lambda = pi m^2 S(w0) / hbar^2`` unless ``lam`` is given.
    hamiltonian : bool
        ``False`` drops the unitary part (pure dephasing test mode).
    callback : callable, optional
        Called as ``callback(step, t, rho)`` every ``stride`` steps and at the end.

    Raises
    ------
    GridError
        If the grid has fewer than 8 points per ground-state width, or
        ``dt > 0.01 / w0``.
    """
    grid = rho0.grid
    if rho0.dx > params.ground_width / 8.0 * (1 + 1e-12):
        raise GridError(f"grid spacing {rho0.dx:.4g} does not resolve the ground-state width "
                        f"{params.ground_width:.4g} with 8 points")
    if dt > 0.01 / params.omega0 * (1 + 1e-9):
        raise GridError(f"dt = {dt:.4g} exceeds the stability bound 0.01 / omega0")
    if lam is None:
        if psd is None:
            raise ValueError("either psd or lam is required")
        lam = localisation_rate(params, psd)
    n_steps = max(1, int(math.ceil(t_f / dt - 1e-9)))
    h = t_f / n_steps
    r = rho0.operator_matrix().astype(complex)
    sep = grid[:, None] - grid[None, :]
    half_decay = np.exp(-0.5 * lam * sep * sep * h)
    if hamiltonian:
        ham = harmonic_hamiltonian(params, grid)
        eye = np.eye(grid.size)
        a = eye + 0.5j * h / params.hbar * ham
        b = eye - 0.5j * h / params.hbar * ham
        u = scipy.linalg.solve(a, b)
        u_dag = u.conj().T
    dx = rho0.dx
    for step in range(1, n_steps + 1):
        r = r * half_decay
        if hamiltonian:
            r = u @ r @ u_dag
        r = r * half_decay
        if callback is not None and (step % stride == 0 or step == n_steps):
            callback(step, step * h, PositionDensityMatrix(grid, r / dx))
    return PositionDensityMatrix(grid, r / dx)


def ensemble_displacements(params: PhysParams, psd: Psd, t: float, dt: float, n_members: int,
                           master_seed: int) -> np.ndarray:
    """``delta_alpha(t)`` for ``n_members`` independent noise realizations."""
    plan = plan_synthesis(psd, t, dt)
    seeds = [trial_seed(master_seed, j) for j in range(n_members)]
    out = np.empty(n_members, dtype=complex)
    block = 256
    for start in range(0, n_members, block):
        traces = synthesize_batch(plan, seeds[start:start + block])
        out[start:start + traces.shape[0]] = delta_alpha_series(params, traces, plan.dt)[:, -1]
    return out


def ensemble_oracle(params: PhysParams, grid, psd: Psd, t: float, dt: float, n_members: int = 2000,
                    master_seed: int = 0, alpha0: complex = 0.0) -> PositionDensityMatrix:
    """Average of coherent states displaced by sampled ``delta_alpha``.

    The undisturbed state ``alpha0`` rotates freely; each member adds the
    displacement produced by one noise realization. No Markov assumption enters.
    """
    d = ensemble_displacements(params, psd, t, dt, n_members, master_seed)
    centre = complex(alpha0) * np.exp(-1j * params.omega0 * t)
    return displaced_mixture(params, grid, centre + d)


# -- purity and entropy -------------------------------------------------------

def _operator(rho) -> np.ndarray:
    if hasattr(rho, "operator_matrix"):
        return np.asarray(rho.operator_matrix(), dtype=complex)
    return np.asarray(rho, dtype=complex)


def purity_and_entropy(rho) -> tuple[float, float]:
    """Purity ``Tr rho^2`` and von Neumann entropy ``-sum l ln l`` over eigenvalues above 1e-14.

    Accepts a :class:`PositionDensityMatrix`, a spin density matrix, or a
    plain unit-trace matrix.

    Raises
    ------
    ValueError
        For non-Hermitian input.
    """
    r = _operator(rho)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise ValueError("density operator must be a square matrix")
    scale = max(1.0, float(np.max(np.abs(r))))
    if np.max(np.abs(r - r.conj().T)) > 1e-10 * scale:
        raise ValueError("density operator is not Hermitian")
    lam = np.linalg.eigvalsh(0.5 * (r + r.conj().T))
    purity = float(np.sum(lam * lam))
    pos = lam[lam > EIGEN_FLOOR]
    entropy = float(-np.sum(pos * np.log(pos)))
    return purity, entropy


def linear_entropy(rho) -> float:
    """``1 - Tr rho^2``."""
    return 1.0 - purity_and_entropy(rho)[0]
