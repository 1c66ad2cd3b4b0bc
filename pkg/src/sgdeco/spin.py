"""Spin-1 Ramsey witness layer.

Basis order throughout is ``(|1>, |0>, |-1>)``. The spatial degrees of
freedom enter only through scalar summaries: the differential phase, its
variance, and the arm-overlap contrast.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

SQRT2 = math.sqrt(2.0)
_TOL = 1e-12


@dataclass(frozen=True)
class SpinDensityMatrix:
    """Validated 3x3 spin density matrix.

    Raises ``ValueError`` unless the matrix is Hermitian, has unit trace and
    has no eigenvalue below ``-1e-12``.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (3, 3):
            raise ValueError(f"spin density matrix must be 3x3, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > _TOL:
            raise ValueError("spin density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > _TOL:
            raise ValueError(f"spin density matrix trace {np.trace(m).real:.15g} != 1")
        if np.min(np.linalg.eigvalsh(m)) < -_TOL:
            raise ValueError("spin density matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in descending order."""
        return np.linalg.eigvalsh(self.matrix)[::-1]

    def operator_matrix(self) -> np.ndarray:
        return self.matrix

    @property
    def coherence(self) -> complex:
        """The ``<1|rho|-1>`` corner element."""
        return complex(self.matrix[0, 2])


def rabi_hamiltonian(omega_p: float = 1.0) -> np.ndarray:
    """Microwave coupling ``Omega_p (|1><0| + |-1><0| + h.c.)`` in units of hbar."""
    return omega_p * np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex)


def rabi_transform() -> np.ndarray:
    """Real orthogonal matrix ``T`` with ``H = T^T diag(sqrt2, 0, -sqrt2) T`` for ``Omega_p = 1``."""
    h = 0.5
    r = 1.0 / SQRT2
    return np.array([[h, r, h], [r, 0.0, -r], [h, -r, h]])


def rabi_propagator(omega_p: float, t: float) -> np.ndarray:
    """``exp(-i H_p t / hbar)`` built from the diagonalisation of :func:`rabi_hamiltonian`."""
    tm = rabi_transform()
    phase = SQRT2 * omega_p * t
    diag = np.diag([np.exp(-1j * phase), 1.0, np.exp(1j * phase)])
    return tm.T @ diag @ tm


def pulse_duration(omega_p: float) -> float:
    """Length ``pi / (2 sqrt2 Omega_p)`` of the pi/2 pulse."""
    if omega_p <= 0:
        raise ValueError("Rabi frequency must be positive")
    return math.pi / (2.0 * SQRT2 * omega_p)


def ramsey_pulse() -> np.ndarray:
    """The pi/2-pulse unitary, entered literally."""
    h = 0.5
    r = 1j / SQRT2
    return np.array([[h, -r, -h], [-r, 0.0, -r], [-h, -r, h]], dtype=complex)


def ramsey_pulse_from_rabi(omega_p: float = 1.0, method: str = "diagonal") -> np.ndarray:
    """Rebuild the pi/2 pulse from the Rabi Hamiltonian.

    Parameters
    ----------
    omega_p : float
        Rabi frequency; the result is independent of it.
    method : {"diagonal", "expm"}
        Use the eigen-decomposition or a generic matrix exponential.
    """
    t_p = pulse_duration(omega_p)
    if method == "diagonal":
        return rabi_propagator(omega_p, t_p)
    if method == "expm":
        return scipy.linalg.expm(-1j * rabi_hamiltonian(omega_p) * t_p)
    raise ValueError(f"unknown method {method!r}")


def ramsey_witness(pulse: np.ndarray | None = None) -> np.ndarray:
    """Witness ``U^dagger |0><0| U``: the population of ``|0>`` after the pulse."""
    u = ramsey_pulse() if pulse is None else np.asarray(pulse, dtype=complex)
    proj = np.zeros((3, 3), dtype=complex)
    proj[1, 1] = 1.0
    return u.conj().T @ proj @ u


def spin_density(phi_diff: float, dephasing_sigma_sq: float = 0.0,
                 contrast: float = 1.0) -> SpinDensityMatrix:
    """Ensemble spin state after recombination.

    Corners are ``C exp(-sigma^2 / 2) exp(-/+ i phi) / 2``; populations stay at 1/2.

    Raises
    ------
    ValueError
        If ``contrast`` is outside ``[0, 1]`` or the variance is negative.
    """
    if not 0.0 <= contrast <= 1.0 + _TOL:
        raise ValueError(f"contrast must lie in [0, 1], got {contrast}")
    if dephasing_sigma_sq < 0:
        raise ValueError(f"dephasing variance must be non-negative, got {dephasing_sigma_sq}")
    c = 0.5 * min(contrast, 1.0) * math.exp(-0.5 * dephasing_sigma_sq)
    m = np.zeros((3, 3), dtype=complex)
    m[0, 0] = m[2, 2] = 0.5
    m[0, 2] = c * np.exp(-1j * phi_diff)
    m[2, 0] = c * np.exp(1j * phi_diff)
    return SpinDensityMatrix(m)


def spin_density_from_decay(phi_diff: float, gamma_total: float) -> SpinDensityMatrix:
    """Spin state whose coherence is suppressed by ``exp(-gamma_total)``."""
    if gamma_total < 0:
        raise ValueError("decay exponent must be non-negative")
    return spin_density(phi_diff, 0.0, math.exp(-gamma_total))


def witness_value(rho: SpinDensityMatrix, witness: np.ndarray | None = None) -> float:
    """``Tr[rho W]``, clipped to ``[0, 1]`` when within 1e-12 of the range."""
    w = ramsey_witness() if witness is None else witness
    val = float(np.real(np.trace(rho.matrix @ w)))
    if -_TOL <= val < 0.0:
        return 0.0
    if 1.0 < val <= 1.0 + _TOL:
        return 1.0
    return val


def ideal_witness(phi_diff: float) -> float:
    """``cos^2(phi / 2)``."""
    return math.cos(0.5 * phi_diff) ** 2


@dataclass(frozen=True)
class WitnessLoss:
    exact: float
    linear: float


def witness_loss(phi_diff: float, sigma_phi_sq: float, sigma_alpha_sq: float = 0.0) -> WitnessLoss:
    """Drop of the Ramsey witness caused by dephasing and contrast loss.

    ``exact = (exp(-s_a - s_p / 2) - 1) cos(phi) / 2`` and its first-order
    expansion ``-(s_a + s_p / 2) cos(phi) / 2``. Pass ``sigma_alpha_sq = 0``
    for noise that couples identically to both arms.
    """
    if sigma_phi_sq < 0 or sigma_alpha_sq < 0:
        raise ValueError("variances must be non-negative")
    cos = math.cos(phi_diff)
    expo = sigma_alpha_sq + 0.5 * sigma_phi_sq
    return WitnessLoss(exact=0.5 * math.expm1(-expo) * cos, linear=-0.5 * expo * cos)


def contrast_gaussian(delta_alpha_plus, delta_alpha_minus):
    """Overlap ``exp(-|da_+ - da_-|^2 / 2)`` of two displaced coherent states. Broadcasts."""
    d = np.asarray(delta_alpha_plus, dtype=complex) - np.asarray(delta_alpha_minus, dtype=complex)
    out = np.exp(-0.5 * np.abs(d) ** 2)
    return float(out) if out.ndim == 0 else out


def spin_purity(contrast: float, sigma_sq: float = 0.0) -> float:
    """Closed-form purity ``(1 + C^2 exp(-sigma^2)) / 2``."""
    return 0.5 * (1.0 + contrast * contrast * math.exp(-sigma_sq))


@dataclass(frozen=True)
class WitnessReport:
    """Witness value with the ingredients that produced it.

    ``contrast`` is the ensemble mean of C; ``contrast_log`` is
    ``exp(-E[-log C])`` when available so the two estimators can be compared.
    """

    witness_value: float
    ideal_value: float
    delta_w: float
    rho: SpinDensityMatrix
    components: dict = field(default_factory=dict)

    def recompute(self) -> float:
        return witness_value(self.rho)

    def to_dict(self) -> dict:
        m = self.rho.matrix
        return {
            "witness_value": self.witness_value,
            "ideal_value": self.ideal_value,
            "delta_w": self.delta_w,
            "components": dict(self.components),
            "rho_real": m.real.tolist(),
            "rho_imag": m.imag.tolist(),
        }


def witness_report(phi_diff: float, sigma_phi_sq: float = 0.0, sigma_alpha_sq: float | None = None,
                   contrast: float | None = None, contrast_log: float | None = None) -> WitnessReport:
    """Assemble a :class:`WitnessReport`.

    If ``contrast`` is omitted it is taken as ``exp(-sigma_alpha_sq)``, the
    mean contrast for two independent arms. Supplying it directly is needed
    for correlated arms.
    """
    s_a = 0.0 if sigma_alpha_sq is None else float(sigma_alpha_sq)
    c = math.exp(-s_a) if contrast is None else float(contrast)
    rho = spin_density(phi_diff, sigma_phi_sq, c)
    val = witness_value(rho)
    ideal = ideal_witness(phi_diff)
    comps = {"sigma_phi_sq": float(sigma_phi_sq), "sigma_alpha_sq": s_a, "contrast": c}
    if contrast_log is not None:
        comps["contrast_log"] = float(contrast_log)
    return WitnessReport(val, ideal, val - ideal, rho, comps)
