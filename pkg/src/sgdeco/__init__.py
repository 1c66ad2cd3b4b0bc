"""Decoherence of a Stern-Gerlach interferometer under classical stochastic noise.

Monte Carlo ensembles over synthesized noise are paired with linear-response
quadratures and closed-form estimates so that each can check the other.
"""

__version__ = "0.1.0"

from .errors import (ConfigError, DivergentIntegralError, GridError, OutOfRangeError,
                     ScenarioMismatchError, SgdecoError, SingularityError, TruncationError)
from .params import PhysParams
from .noise import (NoiseTrace, Psd, autocorrelation, evaluate_psd, plan_synthesis,
                    sample_autocorrelation, synthesize, synthesize_batch, total_power, trial_seed)
from .dynamics import (ArmTrajectory, delta_alpha, delta_phi, ideal_trajectories,
                       integrate_trajectory, total_derivative_check)
from .response import (TransferFunction, VarianceReport, closed_form_transfer,
                       sigma_alpha_closed_form, sigma_alpha_quadrature, sigma_phi_residue,
                       transfer_closed_form_FN, transfer_from_trajectories, variance_from_psd)
from .quantum import (GaussianArmState, PositionDensityMatrix, coherent_density_matrix,
                      ensemble_oracle, master_evolve, position_grid, purity_and_entropy)
from .spin import (SpinDensityMatrix, ramsey_pulse, ramsey_witness, spin_density, witness_loss,
                   witness_report, witness_value)
from .quadratic import (ermakov_ode_oracle, ermakov_perturbative, quadratic_contrast,
                        quadratic_transfer)
from .harness import (EnsembleStats, ScenarioConfig, ScenarioReport, emit_results, load_config,
                      run_magnetic_scenario, run_scenario)

__all__ = [
    "ConfigError", "DivergentIntegralError", "GridError", "OutOfRangeError",
    "ScenarioMismatchError", "SgdecoError", "SingularityError", "TruncationError",
    "PhysParams",
    "NoiseTrace", "Psd", "autocorrelation", "evaluate_psd", "plan_synthesis",
    "sample_autocorrelation", "synthesize", "synthesize_batch", "total_power", "trial_seed",
    "ArmTrajectory", "delta_alpha", "delta_phi", "ideal_trajectories", "integrate_trajectory",
    "total_derivative_check",
    "TransferFunction", "VarianceReport", "closed_form_transfer", "sigma_alpha_closed_form",
    "sigma_alpha_quadrature", "sigma_phi_residue", "transfer_closed_form_FN",
    "transfer_from_trajectories", "variance_from_psd",
    "GaussianArmState", "PositionDensityMatrix", "coherent_density_matrix", "ensemble_oracle",
    "master_evolve", "position_grid", "purity_and_entropy",
    "SpinDensityMatrix", "ramsey_pulse", "ramsey_witness", "spin_density", "witness_loss",
    "witness_report", "witness_value",
    "ermakov_ode_oracle", "ermakov_perturbative", "quadratic_contrast", "quadratic_transfer",
    "EnsembleStats", "ScenarioConfig", "ScenarioReport", "emit_results", "load_config",
    "run_magnetic_scenario", "run_scenario",
]
