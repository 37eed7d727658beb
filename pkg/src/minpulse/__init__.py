"""minpulse: minimal-duration quantum gate pulses under amplitude bounds.

Synthesizes piecewise-quadratic spline control pulses for coupled-qudit
systems, finding the shortest gate duration whose optimal pulse saturates a
hardware amplitude bound via an outer duration-rescaling iteration around a
penalized L-BFGS solve.
"""

__version__ = "0.1.0"

from .cases import CASE_NAMES, CaseNotFoundError, TestCase, builtin_case
from .controls import (ControlSpline, basis_matrix, coeff_vector,
                       control_integral, energy_gradient, energy_matrix,
                       energy_norm, eval_control, eval_wavelet, max_amplitude,
                       num_basis_for, scale_control, splines_from_vector)
from .model import (InvalidDimensionError, QuditSystem, control_hamiltonian,
                    drive_quadrature_ops, embed_subsystem_op,
                    lowering_operator, scale_system, system_hamiltonian)
from .objective import (ObjectiveBreakdown, TargetGate, Weights, evaluate,
                        gradient, infidelity, make_objective)
from .optimizer import (HistoryRow, OptimizeResult, OptimizerOptions,
                        lbfgs_minimize, projected_gradient_norm,
                        projected_lbfgs_minimize)
from .propagator import (PropagationResult, default_step_count,
                         population_penalty, propagate)
from .sweep import SweepRow, sweep_constrained, sweep_unconstrained_cmax
from .timescale import (TimeScaleOptions, TimeScaleRecord, initial_guess,
                        inner_step_count, minimize_gate_duration,
                        pulse_max_amplitude)

__all__ = [
    "CASE_NAMES", "CaseNotFoundError", "TestCase", "builtin_case",
    "ControlSpline", "basis_matrix", "coeff_vector", "control_integral",
    "energy_gradient", "energy_matrix", "energy_norm", "eval_control",
    "eval_wavelet", "max_amplitude", "num_basis_for", "scale_control",
    "splines_from_vector",
    "InvalidDimensionError", "QuditSystem", "control_hamiltonian",
    "drive_quadrature_ops", "embed_subsystem_op", "lowering_operator",
    "scale_system", "system_hamiltonian",
    "ObjectiveBreakdown", "TargetGate", "Weights", "evaluate", "gradient",
    "infidelity", "make_objective",
    "HistoryRow", "OptimizeResult", "OptimizerOptions", "lbfgs_minimize",
    "projected_gradient_norm", "projected_lbfgs_minimize",
    "PropagationResult", "default_step_count", "population_penalty",
    "propagate",
    "SweepRow", "sweep_constrained", "sweep_unconstrained_cmax",
    "TimeScaleOptions", "TimeScaleRecord", "initial_guess",
    "inner_step_count", "minimize_gate_duration", "pulse_max_amplitude",
    "__version__",
]
