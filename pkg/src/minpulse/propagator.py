"""Deterministic unitary time integration with trajectory storage.

Each step applies the exact exponential of the midpoint Hamiltonian,
U_{k+1} = exp(-i dt H(t_k + dt/2)) U_k, via eigendecomposition of the
Hermitian midpoint matrix. The step is exactly unitary, the global error
is O(dt^2).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import controls as ctl
from . import model


@dataclass
class PropagationResult:
    """Unitaries at every step endpoint, (steps+1, N, N), plus the step size."""

    unitaries: np.ndarray
    dt: float

    @property
    def step_count(self) -> int:
        return self.unitaries.shape[0] - 1

    @property
    def U_final(self) -> np.ndarray:
        return self.unitaries[-1]

    def populations(self) -> np.ndarray:
        """|U_ij(t_k)|^2 on the step-endpoint grid."""
        return np.abs(self.unitaries) ** 2


def _drive_samples(control, times: np.ndarray) -> np.ndarray:
    if isinstance(control, ctl.ControlSpline):
        return ctl.basis_matrix(control, times) @ control.alpha_complex
    return np.asarray([complex(control(t)) for t in times])


def hamiltonian_stack(system: model.QuditSystem, control_list, T: float,
                      steps: int) -> np.ndarray:
    """Midpoint Hamiltonians H(t_k + dt/2) stacked as (steps, N, N)."""
    dt = T / steps
    tmid = (np.arange(steps) + 0.5) * dt
    h = np.broadcast_to(model.system_hamiltonian(system),
                        (steps, system.dim, system.dim)).copy()
    quad_ops = model.drive_quadrature_ops(system)
    for q, control in enumerate(control_list):
        c = _drive_samples(control, tmid)
        xop, yop = quad_ops[q]
        h += c.real[:, None, None] * xop + c.imag[:, None, None] * yop
    return h


def step_factors(h_stack: np.ndarray, dt: float):
    """Eigendecompose the midpoint Hamiltonians and form the step unitaries.

    Returns (eigvals (K, N), eigvecs (K, N, N), step unitaries E (K, N, N)).
    """
    lam, vec = np.linalg.eigh(h_stack)
    phase = np.exp(-1j * dt * lam)
    e = (vec * phase[:, None, :]) @ vec.conj().transpose(0, 2, 1)
    return lam, vec, e


def default_step_count(system: model.QuditSystem, control_list, T: float) -> int:
    """Steps so that dt * spectral bound <= 0.1 and >= 20 steps per knot spacing."""
    hsys = model.system_hamiltonian(system)
    bound = float(np.linalg.norm(hsys, 2))
    for q, control in enumerate(control_list):
        if isinstance(control, ctl.ControlSpline):
            cmax = ctl.max_amplitude(control, oversample=4)
        else:
            t = np.linspace(0.0, T, 257)
            cmax = float(np.max(np.abs(_drive_samples(control, t))))
        bound += 2.0 * cmax * np.sqrt(system.levels[q] - 1)
    steps = int(np.ceil(T * bound / 0.1))
    for control in control_list:
        if isinstance(control, ctl.ControlSpline):
            steps = max(steps, int(np.ceil(20.0 * T / control.knot_spacing)))
    return max(steps, 20)


def propagate(system: model.QuditSystem, control_list, T: float,
              steps_hint: int | None = None) -> PropagationResult:
    """Solve dU/dt = -i H(t) U on [0, T] from U(0) = I.

    control_list holds one ControlSpline or callable t -> complex per qudit.
    steps_hint can only increase the automatically chosen step count.
    """
    if len(control_list) != system.num_qudits:
        raise ValueError("need one control per qudit")
    if steps_hint is not None and steps_hint < 1:
        raise ValueError("steps_hint must be >= 1")
    for control in control_list:
        if isinstance(control, ctl.ControlSpline) and not np.isclose(
                control.duration, T, rtol=1e-12, atol=0.0):
            raise ValueError("spline duration must equal the propagation horizon")
    steps = default_step_count(system, control_list, T)
    if steps_hint is not None:
        steps = max(steps, steps_hint)
    h = hamiltonian_stack(system, control_list, T, steps)
    if not np.all(np.isfinite(h)):
        raise FloatingPointError("non-finite Hamiltonian entries")
    dt = T / steps
    _, _, e = step_factors(h, dt)
    n = system.dim
    us = np.empty((steps + 1, n, n), dtype=complex)
    us[0] = np.eye(n)
    for k in range(steps):
        us[k + 1] = e[k] @ us[k]
    return PropagationResult(unitaries=us, dt=dt)


def second_time_derivative(values: np.ndarray, dt: float) -> np.ndarray:
    """Central-difference d^2/dt^2 along axis 0; one-sided at both endpoints."""
    if values.shape[0] < 5:
        raise ValueError("need at least 5 time samples")
    out = np.empty_like(values)
    c = 1.0 / dt ** 2
    out[1:-1] = c * (values[2:] - 2.0 * values[1:-1] + values[:-2])
    out[0] = c * (values[0] - 2.0 * values[1] + values[2])
    out[-1] = c * (values[-1] - 2.0 * values[-2] + values[-3])
    return out


def second_time_derivative_transpose(values: np.ndarray, dt: float) -> np.ndarray:
    """Adjoint of second_time_derivative, needed by the discrete gradient."""
    if values.shape[0] < 5:
        raise ValueError("need at least 5 time samples")
    out = np.zeros_like(values)
    c = 1.0 / dt ** 2
    out[:-2] += c * values[1:-1]
    out[1:-1] -= 2.0 * c * values[1:-1]
    out[2:] += c * values[1:-1]
    out[0] += c * values[0]
    out[1] -= 2.0 * c * values[0]
    out[2] += c * values[0]
    out[-1] += c * values[-1]
    out[-2] -= 2.0 * c * values[-1]
    out[-3] += c * values[-1]
    return out


def trapezoid_weights(num_samples: int, dt: float) -> np.ndarray:
    w = np.full(num_samples, dt)
    w[0] = w[-1] = 0.5 * dt
    return w


def population_penalty(result: PropagationResult, T: float) -> float:
    """(1/2T) * integral of the squared second time-derivative of all populations."""
    pops = result.populations()
    if pops.shape[0] < 5:
        raise ValueError("need at least 5 trajectory samples")
    s = second_time_derivative(pops, result.dt)
    w = trapezoid_weights(pops.shape[0], result.dt)
    return float(np.einsum("k,kij->", w, s * s) / (2.0 * T))
