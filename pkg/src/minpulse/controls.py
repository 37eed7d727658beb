"""Quadratic B-spline pulse parameterization.

A pulse c(t) = p(t) + i q(t) on [0, T] is a sum of N_s shifted copies of a
piecewise-quadratic wavelet on a uniform knot grid with spacing
delta = T / (N_s + 2). Centers sit at t_s = (s + 1.5) * delta for s = 0..N_s-1,
so the pulse starts and ends at exactly zero amplitude.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ControlSpline:
    """One qudit's pulse: coefficient vectors (rad/ns) and duration (ns)."""

    alpha_real: np.ndarray
    alpha_imag: np.ndarray
    duration: float

    def __post_init__(self):
        ar = np.atleast_1d(np.asarray(self.alpha_real, dtype=float))
        ai = np.atleast_1d(np.asarray(self.alpha_imag, dtype=float))
        if ar.ndim != 1 or ar.shape != ai.shape:
            raise ValueError("alpha_real and alpha_imag must be equal-length vectors")
        if ar.size < 1:
            raise ValueError("need at least one basis coefficient")
        if not self.duration > 0:
            raise ValueError(f"duration must be positive, got {self.duration}")
        object.__setattr__(self, "alpha_real", ar)
        object.__setattr__(self, "alpha_imag", ai)
        object.__setattr__(self, "duration", float(self.duration))

    @property
    def num_basis(self) -> int:
        return self.alpha_real.size

    @property
    def knot_spacing(self) -> float:
        return self.duration / (self.num_basis + 2)

    @property
    def alpha_complex(self) -> np.ndarray:
        return self.alpha_real + 1j * self.alpha_imag

    def centers(self) -> np.ndarray:
        """Basis-function centers t_s on [0, T]."""
        d = self.knot_spacing
        return (np.arange(self.num_basis) + 1.5) * d


def eval_wavelet(tau):
    """Normalized quadratic wavelet with support [-1/2, 1/2], C^1 everywhere."""
    tau = np.asarray(tau, dtype=float)
    left = 9.0 / 8.0 + 4.5 * tau + 4.5 * tau * tau
    mid = 0.75 - 9.0 * tau * tau
    right = 9.0 / 8.0 - 4.5 * tau + 4.5 * tau * tau
    out = np.select(
        [
            (tau >= -0.5) & (tau < -1.0 / 6.0),
            (tau >= -1.0 / 6.0) & (tau < 1.0 / 6.0),
            (tau >= 1.0 / 6.0) & (tau < 0.5),
        ],
        [left, mid, right],
        default=0.0,
    )
    return out if out.ndim else float(out)


def basis_matrix(spline: ControlSpline, times) -> np.ndarray:
    """Design matrix B[k, s] = wavelet((t_k - t_s) / (3 delta))."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    d = spline.knot_spacing
    tau = (times[:, None] - spline.centers()[None, :]) / (3.0 * d)
    return eval_wavelet(tau)


def eval_control(spline: ControlSpline, t):
    """Complex pulse value c(t); t may be a scalar or array within [0, T]."""
    tarr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(tarr < 0) or np.any(tarr > spline.duration):
        raise ValueError(f"time outside [0, {spline.duration}]")
    vals = basis_matrix(spline, tarr) @ spline.alpha_complex
    return vals if np.ndim(t) else complex(vals[0])


def scale_control(spline: ControlSpline, s: float) -> ControlSpline:
    """Stretch (s > 1) or compress (s < 1) the pulse, preserving its integral.

    The result has duration s*T and coefficients alpha/s, so that
    c_scaled(s*t) = c(t) / s pointwise.
    """
    if not s > 0:
        raise ValueError(f"scale factor must be positive, got {s}")
    return ControlSpline(
        alpha_real=spline.alpha_real / s,
        alpha_imag=spline.alpha_imag / s,
        duration=s * spline.duration,
    )


def max_amplitude(spline: ControlSpline, oversample: int = 16) -> float:
    """Grid approximation of max |c(t)| over [0, T].

    Samples a uniform grid of oversample * N_s * 3 + 1 points; the true
    maximum of |p + iq| between grid points is not resolved analytically.
    """
    if oversample < 1:
        raise ValueError("oversample must be >= 1")
    npts = oversample * spline.num_basis * 3 + 1
    t = np.linspace(0.0, spline.duration, npts)
    return float(np.max(np.abs(basis_matrix(spline, t) @ spline.alpha_complex)))


def control_integral(spline: ControlSpline) -> complex:
    """Exact integral of c(t) over [0, T]; each basis function integrates to delta."""
    return complex(spline.knot_spacing * np.sum(spline.alpha_complex))


# Interior stencil of the basis-overlap matrix, per unit 11/60 prefactor.
_STENCIL_B = 26.0 / 66.0
_STENCIL_C = 1.0 / 66.0
_PREFACTOR = 11.0 / 60.0


def energy_matrix(num_basis: int) -> np.ndarray:
    """Symmetric penta-diagonal overlap matrix W of the wavelet basis."""
    if num_basis < 1:
        raise ValueError("num_basis must be >= 1")
    w = np.zeros((num_basis, num_basis))
    idx = np.arange(num_basis)
    w[idx, idx] = 1.0
    if num_basis > 1:
        w[idx[:-1], idx[:-1] + 1] = _STENCIL_B
        w[idx[:-1] + 1, idx[:-1]] = _STENCIL_B
    if num_basis > 2:
        w[idx[:-2], idx[:-2] + 2] = _STENCIL_C
        w[idx[:-2] + 2, idx[:-2]] = _STENCIL_C
    return _PREFACTOR * w


def energy_norm(spline: ControlSpline) -> float:
    """Analytic time-averaged pulse power (1/T) * integral of |c(t)|^2."""
    w = energy_matrix(spline.num_basis)
    pref = 3.0 * spline.knot_spacing / spline.duration
    return float(
        pref * (spline.alpha_real @ w @ spline.alpha_real
                + spline.alpha_imag @ w @ spline.alpha_imag)
    )


def energy_gradient(spline: ControlSpline) -> np.ndarray:
    """Gradient of energy_norm w.r.t. [alpha_real, alpha_imag] concatenated."""
    w = energy_matrix(spline.num_basis)
    pref = 3.0 * spline.knot_spacing / spline.duration
    return 2.0 * pref * np.concatenate([w @ spline.alpha_real, w @ spline.alpha_imag])


def num_basis_for(duration: float, knot_spacing: float) -> int:
    """Basis count from a nominal knot spacing: round(T / delta) - 2, at least 1."""
    if knot_spacing <= 0 or duration <= 0:
        raise ValueError("duration and knot spacing must be positive")
    return max(1, int(round(duration / knot_spacing)) - 2)


def coeff_vector(splines) -> np.ndarray:
    """Flatten splines to the optimization layout: per qudit [real..., imag...]."""
    parts = []
    for sp in splines:
        parts.append(sp.alpha_real)
        parts.append(sp.alpha_imag)
    return np.concatenate(parts)


def splines_from_vector(x, duration: float, basis_counts) -> list[ControlSpline]:
    """Inverse of coeff_vector for a shared duration and per-qudit basis counts."""
    x = np.asarray(x, dtype=float)
    if x.size != 2 * sum(basis_counts):
        raise ValueError(
            f"coefficient vector length {x.size} does not match counts {basis_counts}"
        )
    splines = []
    pos = 0
    for ns in basis_counts:
        ar = x[pos:pos + ns]
        ai = x[pos + ns:pos + 2 * ns]
        pos += 2 * ns
        splines.append(ControlSpline(ar, ai, duration))
    return splines
