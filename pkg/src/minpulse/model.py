"""Rotating-frame system and control Hamiltonians for chains of coupled qudits.

All frequencies are angular frequencies in rad/ns. Qudit 0 is the leftmost
(most significant) factor in every Kronecker product.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class InvalidDimensionError(ValueError):
    """Operator or qudit dimension is inconsistent or below 2."""


@dataclass(frozen=True)
class QuditSystem:
    """Physical model of a chain of coupled qudits.

    couplings maps 0-based qudit index pairs (p, q), p < q, to the
    dipole-dipole strength J_pq in rad/ns. Symmetric counterparts are
    normalized to the sorted key.
    """

    levels: tuple[int, ...]
    freqs: tuple[float, ...]
    kerr: tuple[float, ...]
    rot_freq: float
    couplings: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        levels = tuple(int(d) for d in self.levels)
        freqs = tuple(float(w) for w in self.freqs)
        kerr = tuple(float(x) for x in self.kerr)
        if len(levels) == 0:
            raise InvalidDimensionError("system needs at least one qudit")
        if any(d < 2 for d in levels):
            raise InvalidDimensionError(f"every qudit needs >= 2 levels, got {levels}")
        if len(freqs) != len(levels) or len(kerr) != len(levels):
            raise ValueError("freqs and kerr must have one entry per qudit")
        values = list(freqs) + list(kerr) + [self.rot_freq] + list(self.couplings.values())
        if not all(math.isfinite(v) for v in values):
            raise ValueError("all frequencies must be finite")
        normalized: dict[tuple[int, int], float] = {}
        for (p, q), j in self.couplings.items():
            if p == q or not (0 <= p < len(levels)) or not (0 <= q < len(levels)):
                raise ValueError(f"invalid coupling pair ({p}, {q})")
            key = (min(p, q), max(p, q))
            if key in normalized and normalized[key] != float(j):
                raise ValueError(f"inconsistent couplings for pair {key}")
            normalized[key] = float(j)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "kerr", kerr)
        object.__setattr__(self, "rot_freq", float(self.rot_freq))
        object.__setattr__(self, "couplings", normalized)

    @property
    def num_qudits(self) -> int:
        return len(self.levels)

    @property
    def dim(self) -> int:
        return int(np.prod(self.levels))


def lowering_operator(d: int) -> np.ndarray:
    """d x d ladder operator with sqrt(k) on the superdiagonal."""
    if d < 2:
        raise InvalidDimensionError(f"lowering operator needs d >= 2, got {d}")
    return np.diag(np.sqrt(np.arange(1, d, dtype=float)), k=1).astype(complex)


def embed_subsystem_op(system: QuditSystem, q: int, op: np.ndarray) -> np.ndarray:
    """Kronecker-embed a single-qudit operator at position q (qudit 0 leftmost)."""
    op = np.asarray(op, dtype=complex)
    if not (0 <= q < system.num_qudits):
        raise ValueError(f"qudit index {q} out of range")
    d = system.levels[q]
    if op.shape != (d, d):
        raise InvalidDimensionError(
            f"operator shape {op.shape} does not match qudit {q} with {d} levels"
        )
    out = np.eye(1, dtype=complex)
    for i, di in enumerate(system.levels):
        out = np.kron(out, op if i == q else np.eye(di, dtype=complex))
    return out


def system_hamiltonian(system: QuditSystem) -> np.ndarray:
    """Time-independent rotating-frame Hamiltonian: detuning, Kerr and coupling terms."""
    n = system.dim
    h = np.zeros((n, n), dtype=complex)
    lowering = [
        embed_subsystem_op(system, q, lowering_operator(d))
        for q, d in enumerate(system.levels)
    ]
    for q in range(system.num_qudits):
        a = lowering[q]
        ad = a.conj().T
        num = ad @ a
        h += (system.freqs[q] - system.rot_freq) * num
        h -= 0.5 * system.kerr[q] * (ad @ ad @ a @ a)
    for (p, q), j in system.couplings.items():
        ap, aq = lowering[p], lowering[q]
        h += j * (ap.conj().T @ aq + ap @ aq.conj().T)
    return h


def control_hamiltonian(system: QuditSystem, drive_values) -> np.ndarray:
    """Drive Hamiltonian sum_q c_q a_q + c_q* a_q^dag for given complex drive values."""
    if len(drive_values) != system.num_qudits:
        raise ValueError(
            f"need {system.num_qudits} drive values, got {len(drive_values)}"
        )
    n = system.dim
    h = np.zeros((n, n), dtype=complex)
    for q, c in enumerate(drive_values):
        a = embed_subsystem_op(system, q, lowering_operator(system.levels[q]))
        h += complex(c) * a + np.conj(complex(c)) * a.conj().T
    return h


def drive_quadrature_ops(system: QuditSystem) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per-qudit Hermitian generators (a+a^dag, i(a-a^dag)) of the two drive quadratures."""
    ops = []
    for q, d in enumerate(system.levels):
        a = embed_subsystem_op(system, q, lowering_operator(d))
        ad = a.conj().T
        ops.append((a + ad, 1j * (a - ad)))
    return ops


def scale_system(system: QuditSystem, s: float) -> QuditSystem:
    """System whose Hamiltonian equals (1/s) times the original one.

    Detunings, Kerr and coupling coefficients are divided by s; the rotating
    frequency is kept, so freqs become rot + (freq - rot)/s.
    """
    if s <= 0:
        raise ValueError("scale factor must be positive")
    return QuditSystem(
        levels=system.levels,
        freqs=tuple(system.rot_freq + (w - system.rot_freq) / s for w in system.freqs),
        kerr=tuple(x / s for x in system.kerr),
        rot_freq=system.rot_freq,
        couplings={k: j / s for k, j in system.couplings.items()},
    )
