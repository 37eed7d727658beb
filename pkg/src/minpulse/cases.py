"""Built-in catalog of benchmark systems and target gates."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import QuditSystem
from .objective import TargetGate

TWO_PI = 2.0 * np.pi


class CaseNotFoundError(KeyError):
    """Unknown benchmark-case name."""


@dataclass(frozen=True)
class TestCase:
    name: str
    system: QuditSystem
    target: TargetGate
    knot_spacing: float                 # nominal Delta_B, ns
    sweep_durations: tuple[float, float]  # default duration range for sweeps, ns

    @property
    def dim(self) -> int:
        return self.system.dim


def _qft4_gate() -> np.ndarray:
    i = 1j
    return 0.5 * np.array(
        [[1, 1, 1, 1],
         [1, i, -1, -i],
         [1, -1, 1, -1],
         [1, -i, -1, i]], dtype=complex)


def _swap02_gate() -> np.ndarray:
    return np.fliplr(np.eye(3, dtype=complex))


def _cnot_gate() -> np.ndarray:
    g = np.eye(4, dtype=complex)
    g[2:, 2:] = [[0, 1], [1, 0]]
    return g


def _ccnot_gate() -> np.ndarray:
    g = np.eye(8, dtype=complex)
    g[6:, 6:] = [[0, 1], [1, 0]]
    return g


def _swap_chain_gate() -> np.ndarray:
    # Permutation exchanging the first and third bit of |b1 b2 b3>,
    # with qubit 1 the most significant bit.
    g = np.zeros((8, 8), dtype=complex)
    for col in range(8):
        b1, b2, b3 = (col >> 2) & 1, (col >> 1) & 1, col & 1
        row = (b3 << 2) | (b2 << 1) | b1
        g[row, col] = 1.0
    return g


def _single(levels: int, freq_ghz: float, kerr_ghz: float, rot_ghz: float) -> QuditSystem:
    return QuditSystem(levels=(levels,), freqs=(TWO_PI * freq_ghz,),
                       kerr=(TWO_PI * kerr_ghz,), rot_freq=TWO_PI * rot_ghz)


def _chain(freqs_ghz, kerr_ghz, rot_ghz, couplings_ghz) -> QuditSystem:
    return QuditSystem(
        levels=(2,) * len(freqs_ghz),
        freqs=tuple(TWO_PI * f for f in freqs_ghz),
        kerr=tuple(TWO_PI * k for k in kerr_ghz),
        rot_freq=TWO_PI * rot_ghz,
        couplings={pair: TWO_PI * j for pair, j in couplings_ghz.items()},
    )


def _build_catalog() -> dict[str, TestCase]:
    return {
        "QFT4": TestCase(
            name="QFT4",
            system=_single(4, 4.914, 0.33, 4.584),
            target=TargetGate(_qft4_gate(), "QFT4"),
            knot_spacing=0.3,
            sweep_durations=(10.0, 40.0),
        ),
        "SWAP02": TestCase(
            name="SWAP02",
            system=_single(3, 5.12, 0.34, 4.78),
            target=TargetGate(_swap02_gate(), "SWAP02"),
            knot_spacing=0.3,
            sweep_durations=(5.0, 40.0),
        ),
        "CNOT": TestCase(
            name="CNOT",
            system=_chain([5.12, 5.06], [0.34, 0.34], 5.09, {(0, 1): 0.005}),
            target=TargetGate(_cnot_gate(), "CNOT"),
            knot_spacing=1.65,
            sweep_durations=(40.0, 110.0),
        ),
        "CCNOT": TestCase(
            name="CCNOT",
            system=_chain([5.18, 5.12, 5.06], [0.34, 0.34, 0.34], 5.12,
                          {(0, 1): 0.005, (1, 2): 0.005}),
            target=TargetGate(_ccnot_gate(), "CCNOT"),
            knot_spacing=1.65,
            sweep_durations=(150.0, 260.0),
        ),
        "SWAP_CHAIN": TestCase(
            name="SWAP_CHAIN",
            system=_chain([5.18, 5.12, 5.06], [0.34, 0.34, 0.34], 5.12,
                          {(0, 1): 0.005, (1, 2): 0.005}),
            target=TargetGate(_swap_chain_gate(), "SWAP_CHAIN"),
            knot_spacing=1.65,
            sweep_durations=(150.0, 280.0),
        ),
    }


_CATALOG = _build_catalog()

CASE_NAMES = tuple(_CATALOG)


def builtin_case(name: str) -> TestCase:
    """Look up one of the built-in benchmark cases by name."""
    try:
        return _CATALOG[name]
    except KeyError:
        raise CaseNotFoundError(
            f"unknown case {name!r}; valid names: {', '.join(CASE_NAMES)}"
        ) from None
