"""Figures of merit: populations, leakage, transfer cost and gate fidelity."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import ContractError, Pulse, SystemParams, unitarity_error
from .sequence import CompositeSequence

DEFAULT_SINGLE_PULSE_DELTA = 20.0


class PopulationTriple(NamedTuple):
    p0: float
    p1: float
    p2: float

    @property
    def leakage(self) -> float:
        return self.p2


@dataclass(frozen=True)
class TargetGate:
    name: str
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ContractError(f"target gate must be 2x2, got shape {m.shape}")
        if unitarity_error(m) > 1e-12:
            raise ContractError(f"target gate {self.name!r} is not unitary")
        object.__setattr__(self, "matrix", m)


_GATES = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]),
}


def standard_gate(name: str) -> TargetGate:
    try:
        return TargetGate(name, _GATES[name].copy())
    except KeyError:
        raise ContractError(f"unknown gate {name!r}; expected one of {sorted(_GATES)}") from None


def populations_from_ground(U: np.ndarray) -> PopulationTriple:
    """Level populations after ``U`` acts on ``|0>``."""
    p = np.abs(np.asarray(U)[:, 0]) ** 2
    return PopulationTriple(float(p[0]), float(p[1]), float(p[2]))


def transfer_cost(U: np.ndarray, targets) -> float:
    """``|P0 - p0| + |P1 - p1|`` for target populations ``targets = (P0, P1)``."""
    P0, P1 = targets
    if not (0 <= P0 <= 1 and 0 <= P1 <= 1):
        raise ContractError(f"target populations must lie in [0, 1], got {targets!r}")
    p = populations_from_ground(U)
    return abs(P0 - p.p0) + abs(P1 - p.p1)


def gate_fidelity(U: np.ndarray, gate: TargetGate) -> float:
    """``0.5 * |Tr(Q G^dagger)|`` with ``Q`` the computational 2x2 block of ``U``.

    Amplitude lost to ``|2>`` shrinks ``Q`` and is penalised directly; no
    renormalisation is applied.
    """
    Q = np.asarray(U)[:2, :2]
    return 0.5 * abs(np.trace(Q @ gate.matrix.conj().T))


def single_pulse_reference(gate_name: str, delta_T: float = DEFAULT_SINGLE_PULSE_DELTA) -> CompositeSequence:
    """Uncorrected one-pulse implementation used as a baseline.

    X is a pi rotation (phase 0); H is a pi/2 rotation with phase pi/2.
    """
    if gate_name == "X":
        pulse = Pulse(np.pi, 0.0)
    elif gate_name == "H":
        pulse = Pulse(np.pi / 2, np.pi / 2)
    else:
        raise ContractError(f"no single-pulse reference for gate {gate_name!r}")
    return CompositeSequence((pulse,), SystemParams(delta_T), f"single-{gate_name}")
