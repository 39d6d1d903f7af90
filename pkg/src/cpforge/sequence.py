"""Composite pulse sequences and their total propagator."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .model import ContractError, Pulse, SystemParams, check_eps, pulse_propagator


class SequenceFormatError(ValueError):
    """Malformed sequence document."""


@dataclass(frozen=True)
class CompositeSequence:
    """Pulses in order of application (``pulses[0]`` acts first)."""

    pulses: tuple[Pulse, ...]
    params: SystemParams
    name: str | None = None
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "pulses", tuple(self.pulses))
        if not self.pulses:
            raise ContractError("a composite sequence needs at least one pulse")

    def __len__(self):
        return len(self.pulses)

    @property
    def rabis(self) -> np.ndarray:
        return np.array([p.rabi for p in self.pulses])

    @property
    def phases(self) -> np.ndarray:
        return np.array([p.phase for p in self.pulses])

    @property
    def durations(self) -> np.ndarray:
        return np.array([p.duration for p in self.pulses])

    @property
    def delta(self) -> float:
        return self.params.delta

    def with_delta(self, delta: float) -> "CompositeSequence":
        return replace(self, params=replace(self.params, delta=delta))

    def then(self, other: "CompositeSequence") -> "CompositeSequence":
        """Concatenate: ``self`` is applied first, then ``other``."""
        if other.params.delta != self.params.delta:
            raise ContractError("cannot concatenate sequences designed for different anharmonicities")
        return CompositeSequence(self.pulses + other.pulses, self.params, self.name)

    @classmethod
    def from_arrays(cls, rabis, phases, delta: float, durations=None, name=None) -> "CompositeSequence":
        rabis = np.asarray(rabis, dtype=float)
        phases = np.asarray(phases, dtype=float)
        if durations is None:
            durations = np.ones_like(rabis)
        if not (len(rabis) == len(phases) == len(durations)):
            raise ContractError("rabis, phases and durations must have equal length")
        pulses = tuple(Pulse(float(r), float(p), float(d)) for r, p, d in zip(rabis, phases, durations))
        return cls(pulses, SystemParams(delta), name)


def compose(seq: CompositeSequence, eps: float = 0.0) -> np.ndarray:
    """Total propagator ``U_N ... U_2 U_1`` with the common amplitude error ``eps``."""
    check_eps(eps)
    if not seq.pulses:
        raise ContractError("empty sequence")
    U = np.eye(3, dtype=complex)
    for pulse in seq.pulses:
        U = pulse_propagator(pulse, eps, seq.params) @ U
    return U


def total_area(seq: CompositeSequence) -> float:
    """Sum of nominal pulse areas ``rabi * duration`` in radians."""
    return float(sum(p.rabi * p.duration for p in seq.pulses))


def shift_all_phases(seq: CompositeSequence, chi: float) -> CompositeSequence:
    if chi == 0:
        return seq
    pulses = tuple(replace(p, phase=p.phase + chi) for p in seq.pulses)
    return replace(seq, pulses=pulses)


# -- JSON sequence documents ---------------------------------------------------
#
# {"name": str, "delta_T": float,
#  "pulses": [{"rabi_over_pi": float, "phase_over_pi": float, "duration_T": float}, ...]}

def sequence_to_dict(seq: CompositeSequence) -> dict:
    return {
        "name": seq.name or "",
        "delta_T": seq.params.delta,
        "pulses": [
            {
                "rabi_over_pi": p.rabi / np.pi,
                "phase_over_pi": p.phase / np.pi,
                "duration_T": p.duration,
            }
            for p in seq.pulses
        ],
    }


def _number(obj, key, where):
    if key not in obj:
        raise SequenceFormatError(f"{where}: missing field '{key}'")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SequenceFormatError(f"{where}: field '{key}' must be a number, got {value!r}")
    return float(value)


def sequence_from_dict(doc: dict) -> CompositeSequence:
    if not isinstance(doc, dict):
        raise SequenceFormatError("sequence document must be a JSON object")
    delta = _number(doc, "delta_T", "sequence")
    raw = doc.get("pulses")
    if not isinstance(raw, list) or not raw:
        raise SequenceFormatError("sequence: field 'pulses' must be a non-empty list")
    pulses = []
    for i, item in enumerate(raw):
        where = f"pulses[{i}]"
        if not isinstance(item, dict):
            raise SequenceFormatError(f"{where}: expected an object")
        rabi = _number(item, "rabi_over_pi", where) * np.pi
        phase = _number(item, "phase_over_pi", where) * np.pi
        duration = _number(item, "duration_T", where) if "duration_T" in item else 1.0
        try:
            pulses.append(Pulse(rabi, phase, duration))
        except ContractError as exc:
            raise SequenceFormatError(f"{where}: {exc}") from None
    try:
        params = SystemParams(delta)
    except ContractError as exc:
        raise SequenceFormatError(f"sequence: field 'delta_T': {exc}") from None
    name = doc.get("name") or None
    return CompositeSequence(tuple(pulses), params, name)


def dump_sequence(seq: CompositeSequence, path) -> None:
    Path(path).write_text(json.dumps(sequence_to_dict(seq), indent=2) + "\n")


def load_sequence(path) -> CompositeSequence:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SequenceFormatError(f"{path}: invalid JSON ({exc})") from None
    return sequence_from_dict(doc)
