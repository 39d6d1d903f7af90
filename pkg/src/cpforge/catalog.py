"""Published composite sequences for a delta*T = 0.5 transmon.

Each row is kept exactly as printed (phases in units of pi, Rabi frequencies in
units of pi/T). The printed tuples are read as the left-to-right operator
product, so the *last* printed pulse is the first one applied; this is the only
ordering under which the rows reach their targets in the rotating-frame model.

The X row is printed with its two tuples swapped: its second tuple starts with
the conventional zero phase and its first tuple is the one whose sum matches
the quoted total area, so the first tuple holds the amplitudes.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .metrics import TargetGate, standard_gate
from .sequence import CompositeSequence, dump_sequence

DELTA_T_SINGLE = 20.0
DELTA_T_COMPOSITE = 0.5
SPEEDUP_SINGLE = 40.0

# name: (target, phases/pi, rabis/(pi/T), published area/pi)
_TABLE = {
    "P1": (
        (0.0, 1.0),
        (0, 0.5350, 1.9143, 1.9720, 0.2462, 1.3857),
        (0.1586, 0.6205, 0.4461, 0.4994, 1.0982, 0.8116),
        3.63,
    ),
    "P1half": (
        (0.5, 0.5),
        (0, 0.5003, 1.1833, 1.1037, 1.5215, 0.6296, 0.4988),
        (0.2997, 0.4086, 0.4242, 0.6462, 0.6771, 0.7331, 0.8712),
        4.06,
    ),
    "X": (
        "X",
        (0, 1.1391, 1.5009, 1.7673, 1.0754, 1.5435, 1.0983, 0.0282),
        (0.4318, 0.6684, 0.6746, 0.6175, 1.3619, 0.8914, 1.4236, 0.8910),
        6.96,
    ),
    "H": (
        "H",
        (0, 0.6513, 0.1231, 0.5530, 0.8964, 0.0692, 0.4831),
        (0.8289, 0.9549, 1.1362, 1.2669, 0.8429, 1.4784, 1.0455),
        7.55,
    ),
    "T": (
        "T",
        (0, 0.9232, 1.5599, 1.9209, 0.2637, 1.1305, 0.9090),
        (0.2647, 0.1738, 0.6147, 0.8168, 0.1897, 0.6416, 0.7425),
        3.44,
    ),
}

ALIASES = {
    "P1=1": "P1",
    "P1half": "P1half",
    "P1=1/2": "P1half",
    "P1=0.5": "P1half",
    "P1=½": "P1half",
    "Phalf": "P1half",
}


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    target: object  # (P0, P1) for population transfer, gate name otherwise
    sequence: CompositeSequence
    published_area: float  # units of pi
    printed_phases: tuple
    printed_rabis: tuple

    @property
    def is_gate(self) -> bool:
        return isinstance(self.target, str)

    @property
    def gate(self) -> TargetGate:
        return standard_gate(self.target)

    @property
    def label(self) -> str:
        if self.is_gate:
            return self.target
        return f"P1={self.target[1]:g}"


def _entry(name, delta_T=DELTA_T_COMPOSITE) -> CatalogEntry:
    target, phases, rabis, area = _TABLE[name]
    # printed order is the operator product U_1 U_2 ... U_N; apply last-printed first
    seq = CompositeSequence.from_arrays(
        np.array(rabis[::-1]) * np.pi,
        np.array(phases[::-1]) * np.pi,
        delta_T,
        name=name,
    )
    return CatalogEntry(name, target, seq, area, phases, rabis)


def load_catalog() -> list[CatalogEntry]:
    return [_entry(name) for name in _TABLE]


def catalog_names() -> list[str]:
    return list(_TABLE)


def get_entry(name: str) -> CatalogEntry:
    key = ALIASES.get(name, name)
    if key not in _TABLE:
        raise KeyError(f"unknown catalog sequence {name!r}; choose from {', '.join(_TABLE)}")
    return _entry(key)


def regime_defaults() -> dict:
    return {
        "delta_T_single": DELTA_T_SINGLE,
        "delta_T_composite": DELTA_T_COMPOSITE,
        "speedup_single": SPEEDUP_SINGLE,
    }


def effective_speedup(area_over_pi: float, speedup_single: float = SPEEDUP_SINGLE) -> float:
    """Speed-up of a sequence of total area ``area_over_pi * pi`` relative to a slow pi pulse."""
    return speedup_single / area_over_pi


def export_catalog(directory) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for entry in load_catalog():
        path = directory / f"{entry.name}.json"
        dump_sequence(entry.sequence, path)
        paths.append(path)
    return paths
