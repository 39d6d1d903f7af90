"""Composite pulse sequences against leakage in a three-level transmon."""

from .catalog import CatalogEntry, get_entry, load_catalog, regime_defaults
from .metrics import (
    PopulationTriple,
    TargetGate,
    gate_fidelity,
    populations_from_ground,
    single_pulse_reference,
    standard_gate,
    transfer_cost,
)
from .model import (
    ContractError,
    Pulse,
    SystemParams,
    build_hamiltonian,
    level_frequency,
    propagate,
)
from .optimizer import OptimizationProblem, OptimizationResult, objective, optimize, polish
from .scan import EpsilonGrid, EpsilonProfile, robustness_summary, scan_fidelity, scan_populations
from .sequence import CompositeSequence, compose, shift_all_phases, total_area

__version__ = "0.1.0"
