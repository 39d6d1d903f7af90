"""Multi-start Nelder-Mead search for robust composite sequences.

Each start runs a restarted Nelder-Mead descent, optionally followed by a
finite-difference SLSQP refinement of the same minimax problem.

The objective is the worst case over an eps grid of the per-eps error
(``1 - F`` for gates, the transfer cost for populations) plus an area
penalty ``area_weight * area / pi``.

Parameter vector layout: ``[rabi_1 .. rabi_N, phase_g .. phase_N]`` where
``g = 2`` when the first phase is gauge-fixed to zero and ``g = 1`` otherwise.
Fixing the first phase is exact for population transfer and for diagonal target
gates; for non-diagonal gates a common phase shift changes the gate, so every
phase stays free.
"""

from __future__ import annotations

import json
import logging
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from . import _kernels
from .metrics import TargetGate, standard_gate
from .model import ContractError
from .scan import EpsilonGrid
from .sequence import CompositeSequence, shift_all_phases, total_area

log = logging.getLogger(__name__)

DEFAULT_AREA_WEIGHT = 0.02
DEFAULT_RABI_MAX = 2 * np.pi
TIE_TOL = 1e-12  # objectives closer than this are treated as equal


class ProblemFormatError(ValueError):
    """Malformed optimisation problem document."""


class ClampWarning(UserWarning):
    """A candidate had amplitudes outside the bounds and was clamped."""


@dataclass(frozen=True)
class OptimizationProblem:
    mode: str  # "transfer" or "gate"
    n_pulses: int
    delta_T: float
    eps_grid: EpsilonGrid | tuple = EpsilonGrid(-0.1, 0.1, 21)
    targets: tuple = (0.0, 1.0)
    gate: TargetGate | None = None
    area_weight: float = DEFAULT_AREA_WEIGHT
    rabi_max: float = DEFAULT_RABI_MAX

    def __post_init__(self):
        if self.mode not in ("transfer", "gate"):
            raise ContractError(f"mode must be 'transfer' or 'gate', got {self.mode!r}")
        if self.mode == "gate" and self.gate is None:
            raise ContractError("gate mode needs a target gate")
        if self.mode == "transfer":
            P0, P1 = self.targets
            if not (0 <= P0 <= 1 and 0 <= P1 <= 1):
                raise ContractError(f"target populations must lie in [0, 1], got {self.targets}")
        if int(self.n_pulses) != self.n_pulses or self.n_pulses < 1:
            raise ContractError(f"n_pulses must be a positive integer, got {self.n_pulses}")
        if not self.delta_T > 0:
            raise ContractError(f"delta_T must be positive, got {self.delta_T}")
        if not self.rabi_max > 0:
            raise ContractError(f"amplitude bound must be positive, got {self.rabi_max}")
        if self.area_weight < 0:
            raise ContractError(f"area weight must be non-negative, got {self.area_weight}")
        eps = self.eps_values
        if np.any(eps <= -1):
            raise ContractError("eps grid crosses eps <= -1")
        if not np.any(eps == 0.0):
            raise ContractError("eps grid must contain eps = 0")

    @property
    def eps_values(self) -> np.ndarray:
        if isinstance(self.eps_grid, EpsilonGrid):
            return self.eps_grid.values
        return np.asarray(self.eps_grid, dtype=float)

    @property
    def gauge_fixed(self) -> bool:
        if self.mode == "transfer":
            return True
        m = self.gate.matrix
        return m[0, 1] == 0 and m[1, 0] == 0

    @property
    def n_params(self) -> int:
        return 2 * self.n_pulses - (1 if self.gauge_fixed else 0)

    def decode(self, x) -> tuple[np.ndarray, np.ndarray, bool]:
        """Return ``(rabi, phase, clamped)`` for a parameter vector."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_params,):
            raise ContractError(f"expected {self.n_params} parameters, got shape {x.shape}")
        n = self.n_pulses
        raw = x[:n]
        rabi = np.clip(raw, 0.0, self.rabi_max)
        clamped = bool(np.any(rabi != raw))
        if self.gauge_fixed:
            phase = np.concatenate(([0.0], x[n:]))
        else:
            phase = x[n:].copy()
        return rabi, phase, clamped

    def encode(self, seq: CompositeSequence) -> np.ndarray:
        if len(seq) != self.n_pulses:
            raise ContractError(f"sequence has {len(seq)} pulses, problem expects {self.n_pulses}")
        if np.any(seq.durations != 1.0):
            raise ContractError("optimizer works with unit-duration pulses only")
        phases = seq.phases
        if self.gauge_fixed:
            phases = phases[1:] - phases[0]
        return np.concatenate((seq.rabis, phases))

    def errors(self, rabi, phase) -> np.ndarray:
        """Per-eps error: transfer cost or gate infidelity."""
        eps = self.eps_values
        if self.mode == "transfer":
            P0, P1 = self.targets
            return _kernels.transfer_costs(rabi, phase, eps, self.delta_T, float(P0), float(P1))
        return _kernels.gate_infidelities(rabi, phase, eps, self.delta_T, self.gate.matrix)

    def to_dict(self) -> dict:
        doc = {"mode": self.mode, "n_pulses": self.n_pulses, "delta_T": self.delta_T}
        if self.mode == "transfer":
            doc["targets"] = list(self.targets)
        else:
            doc["gate"] = self.gate.name
        if isinstance(self.eps_grid, EpsilonGrid):
            g = self.eps_grid
            doc["eps_grid"] = {"lo": g.lo, "hi": g.hi, "n_points": g.n_points}
        else:
            doc["eps_values"] = [float(e) for e in self.eps_grid]
        doc["area_weight"] = self.area_weight
        doc["rabi_max_over_pi"] = self.rabi_max / np.pi
        return doc


class Evaluation(NamedTuple):
    objective: float
    worst: float
    area: float
    clamped: bool


def evaluate(x, problem: OptimizationProblem) -> Evaluation:
    rabi, phase, clamped = problem.decode(x)
    worst = float(np.max(problem.errors(rabi, phase)))
    area = float(np.sum(rabi))
    return Evaluation(worst + problem.area_weight * area / np.pi, worst, area, clamped)


def objective(x, problem: OptimizationProblem) -> float:
    """Worst-case error over the eps grid plus the area penalty (lower is better).

    Out-of-bound amplitudes are clamped onto the bounds and a
    :class:`ClampWarning` is issued.
    """
    ev = evaluate(x, problem)
    if ev.clamped:
        warnings.warn("amplitudes outside [0, rabi_max] were clamped", ClampWarning, stacklevel=2)
    return ev.objective


@dataclass
class OptimizationResult:
    sequence: CompositeSequence
    objective: float
    worst_merit: float
    area: float
    seed: int | None
    iterations: int
    evaluations: int
    converged: bool
    start_index: int = 0
    history: list = field(default_factory=list, repr=False)

    def report(self) -> dict:
        return {
            "name": self.sequence.name or "",
            "objective": self.objective,
            "worst_merit": self.worst_merit,
            "area_over_pi": self.area / np.pi,
            "seed": self.seed,
            "iterations": self.iterations,
            "evals": self.evaluations,
            "converged": self.converged,
            "best_start": self.start_index,
        }


class _Tracked:
    """Search objective with an out-of-bounds penalty and a best-so-far log."""

    def __init__(self, problem: OptimizationProblem):
        self.problem = problem
        self.nfev = 0
        self.best_f = np.inf
        self.best_x = None
        self.history = []

    def __call__(self, x):
        self.nfev += 1
        p = self.problem
        raw = x[: p.n_pulses]
        excess = np.sum(np.maximum(-raw, 0.0) + np.maximum(raw - p.rabi_max, 0.0))
        rabi, phase, _ = p.decode(x)
        f = float(np.max(p.errors(rabi, phase))) + p.area_weight * float(np.sum(rabi)) / np.pi
        if excess > 0:
            # keep the simplex inside the box; the clamped point is never the recorded optimum
            return f + 1.0 + excess
        if f < self.best_f:
            self.best_f = f
            self.best_x = np.array(x, dtype=float)
        self.history.append(self.best_f)
        return f


def _descend(tracked: _Tracked, x0, max_evals: int, xatol: float, fatol: float):
    """Restarted Nelder-Mead from ``x0``; returns (iterations, converged)."""
    iterations = 0
    converged = False
    x = np.array(x0, dtype=float)
    step = 0.1
    while tracked.nfev < max_evals:
        before = tracked.best_f
        simplex = [x]
        for i in range(len(x)):
            y = x.copy()
            y[i] += step if x[i] + step <= tracked.problem.rabi_max or i >= tracked.problem.n_pulses else -step
            simplex.append(y)
        res = minimize(
            tracked, x, method="Nelder-Mead",
            options={
                "maxfev": max_evals - tracked.nfev,
                "xatol": xatol,
                "fatol": fatol,
                "adaptive": len(x) > 4,
                "initial_simplex": np.array(simplex),
            },
        )
        iterations += int(res.nit)
        if tracked.best_x is not None:
            x = tracked.best_x.copy()
        if res.success and before - tracked.best_f <= fatol:
            converged = True
            break
        step = max(step * 0.5, 1e-4)
    return iterations, converged


def _refine(tracked: _Tracked, x0, max_iter: int) -> tuple[int, bool]:
    """Finite-difference SLSQP pass on the epigraph form of the minimax problem.

    Minimises ``t + area_weight * area / pi`` subject to ``error(eps) <= t`` on
    every grid node. The true objective of the end point goes through ``tracked``,
    so the refinement can only lower the best-so-far value.
    """
    p = tracked.problem
    n = p.n_pulses
    m = p.n_params

    def errors(z):
        tracked.nfev += 1
        rabi, phase, _ = p.decode(np.concatenate((np.clip(z[:n], 0.0, p.rabi_max), z[n:m])))
        return p.errors(rabi, phase)

    grad = np.zeros(m + 1)
    grad[:n] = p.area_weight / np.pi
    grad[m] = 1.0
    z0 = np.concatenate((x0, [np.max(errors(x0))]))
    bounds = [(0.0, p.rabi_max)] * n + [(None, None)] * (m - n + 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = minimize(
            lambda z: z[m] + p.area_weight * np.sum(z[:n]) / np.pi, z0, jac=lambda z: grad,
            method="SLSQP", bounds=bounds,
            constraints=[{"type": "ineq", "fun": lambda z: z[m] - errors(z)}],
            options={"maxiter": max_iter, "ftol": 1e-14},
        )
    x = np.concatenate((np.clip(res.x[:n], 0.0, p.rabi_max), res.x[n:m]))
    tracked(x)
    return int(res.nit), bool(res.success)


def _finish(problem, x, name, seed, iterations, evals, converged, start_index, history) -> OptimizationResult:
    rabi, phase, _ = problem.decode(x)
    if problem.gauge_fixed:
        phase = np.mod(phase, 2 * np.pi)
    seq = CompositeSequence.from_arrays(rabi, phase, problem.delta_T, name=name)
    ev = evaluate(problem.encode(seq), problem)
    return OptimizationResult(seq, ev.objective, ev.worst, total_area(seq), seed, iterations,
                              evals, converged, start_index, history)


def _better(a: OptimizationResult, b: OptimizationResult) -> bool:
    """Whether ``a`` beats ``b``: lower objective, then smaller area, then smaller parameters."""
    if abs(a.objective - b.objective) > TIE_TOL:
        return a.objective < b.objective
    if a.area != b.area:
        return a.area < b.area
    return tuple(a.sequence.rabis) + tuple(a.sequence.phases) < tuple(b.sequence.rabis) + tuple(b.sequence.phases)


def random_start(problem: OptimizationProblem, rng: np.random.Generator) -> np.ndarray:
    rabi = rng.uniform(0.0, problem.rabi_max, problem.n_pulses)
    phase = rng.uniform(0.0, 2 * np.pi, problem.n_params - problem.n_pulses)
    return np.concatenate((rabi, phase))


def optimize(problem: OptimizationProblem, starts: int = 16, max_evals: int = 4000, seed: int = 0,
             refine_iter: int = 200, xatol: float = 1e-9, fatol: float = 1e-13,
             name: str = "optimized") -> OptimizationResult:
    """Best of ``starts`` local searches from uniformly drawn points.

    ``max_evals`` is the Nelder-Mead evaluation budget per start; each descent is
    followed by up to ``refine_iter`` SLSQP iterations (0 disables the pass).
    All randomness comes from ``seed``, so results are reproducible bit for bit.
    """
    if starts < 1 or max_evals < 1:
        raise ContractError("optimisation budget must be positive")
    rng = np.random.default_rng(seed)
    initial = [random_start(problem, rng) for _ in range(starts)]
    best = None
    total_evals = 0
    for i, x0 in enumerate(initial):
        tracked = _Tracked(problem)
        iterations, converged = _descend(tracked, x0, max_evals, xatol, fatol)
        if refine_iter > 0 and tracked.best_x is not None:
            nit, ok = _refine(tracked, tracked.best_x, refine_iter)
            iterations += nit
            converged = converged or ok
        total_evals += tracked.nfev
        if tracked.best_x is None:
            continue
        result = _finish(problem, tracked.best_x, name, seed, iterations, tracked.nfev, converged, i,
                         tracked.history)
        log.debug("start %d: objective %.6g worst %.3g area %.4f pi", i, result.objective,
                  result.worst_merit, result.area / np.pi)
        if best is None or _better(result, best):
            best = result
    if best is None:
        raise RuntimeError("no start produced a feasible candidate")
    best.evaluations = total_evals
    return best


def polish(seq: CompositeSequence, problem: OptimizationProblem, max_evals: int = 4000,
           refine_iter: int = 200, xatol: float = 1e-12, fatol: float = 1e-15) -> OptimizationResult:
    """Local refinement starting from ``seq``; never returns anything worse than ``seq``."""
    if max_evals < 1:
        raise ContractError("optimisation budget must be positive")
    if len(seq) != problem.n_pulses:
        raise ContractError(f"sequence has {len(seq)} pulses, problem expects {problem.n_pulses}")
    if problem.gauge_fixed:
        seq = shift_all_phases(seq, -seq.phases[0])
    x0 = problem.encode(seq)
    rabi0, _, clamped = problem.decode(x0)
    if clamped:
        raise ContractError("initial sequence violates the amplitude bounds")
    tracked = _Tracked(problem)
    tracked(x0)
    iterations, converged = _descend(tracked, x0, max_evals, xatol, fatol)
    if refine_iter > 0:
        nit, ok = _refine(tracked, tracked.best_x, refine_iter)
        iterations += nit
        converged = converged or ok
    name = seq.name or "polished"
    if not np.array_equal(tracked.best_x, x0):
        result = _finish(problem, tracked.best_x, name, None, iterations, tracked.nfev, converged, 0,
                         tracked.history)
        if result.objective <= tracked.history[0]:
            return result
    ev = evaluate(x0, problem)
    return OptimizationResult(seq, ev.objective, ev.worst, total_area(seq), None, iterations,
                              tracked.nfev, converged, 0, tracked.history)


# -- JSON problem documents ----------------------------------------------------

def _field(doc, key, kind, default=None, required=True):
    if key not in doc:
        if required:
            raise ProblemFormatError(f"missing field '{key}'")
        return default
    value = doc[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ProblemFormatError(f"field '{key}' must be a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ProblemFormatError(f"field '{key}' must be an integer, got {value!r}")
        return value
    if not isinstance(value, kind):
        raise ProblemFormatError(f"field '{key}' has the wrong type: {value!r}")
    return value


def problem_from_dict(doc: dict) -> OptimizationProblem:
    if not isinstance(doc, dict):
        raise ProblemFormatError("problem document must be a JSON object")
    mode = _field(doc, "mode", str)
    n_pulses = _field(doc, "n_pulses", int)
    delta_T = _field(doc, "delta_T", float)
    area_weight = _field(doc, "area_weight", float, DEFAULT_AREA_WEIGHT, required=False)
    rabi_max = _field(doc, "rabi_max_over_pi", float, DEFAULT_RABI_MAX / np.pi, required=False) * np.pi

    if "eps_values" in doc:
        values = _field(doc, "eps_values", list)
        if not values or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
            raise ProblemFormatError("field 'eps_values' must be a non-empty list of numbers")
        eps_grid = tuple(float(v) for v in values)
    elif "eps_grid" in doc:
        g = doc["eps_grid"]
        try:
            if isinstance(g, str):
                eps_grid = EpsilonGrid.parse(g)
            elif isinstance(g, dict):
                eps_grid = EpsilonGrid(_field(g, "lo", float), _field(g, "hi", float), _field(g, "n_points", int))
            else:
                raise ProblemFormatError(f"field 'eps_grid' must be an object or 'lo:hi:n', got {g!r}")
        except ProblemFormatError as exc:
            raise ProblemFormatError(f"eps_grid: {exc}") from None
        except (ValueError, ContractError) as exc:
            raise ProblemFormatError(f"field 'eps_grid': {exc}") from None
    else:
        eps_grid = EpsilonGrid(-0.1, 0.1, 21)

    targets = (0.0, 1.0)
    gate = None
    if mode == "transfer":
        raw = _field(doc, "targets", list)
        if len(raw) != 2 or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw):
            raise ProblemFormatError("field 'targets' must be [P0, P1]")
        targets = (float(raw[0]), float(raw[1]))
    elif mode == "gate":
        name = _field(doc, "gate", str)
        try:
            gate = standard_gate(name)
        except ContractError as exc:
            raise ProblemFormatError(f"field 'gate': {exc}") from None
    else:
        raise ProblemFormatError(f"field 'mode' must be 'transfer' or 'gate', got {mode!r}")

    try:
        return OptimizationProblem(mode, n_pulses, delta_T, eps_grid, targets, gate, area_weight, rabi_max)
    except ContractError as exc:
        raise ProblemFormatError(str(exc)) from None


def load_problem(path) -> OptimizationProblem:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ProblemFormatError(f"invalid JSON ({exc})") from None
    return problem_from_dict(doc)
