"""Sweeps of populations and gate fidelity over the systematic amplitude error."""

from __future__ import annotations

import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .metrics import TargetGate, gate_fidelity, populations_from_ground, transfer_cost
from .model import ContractError
from .sequence import CompositeSequence, compose

CSV_FLOAT = "{:.12g}"


@dataclass(frozen=True)
class EpsilonGrid:
    lo: float = -0.5
    hi: float = 0.5
    n_points: int = 201

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ContractError(f"grid needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.lo <= -1:
            raise ContractError(f"grid crosses eps <= -1 (lo = {self.lo})")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ContractError(f"grid needs at least 2 points, got {self.n_points}")

    @property
    def values(self) -> np.ndarray:
        v = np.linspace(self.lo, self.hi, int(self.n_points))
        # linspace leaves ~1e-17 residue where the grid should hit eps = 0 exactly
        v[np.abs(v) < 1e-12 * (self.hi - self.lo)] = 0.0
        return v

    @classmethod
    def parse(cls, text: str) -> "EpsilonGrid":
        """Parse ``lo:hi:n``."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected lo:hi:n, got {text!r}")
        lo, hi, n = float(parts[0]), float(parts[1]), parts[2]
        if not n.strip().isdigit():
            raise ValueError(f"point count must be an integer, got {n!r}")
        return cls(lo, hi, int(n))


@dataclass
class EpsilonProfile:
    """Tabulated figure of merit versus eps.

    ``kind`` is ``"populations"`` (``values`` has shape ``(n, 3)``) or
    ``"fidelity"`` (shape ``(n,)``).
    """

    grid: EpsilonGrid
    eps: np.ndarray
    values: np.ndarray
    kind: str
    metadata: dict = field(default_factory=dict)

    @property
    def merit(self) -> np.ndarray:
        """Scalar merit per row: fidelity, or ``1 - transfer cost`` for populations."""
        if self.kind == "fidelity":
            return self.values
        P0, P1 = self.metadata.get("target", (0.0, 1.0))
        return 1.0 - (np.abs(P0 - self.values[:, 0]) + np.abs(P1 - self.values[:, 1]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        if self.kind == "populations":
            buf.write("epsilon,p0,p1,p2\n")
            for e, row in zip(self.eps, self.values):
                buf.write(",".join(CSV_FLOAT.format(v) for v in (e, *row)) + "\n")
        else:
            buf.write("epsilon,fidelity\n")
            for e, f in zip(self.eps, self.values):
                buf.write(f"{CSV_FLOAT.format(e)},{CSV_FLOAT.format(f)}\n")
        return buf.getvalue()


def _evaluate(fn, eps, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, eps))
    return [fn(e) for e in eps]


def _metadata(seq, extra):
    meta = {"sequence": seq.name or "", "delta_T": seq.params.delta}
    meta.update(extra)
    return meta


def scan_populations(seq: CompositeSequence, grid: EpsilonGrid = EpsilonGrid(), target=(0.0, 1.0),
                     workers: int | None = None) -> EpsilonProfile:
    eps = grid.values
    rows = _evaluate(lambda e: tuple(populations_from_ground(compose(seq, e))), eps, workers)
    return EpsilonProfile(grid, eps, np.array(rows), "populations",
                          _metadata(seq, {"target": tuple(target)}))


def scan_fidelity(seq: CompositeSequence, gate: TargetGate, grid: EpsilonGrid = EpsilonGrid(),
                  workers: int | None = None) -> EpsilonProfile:
    eps = grid.values
    rows = _evaluate(lambda e: gate_fidelity(compose(seq, e), gate), eps, workers)
    return EpsilonProfile(grid, eps, np.array(rows), "fidelity",
                          _metadata(seq, {"target": gate.name}))


def scan_transfer_cost(seq: CompositeSequence, targets, grid: EpsilonGrid) -> np.ndarray:
    return np.array([transfer_cost(compose(seq, e), targets) for e in grid.values])


def robustness_summary(profile: EpsilonProfile, threshold: float) -> dict:
    """Width of the contiguous eps window around 0 with merit >= ``threshold``,
    the worst merit on the grid, and the merit at the node nearest eps = 0."""
    if not 0 < threshold < 1:
        raise ContractError(f"threshold must lie in (0, 1), got {threshold}")
    eps = np.asarray(profile.eps)
    merit = np.asarray(profile.merit)
    if not eps[0] <= 0 <= eps[-1]:
        raise ContractError("profile does not cover eps = 0")
    i0 = int(np.argmin(np.abs(eps)))
    if len(eps) > 1 and abs(eps[i0]) > np.max(np.diff(eps)):
        raise ContractError("profile has no node near eps = 0")
    width = 0.0
    if merit[i0] >= threshold:
        left = i0
        while left > 0 and merit[left - 1] >= threshold:
            left -= 1
        right = i0
        while right < len(eps) - 1 and merit[right + 1] >= threshold:
            right += 1
        width = float(eps[right] - eps[left])
    return {"width": width, "worst": float(merit.min()), "center": float(merit[i0])}
