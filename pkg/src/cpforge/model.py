"""Three-level transmon ladder in the rotating frame.

Units: the reference pulse duration T and hbar are both 1, so the anharmonicity
``delta`` and Rabi amplitude ``rabi`` are the dimensionless products delta*T and
Omega*T.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SQRT2 = np.sqrt(2.0)

HERMITIAN_TOL = 1e-14
UNITARY_TOL = 1e-12


class ContractError(ValueError):
    """Raised when an input violates a documented precondition."""


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the ladder.

    ``omega`` is the qubit frequency; it only fixes the lab-frame level energies
    (see :func:`level_frequency`) and drops out of the rotating-frame dynamics.
    """

    delta: float
    omega: float | None = None

    def __post_init__(self):
        if not np.isfinite(self.delta) or self.delta <= 0:
            raise ContractError(f"anharmonicity must be positive, got {self.delta!r}")


@dataclass(frozen=True)
class Pulse:
    """Rectangular drive segment with complex Rabi frequency ``rabi * exp(1j*phase)``."""

    rabi: float
    phase: float = 0.0
    duration: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.rabi) or self.rabi < 0:
            raise ContractError(f"Rabi amplitude must be >= 0, got {self.rabi!r}")
        if not np.isfinite(self.duration) or self.duration <= 0:
            raise ContractError(f"duration must be > 0, got {self.duration!r}")
        if not np.isfinite(self.phase):
            raise ContractError(f"phase must be finite, got {self.phase!r}")

    @property
    def area(self) -> float:
        return self.rabi * self.duration


def level_frequency(n: int, omega: float, delta: float) -> float:
    """Energy of level ``n`` of the anharmonic ladder, ``(omega + delta/2) n - (delta/2) n**2``."""
    if n < 0:
        raise ContractError(f"level index must be >= 0, got {n}")
    return (omega + delta / 2) * n - (delta / 2) * n * n


def check_eps(eps: float) -> None:
    if not np.isfinite(eps) or eps <= -1:
        raise ContractError(f"systematic error eps must exceed -1, got {eps!r}")


def build_hamiltonian(pulse: Pulse, eps: float, params: SystemParams) -> np.ndarray:
    """Rotating-frame Hamiltonian for one pulse under a relative amplitude error ``eps``.

    Returns the 3x3 matrix ``0.5 * [[0, w, 0], [w*, 0, sqrt2 w], [0, sqrt2 w*, -2 delta]]``
    with ``w = rabi * (1 + eps) * exp(1j * phase)``.
    """
    check_eps(eps)
    w = pulse.rabi * (1.0 + eps) * np.exp(1j * pulse.phase)
    H = np.zeros((3, 3), dtype=complex)
    H[0, 1] = w / 2
    H[1, 0] = np.conj(w) / 2
    H[1, 2] = SQRT2 * w / 2
    H[2, 1] = SQRT2 * np.conj(w) / 2
    H[2, 2] = -params.delta
    return H


def propagate(H: np.ndarray, t: float = 1.0) -> np.ndarray:
    """Return ``exp(-1j * H * t)`` for Hermitian ``H`` via its eigendecomposition."""
    H = np.asarray(H, dtype=complex)
    if H.shape != (3, 3):
        raise ContractError(f"expected a 3x3 Hamiltonian, got shape {H.shape}")
    if not t > 0:
        raise ContractError(f"evolution time must be positive, got {t!r}")
    if np.max(np.abs(H - H.conj().T)) > HERMITIAN_TOL * max(1.0, np.max(np.abs(H))):
        raise ContractError("Hamiltonian is not Hermitian")
    energies, vecs = np.linalg.eigh(H)
    return (vecs * np.exp(-1j * energies * t)) @ vecs.conj().T


def pulse_propagator(pulse: Pulse, eps: float, params: SystemParams) -> np.ndarray:
    return propagate(build_hamiltonian(pulse, eps, params), pulse.duration)


def batch_propagators(rabi, phase, duration, eps, delta: float) -> np.ndarray:
    """Vectorised single-pulse propagators.

    ``rabi``, ``phase`` and ``duration`` have shape ``(N,)`` and ``eps`` shape
    ``(E,)``; the result has shape ``(E, N, 3, 3)``.

    The drive phase is factored out as ``U(phi) = D U(0) D^dagger`` with
    ``D = diag(1, e^{-i phi}, e^{-2i phi})`` so only real symmetric matrices are
    diagonalised.
    """
    rabi = np.asarray(rabi, dtype=float)
    phase = np.asarray(phase, dtype=float)
    duration = np.broadcast_to(np.asarray(duration, dtype=float), rabi.shape)
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    amp = rabi[None, :] * (1.0 + eps[:, None])
    Hr = np.zeros(amp.shape + (3, 3))
    Hr[..., 0, 1] = Hr[..., 1, 0] = amp / 2
    Hr[..., 1, 2] = Hr[..., 2, 1] = SQRT2 * amp / 2
    Hr[..., 2, 2] = -delta
    energies, vecs = np.linalg.eigh(Hr)
    U0 = (vecs * np.exp(-1j * energies * duration[None, :, None])[..., None, :]) @ np.swapaxes(vecs, -1, -2)
    d = np.exp(-1j * np.outer(phase, np.arange(3)))  # (N, 3)
    return d[None, :, :, None] * U0 * d.conj()[None, :, None, :]


def unitarity_error(U: np.ndarray) -> float:
    U = np.asarray(U)
    eye = np.eye(U.shape[-1])
    return float(np.max(np.abs(np.swapaxes(U.conj(), -1, -2) @ U - eye)))


def is_unitary(U: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return unitarity_error(U) < tol and abs(abs(np.linalg.det(U)) - 1) < tol
