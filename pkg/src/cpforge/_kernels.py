"""Compiled inner loops for the optimizer.

The drive phase factors out of the pulse propagator,
``U(a, phi) = D U(a, 0) D^dagger`` with ``D = diag(1, e^{-i phi}, e^{-2i phi})``,
so each pulse only needs the eigendecomposition of a real symmetric 3x3 matrix,
done here with cyclic Jacobi rotations.
"""

import numpy as np
from numba import njit

_SQRT2 = np.sqrt(2.0)


@njit(cache=True)
def _jacobi3(A, V):
    # A is overwritten with (numerically) diagonal form, V with eigenvectors as columns
    for i in range(3):
        for j in range(3):
            V[i, j] = 1.0 if i == j else 0.0
    for _ in range(32):
        off = A[0, 1] * A[0, 1] + A[0, 2] * A[0, 2] + A[1, 2] * A[1, 2]
        scale = A[0, 0] * A[0, 0] + A[1, 1] * A[1, 1] + A[2, 2] * A[2, 2] + off
        if off <= 1e-36 * scale or off == 0.0:
            break
        for p in range(2):
            for q in range(p + 1, 3):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta >= 0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(3):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - s * akq
                    A[k, q] = s * akp + c * akq
                for k in range(3):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - s * aqk
                    A[q, k] = s * apk + c * aqk
                for k in range(3):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = c * vkp - s * vkq
                    V[k, q] = s * vkp + c * vkq


@njit(cache=True)
def _phase_factors(phase):
    # F[k, m] = exp(-1j * phase[k] * (m - 2)) for the index offset m - 2 = j - l
    F = np.empty((phase.shape[0], 5), dtype=np.complex128)
    for k in range(phase.shape[0]):
        for m in range(5):
            F[k, m] = np.exp(-1j * phase[k] * (m - 2))
    return F


@njit(cache=True)
def _pulse_unitary(amp, F, delta, U, A, V):
    A[:, :] = 0.0
    A[0, 1] = A[1, 0] = 0.5 * amp
    A[1, 2] = A[2, 1] = 0.5 * _SQRT2 * amp
    A[2, 2] = -delta
    _jacobi3(A, V)
    e0 = np.exp(-1j * A[0, 0])
    e1 = np.exp(-1j * A[1, 1])
    e2 = np.exp(-1j * A[2, 2])
    for j in range(3):
        for k in range(3):
            u = V[j, 0] * V[k, 0] * e0 + V[j, 1] * V[k, 1] * e1 + V[j, 2] * V[k, 2] * e2
            U[j, k] = u * F[j - k + 2]


@njit(cache=True)
def sequence_unitaries(rabi, phase, eps, delta):
    """Total propagators, shape ``(len(eps), 3, 3)``; pulses have unit duration."""
    n = rabi.shape[0]
    F = _phase_factors(phase)
    out = np.empty((eps.shape[0], 3, 3), dtype=np.complex128)
    U = np.empty((3, 3), dtype=np.complex128)
    W = np.empty((3, 3), dtype=np.complex128)
    A = np.empty((3, 3))
    V = np.empty((3, 3))
    for e in range(eps.shape[0]):
        acc = np.eye(3, dtype=np.complex128)
        for k in range(n):
            _pulse_unitary(rabi[k] * (1.0 + eps[e]), F[k], delta, U, A, V)
            for i in range(3):
                for j in range(3):
                    W[i, j] = U[i, 0] * acc[0, j] + U[i, 1] * acc[1, j] + U[i, 2] * acc[2, j]
            acc[:, :] = W
        out[e] = acc
    return out


@njit(cache=True)
def transfer_costs(rabi, phase, eps, delta, P0, P1):
    """``|P0 - p0| + |P1 - p1|`` per eps, starting from ``|0>``."""
    n = rabi.shape[0]
    F = _phase_factors(phase)
    out = np.empty(eps.shape[0])
    U = np.empty((3, 3), dtype=np.complex128)
    A = np.empty((3, 3))
    V = np.empty((3, 3))
    psi = np.empty(3, dtype=np.complex128)
    tmp = np.empty(3, dtype=np.complex128)
    for e in range(eps.shape[0]):
        psi[0] = 1.0
        psi[1] = 0.0
        psi[2] = 0.0
        for k in range(n):
            _pulse_unitary(rabi[k] * (1.0 + eps[e]), F[k], delta, U, A, V)
            for i in range(3):
                tmp[i] = U[i, 0] * psi[0] + U[i, 1] * psi[1] + U[i, 2] * psi[2]
            psi[:] = tmp
        p0 = psi[0].real ** 2 + psi[0].imag ** 2
        p1 = psi[1].real ** 2 + psi[1].imag ** 2
        out[e] = abs(P0 - p0) + abs(P1 - p1)
    return out


@njit(cache=True)
def gate_infidelities(rabi, phase, eps, delta, G):
    """``1 - |Tr(Q G^dagger)| / 2`` per eps, ``Q`` the qubit block."""
    Us = sequence_unitaries(rabi, phase, eps, delta)
    out = np.empty(eps.shape[0])
    for e in range(eps.shape[0]):
        tr = 0.0j
        for i in range(2):
            for j in range(2):
                tr += Us[e, i, j] * np.conj(G[i, j])
        out[e] = 1.0 - 0.5 * abs(tr)
    return out
