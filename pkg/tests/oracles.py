"""Independent reference implementations used only by the tests.

Everything here builds full matrices with Kronecker products, so it shares
no code path with the in-place kernel.
"""

from functools import reduce

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
T = np.diag([1, np.exp(1j * np.pi / 4)])
P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)


def expm_pauli(pauli, theta):
    # exp(-i theta P / 2) for a Pauli P, via eigen-decomposition.
    w, v = np.linalg.eigh(pauli)
    return v @ np.diag(np.exp(-0.5j * theta * w)) @ v.conj().T


def embed(ops: dict, n: int) -> np.ndarray:
    """Kronecker product with ``ops[q]`` on qubit q; qubit 0 is the rightmost factor."""
    return reduce(np.kron, [ops.get(q, I2) for q in reversed(range(n))])


def gate_matrix(gate, n: int) -> np.ndarray:
    (q, *rest) = gate.qubits
    if gate.kind == "RX":
        return embed({q: expm_pauli(X, gate.angle)}, n)
    if gate.kind == "RY":
        return embed({q: expm_pauli(Y, gate.angle)}, n)
    if gate.kind == "H":
        return embed({q: H}, n)
    if gate.kind == "T":
        return embed({q: T}, n)
    t = rest[0]
    return embed({q: P0}, n) + embed({q: P1, t: X}, n)


def dense_state(n: int, gates) -> np.ndarray:
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1
    u = reduce(lambda acc, g: gate_matrix(g, n) @ acc, gates, np.eye(2**n, dtype=complex))
    return u @ psi


def reduced_density_matrix(psi: np.ndarray, n: int, k: int) -> np.ndarray:
    """Dense partial trace onto qubit k."""
    # Tensor axis a holds qubit n-1-a.
    m = np.moveaxis(psi.reshape([2] * n), n - 1 - k, 0).reshape(2, -1)
    return m @ m.conj().T


def basis_state(bits: str) -> np.ndarray:
    """Basis state from a bitstring written qubit n-1 first, e.g. ``'0101'``."""
    psi = np.zeros(2 ** len(bits), dtype=complex)
    psi[int(bits, 2)] = 1
    return psi


def ghz(n: int) -> np.ndarray:
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    return psi


def w_state(n: int) -> np.ndarray:
    psi = np.zeros(2**n, dtype=complex)
    for q in range(n):
        psi[1 << q] = 1 / np.sqrt(n)
    return psi


def relabel(psi: np.ndarray, n: int, perm) -> np.ndarray:
    """Move qubit q to position perm[q]."""
    out = np.zeros_like(psi)
    for idx in range(2**n):
        new = 0
        for q in range(n):
            if idx >> q & 1:
                new |= 1 << perm[q]
        out[new] = psi[idx]
    return out
