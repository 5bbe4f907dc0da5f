"""In-place statevector kernel.

Conventions used throughout the package:

* qubit ``q`` is bit ``q`` of the basis index (qubit 0 is the least
  significant bit), so ``|q1 q0>`` with ``q0=1, q1=0`` is index 1;
* ``RX(t) = exp(-i t X / 2)`` and ``RY(t) = exp(-i t Y / 2)``;
* ``T = diag(1, exp(i pi / 4))``;
* ``CNOT(c, t)`` flips bit ``t`` on the indices where bit ``c`` is set.

Gates are encoded as small integer programs (kind, q0, q1, angle) so that a
whole ensemble of circuits can be run by one compiled loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi
from typing import Iterable, Sequence

import numba
import numpy as np

from .exceptions import ShapeError

# Prefer OpenMP; the bundled TBB is often too old and only produces warnings.
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

__all__ = [
    "GATE_KINDS",
    "MAX_QUBITS",
    "GateOp",
    "StateVector",
    "apply_gate",
    "encode_gates",
    "fidelity",
    "meyer_wallach_batch",
    "meyer_wallach_q",
    "new_zero_state",
    "outcome_probabilities",
    "simulate",
    "simulate_batch",
    "single_qubit_purities",
    "single_qubit_purity",
]

MAX_QUBITS = 24
# Linear entropies below this are rounding noise of a product marginal.
PURITY_RESOLUTION = 1e-12

RX, RY, H, T, CNOT = 0, 1, 2, 3, 4
GATE_KINDS = {"RX": RX, "RY": RY, "H": H, "T": T, "CNOT": CNOT}
_ROTATIONS = ("RX", "RY")

_INV_SQRT2 = float(1.0 / np.sqrt(2.0))
_T_PHASE = complex(np.exp(1j * pi / 4))


@dataclass(frozen=True)
class GateOp:
    """One primitive gate instance.

    ``qubits`` is ``(q,)`` for single-qubit kinds and ``(control, target)``
    for CNOT. ``angle`` is required for RX/RY and must be absent otherwise.
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        if self.kind == "CNOT":
            if len(qubits) != 2:
                raise ValueError("CNOT takes a (control, target) pair")
            if qubits[0] == qubits[1]:
                raise ValueError("CNOT control and target must differ")
        elif len(qubits) != 1:
            raise ValueError(f"{self.kind} acts on exactly one qubit")
        if (self.angle is not None) != (self.kind in _ROTATIONS):
            raise ValueError(f"angle must be given iff kind is RX or RY, got {self.kind} angle={self.angle}")
        if any(q < 0 for q in qubits):
            raise IndexError(f"negative qubit index in {qubits}")


@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ShapeError(
                f"{self.n_qubits} qubits need {1 << self.n_qubits} amplitudes, got shape {self.amplitudes.shape}"
            )

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def copy(self) -> StateVector:
        return StateVector(self.n_qubits, self.amplitudes.copy())


def _check_n_qubits(n_qubits: int) -> None:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")


def new_zero_state(n_qubits: int) -> StateVector:
    """Return ``|0...0>`` on ``n_qubits`` qubits."""
    _check_n_qubits(n_qubits)
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


@numba.njit(cache=True, nogil=True)
def _apply_2x2(psi, q, m00, m01, m10, m11):
    stride = 1 << q
    dim = psi.shape[0]
    for base in range(0, dim, stride << 1):
        for i in range(base, base + stride):
            a0 = psi[i]
            a1 = psi[i + stride]
            psi[i] = m00 * a0 + m01 * a1
            psi[i + stride] = m10 * a0 + m11 * a1


@numba.njit(cache=True, nogil=True)
def _apply_encoded(psi, kind, q0, q1, angle):
    if kind == 0:  # RX
        c = np.cos(0.5 * angle)
        s = np.sin(0.5 * angle)
        _apply_2x2(psi, q0, complex(c, 0.0), complex(0.0, -s), complex(0.0, -s), complex(c, 0.0))
    elif kind == 1:  # RY
        c = np.cos(0.5 * angle)
        s = np.sin(0.5 * angle)
        _apply_2x2(psi, q0, complex(c, 0.0), complex(-s, 0.0), complex(s, 0.0), complex(c, 0.0))
    elif kind == 2:  # H
        r = _INV_SQRT2
        stride = 1 << q0
        for base in range(0, psi.shape[0], stride << 1):
            for i in range(base, base + stride):
                a0 = psi[i]
                a1 = psi[i + stride]
                psi[i] = r * (a0 + a1)
                psi[i + stride] = r * (a0 - a1)
    elif kind == 3:  # T
        phase = _T_PHASE
        stride = 1 << q0
        for base in range(stride, psi.shape[0], stride << 1):
            for i in range(base, base + stride):
                psi[i] = phase * psi[i]
    else:  # CNOT(q0 -> q1)
        cmask = 1 << q0
        tmask = 1 << q1
        for i in range(psi.shape[0]):
            if (i & cmask) and not (i & tmask):
                j = i | tmask
                tmp = psi[i]
                psi[i] = psi[j]
                psi[j] = tmp


@numba.njit(cache=True, nogil=True)
def _run_program(psi, kinds, q0s, q1s, angles):
    for g in range(kinds.shape[0]):
        _apply_encoded(psi, kinds[g], q0s[g], q1s[g], angles[g])


@numba.njit(cache=True, parallel=True)
def _run_batch(out, kinds, q0s, q1s, angles):
    # Each row is owned by one iteration; no cross-row writes.
    for s in numba.prange(out.shape[0]):
        psi = out[s]
        psi[:] = 0.0
        psi[0] = 1.0
        for g in range(kinds.shape[1]):
            _apply_encoded(psi, kinds[s, g], q0s[s, g], q1s[s, g], angles[s, g])


def _check_gate(n_qubits: int, gate: GateOp) -> None:
    for q in gate.qubits:
        if not 0 <= q < n_qubits:
            raise IndexError(f"qubit {q} out of range for {n_qubits} qubits")


def encode_gates(gates: Iterable[GateOp]) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Encode a gate list as ``(kinds, q0, q1, angles)`` arrays."""
    gates = list(gates)
    kinds = np.empty(len(gates), dtype=np.int8)
    q0 = np.zeros(len(gates), dtype=np.int64)
    q1 = np.zeros(len(gates), dtype=np.int64)
    angles = np.zeros(len(gates), dtype=np.float64)
    for i, g in enumerate(gates):
        kinds[i] = GATE_KINDS[g.kind]
        q0[i] = g.qubits[0]
        if g.kind == "CNOT":
            q1[i] = g.qubits[1]
        if g.angle is not None:
            angles[i] = g.angle
    return kinds, q0, q1, angles


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    """Apply ``gate`` to ``state`` in place and return the same object."""
    _check_gate(state.n_qubits, gate)
    q1 = gate.qubits[1] if gate.kind == "CNOT" else 0
    angle = gate.angle if gate.angle is not None else 0.0
    _apply_encoded(state.amplitudes, GATE_KINDS[gate.kind], gate.qubits[0], q1, float(angle))
    return state


def simulate(n_qubits: int, gates: Sequence[GateOp]) -> StateVector:
    """Run ``gates`` on ``|0...0>``."""
    state = new_zero_state(n_qubits)
    for g in gates:
        _check_gate(n_qubits, g)
    _run_program(state.amplitudes, *encode_gates(gates))
    return state


def simulate_batch(n_qubits, kinds, q0, q1, angles) -> np.ndarray:
    """Run one encoded circuit per row on ``|0...0>``.

    Every argument is broadcast to a common ``(samples, gates)`` shape, so a
    PQC ensemble can pass its shared gate structure as a 1-D row together
    with a 2-D angle table. Returns a ``(samples, 2**n_qubits)`` complex array.
    Rows are independent, so the result does not depend on the thread count.
    """
    _check_n_qubits(n_qubits)
    kinds, q0, q1, angles = (
        np.ascontiguousarray(a)
        for a in np.broadcast_arrays(
            np.atleast_2d(np.asarray(kinds, dtype=np.int8)),
            np.atleast_2d(np.asarray(q0, dtype=np.int64)),
            np.atleast_2d(np.asarray(q1, dtype=np.int64)),
            np.atleast_2d(np.asarray(angles, dtype=np.float64)),
        )
    )
    if kinds.size and (q0.max() >= n_qubits or q1.max() >= n_qubits or min(q0.min(), q1.min()) < 0):
        raise IndexError(f"qubit index out of range for {n_qubits} qubits")
    out = np.empty((kinds.shape[0], 1 << n_qubits), dtype=np.complex128)
    _run_batch(out, kinds, q0, q1, angles)
    return out


def fidelity(a: StateVector, b: StateVector) -> float:
    """``|<a|b>|**2``."""
    if a.n_qubits != b.n_qubits:
        raise ShapeError(f"fidelity between {a.n_qubits}- and {b.n_qubits}-qubit states")
    # |z|^2 is symmetric under conjugation, so fidelity(a, b) == fidelity(b, a) bit for bit.
    z = np.vdot(a.amplitudes, b.amplitudes)
    return float(z.real * z.real + z.imag * z.imag)


def outcome_probabilities(state: StateVector) -> np.ndarray:
    amps = state.amplitudes
    return amps.real**2 + amps.imag**2


def _marginal_purity(amps: np.ndarray, n_qubits: int, k: int) -> np.ndarray:
    lead = amps.shape[:-1]
    split = amps.reshape(lead + (1 << (n_qubits - 1 - k), 2, 1 << k))
    a0 = split[..., 0, :]
    a1 = split[..., 1, :]
    p0 = np.sum(a0.real**2 + a0.imag**2, axis=(-2, -1))
    p1 = np.sum(a1.real**2 + a1.imag**2, axis=(-2, -1))
    coh = np.sum(a0 * a1.conj(), axis=(-2, -1))
    purity = np.clip(p0 * p0 + p1 * p1 + 2.0 * (coh.real**2 + coh.imag**2), 0.5, 1.0)
    return np.where(purity > 1.0 - PURITY_RESOLUTION, 1.0, purity)


def single_qubit_purities(amplitudes: np.ndarray, n_qubits: int) -> np.ndarray:
    """Purities ``Tr(rho_k^2)`` of every single-qubit marginal.

    ``amplitudes`` has shape ``(..., 2**n_qubits)``; the result has shape
    ``(..., n_qubits)``. Each reduced matrix is assembled from the partial
    sums ``sum |a0|^2``, ``sum |a1|^2`` and ``sum a0 conj(a1)`` over the two
    halves of the index space split on bit ``k``, so no density matrix of
    the full register is ever formed.
    """
    amps = np.asarray(amplitudes, dtype=np.complex128)
    if amps.shape[-1] != 1 << n_qubits:
        raise ShapeError(f"expected last axis 2**{n_qubits}, got {amps.shape[-1]}")
    return np.stack([_marginal_purity(amps, n_qubits, k) for k in range(n_qubits)], axis=-1)


def single_qubit_purity(state: StateVector, k: int) -> float:
    if not 0 <= k < state.n_qubits:
        raise IndexError(f"qubit {k} out of range for {state.n_qubits} qubits")
    return float(_marginal_purity(state.amplitudes, state.n_qubits, k))


def meyer_wallach_batch(amplitudes: np.ndarray, n_qubits: int) -> np.ndarray:
    """Meyer-Wallach ``Q = 2 (1 - mean_k Tr rho_k^2)`` along the last axis."""
    purities = single_qubit_purities(amplitudes, n_qubits)
    q = 2.0 * (1.0 - purities.mean(axis=-1))
    return np.clip(q, 0.0, 1.0)


def meyer_wallach_q(state: StateVector) -> float:
    return float(meyer_wallach_batch(state.amplitudes, state.n_qubits))
