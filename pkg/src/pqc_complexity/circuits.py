"""Circuit families: layered PQC ansatze, G3 random circuits, Haar states.

A PQC layer is RX on every qubit, RY on every qubit (both ascending by
qubit index), followed by the CNOTs of its topology. Each layer consumes
its own ``2 * n_qubits`` angles. Star topologies use qubit 0 as the hub
and the control of every CNOT; CNOTs inside a layer are ordered by
control index with the ring's closing ``CNOT(n-1, 0)`` last.

Ensembles draw one independent generator per sample from
``(seed, sample_index)`` so any sample can be regenerated on its own and
the result does not depend on evaluation order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import pi
from typing import NamedTuple, Sequence

import numpy as np

from .exceptions import ShapeError, SpecError
from .statevec import (
    CNOT,
    GATE_KINDS,
    MAX_QUBITS,
    GateOp,
    StateVector,
    encode_gates,
    simulate,
    simulate_batch,
)

TWO_PI = 2.0 * pi

PQC = "pqc"
G3 = "g3"

# Kind codes drawn for G3, in sampling order.
_G3_KINDS = ("CNOT", "H", "T")
_G3_CODES = np.array([GATE_KINDS[k] for k in _G3_KINDS], dtype=np.int8)


class Topology(str, enum.Enum):
    NO_CONNECTIONS = "none"
    LINEAR = "linear"
    RING = "ring"
    STAR = "star"

    @classmethod
    def parse(cls, value: str | Topology) -> Topology:
        if isinstance(value, cls):
            return value
        aliases = {"noconnections": "none", "no_connections": "none", "no-connections": "none"}
        key = str(value).strip().lower()
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValueError(f"unknown topology {value!r}; choose from none, linear, ring, star") from None


class GateCount(NamedTuple):
    cnots: int | None
    total: int


@dataclass(frozen=True)
class CircuitSpec:
    """Defines one circuit ensemble.

    Build with :meth:`pqc` or :meth:`g3` rather than the raw constructor.
    """

    family: str
    n_qubits: int
    topology: Topology | None = None
    layers: int | None = None
    total_gates: int | None = None

    def __post_init__(self):
        if not 2 <= self.n_qubits <= MAX_QUBITS:
            raise SpecError(f"n_qubits must be in [2, {MAX_QUBITS}], got {self.n_qubits}")
        if self.family == PQC:
            if self.topology is None or self.layers is None or self.total_gates is not None:
                raise SpecError("PQC specs carry topology and layers, and no total_gates")
            object.__setattr__(self, "topology", Topology.parse(self.topology))
            if self.layers < 1:
                raise SpecError(f"layers must be positive, got {self.layers}")
        elif self.family == G3:
            if self.total_gates is None or self.topology is not None or self.layers is not None:
                raise SpecError("G3 specs carry total_gates, and no topology or layers")
            if self.total_gates < 1:
                raise SpecError(f"total_gates must be positive, got {self.total_gates}")
        else:
            raise SpecError(f"unknown family {self.family!r}")

    @classmethod
    def pqc(cls, n_qubits: int, topology: Topology | str, layers: int) -> CircuitSpec:
        return cls(PQC, n_qubits, topology=Topology.parse(topology), layers=layers)

    @classmethod
    def g3(cls, n_qubits: int, total_gates: int) -> CircuitSpec:
        return cls(G3, n_qubits, total_gates=total_gates)

    @property
    def n_params(self) -> int:
        return 2 * self.n_qubits * self.layers if self.family == PQC else 0

    @property
    def gates(self) -> int:
        return gate_count(self).total


def topology_cnots(n_qubits: int, topology: Topology | str) -> list[tuple[int, int]]:
    """(control, target) pairs of one layer's connection step."""
    topology = Topology.parse(topology)
    if topology is Topology.NO_CONNECTIONS:
        return []
    if topology is Topology.STAR:
        return [(0, q) for q in range(1, n_qubits)]
    chain = [(q, q + 1) for q in range(n_qubits - 1)]
    if topology is Topology.RING:
        chain.append((n_qubits - 1, 0))
    return chain


def gate_count(spec: CircuitSpec) -> GateCount:
    if spec.family == G3:
        return GateCount(None, spec.total_gates)
    n, l = spec.n_qubits, spec.layers
    cnots = {
        Topology.NO_CONNECTIONS: 0,
        Topology.LINEAR: (n - 1) * l,
        Topology.RING: n * l,
        Topology.STAR: (n - 1) * l,
    }[spec.topology]
    return GateCount(cnots, 2 * n * l + cnots)


def pqc_layer_gates(n_qubits: int, topology: Topology | str, layer_params: Sequence[float]) -> list[GateOp]:
    layer_params = np.asarray(layer_params, dtype=np.float64)
    if layer_params.shape != (2 * n_qubits,):
        raise ShapeError(f"a layer on {n_qubits} qubits takes {2 * n_qubits} angles, got {layer_params.shape}")
    gates = [GateOp("RX", (q,), float(layer_params[q])) for q in range(n_qubits)]
    gates += [GateOp("RY", (q,), float(layer_params[n_qubits + q])) for q in range(n_qubits)]
    gates += [GateOp("CNOT", pair) for pair in topology_cnots(n_qubits, topology)]
    return gates


def _check_pqc(spec: CircuitSpec) -> None:
    if spec.family != PQC:
        raise SpecError(f"expected a PQC spec, got family {spec.family!r}")


def pqc_gates(spec: CircuitSpec, params: np.ndarray) -> list[GateOp]:
    _check_pqc(spec)
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (spec.n_params,):
        raise ShapeError(f"spec needs {spec.n_params} parameters, got shape {params.shape}")
    width = 2 * spec.n_qubits
    gates: list[GateOp] = []
    for j in range(spec.layers):
        gates += pqc_layer_gates(spec.n_qubits, spec.topology, params[j * width : (j + 1) * width])
    return gates


def run_pqc(spec: CircuitSpec, params: np.ndarray) -> StateVector:
    return simulate(spec.n_qubits, pqc_gates(spec, params))


def pqc_program(spec: CircuitSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Encoded gate structure of a PQC plus the gate slot of every parameter.

    Returns ``(kinds, q0, q1, slots)`` where ``slots[i]`` is the position in
    the gate list that consumes ``params[i]``.
    """
    _check_pqc(spec)
    kinds, q0, q1, _ = encode_gates(pqc_gates(spec, np.zeros(spec.n_params)))
    slots = np.flatnonzero(kinds != CNOT)
    assert slots.shape == (spec.n_params,)
    return kinds, q0, q1, slots


def sample_parameter_vector(spec: CircuitSpec, rng: np.random.Generator) -> np.ndarray:
    """``2 n l`` i.i.d. angles, uniform on ``[0, 2 pi)``."""
    _check_pqc(spec)
    # random() < 1 - 2**-53, and that times 2 pi still rounds below 2 pi.
    return rng.random(spec.n_params) * TWO_PI


def _sample_g3_encoded(n_qubits: int, total_gates: int, rng: np.random.Generator):
    if n_qubits < 2:
        raise SpecError("G3 circuits need at least 2 qubits")
    if total_gates < 1:
        raise SpecError(f"total_gates must be positive, got {total_gates}")
    which = rng.integers(0, 3, size=total_gates)
    single = rng.integers(0, n_qubits, size=total_gates)
    pair = rng.integers(0, n_qubits * (n_qubits - 1), size=total_gates)
    control = pair // (n_qubits - 1)
    target = pair % (n_qubits - 1)
    target = target + (target >= control)
    kinds = _G3_CODES[which]
    is_cnot = which == 0
    q0 = np.where(is_cnot, control, single).astype(np.int64)
    q1 = np.where(is_cnot, target, 0).astype(np.int64)
    return kinds, q0, q1


def sample_g3_circuit(n_qubits: int, total_gates: int, rng: np.random.Generator) -> list[GateOp]:
    """Draw a G3 circuit: each gate uniform over {CNOT, H, T}.

    Single-qubit gates pick a uniform qubit; a CNOT picks a uniform ordered
    pair among the ``n (n - 1)`` possibilities.
    """
    kinds, q0, q1 = _sample_g3_encoded(n_qubits, total_gates, rng)
    gates = []
    for which, a, b in zip(kinds, q0, q1):
        if which == CNOT:
            gates.append(GateOp("CNOT", (int(a), int(b))))
        else:
            gates.append(GateOp("H" if which == GATE_KINDS["H"] else "T", (int(a),)))
    return gates


def sample_haar_state(n_qubits: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state: a normalized vector of i.i.d. complex Gaussians."""
    if n_qubits < 1:
        raise ValueError(f"n_qubits must be positive, got {n_qubits}")
    dim = 1 << n_qubits
    z = rng.standard_normal(2 * dim)
    amps = z[:dim] + 1j * z[dim:]
    return StateVector(n_qubits, amps / np.linalg.norm(amps))


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for sample ``index`` of the ensemble seeded by ``seed``."""
    return np.random.default_rng([int(seed), int(index)])


def as_seed(seed_or_rng: int | np.random.Generator) -> int:
    if isinstance(seed_or_rng, np.random.Generator):
        return int(seed_or_rng.integers(0, 2**63))
    return int(seed_or_rng)


def sample_states(spec: CircuitSpec, n_samples: int, seed: int | np.random.Generator) -> np.ndarray:
    """Output states of ``n_samples`` circuits drawn from ``spec``.

    Returns a ``(n_samples, 2**n)`` array; row ``i`` depends only on
    ``(seed, i)``.
    """
    seed = as_seed(seed)
    if n_samples < 1:
        raise ValueError(f"n_samples must be positive, got {n_samples}")
    if spec.family == PQC:
        kinds, q0, q1, slots = pqc_program(spec)
        angles = np.zeros((n_samples, kinds.shape[0]))
        for i in range(n_samples):
            angles[i, slots] = sample_parameter_vector(spec, sample_rng(seed, i))
        return simulate_batch(spec.n_qubits, kinds, q0, q1, angles)
    shape = (n_samples, spec.total_gates)
    kinds = np.empty(shape, dtype=np.int8)
    q0 = np.empty(shape, dtype=np.int64)
    q1 = np.empty(shape, dtype=np.int64)
    for i in range(n_samples):
        kinds[i], q0[i], q1[i] = _sample_g3_encoded(spec.n_qubits, spec.total_gates, sample_rng(seed, i))
    return simulate_batch(spec.n_qubits, kinds, q0, q1, 0.0)


def sample_haar_states(n_qubits: int, n_samples: int, seed: int | np.random.Generator) -> np.ndarray:
    seed = as_seed(seed)
    if n_samples < 1:
        raise ValueError(f"n_samples must be positive, got {n_samples}")
    out = np.empty((n_samples, 1 << n_qubits), dtype=np.complex128)
    for i in range(n_samples):
        out[i] = sample_haar_state(n_qubits, sample_rng(seed, i)).amplitudes
    return out
