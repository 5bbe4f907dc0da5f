"""Parameter sweeps over circuit families, qubit counts and layer counts.

Every record gets its own seed, derived by hashing the master seed with
the record's grid key, so a record can be recomputed alone and the sweep
output does not depend on evaluation order. Records are emitted in a
canonical grid order.
"""

from __future__ import annotations

import hashlib
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numba
import numpy as np

from .circuits import G3, PQC, CircuitSpec, Topology, gate_count, sample_haar_states, sample_states
from .quantifiers import (
    DEFAULT_BINS,
    cue_mean_q,
    cue_std_q,
    entanglement_stats_of_states,
    expressibility_of_states,
    lorenz_fluctuations_of_states,
)

log = logging.getLogger(__name__)

EXPRESSIBILITY = "expressibility"
MAJORIZATION = "majorization"
ENTANGLEMENT = "entanglement"
QUANTIFIERS = (EXPRESSIBILITY, MAJORIZATION, ENTANGLEMENT)

HAAR = "haar"
FAMILY_ORDER = (HAAR, PQC, G3)
TOPOLOGY_ORDER = tuple(Topology)


@dataclass(frozen=True)
class SweepConfig:
    qubit_list: tuple[int, ...] = (4, 8)
    layer_range: tuple[int, ...] = tuple(range(1, 11))
    topologies: tuple[Topology, ...] = tuple(Topology)
    families: tuple[str, ...] = (PQC, G3)
    samples_per_point: int = 10_000
    n_bins: int = DEFAULT_BINS
    master_seed: int = 42
    quantifiers: tuple[str, ...] = QUANTIFIERS
    haar_reference: bool = True

    def __post_init__(self):
        if self.samples_per_point < 2 or self.samples_per_point % 2:
            raise ValueError(f"samples per point must be even and >= 2, got {self.samples_per_point}")
        if self.n_bins < 1:
            raise ValueError(f"n_bins must be positive, got {self.n_bins}")
        unknown = set(self.quantifiers) - set(QUANTIFIERS)
        if unknown:
            raise ValueError(f"unknown quantifiers {sorted(unknown)}")
        unknown = set(self.families) - {PQC, G3}
        if unknown:
            raise ValueError(f"unknown families {sorted(unknown)}")
        object.__setattr__(self, "topologies", tuple(Topology.parse(t) for t in self.topologies))


@dataclass(frozen=True, order=True)
class GridPoint:
    """One ensemble in a sweep. Haar and G3 points use ``layers = 0``."""

    family: str
    topology: str
    n_qubits: int
    layers: int
    gates: int

    def sort_key(self) -> tuple:
        topo_rank = [t.value for t in TOPOLOGY_ORDER].index(self.topology) if self.topology else -1
        return (self.n_qubits, FAMILY_ORDER.index(self.family), topo_rank, self.layers, self.gates)

    def spec(self) -> CircuitSpec:
        if self.family == PQC:
            return CircuitSpec.pqc(self.n_qubits, self.topology, self.layers)
        if self.family == G3:
            return CircuitSpec.g3(self.n_qubits, self.gates)
        raise ValueError("Haar points have no circuit spec")


@dataclass
class ResultRecord:
    family: str
    topology: str
    n_qubits: int
    layers: int
    gates: int
    quantifier: str
    samples: int
    seed: int
    bins: int | None = None
    payload: dict = field(default_factory=dict)
    wall_time: float = 0.0
    error: str | None = None

    @property
    def point(self) -> GridPoint:
        return GridPoint(self.family, self.topology, self.n_qubits, self.layers, self.gates)

    @property
    def ok(self) -> bool:
        return self.error is None


def record_seed(master_seed: int, point: GridPoint, quantifier: str) -> int:
    """63-bit seed for one record. Haar ensembles ignore the quantifier."""
    if point.family == HAAR:
        quantifier = ""
    key = f"{int(master_seed)}|{point.family}|{point.topology}|{point.n_qubits}|{point.layers}|{point.gates}|{quantifier}"
    digest = hashlib.blake2b(key.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little") >> 1


def pqc_point(n_qubits: int, topology: Topology | str, layers: int) -> GridPoint:
    topology = Topology.parse(topology)
    total = gate_count(CircuitSpec.pqc(n_qubits, topology, layers)).total
    return GridPoint(PQC, topology.value, n_qubits, layers, total)


def g3_point(n_qubits: int, gates: int) -> GridPoint:
    return GridPoint(G3, "", n_qubits, 0, gates)


def haar_point(n_qubits: int) -> GridPoint:
    return GridPoint(HAAR, "", n_qubits, 0, 0)


def _payload(quantifier: str, states: np.ndarray, n_qubits: int, n_bins: int) -> dict:
    if quantifier == EXPRESSIBILITY:
        return {"kl": expressibility_of_states(states, n_bins)}
    if quantifier == MAJORIZATION:
        fl = lorenz_fluctuations_of_states(states)
        return {"k": fl.k_values.tolist(), "std_cumulant": fl.std_per_k.tolist()}
    stats = entanglement_stats_of_states(states)
    return {
        "mean_q": stats.mean_q,
        "std_q": stats.std_q,
        "cue_mean": cue_mean_q(n_qubits),
        "cue_std": cue_std_q(n_qubits),
    }


def _nan_payload(quantifier: str) -> dict:
    if quantifier == EXPRESSIBILITY:
        return {"kl": math.nan}
    if quantifier == MAJORIZATION:
        return {"k": [], "std_cumulant": []}
    return {"mean_q": math.nan, "std_q": math.nan, "cue_mean": math.nan, "cue_std": math.nan}


def _has_nan(payload: dict) -> bool:
    values = []
    for v in payload.values():
        values.extend(v if isinstance(v, list) else [v])
    return any(isinstance(v, float) and math.isnan(v) for v in values)


def _sample(point: GridPoint, samples: int, seed: int) -> np.ndarray:
    if point.family == HAAR:
        return sample_haar_states(point.n_qubits, samples, seed)
    return sample_states(point.spec(), samples, seed)


def evaluate_point(
    point: GridPoint,
    quantifier: str,
    samples: int,
    master_seed: int,
    n_bins: int = DEFAULT_BINS,
    states: np.ndarray | None = None,
) -> ResultRecord:
    """Compute one record. Failures become diagnostic records."""
    record = ResultRecord(
        family=point.family,
        topology=point.topology,
        n_qubits=point.n_qubits,
        layers=point.layers,
        gates=point.gates,
        quantifier=quantifier,
        samples=samples,
        seed=master_seed,
        bins=n_bins if quantifier == EXPRESSIBILITY else None,
    )
    start = time.perf_counter()
    try:
        if quantifier not in QUANTIFIERS:
            raise ValueError(f"unknown quantifier {quantifier!r}")
        if states is None:
            states = _sample(point, samples, record_seed(master_seed, point, quantifier))
        record.payload = _payload(quantifier, states, point.n_qubits, n_bins)
        if _has_nan(record.payload):
            raise FloatingPointError("quantifier evaluated to NaN")
    except Exception as exc:  # noqa: BLE001 - a sweep must outlive one bad point
        record.error = f"{type(exc).__name__}: {exc}"
        record.payload = _nan_payload(quantifier)
        log.warning("diagnostic record for %s/%s: %s", point, quantifier, record.error)
    record.wall_time = time.perf_counter() - start
    return record


def haar_reference(
    n_qubits: int,
    samples: int,
    seed: int,
    quantifiers: Sequence[str] = (MAJORIZATION, ENTANGLEMENT),
    n_bins: int = DEFAULT_BINS,
) -> list[ResultRecord]:
    """Reference records of a Haar-random state ensemble.

    One ensemble is drawn per ``(seed, n_qubits)`` and shared by all the
    requested quantifiers.
    """
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")
    point = haar_point(n_qubits)
    states = sample_haar_states(n_qubits, samples, record_seed(seed, point, ""))
    return [evaluate_point(point, q, samples, seed, n_bins, states=states) for q in quantifiers]


def _invalid_point_reason(n_qubits: int, layers: int) -> str | None:
    if not 2 <= n_qubits <= 24:
        return f"n_qubits={n_qubits} outside [2, 24]"
    if layers < 1:
        return f"layers={layers} must be positive"
    return None


def grid_points(config: SweepConfig) -> tuple[list[GridPoint], list[tuple[GridPoint, str]]]:
    """Valid grid points in canonical order, plus (point, reason) for invalid ones.

    G3 points take every distinct PQC gate total of the configured
    topologies at each qubit count.
    """
    points: set[GridPoint] = set()
    invalid: set[tuple[GridPoint, str]] = set()
    for n in config.qubit_list:
        for layers in config.layer_range:
            for topology in config.topologies:
                reason = _invalid_point_reason(n, layers)
                if reason is not None:
                    invalid.add((GridPoint(PQC, topology.value, n, layers, 0), reason))
                    continue
                pqc = pqc_point(n, topology, layers)
                if PQC in config.families:
                    points.add(pqc)
                if G3 in config.families:
                    points.add(g3_point(n, pqc.gates))
                if config.haar_reference:
                    points.add(haar_point(n))
    return sorted(points, key=GridPoint.sort_key), sorted(invalid, key=lambda pr: pr[0].sort_key())


def set_threads(threads: int | None) -> None:
    """Limit the simulation kernel to ``threads`` worker threads."""
    if threads is not None:
        numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))


def run_sweep(config: SweepConfig, threads: int | None = None) -> Iterator[ResultRecord]:
    """Yield one record per (grid point, quantifier), ordered by quantifier then grid key."""
    set_threads(threads)
    points, invalid = grid_points(config)
    haar_cache: dict[int, np.ndarray] = {}
    for quantifier in QUANTIFIERS:
        if quantifier not in config.quantifiers:
            continue
        for point, reason in invalid:
            yield ResultRecord(
                family=point.family,
                topology=point.topology,
                n_qubits=point.n_qubits,
                layers=point.layers,
                gates=point.gates,
                quantifier=quantifier,
                samples=config.samples_per_point,
                seed=config.master_seed,
                bins=config.n_bins if quantifier == EXPRESSIBILITY else None,
                payload=_nan_payload(quantifier),
                error=f"invalid grid point: {reason}",
            )
        for point in points:
            states = None
            if point.family == HAAR:
                if point.n_qubits not in haar_cache:
                    haar_cache[point.n_qubits] = _sample(
                        point, config.samples_per_point, record_seed(config.master_seed, point, "")
                    )
                states = haar_cache[point.n_qubits]
            record = evaluate_point(point, quantifier, config.samples_per_point, config.master_seed, config.n_bins, states)
            log.info(
                "%s %s %s n=%d l=%d gates=%d: %.2fs",
                quantifier,
                point.family,
                point.topology or "-",
                point.n_qubits,
                point.layers,
                point.gates,
                record.wall_time,
            )
            yield record
