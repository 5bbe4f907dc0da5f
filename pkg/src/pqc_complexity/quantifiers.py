"""Complexity quantifiers for circuit ensembles.

* expressibility: KL divergence between the histogram of pairwise
  fidelities of an ensemble and the exact Haar fidelity law
  ``(d - 1) (1 - F)**(d - 2)`` integrated over the same bins;
* majorization: per-cumulant population standard deviation of the sorted
  (Lorenz) cumulative output distributions;
* entanglement: mean and population standard deviation of the
  Meyer-Wallach measure, with closed-form CUE references.

Reductions run sequentially in numpy in a fixed order, so results are
identical for any simulation thread count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt
from typing import Sequence

import numpy as np

from .circuits import (
    PQC,
    CircuitSpec,
    as_seed,
    pqc_gates,
    sample_g3_circuit,
    sample_parameter_vector,
    sample_states,
)
from .exceptions import DivergenceError, NormalizationError, ShapeError
from .statevec import StateVector, meyer_wallach_batch, outcome_probabilities, simulate

DEFAULT_BINS = 75


@dataclass
class FidelityHistogram:
    bin_edges: np.ndarray
    masses: np.ndarray
    # Natural log of the masses when known more precisely than log(masses),
    # e.g. analytic Haar masses that underflow at large dimension.
    log_masses: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.bin_edges = np.asarray(self.bin_edges, dtype=np.float64)
        self.masses = np.asarray(self.masses, dtype=np.float64)
        if self.bin_edges.ndim != 1 or self.masses.shape != (self.bin_edges.shape[0] - 1,):
            raise ShapeError(f"{self.bin_edges.shape[0]} edges cannot hold {self.masses.shape} masses")

    @property
    def n_bins(self) -> int:
        return self.masses.shape[0]


@dataclass
class LorenzFluctuations:
    n_qubits: int
    k_values: np.ndarray
    std_per_k: np.ndarray

    def max_deviation(self, other: LorenzFluctuations) -> float:
        if self.std_per_k.shape != other.std_per_k.shape:
            raise ShapeError("fluctuation curves have different lengths")
        return float(np.max(np.abs(self.std_per_k - other.std_per_k)))


@dataclass
class EntanglementStats:
    mean_q: float
    std_q: float
    sample_size: int

    @property
    def standard_error(self) -> float:
        return self.std_q / sqrt(self.sample_size)


def _as_amplitudes(states) -> np.ndarray:
    if isinstance(states, np.ndarray):
        amps = np.asarray(states, dtype=np.complex128)
        if amps.ndim != 2:
            raise ShapeError(f"expected a (samples, dim) array, got shape {amps.shape}")
        return amps
    states = list(states)
    if not states:
        return np.empty((0, 1), dtype=np.complex128)
    if len({s.n_qubits for s in states}) != 1:
        raise ShapeError("ensemble mixes qubit counts")
    return np.stack([s.amplitudes for s in states])


def pair_fidelities(states) -> np.ndarray:
    """Fidelities of the disjoint consecutive pairs ``(2i, 2i + 1)``.

    ``states`` is a sequence of :class:`StateVector` or a ``(2m, d)`` array.
    """
    amps = _as_amplitudes(states)
    if amps.shape[0] % 2:
        raise ShapeError(f"pairing needs an even ensemble, got {amps.shape[0]} states")
    overlap = np.sum(amps[0::2].conj() * amps[1::2], axis=1)
    return np.clip(overlap.real**2 + overlap.imag**2, 0.0, 1.0)


def uniform_edges(n_bins: int) -> np.ndarray:
    if n_bins < 1:
        raise ValueError(f"n_bins must be positive, got {n_bins}")
    return np.linspace(0.0, 1.0, n_bins + 1)


def build_histogram(samples: Sequence[float], n_bins: int = DEFAULT_BINS) -> FidelityHistogram:
    """Histogram on ``n_bins`` equal-width bins over [0, 1].

    Bins are half-open ``[a, b)`` except the last, which also takes 1.0.
    """
    samples = np.asarray(samples, dtype=np.float64).ravel()
    if samples.size == 0:
        raise ValueError("cannot build a histogram from no samples")
    if np.any((samples < 0.0) | (samples > 1.0)) or np.any(np.isnan(samples)):
        raise ValueError("fidelity samples must lie in [0, 1]")
    edges = uniform_edges(n_bins)
    idx = np.minimum((samples * n_bins).astype(np.int64), n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    return FidelityHistogram(edges, counts / samples.size)


def _haar_log_masses(dimension: int, edges: np.ndarray) -> np.ndarray:
    # log[(1-a)^(d-1) - (1-b)^(d-1)] = (d-1) log(1-a) + log1p(-((1-b)/(1-a))^(d-1))
    a, b = edges[:-1], edges[1:]
    with np.errstate(divide="ignore"):
        log_head = (dimension - 1) * np.log1p(-a)
        ratio = np.where(a < 1.0, (1.0 - b) / np.where(a < 1.0, 1.0 - a, 1.0), 0.0)
        return log_head + np.log1p(-(ratio ** (dimension - 1)))


def _check_edges(edges: np.ndarray) -> np.ndarray:
    edges = np.asarray(edges, dtype=np.float64)
    if edges.ndim != 1 or edges.shape[0] < 2:
        raise ShapeError("need at least two bin edges")
    if edges[0] != 0.0 or edges[-1] != 1.0 or np.any(np.diff(edges) <= 0):
        raise ValueError("bin edges must increase strictly from 0 to 1")
    return edges


def haar_bin_masses(dimension: int, bin_edges: np.ndarray) -> np.ndarray:
    """Exact Haar fidelity mass of each bin: ``(1-a)**(d-1) - (1-b)**(d-1)``."""
    return haar_histogram(dimension, bin_edges).masses


def haar_histogram(dimension: int, bin_edges: np.ndarray) -> FidelityHistogram:
    if dimension < 2:
        raise ValueError(f"Haar fidelity law needs dimension >= 2, got {dimension}")
    edges = _check_edges(bin_edges)
    tail = (1.0 - edges) ** (dimension - 1)
    masses = tail[:-1] - tail[1:]
    return FidelityHistogram(edges, masses, log_masses=_haar_log_masses(dimension, edges))


def kl_divergence(p: FidelityHistogram, q: FidelityHistogram) -> float:
    """``sum p log(p / q)`` in nats; empty bins of ``p`` contribute nothing."""
    if p.bin_edges.shape != q.bin_edges.shape or not np.array_equal(p.bin_edges, q.bin_edges):
        raise ShapeError("histograms have different bin edges")
    support = p.masses > 0
    if q.log_masses is not None:
        log_q = q.log_masses[support]
    else:
        with np.errstate(divide="ignore"):
            log_q = np.log(q.masses[support])
    if np.any(np.isneginf(log_q)):
        bad = np.flatnonzero(support)[np.isneginf(log_q)]
        raise DivergenceError(f"p has mass in bins {bad.tolist()} where q has none")
    p_s = p.masses[support]
    return max(float(np.sum(p_s * (np.log(p_s) - log_q))), 0.0)


def expressibility_of_states(states, n_bins: int = DEFAULT_BINS) -> float:
    amps = _as_amplitudes(states)
    fids = pair_fidelities(amps)
    hist = build_histogram(fids, n_bins)
    return kl_divergence(hist, haar_histogram(amps.shape[1], hist.bin_edges))


def expressibility(spec: CircuitSpec, n_samples: int, n_bins: int = DEFAULT_BINS, seed=0) -> float:
    """KL divergence of the ensemble's fidelity histogram from the Haar law.

    ``n_samples`` output states give ``n_samples / 2`` fidelities.
    ``seed`` is an integer or a ``numpy.random.Generator``.
    """
    if n_samples < 2 or n_samples % 2:
        raise ShapeError(f"n_samples must be even and >= 2, got {n_samples}")
    return expressibility_of_states(sample_states(spec, n_samples, seed), n_bins)


def _check_distribution(p: np.ndarray) -> None:
    if np.any(p < 0):
        raise NormalizationError("probabilities must be nonnegative")
    sums = p.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > 1e-9):
        raise NormalizationError(f"probabilities must sum to 1, got sums up to {np.max(np.abs(sums - 1.0)):.3g} off")


def lorenz_cumulants(p) -> np.ndarray:
    """Partial sums of ``p`` sorted in non-increasing order.

    Works along the last axis. The final cumulant is set to exactly 1.
    """
    p = np.asarray(p, dtype=np.float64)
    _check_distribution(p)
    cum = np.cumsum(-np.sort(-p, axis=-1), axis=-1)
    cum[..., -1] = 1.0
    return cum


def lorenz_fluctuations(distributions) -> LorenzFluctuations:
    """Population std of every cumulant across an ensemble of distributions."""
    try:
        dists = np.asarray(distributions, dtype=np.float64)
    except ValueError as exc:
        raise ShapeError("ragged ensemble of probability vectors") from exc
    if dists.ndim != 2 or dists.shape[0] == 0:
        raise ShapeError(f"expected a nonempty (samples, 2**n) array, got shape {dists.shape}")
    cum = lorenz_cumulants(dists)
    n_out = dists.shape[1]
    return LorenzFluctuations(
        n_qubits=int(np.log2(n_out)),
        k_values=np.arange(1, n_out + 1),
        std_per_k=np.std(cum, axis=0),
    )


def lorenz_fluctuations_of_states(states) -> LorenzFluctuations:
    amps = _as_amplitudes(states)
    return lorenz_fluctuations(amps.real**2 + amps.imag**2)


def circuit_output_distribution(spec: CircuitSpec, params_or_rng) -> np.ndarray:
    """Computational-basis probabilities of ``U |0...0>`` for one draw of ``spec``.

    For a PQC, ``params_or_rng`` is a parameter vector or a generator to
    draw one from; for G3 it must be a generator.
    """
    if spec.family == PQC:
        params = params_or_rng
        if isinstance(params_or_rng, np.random.Generator):
            params = sample_parameter_vector(spec, params_or_rng)
        state = simulate(spec.n_qubits, pqc_gates(spec, params))
    else:
        if not isinstance(params_or_rng, np.random.Generator):
            raise TypeError("G3 output distributions are drawn from a numpy Generator")
        state = simulate(spec.n_qubits, sample_g3_circuit(spec.n_qubits, spec.total_gates, params_or_rng))
    return outcome_probabilities(state)


def majorization(spec: CircuitSpec, n_samples: int, seed=0) -> LorenzFluctuations:
    if n_samples < 1:
        raise ValueError(f"n_samples must be positive, got {n_samples}")
    return lorenz_fluctuations_of_states(sample_states(spec, n_samples, seed))


def entanglement_stats_of_states(states) -> EntanglementStats:
    amps = _as_amplitudes(states)
    n_qubits = int(amps.shape[1]).bit_length() - 1
    q = meyer_wallach_batch(amps, n_qubits)
    return EntanglementStats(float(np.mean(q)), float(np.std(q)), int(q.shape[0]))


def entanglement_stats(spec: CircuitSpec, n_samples: int, seed=0) -> EntanglementStats:
    """Mean and population std of the Meyer-Wallach measure over the ensemble."""
    if n_samples < 2:
        raise ValueError(f"n_samples must be >= 2, got {n_samples}")
    return entanglement_stats_of_states(sample_states(spec, n_samples, as_seed(seed)))


def cue_mean_q(n_qubits: int) -> float:
    """Mean Meyer-Wallach Q of Haar-random states: ``(2**n - 2) / (2**n + 1)``."""
    if n_qubits < 2:
        raise ValueError(f"CUE references need n_qubits >= 2, got {n_qubits}")
    d = 2**n_qubits
    return (d - 2) / (d + 1)


def cue_std_q(n_qubits: int) -> float:
    if n_qubits < 2:
        raise ValueError(f"CUE references need n_qubits >= 2, got {n_qubits}")
    d = 2**n_qubits
    var = 6 * (d - 4) / ((d + 3) * (d + 2) * (d + 1) * n_qubits) + 18 * d / ((d + 3) * (d + 2) * (d + 1) ** 2)
    return sqrt(var)
