"""Complexity of parameterized and G3 random quantum circuits.

Statevector ensembles of layered RX/RY + CNOT ansatze (four CNOT
topologies) and of random {CNOT, H, T} circuits, scored against the Haar
measure by expressibility, Lorenz-curve fluctuations and Meyer-Wallach
entanglement.
"""

__version__ = "0.1.0"

from .circuits import (
    CircuitSpec,
    GateCount,
    Topology,
    gate_count,
    pqc_layer_gates,
    run_pqc,
    sample_g3_circuit,
    sample_haar_state,
    sample_parameter_vector,
)
from .exceptions import DivergenceError, NormalizationError, ShapeError, SpecError
from .quantifiers import (
    EntanglementStats,
    FidelityHistogram,
    LorenzFluctuations,
    build_histogram,
    circuit_output_distribution,
    cue_mean_q,
    cue_std_q,
    entanglement_stats,
    expressibility,
    haar_bin_masses,
    kl_divergence,
    lorenz_cumulants,
    lorenz_fluctuations,
    majorization,
    pair_fidelities,
)
from .statevec import (
    GateOp,
    StateVector,
    apply_gate,
    fidelity,
    meyer_wallach_q,
    new_zero_state,
    outcome_probabilities,
    single_qubit_purity,
)
