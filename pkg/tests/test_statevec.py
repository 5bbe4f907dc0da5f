import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import basis_state, dense_state, ghz, reduced_density_matrix, relabel, w_state
from pqc_complexity.exceptions import ShapeError
from pqc_complexity.statevec import (
    GateOp,
    StateVector,
    apply_gate,
    encode_gates,
    fidelity,
    meyer_wallach_batch,
    meyer_wallach_q,
    new_zero_state,
    outcome_probabilities,
    simulate,
    simulate_batch,
    single_qubit_purity,
)

SQ2 = 1 / np.sqrt(2)


def random_gates(rng, n, count):
    kinds = ["RX", "RY", "H", "T"] + (["CNOT"] if n > 1 else [])
    gates = []
    for _ in range(count):
        kind = kinds[rng.integers(len(kinds))]
        if kind == "CNOT":
            c, t = rng.choice(n, size=2, replace=False)
            gates.append(GateOp("CNOT", (c, t)))
        elif kind in ("RX", "RY"):
            gates.append(GateOp(kind, (rng.integers(n),), rng.uniform(0, 2 * np.pi)))
        else:
            gates.append(GateOp(kind, (rng.integers(n),)))
    return gates


class TestZeroState:
    @pytest.mark.parametrize(
        "n, expected",
        [(1, [1, 0]), (2, [1, 0, 0, 0])],
    )
    def test_small(self, n, expected):
        np.testing.assert_array_equal(new_zero_state(n).amplitudes, expected)

    def test_four_qubits(self):
        s = new_zero_state(4)
        assert s.amplitudes.shape == (16,)
        assert s.norm_squared() == 1.0
        assert np.flatnonzero(s.amplitudes).tolist() == [0]

    @pytest.mark.parametrize("n", [0, -1, 25])
    def test_size_guard(self, n):
        with pytest.raises(ValueError):
            new_zero_state(n)

    def test_length_invariant(self):
        with pytest.raises(ShapeError):
            StateVector(2, np.ones(3))


class TestGateOp:
    def test_angle_iff_rotation(self):
        with pytest.raises(ValueError):
            GateOp("RX", (0,))
        with pytest.raises(ValueError):
            GateOp("H", (0,), 0.1)

    def test_cnot_needs_distinct_pair(self):
        with pytest.raises(ValueError):
            GateOp("CNOT", (1, 1))
        with pytest.raises(ValueError):
            GateOp("CNOT", (1,))

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            GateOp("RZ", (0,), 0.3)


class TestApplyGate:
    def test_hadamard(self):
        s = apply_gate(new_zero_state(1), GateOp("H", (0,)))
        np.testing.assert_allclose(s.amplitudes, [SQ2, SQ2], atol=1e-15)

    def test_rx_pi(self):
        s = apply_gate(new_zero_state(1), GateOp("RX", (0,), np.pi))
        np.testing.assert_allclose(s.amplitudes, [0, -1j], atol=1e-15)

    def test_cnot_truth_table(self):
        # (|00> + |10>)/sqrt2 with kets written qubit 0 first, i.e. indices 0 and 1.
        s = StateVector(2, np.array([SQ2, SQ2, 0, 0]))
        apply_gate(s, GateOp("CNOT", (0, 1)))
        np.testing.assert_allclose(s.amplitudes, [SQ2, 0, 0, SQ2], atol=1e-15)

    def test_t_gate_phase(self):
        s = StateVector(1, np.array([SQ2, SQ2]))
        apply_gate(s, GateOp("T", (0,)))
        np.testing.assert_allclose(s.amplitudes, [SQ2, SQ2 * np.exp(1j * np.pi / 4)], atol=1e-15)

    def test_in_place(self):
        s = new_zero_state(2)
        assert apply_gate(s, GateOp("H", (1,))) is s
        np.testing.assert_allclose(s.amplitudes, [SQ2, 0, SQ2, 0], atol=1e-15)

    @pytest.mark.parametrize("gate", [GateOp("H", (3,)), GateOp("CNOT", (0, 5)), GateOp("RY", (2,), 1.0)])
    def test_invalid_index(self, gate):
        with pytest.raises(IndexError):
            apply_gate(new_zero_state(2), gate)

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(2024)
        gates = random_gates(rng, 3, 20)
        s = new_zero_state(3)
        for g in gates:
            apply_gate(s, g)
        np.testing.assert_allclose(s.amplitudes, dense_state(3, gates), rtol=0, atol=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_oracle_equivalence_many(self, n):
        rng = np.random.default_rng(n)
        for _ in range(100):
            gates = random_gates(rng, n, 30)
            np.testing.assert_allclose(simulate(n, gates).amplitudes, dense_state(n, gates), rtol=0, atol=1e-12)

    def test_norm_preserved_per_gate(self):
        rng = np.random.default_rng(5)
        s = new_zero_state(4)
        for g in random_gates(rng, 4, 200):
            apply_gate(s, g)
            assert abs(s.norm_squared() - 1) < 1e-12


def test_norm_over_long_sequence():
    rng = np.random.default_rng(11)
    s = simulate(5, random_gates(rng, 5, 10_000))
    assert abs(s.norm_squared() - 1) < 1e-10


def test_batch_matches_single():
    rng = np.random.default_rng(3)
    programs = [random_gates(rng, 3, 12) for _ in range(5)]
    enc = [encode_gates(p) for p in programs]
    stacked = [np.stack(col) for col in zip(*enc)]
    batch = simulate_batch(3, *stacked)
    for row, p in zip(batch, programs):
        np.testing.assert_array_equal(row, simulate(3, p).amplitudes)


def test_batch_rejects_bad_index():
    with pytest.raises(IndexError):
        simulate_batch(2, [2], [2], [0], [0.0])


class TestFidelity:
    def test_self(self):
        s = simulate(3, random_gates(np.random.default_rng(0), 3, 15))
        assert fidelity(s, s) == pytest.approx(1, abs=1e-12)

    def test_orthogonal(self):
        assert fidelity(StateVector(1, [1, 0]), StateVector(1, [0, 1])) == 0

    def test_half(self):
        plus = apply_gate(new_zero_state(1), GateOp("H", (0,)))
        assert fidelity(new_zero_state(1), plus) == pytest.approx(0.5, abs=1e-15)

    def test_symmetric_exactly(self):
        rng = np.random.default_rng(1)
        a = simulate(3, random_gates(rng, 3, 10))
        b = simulate(3, random_gates(rng, 3, 10))
        assert fidelity(a, b) == fidelity(b, a)

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            fidelity(new_zero_state(1), new_zero_state(2))


class TestOutcomeProbabilities:
    def test_zero(self):
        np.testing.assert_array_equal(outcome_probabilities(new_zero_state(3)), [1] + [0] * 7)

    def test_hh(self):
        s = simulate(2, [GateOp("H", (0,)), GateOp("H", (1,))])
        np.testing.assert_allclose(outcome_probabilities(s), [0.25] * 4, atol=1e-15)

    def test_sums_to_one(self):
        s = simulate(4, random_gates(np.random.default_rng(9), 4, 40))
        assert abs(outcome_probabilities(s).sum() - 1) < 1e-10


class TestPurity:
    @pytest.mark.parametrize("k", range(4))
    def test_product(self, k):
        assert single_qubit_purity(StateVector(4, basis_state("0101")), k) == 1.0

    @pytest.mark.parametrize("k", range(4))
    def test_ghz(self, k):
        assert single_qubit_purity(StateVector(4, ghz(4)), k) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("k", range(3))
    def test_w3_against_partial_trace(self, k):
        psi = w_state(3)
        rho = reduced_density_matrix(psi, 3, k)
        np.testing.assert_allclose(np.linalg.eigvalsh(rho), [1 / 3, 2 / 3], atol=1e-12)
        oracle = np.trace(rho @ rho).real
        assert oracle == pytest.approx(5 / 9, abs=1e-12)
        assert single_qubit_purity(StateVector(3, psi), k) == pytest.approx(oracle, abs=1e-12)

    def test_random_states_against_partial_trace(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            s = simulate(4, random_gates(rng, 4, 30))
            for k in range(4):
                rho = reduced_density_matrix(s.amplitudes, 4, k)
                assert single_qubit_purity(s, k) == pytest.approx(np.trace(rho @ rho).real, abs=1e-12)

    def test_invalid_k(self):
        with pytest.raises(IndexError):
            single_qubit_purity(new_zero_state(2), 2)


class TestMeyerWallach:
    @pytest.mark.parametrize("bits", ["0", "1", "01", "110", "0101", "11111111"])
    def test_basis_state(self, bits):
        assert meyer_wallach_q(StateVector(len(bits), basis_state(bits))) == 0.0

    @pytest.mark.parametrize("n", range(2, 9))
    def test_ghz(self, n):
        assert meyer_wallach_q(StateVector(n, ghz(n))) == pytest.approx(1.0, abs=1e-12)

    def test_w3(self):
        assert meyer_wallach_q(StateVector(3, w_state(3))) == pytest.approx(8 / 9, abs=1e-12)

    def test_batch_agrees(self):
        amps = np.stack([ghz(3), w_state(3), basis_state("010")])
        np.testing.assert_allclose(meyer_wallach_batch(amps, 3), [1, 8 / 9, 0], atol=1e-12)

    @pytest.mark.parametrize("state", [ghz(4), w_state(4), basis_state("0110")])
    def test_relabeling_invariance(self, state):
        q = meyer_wallach_q(StateVector(4, state))
        for perm in itertools.permutations(range(4)):
            assert meyer_wallach_q(StateVector(4, relabel(state, 4, perm))) == pytest.approx(q, abs=1e-12)


@st.composite
def random_states(draw, max_qubits=5):
    n = draw(st.integers(1, max_qubits))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return StateVector(n, z / np.linalg.norm(z)), rng


@given(random_states())
@settings(max_examples=60, deadline=None)
def test_bounds(sample):
    s, _ = sample
    for k in range(s.n_qubits):
        assert 0.5 <= single_qubit_purity(s, k) <= 1.0
    assert 0.0 <= meyer_wallach_q(s) <= 1.0


@given(random_states(max_qubits=4))
@settings(max_examples=40, deadline=None)
def test_relabeling_random_states(sample):
    s, rng = sample
    perm = rng.permutation(s.n_qubits)
    moved = StateVector(s.n_qubits, relabel(s.amplitudes, s.n_qubits, perm))
    assert meyer_wallach_q(moved) == pytest.approx(meyer_wallach_q(s), abs=1e-12)


@given(st.integers(1, 4), st.integers(0, 2**32 - 1), st.integers(1, 300))
@settings(max_examples=40, deadline=None)
def test_norm_preservation_property(n, seed, count):
    s = simulate(n, random_gates(np.random.default_rng(seed), n, count))
    assert abs(s.norm_squared() - 1) < 1e-10
