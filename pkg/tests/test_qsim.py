import numpy as np
import pytest

from qnk.errors import MalformedCircuit, TooManyQubits, WidthMismatch
from qnk.qsim import (
    PauliHamiltonian,
    QuantumCircuit,
    StateVector,
    accept_probability,
    apply_gate,
    dense_matrix,
    expectation,
    format_circuit,
    ground_energy,
    history_state,
    measure_qubit,
    parse_circuit,
    propagation_hamiltonian,
    run_circuit,
    run_unitary,
)
from qnk.rand import Drbg


class TestRunCircuit:
    def test_hadamard_half(self):
        Q = QuantumCircuit(1, (("H", (0,)),))
        _, p = run_circuit(Q, [], Drbg(1))
        assert abs(p - 0.5) < 1e-12

    def test_x_gate_certain(self):
        Q = QuantumCircuit(1, (("X", (0,)),))
        bit, p = run_circuit(Q, [], Drbg(1))
        assert p == pytest.approx(1.0) and bit == 1

    def test_parity_fanin(self):
        Q = QuantumCircuit(4, (("CNOT", (1, 0)), ("CNOT", (2, 0)), ("CNOT", (3, 0))),
                           n_input=3)
        # dense matrix-vector oracle
        for bits in ((1, 0, 1), (1, 1, 1), (0, 0, 0)):
            sv = run_unitary(Q, list(bits))
            want = sum(bits) % 2
            assert sv.prob_of(0, want) == pytest.approx(1.0)

    def test_qubit_cap(self):
        with pytest.raises(TooManyQubits):
            QuantumCircuit(13, ())

    def test_bad_gate_target(self):
        with pytest.raises(MalformedCircuit):
            QuantumCircuit(1, (("CNOT", (0, 1)),))


class TestMeasure:
    def test_zero_state_computational(self):
        bit, post = measure_qubit(StateVector(1), 0, "computational", Drbg(1))
        assert bit == 0 and post.prob_of(0, 0) == pytest.approx(1.0)

    def test_plus_state_hadamard(self):
        sv = StateVector(1, [2 ** -0.5, 2 ** -0.5])
        for seed in range(20):
            bit, _ = measure_qubit(sv.copy(), 0, "hadamard", Drbg(seed))
            assert bit == 0

    def test_plus_state_computational_frequency(self):
        sv = StateVector(1, [2 ** -0.5, 2 ** -0.5])
        d = Drbg(2)
        shots = 10 ** 4
        ones = sum(measure_qubit(sv.copy(), 0, "computational", d.child(f"s{i}"))[0]
                   for i in range(shots))
        sigma = (shots * 0.25) ** 0.5
        assert abs(ones - shots / 2) <= 3 * sigma

    def test_post_state_renormalized(self):
        sv = StateVector(2, [0.6, 0, 0.8, 0])
        _, post = measure_qubit(sv, 0, "computational", Drbg(3))
        assert abs(post.norm() - 1.0) < 1e-9


class TestHistoryState:
    def test_no_gates_is_plain_input(self):
        Q = QuantumCircuit(2, (), n_input=2)
        h = history_state(Q, [1, 0])
        assert h.n_qubits == 2
        assert h.prob_of(0, 1) == pytest.approx(1.0)

    def test_single_x_makes_bell_pair(self):
        Q = QuantumCircuit(1, (("X", (0,)),), n_input=1)
        h = history_state(Q, [0])
        assert np.allclose(h.amps, [2 ** -0.5, 0, 0, 2 ** -0.5])

    def test_norm_one_random_circuits(self):
        d = Drbg(4)
        pool = ["H", "X", "Z", "S", "T"]
        for _ in range(10):
            gates = tuple((pool[d.randint(0, 4)], (d.randint(0, 1),)) for _ in range(3))
            Q = QuantumCircuit(2, gates, n_input=2)
            h = history_state(Q, [d.bit(), d.bit()])
            assert abs(h.norm() - 1.0) < 1e-9

    def test_qubit_budget(self):
        Q = QuantumCircuit(5, tuple(("X", (0,)),) * 0 + tuple([("X", (0,))] * 8),
                           n_input=5)
        with pytest.raises(TooManyQubits):
            history_state(Q, [0] * 5)


class TestHamiltonians:
    def test_z_expectations(self):
        H = PauliHamiltonian(1, ((1.0, "Z"),))
        assert expectation(H, StateVector.from_bits([0])) == pytest.approx(1.0)
        assert expectation(H, StateVector.from_bits([1])) == pytest.approx(-1.0)

    def test_two_gate_propagation_annihilates(self):
        Q = QuantumCircuit(1, (("H", (0,)), ("T", (0,))), n_input=1)
        h = history_state(Q, [0])
        H = propagation_hamiltonian(Q)
        assert abs(expectation(H, h)) < 1e-9
        # annihilation, not just zero mean
        M = dense_matrix(H)
        assert np.max(np.abs(M @ h.amps)) < 1e-9

    def test_ground_energy_of_z(self):
        H = PauliHamiltonian(2, ((1.0, "ZI"), (1.0, "IZ")))
        assert ground_energy(H) == pytest.approx(-2.0)

    def test_term_cap(self):
        with pytest.raises(WidthMismatch):
            PauliHamiltonian(1, tuple((1.0, "Z") for _ in range(65)))

    def test_propagation_ground_energy_nonnegative(self):
        Q = QuantumCircuit(1, (("X", (0,)),), n_input=1)
        assert ground_energy(propagation_hamiltonian(Q)) > -1e-9


class TestNormPreservation:
    def test_every_gate_preserves_norm(self):
        d = Drbg(5)
        sv = StateVector(3)
        apply_gate(sv, "H", (0,))
        apply_gate(sv, "H", (1,))
        for name, targets in (("X", (2,)), ("Z", (0,)), ("S", (1,)), ("T", (2,)),
                              ("CNOT", (0, 1)), ("CCX", (0, 1, 2)), ("H", (2,))):
            apply_gate(sv, name, targets)
            assert abs(sv.norm() - 1.0) < 1e-9


class TestTextFormat:
    def test_roundtrip(self):
        Q = QuantumCircuit(3, (("H", (0,)), ("CNOT", (0, 1)), ("CCX", (0, 1, 2)),
                               ("T", (2,))), n_input=2)
        text = format_circuit(Q)
        assert parse_circuit(text) == Q

    def test_grammar(self):
        Q = parse_circuit("qubits 2\ninput 1\n# comment\nH 0\nCNOT 0 1\n")
        assert Q.n_qubits == 2 and Q.n_input == 1 and len(Q.gates) == 2

    def test_unknown_directive(self):
        with pytest.raises(MalformedCircuit):
            parse_circuit("qubits 1\nFOO 0\n")

    def test_missing_header(self):
        with pytest.raises(MalformedCircuit):
            parse_circuit("H 0\n")


def test_accept_probability_matches_sampling():
    Q = QuantumCircuit(2, (("H", (0,)), ("CNOT", (0, 1))), n_input=0)
    p = accept_probability(Q, [])
    d = Drbg(6)
    shots = 10 ** 4
    hits = sum(run_circuit(Q, [], d.child(f"s{i}"))[0] for i in range(shots))
    sigma = (shots * p * (1 - p)) ** 0.5
    assert abs(hits - shots * p) <= 3 * sigma
