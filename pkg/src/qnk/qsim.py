"""Dense statevector simulator, capped at 12 qubits.

Gate set {H, X, Z, S, T, CNOT, CCX} plus an implicit terminal computational
measurement of qubit 0. Also hosts Pauli-term Hamiltonians, the unary-clock
history-state construction for a circuit's run, and the matching propagation
Hamiltonian whose kernel contains the history state.

Qubit 0 is the most significant index bit. Circuit inputs occupy the LAST
``n_input`` qubits; every other qubit (including the output qubit 0) starts
in |0>.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MalformedCircuit, TooManyQubits, WidthMismatch
from .rand import Drbg

MAX_QUBITS = 12
ATOL = 1e-9

_SQ2 = 1.0 / np.sqrt(2.0)
GATES_1Q = {
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
}
GATE_ARITY = {"H": 1, "X": 1, "Z": 1, "S": 1, "T": 1, "CNOT": 2, "CCX": 3}

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


# ---------------------------------------------------------------------------
# state vectors


class StateVector:
    """Single-owner mutable amplitude buffer over n qubits."""

    def __init__(self, n_qubits: int, amps: np.ndarray | None = None):
        if n_qubits > MAX_QUBITS:
            raise TooManyQubits(f"{n_qubits} qubits exceeds the {MAX_QUBITS}-qubit cap")
        self.n_qubits = n_qubits
        if amps is None:
            amps = np.zeros(2 ** n_qubits, dtype=complex)
            amps[0] = 1.0
        else:
            amps = np.asarray(amps, dtype=complex)
            if amps.shape != (2 ** n_qubits,):
                raise WidthMismatch("amplitude vector has wrong dimension")
        self.amps = amps

    @classmethod
    def from_bits(cls, bits: str | list[int]) -> "StateVector":
        bits = [int(b) for b in bits]
        sv = cls(len(bits))
        sv.amps[0] = 0.0
        idx = 0
        for b in bits:
            idx = (idx << 1) | b
        sv.amps[idx] = 1.0
        return sv

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amps.copy())

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector(self.n_qubits + other.n_qubits, np.kron(self.amps, other.amps))

    def prob_of(self, qubit: int, value: int) -> float:
        """Exact probability of observing `value` on `qubit` in the computational basis."""
        t = self.amps.reshape([2] * self.n_qubits)
        probs = np.abs(t) ** 2
        axes = tuple(i for i in range(self.n_qubits) if i != qubit)
        marg = probs.sum(axis=axes)
        return float(marg[value])

    def project(self, assignments: dict[int, int]) -> tuple["StateVector", float]:
        """Project onto given qubit values; returns (normalized state, probability)."""
        t = self.amps.reshape([2] * self.n_qubits).copy()
        for q, v in assignments.items():
            idx = [slice(None)] * self.n_qubits
            idx[q] = 1 - v
            t[tuple(idx)] = 0.0
        flat = t.reshape(-1)
        p = float(np.sum(np.abs(flat) ** 2))
        if p > 1e-300:
            flat = flat / np.sqrt(p)
        return StateVector(self.n_qubits, flat), p


def apply_gate(state: StateVector, name: str, targets: tuple[int, ...]) -> None:
    """In-place gate application."""
    n = state.n_qubits
    for q in targets:
        if not 0 <= q < n:
            raise MalformedCircuit(f"gate {name} targets out-of-range qubit {q}")
    if len(set(targets)) != len(targets):
        raise MalformedCircuit(f"gate {name} has duplicate targets {targets}")
    t = state.amps.reshape([2] * n)
    if name in GATES_1Q:
        (q,) = targets
        t = np.moveaxis(t, q, -1)
        t = t @ GATES_1Q[name].T
        state.amps = np.moveaxis(t, -1, q).reshape(-1)
    elif name == "CNOT":
        c, x = targets
        t = t.copy()
        idx1 = [slice(None)] * n
        idx1[c] = 1
        xq = x if x < c else x - 1
        t[tuple(idx1)] = np.flip(t[tuple(idx1)], axis=xq).copy()
        state.amps = t.reshape(-1)
    elif name == "CCX":
        c1, c2, x = targets
        t = t.copy()
        idx = [slice(None)] * n
        idx[c1] = 1
        idx[c2] = 1
        xq = x - sum(1 for c in (c1, c2) if c < x)
        t[tuple(idx)] = np.flip(t[tuple(idx)], axis=xq).copy()
        state.amps = t.reshape(-1)
    else:
        raise MalformedCircuit(f"unknown gate {name!r}")


def measure_qubit(state: StateVector, i: int, basis: str, drbg: Drbg) -> tuple[int, StateVector]:
    """Born-rule measurement of one qubit; returns (bit, renormalized post-state).

    In the 'hadamard' basis, outcome 0 corresponds to |+>.
    """
    if basis not in ("computational", "hadamard"):
        raise WidthMismatch(f"unknown basis {basis!r}")
    work = state.copy()
    if basis == "hadamard":
        apply_gate(work, "H", (i,))
    p1 = work.prob_of(i, 1)
    # sample with 64-bit precision
    u = int.from_bytes(drbg.bytes(8), "big") / 2 ** 64
    bit = 1 if u < p1 else 0
    post, _ = work.project({i: bit})
    if basis == "hadamard":
        apply_gate(post, "H", (i,))
    return bit, post


# ---------------------------------------------------------------------------
# circuits


@dataclass(frozen=True)
class QuantumCircuit:
    """Unitary gate list; the classical output is a terminal computational
    measurement of qubit 0. Inputs fill the last `n_input` qubits."""

    n_qubits: int
    gates: tuple[tuple[str, tuple[int, ...]], ...] = ()
    n_input: int = 0

    def __post_init__(self):
        if self.n_qubits > MAX_QUBITS:
            raise TooManyQubits(f"{self.n_qubits} qubits exceeds the cap")
        if self.n_input > self.n_qubits:
            raise WidthMismatch("more input qubits than qubits")
        for name, targets in self.gates:
            if name not in GATE_ARITY:
                raise MalformedCircuit(f"unknown gate {name!r}")
            if len(targets) != GATE_ARITY[name]:
                raise MalformedCircuit(f"gate {name} expects {GATE_ARITY[name]} targets")
            for q in targets:
                if not 0 <= q < self.n_qubits:
                    raise MalformedCircuit(f"gate {name} targets out-of-range qubit {q}")

    @property
    def n_ancilla(self) -> int:
        return self.n_qubits - self.n_input


def prepare_input(Q: QuantumCircuit, inp) -> StateVector:
    """Ancilla-pad an input (bitstring over the input qubits, or a full/partial
    StateVector) into a full-width register."""
    if inp is None:
        inp = [0] * Q.n_input
    if isinstance(inp, StateVector):
        if inp.n_qubits == Q.n_qubits:
            return inp.copy()
        if inp.n_qubits != Q.n_input:
            raise WidthMismatch(
                f"input has {inp.n_qubits} qubits, circuit takes {Q.n_input}")
        anc = StateVector(Q.n_qubits - inp.n_qubits)
        return anc.tensor(inp)
    bits = [int(b) for b in inp]
    if len(bits) != Q.n_input:
        raise WidthMismatch(f"input has {len(bits)} bits, circuit takes {Q.n_input}")
    return StateVector.from_bits([0] * (Q.n_qubits - len(bits)) + bits)


def run_unitary(Q: QuantumCircuit, inp) -> StateVector:
    state = prepare_input(Q, inp)
    for name, targets in Q.gates:
        apply_gate(state, name, targets)
    return state


def run_circuit(Q: QuantumCircuit, inp, drbg: Drbg | None = None) -> tuple[int, float]:
    """Returns (sampled output bit, exact probability that the output is 1)."""
    state = run_unitary(Q, inp)
    p1 = state.prob_of(0, 1)
    if drbg is None:
        bit = 1 if p1 > 0.5 else 0
    else:
        u = int.from_bytes(drbg.bytes(8), "big") / 2 ** 64
        bit = 1 if u < p1 else 0
    return bit, p1


def accept_probability(Q: QuantumCircuit, inp) -> float:
    return run_unitary(Q, inp).prob_of(0, 1)


# ---------------------------------------------------------------------------
# circuit text format: "qubits N" / "input K" directives then one gate per line


def format_circuit(Q: QuantumCircuit) -> str:
    lines = [f"qubits {Q.n_qubits}", f"input {Q.n_input}"]
    lines += [" ".join([name] + [str(t) for t in targets]) for name, targets in Q.gates]
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> QuantumCircuit:
    n_qubits = None
    n_input = 0
    gates = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "qubits":
            n_qubits = int(parts[1])
        elif head == "input":
            n_input = int(parts[1])
        elif head.upper() in GATE_ARITY:
            gates.append((head.upper(), tuple(int(t) for t in parts[1:])))
        else:
            raise MalformedCircuit(f"line {lineno}: unknown directive {head!r}")
    if n_qubits is None:
        raise MalformedCircuit("missing 'qubits' directive")
    return QuantumCircuit(n_qubits, tuple(gates), n_input)


# ---------------------------------------------------------------------------
# Pauli Hamiltonians


@dataclass(frozen=True)
class PauliHamiltonian:
    """Real-weighted Pauli words (Hermitian by construction)."""

    n_qubits: int
    terms: tuple[tuple[float, str], ...]
    max_terms: int = 64

    def __post_init__(self):
        if len(self.terms) > self.max_terms:
            raise WidthMismatch(f"{len(self.terms)} terms exceeds cap {self.max_terms}")
        for _, word in self.terms:
            if len(word) != self.n_qubits or any(c not in PAULI for c in word):
                raise WidthMismatch(f"bad Pauli word {word!r}")


def _apply_pauli_word(amps: np.ndarray, word: str) -> np.ndarray:
    n = len(word)
    t = amps.reshape([2] * n)
    for q, c in enumerate(word):
        if c == "I":
            continue
        t = np.moveaxis(np.moveaxis(t, q, -1) @ PAULI[c].T, -1, q)
    return t.reshape(-1)


def expectation(H: PauliHamiltonian, state: StateVector) -> float:
    if H.n_qubits != state.n_qubits:
        raise WidthMismatch("Hamiltonian and state widths differ")
    acc = 0.0
    for coeff, word in H.terms:
        acc += coeff * np.real(np.vdot(state.amps, _apply_pauli_word(state.amps, word)))
    return float(acc)


def dense_matrix(H: PauliHamiltonian) -> np.ndarray:
    dim = 2 ** H.n_qubits
    M = np.zeros((dim, dim), dtype=complex)
    for coeff, word in H.terms:
        P = np.eye(1, dtype=complex)
        for c in word:
            P = np.kron(P, PAULI[c])
        M += coeff * P
    return M


def ground_energy(H: PauliHamiltonian) -> float:
    if H.n_qubits > MAX_QUBITS:
        raise TooManyQubits("Hamiltonian too wide for exact diagonalization")
    return float(np.linalg.eigvalsh(dense_matrix(H))[0])


# ---------------------------------------------------------------------------
# history states (unary clock) and the matching propagation Hamiltonian


def history_state(Q: QuantumCircuit, inp) -> StateVector:
    """Uniform superposition over the circuit's run: clock qubits (unary
    encoding, one per gate) come first, then the data register.

        (T+1)^{-1/2} sum_t |1^t 0^(T-t)> |psi_t>
    """
    T = len(Q.gates)
    if T + Q.n_qubits > MAX_QUBITS:
        raise TooManyQubits(f"clock({T}) + data({Q.n_qubits}) exceeds {MAX_QUBITS}")
    psi = prepare_input(Q, inp)
    dim_d = 2 ** Q.n_qubits
    out = np.zeros(2 ** T * dim_d, dtype=complex)
    scale = 1.0 / np.sqrt(T + 1)
    for t in range(T + 1):
        if t > 0:
            apply_gate(psi, *Q.gates[t - 1])
        clock_idx = 0
        for i in range(T):
            clock_idx = (clock_idx << 1) | (1 if i < t else 0)
        out[clock_idx * dim_d:(clock_idx + 1) * dim_d] += scale * psi.amps
    return StateVector(T + Q.n_qubits, out)


def _pauli_decompose(U: np.ndarray, k: int) -> list[tuple[complex, str]]:
    """Decompose a 2^k x 2^k matrix over k-qubit Pauli words."""
    words = [""]
    for _ in range(k):
        words = [w + c for w in words for c in "IXYZ"]
    out = []
    for w in words:
        P = np.eye(1, dtype=complex)
        for c in w:
            P = np.kron(P, PAULI[c])
        coeff = np.trace(P.conj().T @ U) / 2 ** k
        if abs(coeff) > 1e-12:
            out.append((complex(coeff), w))
    return out


def propagation_hamiltonian(Q: QuantumCircuit, max_terms: int = 256) -> PauliHamiltonian:
    """Clock-transition penalty terms annihilating history_state(Q, .).

    Term t couples clock qubits (t-2, t-1, t) in the unary encoding and the
    data qubits touched by gate t. Each term is positive semidefinite with the
    history state in its kernel.
    """
    T = len(Q.gates)
    n = T + Q.n_qubits
    if T == 0:
        return PauliHamiltonian(n, (), max_terms)
    acc: dict[str, complex] = {}

    proj = {0: [(0.5, "I"), (0.5, "Z")], 1: [(0.5, "I"), (-0.5, "Z")]}
    lower = [(0.5, "X"), (-0.5j, "Y")]  # |1><0|
    raise_ = [(0.5, "X"), (0.5j, "Y")]  # |0><1|

    def add(coeff: complex, word: str):
        if abs(coeff) > 1e-12:
            acc[word] = acc.get(word, 0) + coeff

    def emit(clock_factors: dict[int, list], data_op: list[tuple[complex, str]],
             data_qubits: tuple[int, ...], scale: complex):
        """Tensor out one clock pattern x data operator into full-width words."""
        combos = [(scale, {})]
        for cq, factors in clock_factors.items():
            combos = [(c * fc, {**m, cq: ch}) for c, m in combos for fc, ch in factors]
        for dcoeff, dword in data_op:
            for ccoeff, cmap in combos:
                word = ["I"] * n
                for cq, ch in cmap.items():
                    word[cq] = ch
                for dq, ch in zip(data_qubits, dword):
                    word[T + dq] = ch
                add(ccoeff * dcoeff, "".join(word))

    for t in range(1, T + 1):
        name, targets = Q.gates[t - 1]
        if name in GATES_1Q:
            U = GATES_1Q[name]
        elif name == "CNOT":
            U = np.eye(4, dtype=complex)[:, [0, 1, 3, 2]]
        else:  # CCX
            U = np.eye(8, dtype=complex)[:, [0, 1, 2, 3, 4, 5, 7, 6]]
        u_terms = _pauli_decompose(U, len(targets))
        udag_terms = _pauli_decompose(U.conj().T, len(targets))
        ident = [(1.0 + 0j, "I" * len(targets))]

        # local clock patterns around transition t-1 -> t (clock qubits 0-based)
        prev_pat = {t - 2: proj[1]} if t >= 2 else {}
        next_pat = {t: proj[0]} if t < T else {}
        at_prev = {t - 1: proj[0], **prev_pat, **next_pat}   # clock == t-1
        at_cur = {t - 1: proj[1], **prev_pat, **next_pat}    # clock == t
        down = {t - 1: lower, **prev_pat, **next_pat}        # |t><t-1|
        up = {t - 1: raise_, **prev_pat, **next_pat}         # |t-1><t|

        emit(at_prev, ident, targets, 0.5)
        emit(at_cur, ident, targets, 0.5)
        emit(down, u_terms, targets, -0.5)
        emit(up, udag_terms, targets, -0.5)

    terms = []
    for word, coeff in sorted(acc.items()):
        if abs(coeff.imag) > 1e-9:
            raise WidthMismatch("non-Hermitian accumulation (internal error)")
        if abs(coeff.real) > 1e-12:
            terms.append((float(coeff.real), word))
    return PauliHamiltonian(n, tuple(terms), max_terms)
