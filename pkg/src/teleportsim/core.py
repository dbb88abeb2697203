"""Dense state-vector engine for small registers of labeled qubits.

Registers carry symbolic labels (channel halves, inputs, ancillas) instead of
bare indices. Label position 0 is the most significant bit of the amplitude
index, so a ket string read left to right follows the label order.

State equality throughout the package means fidelity, which ignores global
phase; raw amplitude signs only matter where a test pins them explicitly.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 12
NORM_TOL = 1e-12

# Probabilities this close to 0 or 1 are treated as deterministic so that a
# repeated measurement of an already collapsed state can never flip.
PROB_CLAMP = 1e-12

_INV_SQRT2 = 1.0 / np.sqrt(2.0)

_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) * _INV_SQRT2
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_I = np.eye(2, dtype=complex)


class BellLabel(enum.Enum):
    """The four Bell states; enum values double as serialization names.

    psi+/psi- are (|01> +/- |10>)/sqrt(2), phi+/phi- are (|00> +/- |11>)/sqrt(2).
    The declaration order here is the fixed serialization order.
    """

    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"


class PauliOp(enum.Enum):
    """Single-qubit correction operators. XZ means Z first, then X."""

    I = "I"
    Z = "Z"
    X = "X"
    XZ = "XZ"


_PAULI_MATRICES = {
    PauliOp.I: _I,
    PauliOp.Z: _Z,
    PauliOp.X: _X,
    PauliOp.XZ: _X @ _Z,
}

# Amplitudes over |00>, |01>, |10>, |11| with the first pair member as the
# more significant bit.
BELL_AMPLITUDES: dict[BellLabel, np.ndarray] = {
    BellLabel.PSI_PLUS: np.array([0.0, 1.0, 1.0, 0.0], dtype=complex) * _INV_SQRT2,
    BellLabel.PSI_MINUS: np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) * _INV_SQRT2,
    BellLabel.PHI_PLUS: np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) * _INV_SQRT2,
    BellLabel.PHI_MINUS: np.array([1.0, 0.0, 0.0, -1.0], dtype=complex) * _INV_SQRT2,
}


class GateKind(enum.Enum):
    HADAMARD = "H"
    PAULI_X = "X"
    PAULI_Z = "Z"
    CNOT = "CNOT"


_SINGLE_QUBIT_MATRICES = {
    GateKind.HADAMARD: _H,
    GateKind.PAULI_X: _X,
    GateKind.PAULI_Z: _Z,
}


@dataclass(frozen=True)
class Gate:
    """A named gate applied to one or two target labels."""

    kind: GateKind
    targets: tuple[str, ...]

    def __post_init__(self) -> None:
        want = 2 if self.kind is GateKind.CNOT else 1
        if len(self.targets) != want:
            raise ValueError(f"{self.kind.value} takes {want} target(s), got {len(self.targets)}")
        if self.kind is GateKind.CNOT and self.targets[0] == self.targets[1]:
            raise ValueError("CNOT control and target must differ")

    @classmethod
    def h(cls, q: str) -> "Gate":
        return cls(GateKind.HADAMARD, (q,))

    @classmethod
    def x(cls, q: str) -> "Gate":
        return cls(GateKind.PAULI_X, (q,))

    @classmethod
    def z(cls, q: str) -> "Gate":
        return cls(GateKind.PAULI_Z, (q,))

    @classmethod
    def cnot(cls, control: str, target: str) -> "Gate":
        return cls(GateKind.CNOT, (control, target))


@dataclass(frozen=True)
class StateVector:
    """Immutable-by-convention state of a labeled register.

    amplitudes has shape (2**n,) where n == len(labels); operations return new
    instances rather than mutating in place.
    """

    labels: tuple[str, ...]
    amplitudes: np.ndarray

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    def axis(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"unknown qubit label {label!r}") from None

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class DensityMatrix:
    """Reduced density matrix over an ordered subset of labels."""

    labels: tuple[str, ...]
    matrix: np.ndarray


def new_register(labels: tuple[str, ...] | list[str]) -> StateVector:
    """Create a register with every qubit in |0>."""
    labels = tuple(labels)
    if not labels:
        raise ValueError("register needs at least one qubit")
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate qubit labels in {labels}")
    if len(labels) > MAX_QUBITS:
        raise ValueError(f"register capped at {MAX_QUBITS} qubits, got {len(labels)}")
    amps = np.zeros(2 ** len(labels), dtype=complex)
    amps[0] = 1.0
    return StateVector(labels, amps)


def extend(state: StateVector, label: str, amplitudes: tuple[complex, complex] = (1.0, 0.0)) -> StateVector:
    """Append one unentangled qubit with the given single-qubit amplitudes."""
    if label in state.labels:
        raise ValueError(f"label {label!r} already in register")
    if state.n_qubits + 1 > MAX_QUBITS:
        raise ValueError(f"register capped at {MAX_QUBITS} qubits")
    vec = np.asarray(amplitudes, dtype=complex)
    nrm = np.linalg.norm(vec)
    if abs(nrm - 1.0) > 1e-9:
        raise ValueError(f"qubit amplitudes not normalized: |a|^2+|b|^2 = {nrm**2:.3e}")
    return StateVector(state.labels + (label,), np.kron(state.amplitudes, vec / nrm))


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    arr = state.tensor()
    if gate.kind is GateKind.CNOT:
        c = state.axis(gate.targets[0])
        t = state.axis(gate.targets[1])
        out = arr.copy()
        i10: list[object] = [slice(None)] * state.n_qubits
        i11: list[object] = [slice(None)] * state.n_qubits
        i10[c], i10[t] = 1, 0
        i11[c], i11[t] = 1, 1
        out[tuple(i10)] = arr[tuple(i11)]
        out[tuple(i11)] = arr[tuple(i10)]
    else:
        k = state.axis(gate.targets[0])
        m = _SINGLE_QUBIT_MATRICES[gate.kind]
        out = np.moveaxis(np.tensordot(arr, m, axes=([k], [1])), -1, k)
    return StateVector(state.labels, out.reshape(-1))


def apply_pauli(state: StateVector, op: PauliOp, target: str) -> StateVector:
    """Apply a correction operator to one qubit (XZ applies Z, then X)."""
    k = state.axis(target)
    arr = state.tensor()
    out = np.moveaxis(np.tensordot(arr, _PAULI_MATRICES[op], axes=([k], [1])), -1, k)
    return StateVector(state.labels, out.reshape(-1))


def prepare_bell(state: StateVector, q1: str, q2: str, label: BellLabel) -> StateVector:
    """Entangle two fresh |0> qubits into the labeled Bell state.

    Signs follow the fixed convention: psi- = (|01> - |10>)/sqrt(2) and so on,
    with q1 as the more significant ket position.
    """
    a1, a2 = state.axis(q1), state.axis(q2)
    if a1 == a2:
        raise ValueError("pair members must differ")
    probs = np.abs(state.tensor()) ** 2
    mass = probs.take(0, axis=max(a1, a2)).take(0, axis=min(a1, a2)).sum()
    if abs(mass - 1.0) > NORM_TOL:
        raise ValueError(f"{q1},{q2} must be unentangled |0> qubits before pairing")
    out = apply_gate(state, Gate.h(q1))
    out = apply_gate(out, Gate.cnot(q1, q2))  # now phi+
    if label in (BellLabel.PHI_MINUS, BellLabel.PSI_MINUS):
        out = apply_gate(out, Gate.z(q1))
    if label in (BellLabel.PSI_PLUS, BellLabel.PSI_MINUS):
        out = apply_gate(out, Gate.x(q2))
    return out


def measure_qubit(state: StateVector, target: str, rng: np.random.Generator) -> tuple[int, StateVector]:
    """Projectively measure one qubit in the computational basis.

    Exactly one uniform draw is consumed per call: outcome = 1 iff the draw
    falls below P(1), with P clamped to {0, 1} inside PROB_CLAMP so repeated
    measurements of a collapsed qubit are deterministic.
    """
    k = state.axis(target)
    arr = state.tensor()
    p1 = float(np.sum(np.abs(arr.take(1, axis=k)) ** 2))
    p1_eff = 1.0 if p1 > 1.0 - PROB_CLAMP else (0.0 if p1 < PROB_CLAMP else p1)
    outcome = 1 if rng.random() < p1_eff else 0
    out = arr.copy()
    idx: list[object] = [slice(None)] * state.n_qubits
    idx[k] = 1 - outcome
    out[tuple(idx)] = 0.0
    nrm = np.linalg.norm(out)
    if nrm < NORM_TOL:
        raise ValueError(f"projection onto {target}={outcome} left a degenerate state")
    return outcome, StateVector(state.labels, out.reshape(-1) / nrm)


def drop_qubit(state: StateVector, label: str) -> StateVector:
    """Remove a qubit that is unentangled with the rest of the register.

    Used for measured-out ancillas and for delivered outputs; raises if the
    qubit is still entangled (a protocol logic bug, not a physics outcome).
    """
    if state.n_qubits == 1:
        raise ValueError("cannot drop the last qubit of a register")
    k = state.axis(label)
    arr = state.tensor()
    # Fast path: qubit already collapsed onto a basis state.
    for bit in (0, 1):
        if np.sum(np.abs(arr.take(1 - bit, axis=k)) ** 2) < NORM_TOL**2:
            rest = arr.take(bit, axis=k).reshape(-1)
            labels = tuple(l for l in state.labels if l != label)
            return StateVector(labels, rest / np.linalg.norm(rest))
    rho = reduced_density(state, (label,)).matrix
    evals, evecs = np.linalg.eigh(rho)
    if evals[-1] < 1.0 - 1e-9:
        raise ValueError(f"qubit {label!r} is still entangled (purity {evals[-1]:.6f})")
    rest = np.tensordot(arr, evecs[:, -1].conj(), axes=([k], [0])).reshape(-1)
    labels = tuple(l for l in state.labels if l != label)
    return StateVector(labels, rest / np.linalg.norm(rest))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2 after aligning b's qubits to a's label order."""
    if set(a.labels) != set(b.labels):
        raise ValueError(f"label sets differ: {a.labels} vs {b.labels}")
    perm = [b.labels.index(l) for l in a.labels]
    bt = b.tensor().transpose(perm).reshape(-1)
    return float(np.abs(np.vdot(a.amplitudes, bt)) ** 2)


def reduced_density(state: StateVector, keep: tuple[str, ...] | list[str]) -> DensityMatrix:
    """Partial trace down to the kept labels, in the order given."""
    keep = tuple(keep)
    if not keep:
        raise ValueError("must keep at least one qubit")
    if len(set(keep)) != len(keep):
        raise ValueError(f"duplicate labels in {keep}")
    axes = [state.axis(l) for l in keep]
    rest = [i for i in range(state.n_qubits) if i not in axes]
    psi = state.tensor().transpose(axes + rest).reshape(2 ** len(keep), -1)
    return DensityMatrix(keep, psi @ psi.conj().T)


def relabel(state: StateVector, old: str, new: str) -> StateVector:
    """Rename one qubit without touching amplitudes."""
    if old not in state.labels:
        raise ValueError(f"unknown qubit label {old!r}")
    if new in state.labels:
        raise ValueError(f"label {new!r} already in register")
    return StateVector(tuple(new if l == old else l for l in state.labels), state.amplitudes)


def phase_normalized(amplitudes: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Rotate a global phase so the first non-negligible amplitude is real positive."""
    vec = np.asarray(amplitudes, dtype=complex)
    for a in vec:
        if abs(a) > tol:
            return vec * (a.conjugate() / abs(a))
    return vec.copy()
