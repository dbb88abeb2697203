"""Bell-basis combinatorics shared by every protocol variant.

This module owns the syndrome map of the nondemolition Bell measurement, the
expansion of channel-times-input composites over the Bell basis, the sixteen
teleportation corrections, the sixteen channel-restore operators, and the
superdense encode/decode convention. The tables are hard-coded; the test
suite re-derives each one from an independent route.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    BELL_AMPLITUDES,
    BellLabel,
    Gate,
    PauliOp,
    StateVector,
    apply_gate,
    extend,
    drop_qubit,
    measure_qubit,
)

# Fixed serialization order; also fixes the label <-> two-bit enumeration.
BELL_ORDER: tuple[BellLabel, ...] = (
    BellLabel.PSI_PLUS,
    BellLabel.PSI_MINUS,
    BellLabel.PHI_PLUS,
    BellLabel.PHI_MINUS,
)

# The message pair used for superdense signalling is always prepared as phi+.
MESSAGE_CHANNEL = BellLabel.PHI_PLUS


@dataclass(frozen=True)
class TwoBitMessage:
    """Two classical bits, most significant first."""

    hi: int
    lo: int

    def __post_init__(self) -> None:
        if self.hi not in (0, 1) or self.lo not in (0, 1):
            raise ValueError(f"bits must be 0 or 1, got ({self.hi}, {self.lo})")

    @property
    def index(self) -> int:
        return self.hi * 2 + self.lo

    @classmethod
    def from_index(cls, index: int) -> "TwoBitMessage":
        if index not in range(4):
            raise ValueError(f"message index out of range: {index}")
        return cls(index >> 1, index & 1)

    @classmethod
    def from_string(cls, text: str) -> "TwoBitMessage":
        if len(text) != 2 or any(c not in "01" for c in text):
            raise ValueError(f"malformed message {text!r}")
        return cls(int(text[0]), int(text[1]))

    def __str__(self) -> str:
        return f"{self.hi}{self.lo}"


# Ancilla syndrome (d, e) -> collapsed Bell state of the measured pair.
SYNDROME_TO_BELL: dict[tuple[int, int], BellLabel] = {
    (1, 0): BellLabel.PSI_PLUS,
    (1, 1): BellLabel.PSI_MINUS,
    (0, 0): BellLabel.PHI_PLUS,
    (0, 1): BellLabel.PHI_MINUS,
}


def syndrome_to_bell(d: int, e: int) -> BellLabel:
    try:
        return SYNDROME_TO_BELL[(d, e)]
    except KeyError:
        raise ValueError(f"syndrome bits must be 0 or 1, got ({d}, {e})") from None


@dataclass(frozen=True)
class BobState:
    """Receiver-side qubit descriptor for one branch of a channel expansion.

    The branch reads branch_sign/2 * |result> (alpha_sign*a |alpha_ket> +
    beta_sign*b |1-alpha_ket>) for input a|0> + b|1>.
    """

    alpha_ket: int
    alpha_sign: int
    beta_sign: int
    branch_sign: int

    def vector(self, alpha: complex, beta: complex) -> np.ndarray:
        out = np.zeros(2, dtype=complex)
        out[self.alpha_ket] = self.alpha_sign * alpha
        out[1 - self.alpha_ket] = self.beta_sign * beta
        return out


# Expansion of |channel>_AB (x) (a|0> + b|1>)_C over the Bell basis of (A, C),
# one entry per measurement result. Branch signs are part of the expansion,
# not of the receiver state; all comparisons downstream are phase-normalized.
CHANNEL_EXPANSIONS: dict[BellLabel, dict[BellLabel, BobState]] = {
    BellLabel.PSI_MINUS: {
        BellLabel.PSI_PLUS: BobState(0, +1, -1, +1),
        BellLabel.PSI_MINUS: BobState(0, +1, +1, +1),
        BellLabel.PHI_PLUS: BobState(1, -1, +1, +1),
        BellLabel.PHI_MINUS: BobState(1, +1, +1, -1),
    },
    BellLabel.PSI_PLUS: {
        BellLabel.PSI_PLUS: BobState(0, +1, +1, +1),
        BellLabel.PSI_MINUS: BobState(0, +1, -1, -1),
        BellLabel.PHI_PLUS: BobState(1, +1, +1, +1),
        BellLabel.PHI_MINUS: BobState(1, +1, -1, +1),
    },
    BellLabel.PHI_MINUS: {
        BellLabel.PSI_PLUS: BobState(1, -1, +1, +1),
        BellLabel.PSI_MINUS: BobState(1, +1, +1, -1),
        BellLabel.PHI_PLUS: BobState(0, +1, -1, +1),
        BellLabel.PHI_MINUS: BobState(0, +1, +1, +1),
    },
    BellLabel.PHI_PLUS: {
        BellLabel.PSI_PLUS: BobState(1, +1, +1, +1),
        BellLabel.PSI_MINUS: BobState(1, +1, -1, -1),
        BellLabel.PHI_PLUS: BobState(0, +1, +1, +1),
        BellLabel.PHI_MINUS: BobState(0, +1, -1, +1),
    },
}


def bell_expand(channel: BellLabel) -> dict[BellLabel, BobState]:
    """Branch descriptors for a channel, keyed by measurement result."""
    return dict(CHANNEL_EXPANSIONS[channel])


# (channel, measurement result) -> receiver correction.
CORRECTIONS: dict[tuple[BellLabel, BellLabel], PauliOp] = {
    (BellLabel.PSI_MINUS, BellLabel.PSI_MINUS): PauliOp.I,
    (BellLabel.PSI_MINUS, BellLabel.PSI_PLUS): PauliOp.Z,
    (BellLabel.PSI_MINUS, BellLabel.PHI_MINUS): PauliOp.X,
    (BellLabel.PSI_MINUS, BellLabel.PHI_PLUS): PauliOp.XZ,
    (BellLabel.PSI_PLUS, BellLabel.PSI_PLUS): PauliOp.I,
    (BellLabel.PSI_PLUS, BellLabel.PSI_MINUS): PauliOp.Z,
    (BellLabel.PSI_PLUS, BellLabel.PHI_PLUS): PauliOp.X,
    (BellLabel.PSI_PLUS, BellLabel.PHI_MINUS): PauliOp.XZ,
    (BellLabel.PHI_MINUS, BellLabel.PHI_MINUS): PauliOp.I,
    (BellLabel.PHI_MINUS, BellLabel.PHI_PLUS): PauliOp.Z,
    (BellLabel.PHI_MINUS, BellLabel.PSI_MINUS): PauliOp.X,
    (BellLabel.PHI_MINUS, BellLabel.PSI_PLUS): PauliOp.XZ,
    (BellLabel.PHI_PLUS, BellLabel.PHI_PLUS): PauliOp.I,
    (BellLabel.PHI_PLUS, BellLabel.PHI_MINUS): PauliOp.Z,
    (BellLabel.PHI_PLUS, BellLabel.PSI_PLUS): PauliOp.X,
    (BellLabel.PHI_PLUS, BellLabel.PSI_MINUS): PauliOp.XZ,
}


def correction_for(channel: BellLabel, result: BellLabel) -> PauliOp:
    return CORRECTIONS[(channel, result)]


# How each correction operator permutes the Bell states when applied to the
# first pair member, up to global phase.
_PAULI_BELL_ACTION: dict[PauliOp, dict[BellLabel, BellLabel]] = {
    PauliOp.I: {l: l for l in BELL_ORDER},
    PauliOp.Z: {
        BellLabel.PSI_PLUS: BellLabel.PSI_MINUS,
        BellLabel.PSI_MINUS: BellLabel.PSI_PLUS,
        BellLabel.PHI_PLUS: BellLabel.PHI_MINUS,
        BellLabel.PHI_MINUS: BellLabel.PHI_PLUS,
    },
    PauliOp.X: {
        BellLabel.PSI_PLUS: BellLabel.PHI_PLUS,
        BellLabel.PHI_PLUS: BellLabel.PSI_PLUS,
        BellLabel.PSI_MINUS: BellLabel.PHI_MINUS,
        BellLabel.PHI_MINUS: BellLabel.PSI_MINUS,
    },
    PauliOp.XZ: {
        BellLabel.PSI_PLUS: BellLabel.PHI_MINUS,
        BellLabel.PHI_MINUS: BellLabel.PSI_PLUS,
        BellLabel.PSI_MINUS: BellLabel.PHI_PLUS,
        BellLabel.PHI_PLUS: BellLabel.PSI_MINUS,
    },
}

RESTORES: dict[tuple[BellLabel, BellLabel], PauliOp] = {
    (measured, action[measured]): op
    for op, action in _PAULI_BELL_ACTION.items()
    for measured in BELL_ORDER
}


def restore_op(measured: BellLabel, target: BellLabel) -> PauliOp:
    """Operator on the first pair member mapping |measured> to |target>, up to phase."""
    return RESTORES[(measured, target)]


def _fresh(state: StateVector, base: str) -> str:
    if base not in state.labels:
        return base
    i = 1
    while f"{base}{i}" in state.labels:
        i += 1
    return f"{base}{i}"


def apply_qnd_circuit(state: StateVector, q1: str, q2: str, d: str, e: str) -> StateVector:
    """Unitary part of the nondemolition Bell measurement.

    Ancilla d picks up the computational parity of the pair, e the parity in
    the Hadamard-rotated frame; the trailing Hadamards rotate the pair back so
    it ends in the same Bell state the syndrome names.
    """
    out = apply_gate(state, Gate.cnot(q1, d))
    out = apply_gate(out, Gate.cnot(q2, d))
    out = apply_gate(out, Gate.h(q1))
    out = apply_gate(out, Gate.h(q2))
    out = apply_gate(out, Gate.cnot(q1, e))
    out = apply_gate(out, Gate.cnot(q2, e))
    out = apply_gate(out, Gate.h(q1))
    out = apply_gate(out, Gate.h(q2))
    return out


def qnd_bell_measure(
    state: StateVector, q1: str, q2: str, rng: np.random.Generator
) -> tuple[BellLabel, StateVector]:
    """Measure which Bell state the pair (q1, q2) is in without destroying it.

    Allocates two fresh |0> ancillas, runs the parity circuit, measures the
    ancillas (d first, then e) and discards them. The pair collapses onto the
    reported Bell state and stays there, so a repeat on the same pair returns
    the same label deterministically.
    """
    d = _fresh(state, "D")
    out = extend(state, d)
    e = _fresh(out, "E")
    out = extend(out, e)
    out = apply_qnd_circuit(out, q1, q2, d, e)
    d_bit, out = measure_qubit(out, d, rng)
    e_bit, out = measure_qubit(out, e, rng)
    out = drop_qubit(out, d)
    out = drop_qubit(out, e)
    return syndrome_to_bell(d_bit, e_bit), out


def syndrome_probabilities(state: StateVector, q1: str, q2: str) -> dict[BellLabel, float]:
    """Analytic ancilla-syndrome distribution, without sampling anything."""
    d = _fresh(state, "D")
    out = extend(state, d)
    e = _fresh(out, "E")
    out = extend(out, e)
    out = apply_qnd_circuit(out, q1, q2, d, e)
    probs = np.abs(out.tensor()) ** 2
    axes = tuple(i for i in range(out.n_qubits) if i not in (out.axis(d), out.axis(e)))
    joint = probs.sum(axis=axes)
    return {label: float(joint[bits]) for bits, label in SYNDROME_TO_BELL.items()}


# Message -> operator on the sender's half of a phi+ pair. The assignment is
# the inverse of the decode table below, so encode/decode round-trips exactly.
SUPERDENSE_ENCODING: dict[tuple[int, int], PauliOp] = {
    (0, 0): PauliOp.I,
    (0, 1): PauliOp.X,
    (1, 0): PauliOp.Z,
    (1, 1): PauliOp.XZ,
}

# Bell state of the transmitted pair -> decoded bits (hi, lo).
SUPERDENSE_DECODING: dict[BellLabel, TwoBitMessage] = {
    BellLabel.PHI_PLUS: TwoBitMessage(0, 0),
    BellLabel.PSI_PLUS: TwoBitMessage(0, 1),
    BellLabel.PHI_MINUS: TwoBitMessage(1, 0),
    BellLabel.PSI_MINUS: TwoBitMessage(1, 1),
}


def encode_superdense(msg: TwoBitMessage) -> PauliOp:
    return SUPERDENSE_ENCODING[(msg.hi, msg.lo)]


def decode_superdense(
    state: StateVector, qa: str, qb: str, rng: np.random.Generator
) -> tuple[TwoBitMessage, StateVector]:
    """Read two bits out of a Bell pair: CNOT(qa -> qb), H on qa, measure both.

    qa is the transmitted qubit, qb the resident one. Deterministic for exact
    Bell inputs; the measured qubits stay in the register for the caller to
    discard.
    """
    out = apply_gate(state, Gate.cnot(qa, qb))
    out = apply_gate(out, Gate.h(qa))
    hi, out = measure_qubit(out, qa, rng)
    lo, out = measure_qubit(out, qb, rng)
    return TwoBitMessage(hi, lo), out


def label_to_message(label: BellLabel) -> TwoBitMessage:
    """Fixed enumeration of Bell labels as two bits, in serialization order."""
    return TwoBitMessage.from_index(BELL_ORDER.index(label))


def message_to_label(msg: TwoBitMessage) -> BellLabel:
    return BELL_ORDER[msg.index]


def bell_state_vector(label: BellLabel) -> np.ndarray:
    """Copy of the exact 4-amplitude vector for a Bell state."""
    return BELL_AMPLITUDES[label].copy()
