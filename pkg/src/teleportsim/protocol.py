"""Protocol drivers: baseline teleportation and its two quantum-only variants.

Three experiments share one register/custody vocabulary:

* ``run_op_baseline``: destructive Bell measurement plus two classical bits,
  one fresh pair per run.
* ``run_single_channel_aqt``: nondemolition Bell measurement, the measured
  pair travels to the receiver and one half returns, the entangled channel
  survives and is reused across runs. Approach RESTORE_CHANNEL pushes the
  channel back to its initial Bell state after every run; TRACK_CHANNEL
  leaves it collapsed and tracks the label instead.
* ``run_two_channel_aqt``: destructive measurement whose result rides to the
  receiver inside one superdense-coded qubit of a second pair.

All randomness flows through the numpy Generator handed in; a run consumes
draws only for Haar input sampling and projective measurements, in a fixed
order, so seeded runs replay exactly.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .bell import (
    correction_for,
    decode_superdense,
    encode_superdense,
    label_to_message,
    message_to_label,
    qnd_bell_measure,
    restore_op,
    MESSAGE_CHANNEL,
)
from .core import (
    BellLabel,
    PauliOp,
    StateVector,
    apply_pauli,
    drop_qubit,
    extend,
    measure_qubit,
    new_register,
    prepare_bell,
    reduced_density,
    relabel,
)


class ProtocolError(RuntimeError):
    """An internal protocol invariant failed; this is a bug, not noise."""


class Party(enum.Enum):
    ALICE = "alice"
    BOB = "bob"
    CHARLES = "charles"


@dataclass(frozen=True)
class InFlight:
    """Custody marker for a qubit on the wire toward ``dest``."""

    dest: Party


class Variant(enum.Enum):
    OP = "op"
    SINGLE_CHANNEL_RESTORE = "single-i"
    SINGLE_CHANNEL_TRACK = "single-ii"
    TWO_CHANNEL = "dual"


class Approach(enum.Enum):
    RESTORE_CHANNEL = "restore"
    TRACK_CHANNEL = "track"


_APPROACH_VARIANT = {
    Approach.RESTORE_CHANNEL: Variant.SINGLE_CHANNEL_RESTORE,
    Approach.TRACK_CHANNEL: Variant.SINGLE_CHANNEL_TRACK,
}


@dataclass
class Ledger:
    """Monotonic resource counters for one experiment."""

    epr_pairs_created: int = 0
    qubits_transmitted: int = 0
    classical_bits_transmitted: int = 0

    def copy(self) -> "Ledger":
        return Ledger(
            self.epr_pairs_created,
            self.qubits_transmitted,
            self.classical_bits_transmitted,
        )

    def delta(self, since: "Ledger") -> "Ledger":
        return Ledger(
            self.epr_pairs_created - since.epr_pairs_created,
            self.qubits_transmitted - since.qubits_transmitted,
            self.classical_bits_transmitted - since.classical_bits_transmitted,
        )

    def as_dict(self) -> dict[str, int]:
        return {
            "epr_pairs_created": self.epr_pairs_created,
            "qubits_transmitted": self.qubits_transmitted,
            "classical_bits_transmitted": self.classical_bits_transmitted,
        }


class Custody:
    """Who currently holds each labeled qubit.

    Every label in the register has exactly one custodian; transmission is a
    two-step send/deliver so an eavesdropper can act while a qubit is in
    flight.
    """

    def __init__(self, holders: dict[str, Party] | None = None) -> None:
        self._holders: dict[str, Party | InFlight] = dict(holders or {})

    def holder(self, label: str) -> Party | InFlight:
        try:
            return self._holders[label]
        except KeyError:
            raise ValueError(f"no custody record for {label!r}") from None

    def assign(self, label: str, party: Party) -> None:
        if label in self._holders:
            raise ValueError(f"{label!r} already has a custodian")
        self._holders[label] = party

    def require(self, party: Party, labels: Iterable[str]) -> None:
        for label in labels:
            if self.holder(label) is not party:
                raise ProtocolError(f"{party.value} does not hold {label!r}")

    def send(self, labels: Iterable[str], sender: Party, dest: Party, ledger: Ledger) -> None:
        labels = tuple(labels)
        for label in labels:
            if self.holder(label) is not sender:
                raise ProtocolError(
                    f"{sender.value} cannot send {label!r} held by {self.holder(label)}"
                )
        for label in labels:
            self._holders[label] = InFlight(dest)
        ledger.qubits_transmitted += len(labels)

    def deliver(self, labels: Iterable[str], dest: Party) -> None:
        for label in labels:
            holder = self.holder(label)
            if not isinstance(holder, InFlight) or holder.dest is not dest:
                raise ProtocolError(f"{label!r} is not in flight toward {dest.value}")
        for label in labels:
            self._holders[label] = dest

    def rename(self, old: str, new: str) -> None:
        if new in self._holders:
            raise ValueError(f"label {new!r} already has a custodian")
        self._holders[new] = self._holders.pop(old)

    def drop(self, label: str) -> None:
        self._holders.pop(label)

    def as_dict(self) -> dict[str, Party | InFlight]:
        return dict(self._holders)


def custody_transfer(
    custody: Custody, labels: Iterable[str], sender: Party, dest: Party, ledger: Ledger
) -> Custody:
    """One-shot send plus deliver; counts each label as one transmission."""
    labels = tuple(labels)
    custody.send(labels, sender, dest, ledger)
    custody.deliver(labels, dest)
    return custody


@dataclass(frozen=True)
class InputSpec:
    """The input qubit Charles hands to Alice: explicit amplitudes or Haar random."""

    alpha: complex = 1.0
    beta: complex = 0.0
    random: bool = False

    def __post_init__(self) -> None:
        if not self.random:
            nrm2 = abs(self.alpha) ** 2 + abs(self.beta) ** 2
            if abs(nrm2 - 1.0) > 1e-9:
                raise ValueError(f"input amplitudes not normalized: |a|^2+|b|^2 = {nrm2:.3e}")

    @classmethod
    def explicit(cls, alpha: complex, beta: complex) -> "InputSpec":
        return cls(complex(alpha), complex(beta), False)

    @classmethod
    def haar(cls) -> "InputSpec":
        return cls(random=True)

    def resolve(self, rng: np.random.Generator) -> tuple[complex, complex]:
        """Concrete (alpha, beta), normalized, with alpha real nonnegative when random.

        Haar sampling draws u uniform on [-1, 1] then phi uniform on [0, 2*pi)
        and returns (cos(theta/2), e^{i phi} sin(theta/2)) with theta = arccos(u);
        exactly two uniform draws per call, in that order.
        """
        if not self.random:
            nrm = np.sqrt(abs(self.alpha) ** 2 + abs(self.beta) ** 2)
            return self.alpha / nrm, self.beta / nrm
        u = rng.uniform(-1.0, 1.0)
        phi = rng.uniform(0.0, 2.0 * np.pi)
        theta = np.arccos(u)
        return complex(np.cos(theta / 2.0)), np.exp(1j * phi) * np.sin(theta / 2.0)


@dataclass
class RunReport:
    """Everything observable about one teleportation run."""

    run_index: int
    variant: Variant
    channel_before: BellLabel
    alice_result: BellLabel
    correction: PauliOp
    fidelity: float
    channel_after: BellLabel | None
    ledger_delta: Ledger
    input_amplitudes: tuple[complex, complex]
    final_state: StateVector | None = field(default=None, repr=False, compare=False)

    def as_dict(self) -> dict[str, object]:
        a, b = self.input_amplitudes
        return {
            "run_index": self.run_index,
            "variant": self.variant.value,
            "channel_before": self.channel_before.value,
            "alice_result": self.alice_result.value,
            "correction": self.correction.value,
            "fidelity": self.fidelity,
            "channel_after": None if self.channel_after is None else self.channel_after.value,
            "ledger_delta": self.ledger_delta.as_dict(),
            "input_amplitudes": [[a.real, a.imag], [b.real, b.imag]],
        }


PairInterceptor = Callable[[StateVector, Custody, str, str, np.random.Generator], StateVector]
MessageInterceptor = Callable[[StateVector, Custody, str], None]


def _qubit_fidelity(state: StateVector, label: str, target: tuple[complex, complex]) -> float:
    rho = reduced_density(state, (label,)).matrix
    vec = np.array(target, dtype=complex)
    return float(np.real(vec.conj() @ rho @ vec))


def _deliver_input(
    state: StateVector, custody: Custody, alpha: complex, beta: complex
) -> tuple[StateVector, Custody]:
    # Charles is a state-preparation step; his handoff is not a counted transmission.
    state = extend(state, "C", (alpha, beta))
    custody.assign("C", Party.ALICE)
    return state, custody


def run_op_baseline(
    input_spec: InputSpec,
    channel: BellLabel,
    rng: np.random.Generator,
    ledger: Ledger | None = None,
    run_index: int = 0,
) -> RunReport:
    """One run of the baseline protocol: destroy the pair, send two bits."""
    ledger = ledger if ledger is not None else Ledger()
    before = ledger.copy()

    state = prepare_bell(new_register(("A", "B")), "A", "B", channel)
    ledger.epr_pairs_created += 1
    custody = Custody({"A": Party.ALICE, "B": Party.BOB})

    alpha, beta = input_spec.resolve(rng)
    state, custody = _deliver_input(state, custody, alpha, beta)

    custody.require(Party.ALICE, ("A", "C"))
    result, state = qnd_bell_measure(state, "A", "C", rng)
    # Destructive readout: the measured pair is consumed.
    _, state = measure_qubit(state, "A", rng)
    _, state = measure_qubit(state, "C", rng)
    state = drop_qubit(state, "A")
    state = drop_qubit(state, "C")
    custody.drop("A")
    custody.drop("C")
    ledger.classical_bits_transmitted += 2

    correction = correction_for(channel, result)
    state = apply_pauli(state, correction, "B")
    fid = _qubit_fidelity(state, "B", (alpha, beta))

    return RunReport(
        run_index=run_index,
        variant=Variant.OP,
        channel_before=channel,
        alice_result=result,
        correction=correction,
        fidelity=fid,
        channel_after=None,
        ledger_delta=ledger.delta(before),
        input_amplitudes=(alpha, beta),
        final_state=state,
    )


def run_single_channel_aqt(
    inputs: Sequence[InputSpec],
    approach: Approach,
    initial_channel: BellLabel,
    rng: np.random.Generator,
    ledger: Ledger | None = None,
    pair_interceptor: PairInterceptor | None = None,
) -> list[RunReport]:
    """Teleport a sequence of inputs through one reusable entangled channel.

    Per run: Alice nondemolition-measures (A, C), both travel to Bob, Bob
    repeats the measurement (same label, deterministically), corrects B, then
    either restores the pair to the initial channel or starts tracking the
    collapsed label. A returns to Alice and the old input qubit becomes the
    new channel half B. No classical bits are ever sent.
    """
    ledger = ledger if ledger is not None else Ledger()
    before = ledger.copy()
    variant = _APPROACH_VARIANT[approach]

    state = prepare_bell(new_register(("A", "B")), "A", "B", initial_channel)
    ledger.epr_pairs_created += 1
    custody = Custody({"A": Party.ALICE, "B": Party.BOB})

    channel = initial_channel
    reports: list[RunReport] = []
    for i, spec in enumerate(inputs):
        alpha, beta = spec.resolve(rng)
        state, custody = _deliver_input(state, custody, alpha, beta)

        custody.require(Party.ALICE, ("A", "C"))
        result, state = qnd_bell_measure(state, "A", "C", rng)

        custody.send(("A", "C"), Party.ALICE, Party.BOB, ledger)
        if pair_interceptor is not None:
            state = pair_interceptor(state, custody, "A", "C", rng)
        custody.deliver(("A", "C"), Party.BOB)

        bob_result, state = qnd_bell_measure(state, "A", "C", rng)
        if bob_result is not result:
            raise ProtocolError(
                f"run {i}: receiver syndrome {bob_result.value} != sender {result.value}"
            )

        correction = correction_for(channel, result)
        state = apply_pauli(state, correction, "B")
        fid = _qubit_fidelity(state, "B", (alpha, beta))

        if approach is Approach.RESTORE_CHANNEL:
            state = apply_pauli(state, restore_op(result, initial_channel), "A")
            channel_after = initial_channel
        else:
            channel_after = result

        custody.send(("A",), Party.BOB, Party.ALICE, ledger)
        custody.deliver(("A",), Party.ALICE)

        state = relabel(state, "B", "out")
        custody.rename("B", "out")
        state = relabel(state, "C", "B")
        custody.rename("C", "B")

        reports.append(
            RunReport(
                run_index=i,
                variant=variant,
                channel_before=channel,
                alice_result=result,
                correction=correction,
                fidelity=fid,
                channel_after=channel_after,
                ledger_delta=ledger.delta(before),
                input_amplitudes=(alpha, beta),
                final_state=state,
            )
        )
        # The delivered output leaves the protocol's working register.
        state = drop_qubit(state, "out")
        custody.drop("out")
        channel = channel_after
        before = ledger.copy()
    return reports


def run_two_channel_aqt(
    input_spec: InputSpec,
    teleport_channel: BellLabel,
    rng: np.random.Generator,
    ledger: Ledger | None = None,
    run_index: int = 0,
    message_interceptor: MessageInterceptor | None = None,
) -> RunReport | None:
    """One run with two pairs: the Bell result rides inside a superdense qubit.

    Alice measures (A, C) destructively, encodes the result's two-bit label on
    her half of a phi+ message pair and sends that single qubit. Returns None
    if a message interceptor grabs the qubit in flight (that interception is
    destructive, so the run aborts).
    """
    ledger = ledger if ledger is not None else Ledger()
    before = ledger.copy()

    state = new_register(("A", "B", "MA", "MB"))
    state = prepare_bell(state, "A", "B", teleport_channel)
    state = prepare_bell(state, "MA", "MB", MESSAGE_CHANNEL)
    ledger.epr_pairs_created += 2
    custody = Custody(
        {"A": Party.ALICE, "B": Party.BOB, "MA": Party.ALICE, "MB": Party.BOB}
    )

    alpha, beta = input_spec.resolve(rng)
    state, custody = _deliver_input(state, custody, alpha, beta)

    custody.require(Party.ALICE, ("A", "C"))
    result, state = qnd_bell_measure(state, "A", "C", rng)
    _, state = measure_qubit(state, "A", rng)
    _, state = measure_qubit(state, "C", rng)
    state = drop_qubit(state, "A")
    state = drop_qubit(state, "C")
    custody.drop("A")
    custody.drop("C")

    message = label_to_message(result)
    state = apply_pauli(state, encode_superdense(message), "MA")
    custody.send(("MA",), Party.ALICE, Party.BOB, ledger)
    if message_interceptor is not None:
        message_interceptor(state, custody, "MA")
        return None
    custody.deliver(("MA",), Party.BOB)

    decoded, state = decode_superdense(state, "MA", "MB", rng)
    state = drop_qubit(state, "MA")
    state = drop_qubit(state, "MB")
    custody.drop("MA")
    custody.drop("MB")
    if decoded != message:
        raise ProtocolError(f"decoded message {decoded} != encoded {message}")

    received = message_to_label(decoded)
    correction = correction_for(teleport_channel, received)
    state = apply_pauli(state, correction, "B")
    fid = _qubit_fidelity(state, "B", (alpha, beta))

    return RunReport(
        run_index=run_index,
        variant=Variant.TWO_CHANNEL,
        channel_before=teleport_channel,
        alice_result=result,
        correction=correction,
        fidelity=fid,
        channel_after=None,
        ledger_delta=ledger.delta(before),
        input_amplitudes=(alpha, beta),
        final_state=state,
    )
