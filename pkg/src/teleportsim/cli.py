"""Command line front end: run experiments, dump tables, verify invariants.

Reports are deterministic byte-for-byte for a given configuration and seed.
Independent runs (baseline and two-channel variants) draw from a generator
seeded with (seed, run_index); a single-channel experiment is one stateful
sequence, so it consumes a single stream seeded with (seed,). Amplitudes in
JSON are rendered to 17 significant digits, enough to round-trip a double.
"""
from __future__ import annotations

import argparse
import enum
import json
import sys
from dataclasses import dataclass

import numpy as np

from .adversary import (
    LeakageReport,
    PairObserver,
    message_interception_report,
    pair_interception_analysis,
)
from .bell import BELL_ORDER, SUPERDENSE_DECODING, SUPERDENSE_ENCODING, SYNDROME_TO_BELL, TwoBitMessage
from .bell import CORRECTIONS, RESTORES, label_to_message
from .core import BellLabel
from .protocol import (
    Approach,
    InputSpec,
    Ledger,
    RunReport,
    Variant,
    run_op_baseline,
    run_single_channel_aqt,
    run_two_channel_aqt,
)
from .verification import run_checks

FIDELITY_OK = 1e-9  # report-level threshold, looser than the test tolerances


class EveMode(enum.Enum):
    NONE = "none"
    PAIR = "pair"
    QUBIT = "qubit"


@dataclass(frozen=True)
class ExperimentConfig:
    variant: Variant
    runs: int
    channel: BellLabel
    input_spec: InputSpec
    seed: int
    eve: EveMode
    fmt: str
    out: str | None


@dataclass
class ExperimentOutcome:
    reports: list[RunReport]
    ledger: Ledger
    eve_reports: list[LeakageReport] | None
    all_fidelities_ok: bool


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _amp_pair(a: complex, b: complex) -> list[list[str]]:
    return [[_fmt(a.real), _fmt(a.imag)], [_fmt(b.real), _fmt(b.imag)]]


def _per_run_rng(seed: int, run_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, run_index]))


def run_experiment(config: ExperimentConfig) -> ExperimentOutcome:
    ledger = Ledger()
    reports: list[RunReport] = []
    eve_reports: list[LeakageReport] | None = None

    if config.variant is Variant.OP:
        for i in range(config.runs):
            reports.append(
                run_op_baseline(config.input_spec, config.channel, _per_run_rng(config.seed, i), ledger, i)
            )
    elif config.variant is Variant.TWO_CHANNEL:
        if config.eve is EveMode.QUBIT:
            eve_reports = [
                message_interception_report(
                    config.input_spec, config.channel, _per_run_rng(config.seed, i), i, ledger
                )
                for i in range(config.runs)
            ]
        else:
            for i in range(config.runs):
                report = run_two_channel_aqt(
                    config.input_spec, config.channel, _per_run_rng(config.seed, i), ledger, i
                )
                assert report is not None
                reports.append(report)
    else:
        approach = (
            Approach.RESTORE_CHANNEL
            if config.variant is Variant.SINGLE_CHANNEL_RESTORE
            else Approach.TRACK_CHANNEL
        )
        rng = np.random.default_rng(np.random.SeedSequence([config.seed]))
        interceptor = PairObserver() if config.eve is EveMode.PAIR else None
        reports = run_single_channel_aqt(
            [config.input_spec] * config.runs, approach, config.channel, rng, ledger, interceptor
        )
        if config.eve is EveMode.PAIR:
            # Distinguishability is measured against a fixed |0> reference input
            # replayed under the same seed.
            eve_reports = pair_interception_analysis(
                config.input_spec,
                InputSpec.explicit(1.0, 0.0),
                approach,
                config.channel,
                config.seed,
                config.runs,
            )

    all_ok = all(r.fidelity >= 1.0 - FIDELITY_OK for r in reports)
    return ExperimentOutcome(reports, ledger, eve_reports, all_ok)


def _config_dict(config: ExperimentConfig) -> dict[str, object]:
    spec = config.input_spec
    return {
        "variant": config.variant.value,
        "runs": config.runs,
        "channel": config.channel.value,
        "input": "random" if spec.random else _amp_pair(spec.alpha, spec.beta),
        "seed": config.seed,
        "eve": config.eve.value,
    }


def _run_dict(report: RunReport) -> dict[str, object]:
    out = report.as_dict()
    a, b = report.input_amplitudes
    out["input_amplitudes"] = _amp_pair(a, b)
    return out


def render_json(config: ExperimentConfig, outcome: ExperimentOutcome) -> str:
    payload: dict[str, object] = {
        "config": _config_dict(config),
        "runs": [_run_dict(r) for r in outcome.reports],
        "ledger": outcome.ledger.as_dict(),
        "all_fidelities_ok": outcome.all_fidelities_ok,
    }
    if outcome.eve_reports is not None:
        payload["eve"] = {
            "mode": config.eve.value,
            "runs": [leak.as_dict() for leak in outcome.eve_reports],
        }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def render_text(config: ExperimentConfig, outcome: ExperimentOutcome) -> str:
    spec = config.input_spec
    input_txt = (
        "random"
        if spec.random
        else f"({_fmt(spec.alpha.real)},{_fmt(spec.alpha.imag)},{_fmt(spec.beta.real)},{_fmt(spec.beta.imag)})"
    )
    lines = [
        f"variant={config.variant.value} channel={config.channel.value} runs={config.runs}"
        f" seed={config.seed} eve={config.eve.value} input={input_txt}"
    ]
    for r in outcome.reports:
        a, b = r.input_amplitudes
        after = "-" if r.channel_after is None else r.channel_after.value
        lines.append(
            f"run {r.run_index}: channel={r.channel_before.value} result={r.alice_result.value}"
            f" correction={r.correction.value} fidelity={_fmt(r.fidelity)} channel_after={after}"
            f" input=({_fmt(a.real)},{_fmt(a.imag)},{_fmt(b.real)},{_fmt(b.imag)})"
        )
    if outcome.eve_reports is not None:
        for i, leak in enumerate(outcome.eve_reports):
            obs = "-" if leak.eve_observation is None else leak.eve_observation.value
            lines.append(
                f"eve run {i}: observation={obs} disturbance={_fmt(leak.disturbance)}"
                f" distinguishability={_fmt(leak.distinguishability)}"
            )
    led = outcome.ledger
    lines.append(
        f"ledger: epr_pairs_created={led.epr_pairs_created}"
        f" qubits_transmitted={led.qubits_transmitted}"
        f" classical_bits_transmitted={led.classical_bits_transmitted}"
    )
    lines.append(f"all_fidelities_ok={'true' if outcome.all_fidelities_ok else 'false'}")
    return "\n".join(lines) + "\n"


def render_tables() -> str:
    lines = ["correction table: (channel, result) -> operator on receiver qubit"]
    for channel in BELL_ORDER:
        for result in BELL_ORDER:
            lines.append(f"  channel={channel.value} result={result.value} -> {CORRECTIONS[(channel, result)].value}")
    lines.append("restore table: (measured, target) -> operator on first pair member")
    for measured in BELL_ORDER:
        for target in BELL_ORDER:
            lines.append(f"  measured={measured.value} target={target.value} -> {RESTORES[(measured, target)].value}")
    lines.append("superdense encoding: bits -> operator on sender half of phi+")
    for hi in (0, 1):
        for lo in (0, 1):
            lines.append(f"  {hi}{lo} -> {SUPERDENSE_ENCODING[(hi, lo)].value}")
    lines.append("superdense decoding: pair state -> bits")
    for label in BELL_ORDER:
        lines.append(f"  {label.value} -> {SUPERDENSE_DECODING[label]}")
    lines.append("syndrome map: ancilla bits (d, e) -> collapsed pair state")
    for (d, e), label in SYNDROME_TO_BELL.items():
        lines.append(f"  ({d}, {e}) -> {label.value}")
    lines.append("label enumeration: pair state -> message bits")
    for label in BELL_ORDER:
        lines.append(f"  {label.value} -> {label_to_message(label)}")
    return "\n".join(lines) + "\n"


def _check_reproducibility() -> tuple[bool, str]:
    for variant, eve in ((Variant.SINGLE_CHANNEL_RESTORE, EveMode.NONE), (Variant.TWO_CHANNEL, EveMode.NONE)):
        config = ExperimentConfig(
            variant=variant,
            runs=3,
            channel=BellLabel.PSI_MINUS,
            input_spec=InputSpec.haar(),
            seed=1,
            eve=eve,
            fmt="json",
            out=None,
        )
        first = render_json(config, run_experiment(config))
        second = render_json(config, run_experiment(config))
        if first != second:
            return False, f"{variant.value} report not byte-identical across replays"
    return True, "replayed reports are byte-identical"


def run_verify() -> int:
    results = run_checks()
    results.append(("cli/reproducibility", *_check_reproducibility()))
    failed = 0
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        if not ok:
            failed += 1
    print(f"{len(results) - failed}/{len(results)} invariants hold")
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="teleportsim",
        description="Simulate teleportation protocols whose classical channel is replaced by quantum resources.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a seeded experiment and print a report")
    run.add_argument("--variant", choices=[v.value for v in Variant], default="single-i")
    run.add_argument("--runs", type=int, default=1, metavar="N")
    run.add_argument("--channel", choices=[l.value for l in BELL_ORDER], default="psi-")
    group = run.add_mutually_exclusive_group()
    group.add_argument("--input", metavar="aRe,aIm,bRe,bIm", help="explicit input amplitudes")
    group.add_argument("--random-input", action="store_true", help="Haar-random input per run (default)")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--eve", choices=[m.value for m in EveMode], default="none")
    run.add_argument("--format", choices=["text", "json"], default="text", dest="fmt")
    run.add_argument("--out", metavar="FILE", help="write the report to FILE instead of stdout")

    sub.add_parser("tables", help="print every correction, restore and coding table")
    sub.add_parser("verify", help="run the invariant suite and report pass/fail per invariant")
    return parser


def _parse_input(parser: argparse.ArgumentParser, text: str) -> InputSpec:
    parts = text.split(",")
    if len(parts) != 4:
        parser.error(f"--input expects four comma-separated floats, got {text!r}")
    try:
        a_re, a_im, b_re, b_im = (float(p) for p in parts)
    except ValueError:
        parser.error(f"--input expects four comma-separated floats, got {text!r}")
    alpha, beta = complex(a_re, a_im), complex(b_re, b_im)
    nrm = np.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
    if abs(nrm - 1.0) > 1e-6:
        parser.error(f"input amplitudes must be normalized, |amps| = {nrm:.8f}")
    return InputSpec.explicit(alpha / nrm, beta / nrm)


def parse_config(parser: argparse.ArgumentParser, args: argparse.Namespace) -> ExperimentConfig:
    if args.runs < 1:
        parser.error("--runs must be at least 1")
    if args.seed < 0:
        parser.error("--seed must be nonnegative")
    variant = Variant(args.variant)
    eve = EveMode(args.eve)
    if eve is EveMode.PAIR and variant not in (
        Variant.SINGLE_CHANNEL_RESTORE,
        Variant.SINGLE_CHANNEL_TRACK,
    ):
        parser.error("--eve pair only applies to the single-channel variants")
    if eve is EveMode.QUBIT and variant is not Variant.TWO_CHANNEL:
        parser.error("--eve qubit only applies to the dual variant")
    spec = _parse_input(parser, args.input) if args.input else InputSpec.haar()
    return ExperimentConfig(
        variant=variant,
        runs=args.runs,
        channel=BellLabel(args.channel),
        input_spec=spec,
        seed=args.seed,
        eve=eve,
        fmt=args.fmt,
        out=args.out,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "tables":
        print(render_tables(), end="")
        return 0
    if args.command == "verify":
        return run_verify()
    config = parse_config(parser, args)
    outcome = run_experiment(config)
    output = render_json(config, outcome) if config.fmt == "json" else render_text(config, outcome)
    if config.out:
        with open(config.out, "w") as fh:
            fh.write(output)
    else:
        print(output, end="")
    return 0 if outcome.all_fidelities_ok else 1


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
