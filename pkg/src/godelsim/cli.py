"""Command-line front end: one subcommand per capability, records out.

Data records go to stdout as line-delimited JSON or CSV (``--format`` or
the ``GU_FORMAT`` environment variable); every invocation additionally
writes exactly one run-manifest record to stderr.  All output is
deterministic: identical arguments and files give byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from contextlib import ExitStack
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, beta, collapse, corpus, dovetail, universe
from .machine import (
    Halted,
    ID,
    LoopDetected,
    MachineParseError,
    count_symbols,
    load_machine_file,
    run_with_loop_detection,
    unary_id,
)

FORMATS = ("jsonl", "csv")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_LOOP = 2
EXIT_BUDGET = 3


class CliError(Exception):
    pass


def _emit(records: list[dict], fmt: str, out) -> None:
    if fmt == "jsonl":
        for record in records:
            out.write(json.dumps(record, sort_keys=True) + "\n")
        return
    columns = sorted({key for record in records for key in record})
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for record in records:
        writer.writerow(["" if record.get(col) is None else record.get(col) for col in columns])


def _manifest(args: argparse.Namespace, inputs: dict, summary: str) -> None:
    record = {
        "record": "manifest",
        "subcommand": args.command if args.command != "beta" else f"beta {args.beta_command}",
        "inputs": json.dumps(inputs, sort_keys=True),
        "seed": args.seed,
        "tool_version": f"godelsim {__version__}",
        "outcome_summary": summary,
    }
    print(json.dumps(record, sort_keys=True), file=sys.stderr)


def _parse_naturals(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part != ""]
    except ValueError as exc:
        raise CliError(f"bad sequence {text!r}: {exc}") from exc
    if not values or any(v < 0 for v in values):
        raise CliError(f"sequence must be non-empty naturals: {text!r}")
    return values


def _parse_tagged(text: str) -> beta.TaggedSequence:
    entries = []
    for part in [p for p in text.split(",") if p != ""]:
        if ":" not in part:
            raise CliError(f"bad tag:value entry {part!r}")
        tag, value = part.split(":", 1)
        try:
            entries.append((int(tag), int(value)))
        except ValueError as exc:
            raise CliError(f"bad tag:value entry {part!r}") from exc
    try:
        return beta.TaggedSequence.from_pairs(entries)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _parse_input_spec(spec: str, machine) -> ID:
    try:
        if spec == "blank":
            return ID(machine.start_state, 0, {})
        if spec.startswith("unary:"):
            return unary_id(machine, int(spec.split(":", 1)[1]))
        if spec.startswith("cells:"):
            tape = {}
            for part in spec.split(":", 1)[1].split(","):
                if not part:
                    continue
                cell, _, symbol = part.partition("=")
                tape[int(cell)] = symbol
            return ID(machine.start_state, 0, tape)
    except ValueError as exc:
        raise CliError(f"bad input spec {spec!r}: {exc}") from exc
    raise CliError(f"bad input spec {spec!r} (use blank, unary:N, or cells:0=1,...)")


def _parse_range(text: str) -> range:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return range(int(lo), int(hi) + 1)
        n = int(text)
        return range(n, n + 1)
    except ValueError as exc:
        raise CliError(f"bad range {text!r} (use N or A..B)") from exc


def _tape_text(desc: ID) -> str:
    return " ".join(f"{cell}:{sym}" for cell, sym in sorted(desc.tape.items()))


def _resolve_config(name: str, stack: ExitStack) -> Path:
    path = Path(name)
    if path.exists():
        return path
    packaged = resources.files("godelsim").joinpath(f"data/configs/{name}.json")
    if packaged.is_file():
        return stack.enter_context(resources.as_file(packaged))
    raise CliError(f"no such config file or shipped config: {name}")


# --- subcommands -------------------------------------------------------------


def cmd_run(args: argparse.Namespace) -> int:
    try:
        machine = load_machine_file(args.machine)
    except MachineParseError as exc:
        print(f"error: {args.machine}: {exc}", file=sys.stderr)
        _manifest(args, {"machine": os.path.abspath(args.machine)}, "parse-error")
        return EXIT_ERROR
    except OSError as exc:
        raise CliError(f"cannot read {args.machine}: {exc}") from exc
    start = _parse_input_spec(args.input, machine)
    records: list[dict] = []

    def on_visit(step_index: int, canon: ID) -> None:
        if args.trace:
            records.append(
                {
                    "record": "visit",
                    "step": step_index,
                    "state": canon.state,
                    "head": canon.head,
                    "tape": _tape_text(canon),
                }
            )

    outcome = run_with_loop_detection(machine, start, args.budget, on_visit)
    if isinstance(outcome, Halted):
        records.append(
            {
                "record": "outcome",
                "kind": "halted",
                "steps": outcome.steps,
                "ones": count_symbols(outcome.final_id),
            }
        )
        status, summary = EXIT_OK, f"halted steps={outcome.steps}"
    elif isinstance(outcome, LoopDetected):
        records.append(
            {
                "record": "outcome",
                "kind": "loop-detected",
                "first_repeat_step": outcome.first_repeat_step,
                "period": outcome.period,
            }
        )
        status = EXIT_LOOP
        summary = f"loop-detected step={outcome.first_repeat_step} period={outcome.period}"
    else:
        records.append({"record": "outcome", "kind": "budget-exceeded", "budget": outcome.budget})
        status, summary = EXIT_BUDGET, f"budget-exceeded budget={outcome.budget}"
    _emit(records, args.format, sys.stdout)
    _manifest(
        args,
        {
            "machine": os.path.abspath(args.machine),
            "input": args.input,
            "budget": args.budget,
            "trace": args.trace,
        },
        summary,
    )
    return status


def cmd_beta(args: argparse.Namespace) -> int:
    records: list[dict] = []
    inputs: dict = {}
    if args.beta_command == "encode":
        seq = _parse_naturals(args.sequence)
        pair = beta.beta_encode(seq)
        records.append({"record": "pair", "b": pair.b, "c": pair.c})
        inputs = {"sequence": seq}
        summary = f"b={pair.b} c={pair.c}"
    elif args.beta_command == "eval":
        try:
            b, c = (int(x) for x in args.pair.split(","))
            pair = beta.BetaPair(b, c)
        except ValueError as exc:
            raise CliError(f"bad pair {args.pair!r} (use b,c): {exc}") from exc
        value = beta.beta_eval(pair, args.index)
        records.append({"record": "value", "i": args.index, "value": value})
        inputs = {"pair": [b, c], "index": args.index}
        summary = f"value={value}"
    elif args.beta_command == "matches":
        seq = _parse_naturals(args.sequence)
        pairs = beta.enumerate_matches(seq, args.bound)
        records.extend({"record": "pair", "b": p.b, "c": p.c} for p in pairs)
        inputs = {"sequence": seq, "bound": args.bound}
        summary = f"{len(pairs)} matching pairs"
    elif args.beta_command == "predict":
        seq = _parse_naturals(args.sequence)
        try:
            dist = beta.next_value_distribution(seq, args.bound)
        except beta.EmptyMatchSetError as exc:
            raise CliError(str(exc)) from exc
        for value, freq in dist.frequencies().items():
            records.append(
                {
                    "record": "prediction",
                    "value": value,
                    "count": dist.counts[value],
                    "total": dist.total,
                    "frequency": str(freq),
                }
            )
        inputs = {"sequence": seq, "bound": args.bound}
        summary = f"{len(records)} predicted values over {dist.total} pairs"
    else:
        first = _parse_tagged(args.first)
        second = _parse_tagged(args.second)
        try:
            merged = beta.superpose(first, second)
        except beta.TagCollisionError as exc:
            raise CliError(str(exc)) from exc
        records.extend({"record": "entry", "tag": t, "value": v} for t, v in merged.entries)
        inputs = {"first": args.first, "second": args.second}
        summary = f"{len(merged)} entries"
    _emit(records, args.format, sys.stdout)
    _manifest(args, inputs, summary)
    return EXIT_OK


def cmd_dovetail(args: argparse.Namespace) -> int:
    tasks = []
    resolved = []
    for index, spec in enumerate(args.task):
        path, _, predicate = spec.partition("=")
        if predicate not in ("zero-of", "nonzero-of"):
            raise CliError(f"task {spec!r} must end in =zero-of or =nonzero-of")
        try:
            machine = load_machine_file(path)
        except (MachineParseError, OSError) as exc:
            raise CliError(f"{path}: {exc}") from exc
        if predicate == "zero-of":
            accept = lambda halted: dovetail.unary_output(halted) == 0
        else:
            accept = lambda halted: dovetail.unary_output(halted) != 0
        tasks.append(
            dovetail.SearchTask(
                index,
                lambda y, m=machine: dovetail.SubRun(m, unary_id(m, y)),
                accept,
            )
        )
        resolved.append({"machine": os.path.abspath(path), "accept": predicate})
    records: list[dict] = []

    def observer(event: dovetail.SchedulerEvent) -> None:
        records.append(
            {
                "record": "event",
                "step": event.global_step,
                "rank": event.rank,
                "task": event.task_id,
                "trial": event.trial,
                "result": event.result,
            }
        )

    outcome = dovetail.dovetail(tasks, args.sub_budget, args.global_budget, observer)
    if isinstance(outcome, dovetail.FirstSuccess):
        records.append(
            {
                "record": "outcome",
                "kind": "first-success",
                "task": outcome.task_id,
                "trial": outcome.trial,
                "steps": outcome.evidence.steps,
            }
        )
        summary = f"first-success task={outcome.task_id} trial={outcome.trial}"
    elif isinstance(outcome, dovetail.AllExhausted):
        records.append({"record": "outcome", "kind": "all-exhausted"})
        summary = "all-exhausted"
    else:
        records.append(
            {"record": "outcome", "kind": "global-budget-exceeded", "budget": outcome.global_budget}
        )
        summary = "global-budget-exceeded"
    _emit(records, args.format, sys.stdout)
    _manifest(
        args,
        {"tasks": resolved, "sub_budget": args.sub_budget, "global_budget": args.global_budget},
        summary,
    )
    return EXIT_OK


def _verdict_text(verdict: universe.PredictabilityVerdict) -> str:
    if isinstance(verdict, universe.Predictable):
        return f"predictable({verdict.stable_value}@{verdict.stabilized_at})"
    if isinstance(verdict, universe.Random):
        return f"random({verdict.witness[0]},{verdict.witness[1]})"
    return f"undetermined(window={verdict.window})"


def cmd_universe(args: argparse.Namespace) -> int:
    with ExitStack() as stack:
        config_path = _resolve_config(args.config, stack)
        try:
            setup = universe.load_universe_config(config_path)
        except universe.ConfigError as exc:
            raise CliError(str(exc)) from exc
    steps = args.steps if args.steps is not None else setup.steps
    window = args.window if args.window is not None else setup.window
    u = setup.universe
    records: list[dict] = []
    names = {}
    for p in u.particles:
        for k in p.providers:
            name = u.registry.name_of(k) or str(k)
            # property names must not clobber the fixed record columns
            names[k] = f"prop_{name}" if name in ("record", "t", "particle") else name
    series: dict[tuple[int, int], list[Optional[int]]] = {}
    for t in range(steps):
        for particle in u.particles:
            try:
                sig = universe.signature_at(u, particle.id, t)
            except universe.ProviderError as exc:
                raise CliError(str(exc)) from exc
            record: dict = {"record": "signature", "t": t, "particle": particle.id}
            for k, value in sig.values.items():
                record[names[k]] = "horizon-exceeded" if value is None else value
                series.setdefault((particle.id, k), []).append(value)
            records.append(record)
    report = universe.check_predictability_obstruction(u)
    verdicts: dict[str, list[str]] = {"predictable": [], "random": [], "undetermined": [], "horizon-limited": []}
    for (pid, k), values in sorted(series.items()):
        label = f"{pid}.{names[k]}"
        if any(v is None for v in values):
            verdicts["horizon-limited"].append(label)
            continue
        verdict = universe.classify_predictability([v for v in values if v is not None], window)
        if isinstance(verdict, universe.Predictable):
            verdicts["predictable"].append(label)
        elif isinstance(verdict, universe.Random):
            verdicts["random"].append(label)
        else:
            verdicts["undetermined"].append(label)
    records.append(
        {
            "record": "report",
            "classification": report.classification.value,
            "particles": len(u.particles),
            "fundamental": " ".join(str(p) for p in report.fundamental_particles),
            "initial_materialized": " ".join(
                str(p.particle) for p in report.particles if p.initial_materialized
            ),
            "predictable": " ".join(verdicts["predictable"]),
            "random": " ".join(verdicts["random"]),
            "undetermined": " ".join(verdicts["undetermined"]),
            "horizon_limited": " ".join(verdicts["horizon-limited"]),
            "window": window,
        }
    )
    _emit(records, args.format, sys.stdout)
    _manifest(
        args,
        {"config": os.path.abspath(str(config_path)), "steps": steps, "window": window},
        f"classification={report.classification.value}",
    )
    return EXIT_OK


def cmd_collapse(args: argparse.Namespace) -> int:
    try:
        hm = collapse.make_horizon_machine(args.pred, args.k)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    measured = collapse.measure(hm, args.measure) if args.measure is not None else hm
    records: list[dict] = []
    for n in _parse_range(args.eval):
        before = collapse.evaluate(hm, n)
        after = collapse.evaluate(measured, n)
        records.append(
            {
                "record": "eval",
                "n": n,
                "before": "loop" if isinstance(before, LoopDetected) else before,
                "after": "loop" if isinstance(after, LoopDetected) else after,
            }
        )
    records.append(
        {
            "record": "horizons",
            "before": hm.horizon,
            "after": measured.horizon,
            "history": " ".join(str(k) for k in measured.history),
        }
    )
    _emit(records, args.format, sys.stdout)
    _manifest(
        args,
        {"pred": args.pred, "k": args.k, "measure": args.measure, "eval": args.eval},
        f"horizon {hm.horizon} -> {measured.horizon}",
    )
    return EXIT_OK


def cmd_corpus(args: argparse.Namespace) -> int:
    results = corpus.verify_corpus()
    records = [
        {
            "record": "verify",
            "machine": r.name,
            "expected": r.expected,
            "observed": r.observed,
            "passed": r.passed,
            "detail": r.detail,
        }
        for r in results
    ]
    passed = sum(1 for r in results if r.passed)
    records.append(
        {"record": "summary", "passed": passed, "failed": len(results) - passed, "total": len(results)}
    )
    _emit(records, args.format, sys.stdout)
    _manifest(args, {"machines": len(results)}, f"{passed}/{len(results)} passed")
    return EXIT_OK if passed == len(results) else EXIT_ERROR


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gu", description="Loop-detected machines, sequence codecs, and universe checks."
    )
    parser.add_argument(
        "--format",
        choices=FORMATS,
        default=os.environ.get("GU_FORMAT", "jsonl"),
        help="output format for data records (default: GU_FORMAT or jsonl)",
    )
    parser.add_argument("--seed", type=int, default=0, help="seed recorded in the run manifest")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run a machine file under loop detection")
    run.add_argument("machine")
    run.add_argument("--input", default="blank", help="blank | unary:N | cells:0=1,...")
    run.add_argument("--budget", type=int, default=10_000)
    run.add_argument("--trace", action="store_true", help="emit every visited configuration")
    run.set_defaults(func=cmd_run)

    bcmd = commands.add_parser("beta", help="sequence codec: encode, eval, match, predict, merge")
    bsub = bcmd.add_subparsers(dest="beta_command", required=True)
    enc = bsub.add_parser("encode")
    enc.add_argument("sequence", help="comma-separated naturals, e.g. 3,1,4")
    ev = bsub.add_parser("eval")
    ev.add_argument("pair", help="b,c")
    ev.add_argument("index", type=int)
    mat = bsub.add_parser("matches")
    mat.add_argument("sequence")
    mat.add_argument("--bound", type=int, required=True)
    pre = bsub.add_parser("predict")
    pre.add_argument("sequence")
    pre.add_argument("--bound", type=int, required=True)
    sup = bsub.add_parser("superpose")
    sup.add_argument("first", help="tag:value pairs, e.g. 0:1,2:3")
    sup.add_argument("second")
    bcmd.set_defaults(func=cmd_beta)

    dov = commands.add_parser("dovetail", help="interleave machine searches fairly")
    dov.add_argument("task", nargs="+", help="machine file and predicate, e.g. m.tm=zero-of")
    dov.add_argument("--sub-budget", type=int, default=64)
    dov.add_argument("--global-budget", type=int, default=10_000)
    dov.set_defaults(func=cmd_dovetail)

    uni = commands.add_parser("universe", help="simulate a configured universe")
    usub = uni.add_subparsers(dest="universe_command", required=True)
    sim = usub.add_parser("sim")
    sim.add_argument("--config", required=True, help="config file path or shipped config name")
    sim.add_argument("--steps", type=int, default=None)
    sim.add_argument("--window", type=int, default=None)
    sim.set_defaults(func=cmd_universe)

    col = commands.add_parser("collapse", help="horizon machine demonstration")
    csub = col.add_subparsers(dest="collapse_command", required=True)
    demo = csub.add_parser("demo")
    demo.add_argument("--pred", default="parity", help="parity | const=<v> | mod=<m> | pi")
    demo.add_argument("--k", type=int, required=True)
    demo.add_argument("--measure", type=int, default=None)
    demo.add_argument("--eval", default="0..10", help="input range, e.g. 0..10")
    demo.set_defaults(func=cmd_collapse)

    cor = commands.add_parser("corpus", help="verify the shipped machine corpus")
    corsub = cor.add_subparsers(dest="corpus_command", required=True)
    ver = corsub.add_parser("verify")
    ver.set_defaults(func=cmd_corpus)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format not in FORMATS:
        print(f"error: bad format {args.format!r}", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        _manifest(args, {}, f"error: {exc}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
