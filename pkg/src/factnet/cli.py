"""Command-line front door.

Exit codes: 0 success, 1 runtime or I/O failure, 2 validation or usage error.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from factnet.config import apply_overrides, load_engine_config, parse_assignment, parse_engine_config
from factnet.documents import DocumentError, detect_header
from factnet.engine import KIND_BY_CLASS, Engine, Snapshot, metrics_to_csv
from factnet.ontology import load_ontology, parse_ontology
from factnet.scenario import (
    fire_counts,
    load_scenario_config,
    parse_scenario_config,
    parse_stream,
    run_scenario,
    serialize_stream,
)

OK, RUNTIME, INVALID = 0, 1, 2


class UsageError(Exception):
    pass


def _fail(message: str) -> None:
    print(f"factnet: {message}", file=sys.stderr)


def _sourced(path, loader, *args):
    """Call ``loader`` and tag any DocumentError with the file it came from."""
    try:
        return loader(*args)
    except DocumentError as exc:
        exc.source = path
        raise


def _scenario_config(args):
    config = _sourced(args.scenario or "<bundled scenario>", load_scenario_config, args.scenario)
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    return config


def cmd_gen(args) -> int:
    config = _scenario_config(args)
    cycles = run_scenario(config)
    Path(args.out).write_text(serialize_stream(cycles), encoding="utf-8")
    counts = fire_counts(cycles) or [0]
    peak = max(counts)
    print(f"cycles {config.total_cycles}, peak fires {peak} at cycle {counts.index(peak)}, wrote {args.out}")
    return OK


def _snapshot_cycles(spec: str | None, total: int) -> set[int]:
    if spec is None or spec == "none":
        return set()
    if spec == "all":
        return set(range(total))
    try:
        return {int(part) for part in spec.split(",") if part}
    except ValueError:
        raise UsageError(f"--snapshot expects a cycle list, 'all' or 'none', got {spec!r}") from None


def _check_stream(cycles, graph, engine_config) -> None:
    identity = {"fire": engine_config.fire_identity, "fireBrigade": engine_config.brigade_identity}
    for _, fsfs in cycles:
        for fsf in fsfs:
            if fsf.key not in graph:
                raise UsageError(f"stream references concept {fsf.key!r} missing from the ontology")
            kind = KIND_BY_CLASS.get(graph.concept(fsf.key).taxonomy_class)
            if kind is None:
                raise UsageError(f"no agent kind registered for concept {fsf.key!r}")
            if fsf.get(identity[kind.value]) is None:
                raise UsageError(f"FSF for {fsf.key!r} at t={fsf.timestamp} lacks qualifier {identity[kind.value]!r}")


def cmd_run(args) -> int:
    graph = _sourced(args.ontology or "<bundled ontology>", load_ontology, args.ontology)
    engine_config = _sourced(args.config, load_engine_config, args.config)
    overrides = dict(parse_assignment(item) for item in args.set or ())
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    try:
        engine_config = apply_overrides(engine_config, overrides)
    except ValueError as exc:
        raise UsageError(f"--set: {exc}") from None

    out = Path(args.out)
    events: list[int] = []
    if args.stream is not None:
        cycles = _sourced(args.stream, parse_stream, Path(args.stream).read_text(encoding="utf-8"))
    else:
        scenario = _scenario_config(args)
        cycles = run_scenario(scenario)
        events = [ev.cycle for ev in scenario.events]
    _check_stream(cycles, graph, engine_config)
    wanted = _snapshot_cycles(args.snapshot, len(cycles))

    out.mkdir(parents=True, exist_ok=True)
    marker = out / ".incomplete"
    marker.write_text("run did not finish\n", encoding="utf-8")
    if args.stream is None:
        (out / "stream.fsf").write_text(serialize_stream(cycles), encoding="utf-8")
    engine = Engine(graph, engine_config)
    try:
        for cycle, fsfs in cycles:
            while engine.cycle < cycle:  # tolerate gaps between cycle markers
                engine.run_cycle(())
            engine.run_cycle(fsfs)
            if cycle in wanted:
                (out / f"snapshot-{cycle:04d}.json").write_text(engine.snapshot().to_json(), encoding="utf-8")
    except Exception as exc:
        (out / "metrics.csv").write_text(metrics_to_csv(engine.metrics_log), encoding="utf-8")
        _fail(f"run stopped at cycle {engine.cycle}: {exc}")
        return RUNTIME
    metrics = engine.activity_series()
    (out / "metrics.csv").write_text(metrics_to_csv(metrics), encoding="utf-8")
    if args.plot:
        from factnet.plotting import render_activity

        render_activity(metrics, out / "activity.png", events)
    marker.unlink()
    if metrics:
        peak = max(metrics, key=lambda m: m.activity)
        print(f"cycles {len(metrics)}, peak activity {peak.activity} at cycle {peak.cycle}, wrote {out}")
    return OK


def cmd_validate(args) -> int:
    text = Path(args.path).read_text(encoding="utf-8")
    try:
        return _validate_text(args, text)
    except DocumentError as exc:
        exc.source = args.path
        raise


def _validate_text(args, text: str) -> int:
    kind = detect_header(text)
    if kind == "ontology-v1":
        graph = parse_ontology(text)
        summary = f"{len(graph.concepts)} concepts, {len(graph.edges)} proximities"
    elif kind == "fsf-stream-v1":
        cycles = parse_stream(text)
        if args.ontology:
            _check_stream(cycles, load_ontology(args.ontology), load_engine_config(None))
        summary = f"{len(cycles)} cycles, {sum(len(f) for _, f in cycles)} FSFs"
    elif kind == "scenario-v1":
        config = parse_scenario_config(text)
        summary = f"{config.width}x{config.height} grid, {config.total_cycles} cycles"
    else:
        parse_engine_config(text)
        summary = "engine config"
    print(f"{args.path}: valid {kind} ({summary})")
    return OK


def cmd_inspect(args) -> int:
    snap = Snapshot.from_json(Path(args.path).read_text(encoding="utf-8"))
    print(f"snapshot at cycle {snap.cycle}: {sum(r.alive for r in snap.agents)} alive / {len(snap.agents)} agents")
    print(f"{'id':>4} {'kind':<11} {'state':>5} {'alive':<5} {'AI':>8} {'PI':>8} {'close':>5} {'opp':>4}  fsf")
    for r in snap.agents:
        ai = "-" if r.ai is None else f"{r.ai:.4f}"
        pi = "-" if r.pi is None else f"{r.pi:.4f}"
        quals = " ".join(f"{n}={v}" for n, v in r.fsf.qualifiers)
        print(f"{r.id:>4} {r.kind:<11} {r.atn_state:>5} {str(r.alive).lower():<5} {ai:>8} {pi:>8} "
              f"{len(r.close):>5} {len(r.opposite):>4}  t={r.fsf.timestamp} {quals}")
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="factnet", description="Factual-agent situation representation.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an FSF event stream from a scenario config")
    gen.add_argument("config_path", nargs="?", help="scenario-v1 document (same as --scenario)")
    gen.add_argument("--scenario", help="scenario-v1 document; bundled scenario if omitted")
    gen.add_argument("--out", required=True, help="stream file to write")
    gen.add_argument("--seed", type=int)
    gen.set_defaults(func=cmd_gen)

    for name, help_text in (("run", "run a scenario or stream through the engine"),
                            ("replay", "replay an existing stream (alias of run --stream)")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--ontology", help="ontology-v1 document; bundled ontology if omitted")
        p.add_argument("--scenario", help="scenario-v1 document to generate from")
        p.add_argument("--stream", required=name == "replay", help="fsf-stream-v1 document to replay")
        p.add_argument("--config", help="engine-v1 document")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int)
        p.add_argument("--snapshot", help="cycles to snapshot: '63', '10,63', 'all' or 'none'")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="engine config override")
        p.add_argument("--plot", action="store_true", help="also render activity.png")
        p.set_defaults(func=cmd_run)

    val = sub.add_parser("validate", help="validate an ontology, stream, scenario or engine document")
    val.add_argument("path")
    val.add_argument("--ontology", help="also check stream keys against this ontology")
    val.set_defaults(func=cmd_validate)

    ins = sub.add_parser("inspect", help="print a snapshot document")
    ins.add_argument("path")
    ins.set_defaults(func=cmd_inspect)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INVALID if exc.code else OK
    if getattr(args, "config_path", None):
        if args.scenario:
            _fail("give the scenario config either positionally or with --scenario, not both")
            return INVALID
        args.scenario = args.config_path
    if getattr(args, "scenario", None) and getattr(args, "stream", None):
        _fail("--scenario and --stream are mutually exclusive")
        return INVALID
    try:
        return args.func(args)
    except DocumentError as exc:
        location = getattr(exc, "source", None)
        for diag in exc.diagnostics:
            _fail(f"{location}: {diag}" if location else str(diag))
        return INVALID
    except (UsageError, ValueError) as exc:
        _fail(str(exc))
        return INVALID
    except OSError as exc:
        _fail(str(exc))
        return RUNTIME


if __name__ == "__main__":
    sys.exit(main())
