"""Command-line entry point: ``imurep <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .classifier import Pipeline, parse_event_log, write_event_log
from .config import PipelineConfig, load_config
from .errors import ImurepError
from .evaluation import (
    classification_metrics,
    format_matrix,
    format_report,
    load_matrix,
    load_truth,
    loads_matrix,
    match_events,
    predictions,
    report_keyvalues,
    dumps_truth,
)
from .generator import GeneratorSpec, circuit_protocol_spec, five_pattern_spec, generate, load_spec
from .ingest import ingest_csv, paced, write_csv
from .segmentation import segment_samples
from .templates import TemplateStore, load_templates, make_template, pick_segment, save_templates


def _config(args) -> PipelineConfig:
    return load_config(args.config) if getattr(args, "config", None) else PipelineConfig()


def cmd_record_template(args):
    config = _config(args)
    header, rows = ingest_csv(args.input)
    samples = list(rows)
    segments = segment_samples(samples, header.sample_rate_hz, config)
    durations = ", ".join(str(s.duration_ms) for s in segments)
    print(f"{len(segments)} candidate segments (ms): {durations}", file=sys.stderr)
    chosen = pick_segment(segments, args.pick)
    template = make_template(chosen, args.label, args.suppress)
    out = Path(args.out)
    store = load_templates(out) if out.exists() else TemplateStore()
    store.add(template)
    save_templates(store, out)
    print(
        f"saved {args.label!r}: {len(template.data)} samples, {chosen.duration_ms} ms, "
        f"dominant axis {template.stats.dominant}",
        file=sys.stderr,
    )


def cmd_run(args):
    config = _config(args)
    store = load_templates(args.templates)
    header, rows = ingest_csv(args.input)
    if args.paced:
        rows = paced(rows, args.speed)
    pipe = Pipeline(store, header.sample_rate_hz, config)

    def events():
        for s in rows:
            yield from pipe.push(s)
        yield from pipe.finish()

    if args.out == "-":
        write_event_log(events(), sys.stdout)
    else:
        with open(args.out, "w") as fh:
            write_event_log(events(), fh)
    summary = ", ".join(f"{k}={v}" for k, v in pipe.counts.items())
    print(f"counts: {summary}", file=sys.stderr)


def cmd_evaluate(args):
    records = parse_event_log(Path(args.events).read_text())
    preds = predictions(r for r in records if r.kind == "count")
    truth = load_truth(args.truth)
    cm = match_events(preds, truth, args.tolerance_ms)
    report = classification_metrics(cm)
    print(format_matrix(cm))
    print()
    print(format_report(report))
    print()
    print(report_keyvalues(report))


def cmd_generate(args):
    if args.spec:
        spec = load_spec(args.spec)
        if args.seed is not None:
            spec = GeneratorSpec.from_dict({**spec.to_dict(), "seed": args.seed})
    else:
        seed = 0 if args.seed is None else args.seed
        spec = circuit_protocol_spec(seed) if args.preset == "circuit" else five_pattern_spec(seed)
    samples, truth = generate(spec)
    write_csv(spec.sample_rate_hz, samples, args.out)
    if args.truth_out:
        Path(args.truth_out).write_text(dumps_truth(truth))
    if args.dump_spec:
        Path(args.dump_spec).write_text(json.dumps(spec.to_dict(), indent=2) + "\n")
    print(f"{len(samples)} samples, {len(truth)} repetitions", file=sys.stderr)


def cmd_metrics_oracle(args):
    if args.matrix:
        cm = load_matrix(args.matrix)
    else:
        text = resources.files("imurep").joinpath("data/circuit_matrix.txt").read_text()
        cm = loads_matrix(text)
    report = classification_metrics(cm)
    print(format_matrix(cm))
    print()
    print(format_report(report))
    print()
    print(report_keyvalues(report))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="imurep", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("record-template", help="enrol one segment of a recording as a template")
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--label", required=True)
    r.add_argument("--suppress", type=int, default=0, help="segments to skip after a match")
    r.add_argument("--pick", type=int, default=None, help="candidate index (default: median duration)")
    r.add_argument("--out", required=True)
    r.add_argument("--config")
    r.set_defaults(func=cmd_record_template)

    r = sub.add_parser("run", help="segment, classify and count a recorded stream")
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--templates", required=True)
    r.add_argument("--config")
    r.add_argument("--paced", action="store_true", help="replay at the sensor rate")
    r.add_argument("--speed", type=float, default=1.0, help="replay speed factor with --paced")
    r.add_argument("--out", required=True, help="event log path, '-' for stdout")
    r.set_defaults(func=cmd_run)

    r = sub.add_parser("evaluate", help="score an event log against truth intervals")
    r.add_argument("--events", required=True)
    r.add_argument("--truth", required=True)
    r.add_argument("--tolerance-ms", type=int, default=250)
    r.set_defaults(func=cmd_evaluate)

    r = sub.add_parser("generate", help="write a synthetic session")
    src = r.add_mutually_exclusive_group()
    src.add_argument("--spec", help="JSON generator spec")
    src.add_argument("--preset", choices=("five", "circuit"), default="five")
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--out", required=True)
    r.add_argument("--truth-out")
    r.add_argument("--dump-spec", help="also write the effective spec as JSON")
    r.set_defaults(func=cmd_generate)

    r = sub.add_parser("metrics-oracle", help="metrics from a confusion-matrix file")
    r.add_argument("--matrix", help="matrix file (default: bundled circuit matrix)")
    r.set_defaults(func=cmd_metrics_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ImurepError, ValueError, KeyError, IndexError, OSError) as exc:
        msg = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
        print(f"imurep {args.command}: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
