"""Command line interface.

Every subcommand exits 0 on success. Failures raised by the library
print one machine-parseable line to stderr, ``error: <Name>: <message>``,
and exit nonzero.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

import numpy as np

from . import complexity, experiments, metrics, records, synth
from .configfile import load_kv, save_kv
from .errors import ArgumentError, CadnetError, ShapeError
from .model import (
    MODEL_CONFIG_KEYS,
    ModelConfig,
    build_model,
    load_checkpoint,
    save_checkpoint,
)
from .nn import grad_check
from .rng import STREAM_GRADCHECK, np_generator
from .train import evaluate, save_history, save_summary, train


def _load_config_kv(path: str | None, allowed: frozenset[str]) -> dict[str, str]:
    if path is None:
        return {}
    kv = load_kv(path)
    unknown = sorted(set(kv) - set(allowed))
    if unknown:
        raise ArgumentError(f"unknown config keys: {', '.join(unknown)}")
    return kv


def _outdir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _beat_params(args) -> tuple[synth.BeatParams, synth.BeatParams]:
    params = synth.load_beat_config(args.beats) if args.beats else synth.default_params()
    normal, cad = params
    if args.st_offset is not None:
        cad = dataclasses.replace(cad, st_offset=args.st_offset)
    if args.noise_std is not None:
        normal = dataclasses.replace(normal, noise_std=args.noise_std)
        cad = dataclasses.replace(cad, noise_std=args.noise_std)
    return normal, cad


def _add_beat_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--beats", metavar="CFG", help="beat morphology config file")
    p.add_argument(
        "--st-offset", type=float, dest="st_offset", help="override the cad ST offset"
    )
    p.add_argument(
        "--noise-std", type=float, dest="noise_std", help="override noise for both classes"
    )
    p.add_argument("--hr", type=float, default=60.0, help="heart rate in bpm (default 60)")
    p.add_argument(
        "--hr-jitter",
        type=float,
        default=0.0,
        dest="hr_jitter",
        help="per-beat uniform rate perturbation fraction (default 0)",
    )


def cmd_synth(args) -> int:
    recs = synth.synth_dataset(
        args.cad,
        args.noncad,
        args.fs,
        args.duration,
        args.seed,
        params=_beat_params(args),
        heart_rate_bpm=args.hr,
        hr_jitter=args.hr_jitter,
    )
    records.save_records(recs, args.out)
    print(f"wrote {len(recs)} records to {args.out}")
    return 0


def cmd_prepare(args) -> int:
    recs = records.load_records(args.records)
    window = None if args.whole_record else (args.window_start, args.window_end)
    train_set, test_set = records.prepare(
        recs,
        args.length,
        args.train_frac,
        args.seed,
        window=window,
        per_record=args.per_record,
        by_subject=args.by_subject,
    )
    out = _outdir(args.out)
    train_path = os.path.join(out, "train.csv")
    test_path = os.path.join(out, "test.csv")
    records.save_segments(train_set, train_path)
    records.save_segments(test_set, test_path)
    print(f"wrote {len(train_set)} train segments to {train_path}")
    print(f"wrote {len(test_set)} test segments to {test_path}")
    return 0


def cmd_train(args) -> int:
    train_set = records.load_segments(args.train, normalized=True)
    test_set = records.load_segments(args.test, normalized=True)
    kv = _load_config_kv(args.config, MODEL_CONFIG_KEYS)
    if "input_length" in kv and int(kv["input_length"]) != train_set.segment_length:
        raise ShapeError(
            f"config input_length {kv['input_length']} does not match "
            f"train segments of {train_set.segment_length}"
        )
    overrides: dict = {"input_length": train_set.segment_length}
    if args.seed is not None:
        overrides["seed"] = args.seed
    config = ModelConfig.from_kv(kv, **overrides)
    model = build_model(config)
    report = train(model, train_set, test_set)
    out = _outdir(args.out)
    save_checkpoint(model, os.path.join(out, "model.ckpt"))
    save_history(report, os.path.join(out, "history.csv"))
    save_summary(report, os.path.join(out, "summary.kv"))
    last = report.epochs[-1]
    print(
        f"trained {report.final_epoch} epochs ({report.stopped}) "
        f"in {report.wall_seconds:.1f}s"
    )
    print(f"train_acc={last.train_acc!r} test_acc={last.test_acc!r}")
    print(f"wrote model.ckpt, history.csv, summary.kv to {out}")
    return 0


def cmd_evaluate(args) -> int:
    model = load_checkpoint(args.model)
    dataset = records.load_segments(args.data, normalized=True)
    report = evaluate(model, dataset)
    print(metrics.render_confusion(report.matrix))
    for key, value in metrics.metrics_kv(report).items():
        print(f"{key}={value}")
    if args.out:
        out = _outdir(args.out)
        save_kv(metrics.metrics_kv(report), os.path.join(out, "metrics.kv"))
        with open(os.path.join(out, "metrics.csv"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(metrics.metrics_csv(report))
        with open(os.path.join(out, "confusion.txt"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(metrics.render_confusion(report.matrix) + "\n")
    return 0


_SWEEP_KEYS = MODEL_CONFIG_KEYS | set(experiments.DataSpec.KEYS) | {"lengths"}


def _experiment_inputs(args, kv: dict[str, str]) -> dict:
    """Shared sweep/ablate assembly: config, data spec, cohorts, params."""
    model_kv = {k: v for k, v in kv.items() if k in MODEL_CONFIG_KEYS}
    config = ModelConfig.from_kv(model_kv, input_length=250, seed=args.seed)
    data = experiments.DataSpec.from_kv(kv)
    params = synth.load_beat_config(args.beats) if args.beats else None
    cohorts = {}
    for name in ("d1", "d2", "d3"):
        path = getattr(args, name)
        cohorts[name] = records.load_records(path) if path else None
    return {"config": config, "data": data, "params": params, **cohorts}


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="CFG", help="key=value model and data settings")
    p.add_argument("--beats", metavar="CFG", help="beat morphology config file")
    p.add_argument("--d1", metavar="CSV", help="training cohort records")
    p.add_argument("--d2", metavar="CSV", help="held-out mixed cohort records")
    p.add_argument("--d3", metavar="CSV", help="held-out positive-only cohort records")


def cmd_sweep(args) -> int:
    kv = _load_config_kv(args.config, frozenset(_SWEEP_KEYS))
    inputs = _experiment_inputs(args, kv)
    if args.lengths:
        lengths = tuple(int(v) for v in args.lengths.split(","))
    elif "lengths" in kv:
        lengths = tuple(int(v) for v in kv["lengths"].split(","))
    else:
        lengths = experiments.DEFAULT_LENGTHS
    spec = experiments.SweepSpec(
        lengths=lengths,
        config=inputs["config"],
        data=inputs["data"],
        seed=args.seed,
        params=inputs["params"],
    )
    result = experiments.run_length_sweep(
        spec, d1=inputs["d1"], d2=inputs["d2"], d3=inputs["d3"]
    )
    out = _outdir(args.out)
    path = os.path.join(out, "sweep.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(experiments.sweep_csv(result))
    for length, message in result.failures:
        print(f"sweep: length {length} failed: {message}", file=sys.stderr)
    print(f"wrote {len(result.rows)} rows to {path}")
    return 0 if result.rows else 1


def cmd_ablate(args) -> int:
    kv = _load_config_kv(args.config, frozenset(_SWEEP_KEYS - {"lengths"}))
    inputs = _experiment_inputs(args, kv)
    spec = experiments.AblationSpec(
        length=args.length,
        config=inputs["config"],
        data=inputs["data"],
        seed=args.seed,
        params=inputs["params"],
    )
    rows = experiments.run_dropout_ablation(
        spec, d1=inputs["d1"], d2=inputs["d2"], d3=inputs["d3"]
    )
    out = _outdir(args.out)
    path = os.path.join(out, "ablation.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(experiments.ablation_csv(rows))
    for row in rows:
        d2 = row.evals["d2"]
        print(f"{row.name}: d2_acc={d2.accuracy!r}")
    print(f"wrote {len(rows)} rows to {path}")
    return 0


def cmd_audit(args) -> int:
    kv = _load_config_kv(args.config, MODEL_CONFIG_KEYS)
    config = ModelConfig.from_kv(kv, input_length=args.length)
    model = build_model(config)
    report = complexity.complexity_report(model)
    print(complexity.render_report(report), end="")
    if args.out:
        out = _outdir(args.out)
        with open(os.path.join(out, "complexity.txt"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(complexity.render_report(report))
        with open(os.path.join(out, "complexity.csv"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(complexity.report_csv(report))
    return 0


def cmd_gradcheck(args) -> int:
    kv = _load_config_kv(args.config, MODEL_CONFIG_KEYS)
    config = ModelConfig.from_kv(
        kv, input_length=args.length, seed=args.seed, dtype="float64"
    )
    model = build_model(config)
    rng = np_generator(args.seed, STREAM_GRADCHECK, 1)
    x = rng.standard_normal((args.batch, 1, args.length))
    y = np.arange(args.batch, dtype=np.int64) % 2
    report: dict = {}
    worst = grad_check(
        model, x, y, samples=args.samples, step=args.step, seed=args.seed,
        report=report,
    )
    print(f"max_rel_err={worst:.6e}")
    print(f"compared={report['compared']}")
    print(f"discarded={report['discarded']}")
    print(f"tolerance={args.tol:.6e}")
    if worst < args.tol:
        print("gradients OK")
        return 0
    print("gradients FAIL")
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cadnet",
        description="1-D CNN engine for binary waveform classification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate synthetic labeled records")
    p.add_argument("--cad", type=int, default=5, help="number of label-1 records")
    p.add_argument("--noncad", type=int, default=5, help="number of label-0 records")
    p.add_argument("--fs", type=float, default=125.0, help="sampling rate in Hz")
    p.add_argument("--duration", type=float, default=8.0, help="record duration in seconds")
    p.add_argument("--seed", type=int, default=0)
    _add_beat_flags(p)
    p.add_argument("--out", required=True, metavar="CSV", help="records file to write")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("prepare", help="window, cut, normalize, and split records")
    p.add_argument("--records", required=True, metavar="CSV")
    p.add_argument("--length", required=True, type=int, help="segment length in samples")
    p.add_argument("--train-frac", type=float, default=0.7, dest="train_frac")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window-start", type=int, default=0, dest="window_start")
    p.add_argument("--window-end", type=int, default=1000, dest="window_end")
    p.add_argument(
        "--whole-record",
        action="store_true",
        dest="whole_record",
        help="use whole records instead of a fixed window",
    )
    p.add_argument(
        "--per-record",
        action="store_true",
        dest="per_record",
        help="z-score whole records instead of individual segments",
    )
    p.add_argument(
        "--by-subject",
        action="store_true",
        dest="by_subject",
        help="keep all segments of one subject on one side of the split",
    )
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("train", help="train a model on prepared segments")
    p.add_argument("--train", required=True, metavar="CSV")
    p.add_argument("--test", required=True, metavar="CSV")
    p.add_argument("--config", metavar="CFG", help="key=value model settings")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a checkpoint on segments")
    p.add_argument("--model", required=True, metavar="CKPT")
    p.add_argument("--data", required=True, metavar="CSV")
    p.add_argument("--out", metavar="DIR", help="also write metrics files here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="train once per segment length")
    _add_experiment_flags(p)
    p.add_argument("--lengths", metavar="L1,L2,...", help="comma-separated lengths")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ablate", help="compare the five dropout placements")
    _add_experiment_flags(p)
    p.add_argument("--length", type=int, default=250)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("audit", help="per-layer parameter and FLOP report")
    p.add_argument("--length", type=int, default=250)
    p.add_argument("--config", metavar="CFG", help="key=value model settings")
    p.add_argument("--out", metavar="DIR", help="also write report files here")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("gradcheck", help="verify analytic gradients numerically")
    p.add_argument("--length", type=int, default=150)
    p.add_argument("--batch", type=int, default=2)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", metavar="CFG", help="key=value model settings")
    p.set_defaults(func=cmd_gradcheck)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CadnetError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
