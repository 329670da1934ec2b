"""Command-line entry point tying the pipeline stages together.

Every subcommand is deterministic for a fixed config and seed. Exit codes:
0 success, 1 validation or usage error, 2 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .autoencoder import save_model, train_codec
from .benchmark import embed_query, fit_pipeline, run_benchmark
from .bundle import load_bundle, save_bundle
from .classify import calibrate_reject_threshold, classify
from .config import PRESETS, PipelineConfig
from .depth import lift_frame, read_raw_stream
from .dtw import dtw_distance
from .errors import InsufficientDepth, SkelactError
from .features import apply_scaling, embed_sequence, fit_scaling
from .metrics import EvalReport
from .normalize import normalize_sequence
from .skeleton_io import (convert_mhad_dataset, load_manifest, load_sequence,
                          record_to_frame, write_sequence)
from .stream import StreamConfig, run_stream
from .synthetic import GESTURE_CLASSES, make_dataset
from .uav import SimState, load_scenario, run_scenario, write_log

log = logging.getLogger("skelact")


class _Parser(argparse.ArgumentParser):
    """Usage errors are validation errors: exit 1, message on stderr."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PRESET_OR_FILE", default=None,
                   help=f"preset ({', '.join(sorted(PRESETS))}) or JSON file "
                        "of dotted keys")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config key (repeatable)")
    p.add_argument("--seed", type=int, default=None,
                   help="seed for every stochastic step (split and codec)")


def _resolve_config(args) -> PipelineConfig:
    cfg = PipelineConfig.load(args.config)
    if args.set:
        cfg = cfg.with_overrides(args.set)
    if args.seed is not None:
        cfg = cfg.with_overrides([f"split.seed={args.seed}",
                                  f"codec.seed={args.seed}"])
    return cfg


def _load_data_manifest(data: str):
    path = Path(data)
    manifest_path = path / "manifest.txt" if path.is_dir() else path
    return load_manifest(manifest_path), manifest_path.parent


def cmd_convert(args) -> int:
    manifest = convert_mhad_dataset(args.mhad, args.out)
    print(f"converted {len(manifest)} sequences, "
          f"{len(manifest.classes)} classes -> {args.out}")
    return 0


def cmd_lift(args) -> int:
    source = sys.stdin if args.input == "-" else open(args.input)
    frames = []
    skipped = 0
    try:
        for raw in read_raw_stream(source):
            try:
                frames.append(lift_frame(raw))
            except InsufficientDepth as e:
                skipped += 1
                log.warning("frame at t=%.3f skipped: %s", raw.timestamp, e)
    finally:
        if source is not sys.stdin:
            source.close()
    from .skeleton_io import PoseSequence
    seq = PoseSequence(frames).validate()
    write_sequence(seq, args.out)
    print(f"lifted {len(frames)} frames ({skipped} skipped) -> {args.out}")
    return 0


def _prepare_features(sequences, config: PipelineConfig):
    feats = [embed_sequence(normalize_sequence(s, config.normalize_config()))
             for s in sequences]
    scaling = fit_scaling(feats)
    return [apply_scaling(f, scaling, config["scale.clamp"]) for f in feats]


def cmd_train_codec(args) -> int:
    config = _resolve_config(args)
    manifest, base = _load_data_manifest(args.data)
    sequences = [load_sequence(base / p, label=lbl)
                 for p, lbl, _, _ in manifest.entries]
    scaled = _prepare_features(sequences, config)
    model = train_codec(scaled, config.train_config())
    save_model(model, args.out)
    best = min(e["val_loss"] for e in model.history)
    print(f"trained codec {model.input_dim}->{model.latent_dim} over "
          f"{len(model.history)} epochs, best val loss {best:.6f} -> {args.out}")
    return 0


def cmd_build_refs(args) -> int:
    config = _resolve_config(args)
    manifest, base = _load_data_manifest(args.data)
    classes = args.classes.split(",") if args.classes else manifest.classes
    manifest = manifest.subset(classes)
    sequences = [load_sequence(base / p, label=lbl)
                 for p, lbl, _, _ in manifest.entries]
    bundle = fit_pipeline(sequences, config, classes)
    if args.calibrate_reject:
        bundle.refs.config.reject_threshold = calibrate_reject_threshold(bundle.refs)
        print(f"reject threshold calibrated to "
              f"{bundle.refs.config.reject_threshold:.4f}")
    save_bundle(bundle, args.out)
    print(f"bundled {len(bundle.refs)} references, "
          f"{len(classes)} classes -> {args.out}")
    return 0


def _result_line(result, seq) -> str:
    ts = seq.timestamps()
    return json.dumps({
        "label": result.label,
        "null": result.is_null,
        "t_start": round(float(ts[0]), 4),
        "t_end": round(float(ts[-1]), 4),
        "n_frames": len(seq),
        "classify_ms": round(result.elapsed_ms, 3),
        "neighbors": [[lbl, round(d, 6)] for lbl, d in result.neighbors],
    }, separators=(",", ":"))


def cmd_classify(args) -> int:
    bundle = load_bundle(args.bundle)
    config = PipelineConfig(dict(bundle.meta.get("config", {})))
    if args.set:
        config = config.with_overrides(args.set)

    if args.stream:
        stream_cfg = StreamConfig(
            idle_gap_s=config["stream.idle_gap_s"],
            motion_threshold=config["stream.motion_threshold"],
            queue_size=config["stream.queue_size"])

        def handle(seq):
            result = classify(embed_query(seq, bundle, config), bundle.refs)
            print(_result_line(result, seq), flush=True)

        frames = (record_to_frame(line) for line in sys.stdin
                  if line.strip())
        stats = run_stream(frames, handle, stream_cfg)
        print(f"frames={stats.frames_in} dropped={stats.frames_dropped} "
              f"segments={stats.segments}", file=sys.stderr)
        return 0

    seq = load_sequence(args.input)
    result = classify(embed_query(seq, bundle, config), bundle.refs)
    print(_result_line(result, seq))
    return 0


def _print_report_summary(report: EvalReport) -> None:
    parts = [f"n={len(report.true_labels)}",
             f"accuracy={report.accuracy:.4f}",
             f"weighted_f1={report.weighted_f1:.4f}"]
    if report.mean_ms is not None:
        parts.append(f"per_case_ms={report.mean_ms:.2f}")
        parts.append(f"total_s={report.total_s:.2f}")
    print(" ".join(parts))


def cmd_eval(args) -> int:
    config = _resolve_config(args)
    if args.synthetic:
        sequences = make_dataset(per_class=args.per_class,
                                 seed=config["split.seed"])
        classes = list(GESTURE_CLASSES)
    else:
        manifest, base = _load_data_manifest(args.data)
        sequences = [load_sequence(base / p, label=lbl)
                     for p, lbl, _, _ in manifest.entries]
        classes = manifest.classes
    if args.classes:
        classes = args.classes.split(",")
    report, _ = run_benchmark(sequences, config, classes=classes,
                              out_dir=args.out,
                              calibrate_reject=args.calibrate_reject)
    _print_report_summary(report)
    return 0


def cmd_simulate(args) -> int:
    events = load_scenario(args.script) if args.script else []
    ux, uy, uyaw = (float(v) for v in args.uav.split(","))
    state = SimState(uav_x=ux, uav_y=uy, yaw=uyaw,
                     set_distance=args.d_set, k_yaw=args.k_yaw,
                     k_dist=args.k_dist)
    if events:
        state.human_x, state.human_y = events[0].human_x, events[0].human_y
    rows = run_scenario(events, state, duration_s=args.duration)
    write_log(rows, args.out)
    commands = sum(1 for r in rows if r.command != "null")
    print(f"simulated {len(rows)} steps, {commands} commands -> {args.out}")
    return 0


def cmd_bench_dtw(args) -> int:
    lengths = [int(v) for v in args.lengths.split(",")]
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    # First call compiles the kernel; keep it out of the timings.
    warm = rng.standard_normal((8, args.dim))
    dtw_distance(warm, warm, band=1.0)

    print("n,m,dim,band,mean_ms")
    for n in lengths:
        for m in lengths:
            a = rng.standard_normal((n, args.dim))
            b = rng.standard_normal((m, args.dim))
            t0 = time.perf_counter()
            for _ in range(args.repeats):
                dtw_distance(a, b, band=args.band)
            ms = (time.perf_counter() - t0) * 1e3 / args.repeats
            print(f"{n},{m},{args.dim},{args.band},{ms:.3f}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="skelact",
                     description="Skeleton action recognition pipeline")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="log progress to stderr")
    sub = parser.add_subparsers(dest="cmd", metavar="COMMAND",
                               parser_class=_Parser)

    p = sub.add_parser("convert",
                       help="convert a Kinect skeleton dataset to the neutral format")
    p.add_argument("--mhad", required=True, help="directory of *_skeleton.mat files")
    p.add_argument("--out", required=True, help="output dataset directory")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("lift",
                       help="lift a raw capture stream to 3D pose sequences")
    p.add_argument("--input", default="-", help="raw NDJSON stream (default stdin)")
    p.add_argument("--out", required=True, help="output pose NDJSON file")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("train-codec",
                       help="train the feature codec on a dataset")
    p.add_argument("--data", required=True, help="dataset dir or manifest file")
    p.add_argument("--out", required=True, help="output model file")
    _add_config_flags(p)
    p.set_defaults(func=cmd_train_codec)

    p = sub.add_parser("build-refs",
                       help="fit the pipeline and bundle the reference set")
    p.add_argument("--data", required=True, help="dataset dir or manifest file")
    p.add_argument("--out", required=True, help="output bundle file")
    p.add_argument("--classes", default=None, help="comma-separated class subset")
    p.add_argument("--calibrate-reject", action="store_true",
                   help="calibrate the null-action distance threshold")
    _add_config_flags(p)
    p.set_defaults(func=cmd_build_refs)

    p = sub.add_parser("classify",
                       help="classify a pose sequence file or a live stream")
    p.add_argument("--bundle", required=True, help="reference bundle file")
    p.add_argument("--input", default=None, help="pose NDJSON file")
    p.add_argument("--stream", action="store_true",
                   help="read frames from stdin, segment on idle gaps")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a bundled config key (repeatable)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("eval",
                       help="split, fit and score; write report artifacts")
    p.add_argument("--data", default=None, help="dataset dir or manifest file")
    p.add_argument("--synthetic", action="store_true",
                   help="use the built-in gesture generator instead of --data")
    p.add_argument("--per-class", type=int, default=32,
                   help="synthetic sequences per class")
    p.add_argument("--classes", default=None, help="comma-separated class subset")
    p.add_argument("--out", required=True, help="report output directory")
    p.add_argument("--calibrate-reject", action="store_true")
    _add_config_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("simulate",
                       help="run the tracking simulator over a scenario script")
    p.add_argument("--script", default=None, help="scenario CSV (t,x,y[,label])")
    p.add_argument("--out", required=True, help="output log CSV")
    p.add_argument("--duration", type=float, default=None,
                   help="override simulated seconds")
    p.add_argument("--uav", default="0,0,0", help="initial x,y,yaw")
    p.add_argument("--d-set", type=float, default=6.0)
    p.add_argument("--k-yaw", type=float, default=1.5)
    p.add_argument("--k-dist", type=float, default=0.8)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench-dtw",
                       help="micro-benchmark the similarity kernel")
    p.add_argument("--lengths", default="50,100,200")
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--band", type=float, default=0.2)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_bench_dtw)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "cmd", None):
            parser.print_help(sys.stderr)
            return 1
        if args.cmd == "classify" and not args.stream and not args.input:
            parser.error("classify needs --input FILE or --stream")
        if args.cmd == "eval" and not args.synthetic and not args.data:
            parser.error("eval needs --data DIR or --synthetic")
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except SkelactError as e:
        print(f"skelact: error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"skelact: i/o error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
