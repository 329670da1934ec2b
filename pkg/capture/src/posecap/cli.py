"""Command line entry points for the capture adapter.

    posecap run --source TAKE_DIR [--out FILE] [--rate 30] ...
    posecap validate STREAM.ndjson
    posecap make-fixture DIR [--frames 30] [--empty 3,4]
"""
from __future__ import annotations

import argparse
import sys

from .adapter import AdapterConfig, run_capture
from .errors import PosecapError
from .fixture import make_take
from .schema import validate_file


def _cmd_run(args) -> int:
    cfg = AdapterConfig(
        source=args.source, out=args.out, patch_size=args.patch_size,
        torso_cap=args.torso_cap, rate_hz=args.rate,
        max_frames=args.max_frames, intrinsics_path=args.intrinsics)
    stats = run_capture(cfg)
    rate = stats.emitted / stats.elapsed_s if stats.elapsed_s > 0 else 0.0
    print(f"emitted={stats.emitted} skipped={stats.skipped} "
          f"rate={rate:.1f}Hz", file=sys.stderr)
    return 0


def _cmd_validate(args) -> int:
    report = validate_file(args.stream)
    for lineno, msg in report.errors:
        print(f"{args.stream}:{lineno}: {msg}")
    verdict = "valid" if report.ok else "INVALID"
    print(f"{verdict}: {report.frames} frames, header_first={report.header_first}, "
          f"{len(report.errors)} errors")
    return 0 if report.ok else 1


def _cmd_make_fixture(args) -> int:
    empty = tuple(int(s) for s in args.empty.split(",")) if args.empty else ()
    path = make_take(args.dir, n_frames=args.frames, empty_frames=empty,
                     seed=args.seed)
    print(f"wrote {args.frames} frames to {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posecap", description="RGB-D pose capture adapter")
    sub = parser.add_subparsers(dest="command")

    run = sub.add_parser("run", help="capture a source to the neutral stream")
    run.add_argument("--source", required=True,
                     help="take directory or camera:N")
    run.add_argument("--out", default="-", help="output path, - for stdout")
    run.add_argument("--patch-size", type=int, default=21)
    run.add_argument("--torso-cap", type=int, default=512)
    run.add_argument("--rate", type=float, default=30.0)
    run.add_argument("--max-frames", type=int, default=None)
    run.add_argument("--intrinsics", default=None,
                     help="intrinsics JSON for live cameras")
    run.set_defaults(func=_cmd_run)

    val = sub.add_parser("validate", help="check a stream against the schema")
    val.add_argument("stream")
    val.set_defaults(func=_cmd_validate)

    fix = sub.add_parser("make-fixture", help="write a synthetic take")
    fix.add_argument("dir")
    fix.add_argument("--frames", type=int, default=30)
    fix.add_argument("--empty", default="",
                     help="comma separated indices of person-free frames")
    fix.add_argument("--seed", type=int, default=0)
    fix.set_defaults(func=_cmd_make_fixture)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help(sys.stderr)
        return 1
    try:
        return args.func(args)
    except PosecapError as e:
        print(f"posecap: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"posecap: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
