"""Standalone validator for the neutral raw-frame NDJSON format.

The format is one JSON object per line: a single header record first,
then one frame record per capture frame. This module depends on nothing
else in the package so a stream can be checked without installing any
consumer of the format.

Header record::

    {"type": "header", "version": 1, "pixel_pitch_at_1m": <mm/px>,
     "principal_point": [cx, cy], "patch_size": P}

Frame record::

    {"type": "frame", "t": <s>, "lm": [[x, y] x13], "vis": [v x13],
     "patches": [[[mm] xP] xP] x13, "torso": [mm, ...]}

with P odd and >= 15, visibilities in [0, 1], depths >= 0 (0 = invalid),
at most 512 torso samples, and strictly increasing timestamps.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

NUM_LANDMARKS = 13
MAX_TORSO_SAMPLES = 512
MIN_PATCH = 15


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def check_header(rec: dict) -> list[str]:
    """Problems with a header record; empty means valid."""
    errs = []
    if rec.get("version") != 1:
        errs.append(f"version {rec.get('version')!r}, expected 1")
    pitch = rec.get("pixel_pitch_at_1m")
    if not _is_num(pitch) or pitch <= 0:
        errs.append(f"pixel_pitch_at_1m {pitch!r} must be a positive number")
    pp = rec.get("principal_point")
    if not (isinstance(pp, list) and len(pp) == 2 and all(map(_is_num, pp))):
        errs.append(f"principal_point {pp!r} must be [cx, cy]")
    p = rec.get("patch_size")
    if not isinstance(p, int) or isinstance(p, bool) or p < MIN_PATCH or p % 2 == 0:
        errs.append(f"patch_size {p!r} must be an odd integer >= {MIN_PATCH}")
    return errs


def _check_grid(patches, p: int) -> str | None:
    if not isinstance(patches, list) or len(patches) != NUM_LANDMARKS:
        return f"patches must be a list of {NUM_LANDMARKS} windows"
    for i, window in enumerate(patches):
        if not isinstance(window, list) or len(window) != p:
            return f"patch {i} is not {p} rows"
        for row in window:
            if not isinstance(row, list) or len(row) != p:
                return f"patch {i} has a row that is not {p} wide"
            for v in row:
                if not _is_num(v) or v < 0:
                    return f"patch {i} holds invalid depth {v!r}"
    return None


def check_frame(rec: dict, patch_size: int, prev_t: float | None) -> list[str]:
    """Problems with a frame record given the stream's header; empty = valid."""
    errs = []
    t = rec.get("t")
    if not _is_num(t) or t < 0:
        errs.append(f"t {t!r} must be a non-negative number")
    elif prev_t is not None and t <= prev_t:
        errs.append(f"t {t} does not increase past {prev_t}")
    lm = rec.get("lm")
    if not (isinstance(lm, list) and len(lm) == NUM_LANDMARKS
            and all(isinstance(r, list) and len(r) == 2
                    and all(map(_is_num, r)) for r in lm)):
        errs.append(f"lm must be {NUM_LANDMARKS} [x, y] pairs")
    vis = rec.get("vis")
    if not (isinstance(vis, list) and len(vis) == NUM_LANDMARKS
            and all(_is_num(v) and 0 <= v <= 1 for v in vis)):
        errs.append(f"vis must be {NUM_LANDMARKS} values in [0, 1]")
    grid_err = _check_grid(rec.get("patches"), patch_size)
    if grid_err:
        errs.append(grid_err)
    torso = rec.get("torso")
    if not (isinstance(torso, list) and 1 <= len(torso) <= MAX_TORSO_SAMPLES
            and all(_is_num(v) and v >= 0 for v in torso)):
        errs.append(f"torso must be 1..{MAX_TORSO_SAMPLES} depths >= 0")
    return errs


@dataclass
class StreamReport:
    frames: int = 0
    header_first: bool = False
    errors: list[tuple[int, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.header_first and self.frames > 0 and not self.errors


def validate_stream(lines: Iterable[str]) -> StreamReport:
    """Validate a whole NDJSON stream; collects every problem with line numbers."""
    report = StreamReport()
    patch_size = None
    prev_t = None
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            report.errors.append((lineno, f"not JSON: {e}"))
            continue
        if not isinstance(rec, dict):
            report.errors.append((lineno, "record is not an object"))
            continue
        kind = rec.get("type")
        if kind == "header":
            if patch_size is not None:
                report.errors.append((lineno, "second header record"))
                continue
            errs = check_header(rec)
            if errs:
                report.errors.extend((lineno, e) for e in errs)
            else:
                patch_size = rec["patch_size"]
                report.header_first = report.frames == 0
        elif kind == "frame":
            if patch_size is None:
                report.errors.append((lineno, "frame before header"))
                report.frames += 1
                continue
            errs = check_frame(rec, patch_size, prev_t)
            if errs:
                report.errors.extend((lineno, e) for e in errs)
            else:
                prev_t = rec["t"]
            report.frames += 1
        else:
            report.errors.append((lineno, f"unknown record type {kind!r}"))
    if patch_size is None:
        report.errors.append((0, "no header record"))
        report.header_first = False
    return report


def validate_file(path) -> StreamReport:
    with open(path) as f:
        return validate_stream(f)
