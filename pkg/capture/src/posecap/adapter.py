"""Turns a frame source into the neutral raw-frame NDJSON stream.

The adapter reduces the model's 33 landmarks to the 13 the wire format
carries, cuts a square depth patch around each one, samples the torso
quad for a reference depth population, and emits one JSON object per
line. Emission is paced to the requested rate: when the source runs
ahead the adapter sleeps, and when processing falls behind it skips
frames rather than letting latency build up.
"""
from __future__ import annotations

import json
import math
import sys
import time
from dataclasses import dataclass
from typing import IO

import numpy as np

from .errors import ValidationError
from .landmarks import MODEL_TO_NEUTRAL, NUM_NEUTRAL
from .schema import MAX_TORSO_SAMPLES, MIN_PATCH
from .sources import Intrinsics, SourceFrame

# Torso quad corners in neutral order: both shoulders and both hips.
_TORSO_CORNERS = (1, 2, 8, 7)


@dataclass
class AdapterConfig:
    source: str
    out: str = "-"
    patch_size: int = 21
    torso_cap: int = 512
    rate_hz: float = 30.0
    max_frames: int | None = None
    intrinsics_path: str | None = None

    def __post_init__(self):
        if self.patch_size < MIN_PATCH or self.patch_size % 2 == 0:
            raise ValidationError(
                f"patch_size must be odd and >= {MIN_PATCH}, "
                f"got {self.patch_size}")
        if not 1 <= self.torso_cap <= MAX_TORSO_SAMPLES:
            raise ValidationError(
                f"torso_cap must be in 1..{MAX_TORSO_SAMPLES}, "
                f"got {self.torso_cap}")
        if self.rate_hz <= 0:
            raise ValidationError(f"rate_hz must be positive, got {self.rate_hz}")


@dataclass
class CaptureStats:
    emitted: int = 0
    skipped: int = 0
    elapsed_s: float = 0.0


def extract_patch(depth: np.ndarray, x: float, y: float, size: int) -> np.ndarray:
    """Square depth window centred on the rounded pixel, zero-padded at edges."""
    h, w = depth.shape
    half = size // 2
    cx, cy = int(round(x)), int(round(y))
    patch = np.zeros((size, size))
    r0, r1 = max(0, cy - half), min(h, cy + half + 1)
    c0, c1 = max(0, cx - half), min(w, cx + half + 1)
    if r0 < r1 and c0 < c1:
        patch[r0 - (cy - half):r1 - (cy - half),
              c0 - (cx - half):c1 - (cx - half)] = depth[r0:r1, c0:c1]
    return patch


def sample_torso(depth: np.ndarray, lm13: np.ndarray, cap: int) -> np.ndarray:
    """Depths over a bilinear grid spanning the shoulder/hip quad.

    The grid side is chosen so the sample count stays within the cap;
    points falling outside the image read as 0 (invalid), matching how
    the sensor reports holes.
    """
    side = max(2, math.isqrt(cap))
    u = np.linspace(0.0, 1.0, side)
    uu, vv = np.meshgrid(u, u)
    a, b, c, d = (lm13[i] for i in _TORSO_CORNERS)
    # Bilinear blend: a->b along the top edge, d->c along the bottom.
    pts = ((1 - vv)[..., None] * ((1 - uu)[..., None] * a + uu[..., None] * b)
           + vv[..., None] * ((1 - uu)[..., None] * d + uu[..., None] * c))
    h, w = depth.shape
    cols = np.round(pts[..., 0]).astype(int).ravel()
    rows = np.round(pts[..., 1]).astype(int).ravel()
    inside = (rows >= 0) & (rows < h) & (cols >= 0) & (cols < w)
    out = np.zeros(side * side)
    out[inside] = depth[rows[inside], cols[inside]]
    return out


def header_record(intr: Intrinsics, patch_size: int) -> dict:
    """Stream header carrying the depth-to-metric conversion constants.

    fx pixels per metre at 1 m means each pixel subtends 1000/fx mm
    there, which is the pitch consumers scale by the measured depth.
    """
    return {
        "type": "header",
        "version": 1,
        "pixel_pitch_at_1m": 1000.0 / intr.fx,
        "principal_point": [intr.cx, intr.cy],
        "patch_size": patch_size,
    }


def frame_record(frame: SourceFrame, cfg: AdapterConfig,
                 intr: Intrinsics) -> dict:
    if frame.landmarks is None:
        # No person: park the landmarks at the principal point and let
        # zero visibility tell consumers to ignore them.
        lm13 = np.tile([intr.cx, intr.cy], (NUM_NEUTRAL, 1))
        vis = np.zeros(NUM_NEUTRAL)
    else:
        picked = frame.landmarks[list(MODEL_TO_NEUTRAL)]
        lm13 = picked[:, :2]
        vis = np.clip(picked[:, 2], 0.0, 1.0)
    patches = [extract_patch(frame.depth_mm, x, y, cfg.patch_size)
               for x, y in lm13]
    torso = sample_torso(frame.depth_mm, lm13, cfg.torso_cap)
    return {
        "type": "frame",
        "t": frame.t,
        "lm": [[float(x), float(y)] for x, y in lm13],
        "vis": [float(v) for v in vis],
        "patches": [[[int(v) for v in row] for row in p] for p in patches],
        "torso": [int(v) for v in torso],
    }


def run_capture(cfg: AdapterConfig, sink: IO[str] | None = None,
                clock=time.monotonic, sleep=time.sleep) -> CaptureStats:
    """Stream the source through the adapter, paced at cfg.rate_hz."""
    from .sources import open_source

    source = open_source(cfg.source, cfg.intrinsics_path)
    own_sink = None
    if sink is None:
        if cfg.out == "-":
            sink = sys.stdout
        else:
            own_sink = open(cfg.out, "w")
            sink = own_sink
    stats = CaptureStats()
    period = 1.0 / cfg.rate_hz
    start = clock()
    try:
        sink.write(json.dumps(header_record(source.intrinsics,
                                            cfg.patch_size)) + "\n")
        sink.flush()
        for frame in source.frames():
            # The schedule slot advances per frame consumed, emitted or
            # not, so skipping (which saves the serialization cost) lets
            # a late stream catch back up to it.
            due = start + (stats.emitted + stats.skipped) * period
            now = clock()
            if now > due + period:
                stats.skipped += 1
                continue
            if now < due:
                sleep(due - now)
            sink.write(json.dumps(frame_record(frame, cfg,
                                               source.intrinsics)) + "\n")
            sink.flush()
            stats.emitted += 1
            if cfg.max_frames is not None and stats.emitted >= cfg.max_frames:
                break
    finally:
        stats.elapsed_s = clock() - start
        if own_sink is not None:
            own_sink.close()
        close = getattr(source, "close", None)
        if close is not None:
            close()
    return stats
