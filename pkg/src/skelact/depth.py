"""Depth lifting: turn 2D landmarks plus aligned depth windows into 3D poses.

The z-coordinate of each landmark comes from a depth window centered on it,
sized so that it covers a fixed physical area (90 mm x 90 mm by default)
regardless of subject distance. Depth aggregation uses the first-quartile
mean, which biases toward the nearest surface and so toward the subject.

Raw capture frames arrive as NDJSON records (one header record, then one
record per frame) produced by a capture adapter; see ``read_raw_stream``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import IO, Iterator

import numpy as np

from .errors import InsufficientDepth, ParseError, ShapeError, ValidationError
from .landmarks import NUM_LANDMARKS
from .skeleton_io import Skeleton3D

MM_PER_M = 1000.0


@dataclass(frozen=True)
class RawFrame:
    """One capture frame: 2D landmarks plus aligned depth data (mm)."""

    timestamp: float
    landmarks2d: np.ndarray       # (13, 2) pixel coordinates
    visibility: np.ndarray        # (13,)
    patches: np.ndarray           # (13, P, P) depth in mm, 0 = invalid
    torso_samples: np.ndarray     # (<=512,) depth in mm sampled in the torso quad
    pixel_pitch_at_1m: float      # mm per pixel at 1 m range
    principal_point: tuple[float, float]

    def __post_init__(self):
        lm = np.asarray(self.landmarks2d, dtype=np.float64)
        patches = np.asarray(self.patches, dtype=np.float64)
        if lm.shape != (NUM_LANDMARKS, 2):
            raise ShapeError(f"landmarks2d shape {lm.shape}")
        if patches.ndim != 3 or patches.shape[0] != NUM_LANDMARKS \
                or patches.shape[1] != patches.shape[2]:
            raise ShapeError(f"patches shape {patches.shape}")
        p = patches.shape[1]
        if p < 15 or p % 2 == 0:
            raise ValidationError(f"patch size {p} must be odd and >= 15")
        if self.pixel_pitch_at_1m <= 0:
            raise ValidationError("pixel_pitch_at_1m must be positive")
        if np.any(patches < 0) or np.any(np.asarray(self.torso_samples) < 0):
            raise ValidationError("negative depth value")
        object.__setattr__(self, "landmarks2d", lm)
        object.__setattr__(self, "patches", patches)
        object.__setattr__(self, "visibility",
                           np.asarray(self.visibility, dtype=np.float64))
        object.__setattr__(self, "torso_samples",
                           np.asarray(self.torso_samples, dtype=np.float64))

    @property
    def patch_size(self) -> int:
        return self.patches.shape[1]


@dataclass
class LiftConfig:
    target_area_mm: float = 90.0      # physical window side the pixels must cover
    min_window_px: int = 3
    background_margin_m: float = 1.5  # depths beyond subject + margin are discarded
    quartile: float = 0.25

    def __post_init__(self):
        if min(self.target_area_mm, self.min_window_px,
               self.background_margin_m) <= 0 or not 0 < self.quartile <= 1:
            raise ValidationError("LiftConfig fields must be positive, quartile in (0, 1]")


def first_quartile_mean(values_mm: np.ndarray, quartile: float) -> float:
    """Mean of the lowest ceil(quartile * n) values. Caller filters invalids."""
    v = np.sort(np.asarray(values_mm, dtype=np.float64))
    k = math.ceil(quartile * v.size)
    return float(v[:k].mean())


def estimate_subject_distance(torso_samples_mm: np.ndarray,
                              cfg: LiftConfig) -> float:
    """Subject distance in meters from torso-quadrilateral depth samples.

    Zero depths are invalid and dropped; at least 4 valid samples are
    required. The first-quartile mean excludes background pixels that fall
    inside the quadrilateral.
    """
    samples = np.asarray(torso_samples_mm, dtype=np.float64)
    valid = samples[samples > 0]
    if valid.size < 4:
        raise InsufficientDepth(
            f"{valid.size} valid torso depth samples, need at least 4")
    return first_quartile_mean(valid, cfg.quartile) / MM_PER_M


def window_size_px(distance_m: float, frame: RawFrame, cfg: LiftConfig) -> int:
    """Odd pixel count whose span covers the target physical area at range.

    Pixel pitch grows linearly with distance, so the window shrinks as the
    subject recedes. Clamped to [min_window_px, patch size].
    """
    if distance_m <= 0:
        raise ValidationError(f"distance {distance_m} must be positive")
    pitch_mm = frame.pixel_pitch_at_1m * distance_m
    side = round(cfg.target_area_mm / pitch_mm)
    if side % 2 == 0:
        side += 1
    lo = cfg.min_window_px if cfg.min_window_px % 2 else cfg.min_window_px + 1
    return int(min(max(side, lo), frame.patch_size))


def lift_frame(frame: RawFrame, cfg: LiftConfig | None = None) -> Skeleton3D:
    """Lift one raw frame to a metric 3D skeleton.

    Per landmark: crop the distance-scaled window from its depth patch,
    discard invalid depths and anything beyond subject distance plus the
    background margin, and take the first-quartile mean as z. Landmarks
    with no usable depth inherit the subject distance and get visibility 0.
    Metric x/y come from the pixel offset to the principal point scaled by
    the pixel pitch at the landmark's own depth.
    """
    cfg = cfg or LiftConfig()
    subject_m = estimate_subject_distance(frame.torso_samples, cfg)
    w = window_size_px(subject_m, frame, cfg)
    p = frame.patch_size
    lo = (p - w) // 2
    hi = lo + w
    cutoff_mm = (subject_m + cfg.background_margin_m) * MM_PER_M

    cx, cy = frame.principal_point
    points = np.empty((NUM_LANDMARKS, 3))
    visibility = frame.visibility.copy()
    for i in range(NUM_LANDMARKS):
        window = frame.patches[i, lo:hi, lo:hi].ravel()
        usable = window[(window > 0) & (window <= cutoff_mm)]
        if usable.size == 0:
            z = subject_m
            visibility[i] = 0.0
        else:
            z = first_quartile_mean(usable, cfg.quartile) / MM_PER_M
        pitch_m = frame.pixel_pitch_at_1m * z / MM_PER_M  # meters per pixel at z
        x = (frame.landmarks2d[i, 0] - cx) * pitch_m
        y = (frame.landmarks2d[i, 1] - cy) * pitch_m
        points[i] = (x, y, z)

    return Skeleton3D(timestamp=frame.timestamp, points=points,
                      visibility=visibility)


# ---------------------------------------------------------------------------
# Raw capture stream (NDJSON): header record, then frame records.

def write_raw_stream(frames: list[RawFrame], fp: IO[str]) -> None:
    first = frames[0]
    header = {
        "type": "header", "version": 1,
        "pixel_pitch_at_1m": first.pixel_pitch_at_1m,
        "principal_point": list(first.principal_point),
        "patch_size": first.patch_size,
    }
    fp.write(json.dumps(header, separators=(",", ":")) + "\n")
    for fr in frames:
        rec = {
            "type": "frame",
            "t": fr.timestamp,
            "lm": fr.landmarks2d.tolist(),
            "vis": fr.visibility.tolist(),
            "patches": np.asarray(fr.patches, dtype=np.int64).tolist(),
            "torso": np.asarray(fr.torso_samples, dtype=np.int64).tolist(),
        }
        fp.write(json.dumps(rec, separators=(",", ":")) + "\n")


def read_raw_stream(fp: IO[str]) -> Iterator[RawFrame]:
    """Parse a raw capture NDJSON stream into RawFrame records."""
    header = None
    for lineno, line in enumerate(fp, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise ParseError(f"line {lineno}: {e}") from e
        kind = rec.get("type")
        if kind == "header":
            header = rec
            continue
        if kind != "frame":
            raise ParseError(f"line {lineno}: unknown record type {kind!r}")
        if header is None:
            raise ParseError(f"line {lineno}: frame record before header")
        try:
            yield RawFrame(
                timestamp=float(rec["t"]),
                landmarks2d=np.array(rec["lm"], dtype=np.float64),
                visibility=np.array(rec["vis"], dtype=np.float64),
                patches=np.array(rec["patches"], dtype=np.float64),
                torso_samples=np.array(rec["torso"], dtype=np.float64),
                pixel_pitch_at_1m=float(header["pixel_pitch_at_1m"]),
                principal_point=tuple(header["principal_point"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"line {lineno}: bad frame record: {e}") from e
