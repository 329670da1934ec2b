"""Frame sources: recorded RGB-D takes and live camera dispatch.

A recorded take is a directory holding ``meta.json`` with the camera
intrinsics plus per-frame pairs ``depth_%04d.npy`` (uint16 depth in mm)
and ``pose_%04d.json`` (timestamp and 33 image-space landmarks, or null
landmarks when no person was found). Takes are what the test fixtures
generate and what ``posecap run`` consumes offline.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import SourceUnavailable, ValidationError
from .landmarks import NUM_MODEL_LANDMARKS


@dataclass(frozen=True)
class Intrinsics:
    width: int
    height: int
    fx: float
    fy: float
    cx: float
    cy: float
    fps: float

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValidationError(f"bad image size {self.width}x{self.height}")
        if self.fx <= 0 or self.fy <= 0:
            raise ValidationError("focal lengths must be positive")
        if self.fps <= 0:
            raise ValidationError(f"fps must be positive, got {self.fps}")


@dataclass
class SourceFrame:
    """One captured frame: model landmarks in pixels, or None for no person."""

    t: float
    landmarks: np.ndarray | None  # (33, 3) of x_px, y_px, visibility
    depth_mm: np.ndarray  # (H, W) float, 0 where invalid


class RecordedSource:
    """Replays a recorded take directory in frame order."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        meta_path = self.path / "meta.json"
        if not meta_path.is_file():
            raise SourceUnavailable(f"no meta.json under {self.path}")
        with open(meta_path) as f:
            meta = json.load(f)
        try:
            self.intrinsics = Intrinsics(
                width=int(meta["width"]), height=int(meta["height"]),
                fx=float(meta["fx"]), fy=float(meta["fy"]),
                cx=float(meta["cx"]), cy=float(meta["cy"]),
                fps=float(meta.get("fps", 30.0)))
        except KeyError as e:
            raise SourceUnavailable(f"meta.json missing key {e}") from e
        self.indices = sorted(
            int(m.group(1)) for p in self.path.glob("depth_*.npy")
            if (m := re.fullmatch(r"depth_(\d{4})\.npy", p.name)))
        if not self.indices:
            raise SourceUnavailable(f"no depth frames under {self.path}")

    def __len__(self) -> int:
        return len(self.indices)

    def frames(self) -> Iterator[SourceFrame]:
        for idx in self.indices:
            depth = np.load(self.path / f"depth_{idx:04d}.npy").astype(float)
            with open(self.path / f"pose_{idx:04d}.json") as f:
                pose = json.load(f)
            lm = pose.get("landmarks")
            if lm is not None:
                lm = np.asarray(lm, dtype=float)
                if lm.shape != (NUM_MODEL_LANDMARKS, 3):
                    raise ValidationError(
                        f"frame {idx} landmarks shaped {lm.shape}, "
                        f"expected ({NUM_MODEL_LANDMARKS}, 3)")
            yield SourceFrame(t=float(pose["t"]), landmarks=lm, depth_mm=depth)


def open_source(locator: str, intrinsics_path: str | None = None):
    """Open ``camera:N`` as a live camera or a directory as a recorded take."""
    if locator.startswith("camera:"):
        from .camera import CameraSource  # heavy imports live there

        return CameraSource(int(locator.split(":", 1)[1]), intrinsics_path)
    path = Path(locator)
    if path.is_dir():
        return RecordedSource(path)
    raise SourceUnavailable(
        f"{locator!r} is neither camera:N nor a take directory")
