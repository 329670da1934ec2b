"""Live RGB-D camera source backed by mediapipe pose tracking.

The heavy dependencies (mediapipe, OpenCV, an OpenNI-capable depth
camera) are imported lazily so that the rest of the package works in
environments without them; constructing a CameraSource where they are
missing raises ModelLoadError rather than ImportError at import time.
"""
from __future__ import annotations

import json
import time
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import ModelLoadError, SourceUnavailable
from .landmarks import NUM_MODEL_LANDMARKS
from .sources import Intrinsics, SourceFrame


class CameraSource:
    """Streams pose landmarks and aligned depth from a live camera."""

    def __init__(self, device: int, intrinsics_path: str | None):
        if intrinsics_path is None:
            raise SourceUnavailable(
                "live capture needs --intrinsics (no factory calibration here)")
        with open(intrinsics_path) as f:
            meta = json.load(f)
        self.intrinsics = Intrinsics(
            width=int(meta["width"]), height=int(meta["height"]),
            fx=float(meta["fx"]), fy=float(meta["fy"]),
            cx=float(meta["cx"]), cy=float(meta["cy"]),
            fps=float(meta.get("fps", 30.0)))
        try:
            import cv2
            import mediapipe as mp
        except ImportError as e:
            raise ModelLoadError(
                f"live capture needs mediapipe and opencv: {e}") from e
        self._cv2 = cv2
        self._pose = mp.solutions.pose.Pose(
            model_complexity=1, min_detection_confidence=0.5,
            min_tracking_confidence=0.5)
        self._rgb = cv2.VideoCapture(device)
        if not self._rgb.isOpened():
            raise SourceUnavailable(f"cannot open camera {device}")
        self._depth = cv2.VideoCapture(device, cv2.CAP_OPENNI2)
        if not self._depth.isOpened():
            self._rgb.release()
            raise SourceUnavailable(f"camera {device} has no OpenNI depth stream")
        self._t0 = time.monotonic()

    def frames(self) -> Iterator[SourceFrame]:
        w, h = self.intrinsics.width, self.intrinsics.height
        while True:
            ok_rgb, frame = self._rgb.read()
            self._depth.grab()
            ok_d, depth = self._depth.retrieve(
                flag=self._cv2.CAP_OPENNI_DEPTH_MAP)
            if not ok_rgb or not ok_d:
                return
            result = self._pose.process(
                self._cv2.cvtColor(frame, self._cv2.COLOR_BGR2RGB))
            lm = None
            if result.pose_landmarks is not None:
                lm = np.array(
                    [(p.x * w, p.y * h, p.visibility)
                     for p in result.pose_landmarks.landmark])
                assert lm.shape == (NUM_MODEL_LANDMARKS, 3)
            yield SourceFrame(
                t=time.monotonic() - self._t0, landmarks=lm,
                depth_mm=depth.astype(float))

    def close(self):
        self._rgb.release()
        self._depth.release()
        self._pose.close()


def load_intrinsics_file(path: str | Path) -> Intrinsics:
    with open(path) as f:
        meta = json.load(f)
    return Intrinsics(
        width=int(meta["width"]), height=int(meta["height"]),
        fx=float(meta["fx"]), fy=float(meta["fy"]),
        cx=float(meta["cx"]), cy=float(meta["cy"]),
        fps=float(meta.get("fps", 30.0)))
