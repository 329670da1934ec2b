"""Synthetic recorded takes for tests and offline demos.

make_take writes a small RGB-D recording of a person waving one arm:
a flat 4 m background with the body painted at 2 m as thick strokes
along the skeleton, plus the matching 33-landmark pose files. It gives
the test suite a deterministic stand-in for a real sensor recording.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

WIDTH, HEIGHT = 320, 240
FX = FY = 200.0
CX, CY = 160.0, 120.0
FPS = 30.0
PERSON_MM = 2000
BACKGROUND_MM = 4000
_STROKE_PX = 14

# Body template in metres, x right and y down, origin mid-torso.
_NOSE = (0.0, -0.55)
_L_SHO, _R_SHO = (0.20, -0.35), (-0.20, -0.35)
_L_ELB, _R_ELB = (0.33, -0.10), (-0.33, -0.10)
_R_WRI = (-0.38, 0.12)
_L_HIP, _R_HIP = (0.12, 0.15), (-0.12, 0.15)
_L_KNE, _R_KNE = (0.14, 0.55), (-0.14, 0.55)
_L_HEE, _R_HEE = (0.15, 0.95), (-0.15, 0.95)


def _left_wrist(t: float) -> tuple[float, float]:
    # Forearm swings about the elbow, pointing up at phase zero.
    phi = 0.7 * np.sin(2.0 * np.pi * 0.5 * t)
    return (_L_ELB[0] + 0.25 * np.sin(phi), _L_ELB[1] - 0.25 * np.cos(phi))


def model_landmarks_at(t: float) -> np.ndarray:
    """The synthetic person's 33 model landmarks in pixels at time t."""
    lw = _left_wrist(t)
    body = {
        0: _NOSE, 11: _L_SHO, 12: _R_SHO, 13: _L_ELB, 14: _R_ELB,
        15: lw, 16: _R_WRI, 23: _L_HIP, 24: _R_HIP, 25: _L_KNE,
        26: _R_KNE, 29: _L_HEE, 30: _R_HEE,
    }
    pts = np.zeros((33, 2))
    for i, p in body.items():
        pts[i] = p
    # Face, hand, and foot satellites hang off their nearest anchor.
    for i, off in ((1, (0.03, -0.02)), (2, (0.05, -0.02)), (3, (0.07, -0.02)),
                   (4, (-0.03, -0.02)), (5, (-0.05, -0.02)), (6, (-0.07, -0.02)),
                   (7, (0.09, 0.0)), (8, (-0.09, 0.0)),
                   (9, (0.02, 0.03)), (10, (-0.02, 0.03))):
        pts[i] = np.add(_NOSE, off)
    for wrist, hand in ((15, (17, 19, 21)), (16, (18, 20, 22))):
        for j, k in enumerate(hand):
            pts[k] = pts[wrist] + (0.04 + 0.01 * j) * np.sign(pts[wrist][0])
    for heel, ankle, toe in ((29, 27, 31), (30, 28, 32)):
        pts[ankle] = pts[heel] + (0.0, -0.04)
        pts[toe] = pts[heel] + (np.sign(pts[heel][0]) * 0.08, 0.02)
    z = PERSON_MM / 1000.0
    px = pts * [[FX / z, FY / z]] + [[CX, CY]]
    return np.concatenate([px, np.full((33, 1), 0.95)], axis=1)


_BONES = ((0, 11), (0, 12), (11, 12), (11, 13), (13, 15), (12, 14),
          (14, 16), (11, 23), (12, 24), (23, 24), (23, 25), (25, 29),
          (24, 26), (26, 30))


def _paint_person(depth: np.ndarray, lm: np.ndarray):
    yy, xx = np.ogrid[:HEIGHT, :WIDTH]
    for a, b in _BONES:
        for s in np.linspace(0.0, 1.0, 20):
            cx, cy = (1 - s) * lm[a, :2] + s * lm[b, :2]
            mask = (xx - cx) ** 2 + (yy - cy) ** 2 <= _STROKE_PX ** 2
            depth[mask] = PERSON_MM


def make_take(path: str | Path, n_frames: int = 30,
              empty_frames: tuple[int, ...] = (), seed: int = 0) -> Path:
    """Write a synthetic take directory; returns its path."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    with open(path / "meta.json", "w") as f:
        json.dump({"width": WIDTH, "height": HEIGHT, "fx": FX, "fy": FY,
                   "cx": CX, "cy": CY, "fps": FPS}, f)
    for i in range(n_frames):
        t = i / FPS
        depth = np.full((HEIGHT, WIDTH), BACKGROUND_MM, dtype=float)
        if i in empty_frames:
            landmarks = None
        else:
            lm = model_landmarks_at(t)
            _paint_person(depth, lm)
            landmarks = lm.tolist()
        depth += rng.integers(-5, 6, size=depth.shape)
        np.save(path / f"depth_{i:04d}.npy", depth.astype(np.uint16))
        with open(path / f"pose_{i:04d}.json", "w") as f:
            json.dump({"t": t, "landmarks": landmarks}, f)
    return path
