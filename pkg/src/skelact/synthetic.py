"""Parametric gesture generator for end-to-end pipeline checks.

Six scripted whole-body gestures, rendered as 13-landmark sequences at
30 Hz with jittered timing, amplitude, stance and Gaussian landmark noise.
Nothing here is learned from data; the generator exists so the full
pipeline can be exercised and scored without shipping a motion-capture
dataset.
"""
from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .landmarks import LandmarkId as L
from .landmarks import NUM_LANDMARKS
from .skeleton_io import PoseSequence, Skeleton3D

GESTURE_CLASSES = ("raise_right", "lower_right", "swipe_left",
                   "swipe_right", "circle_right", "squat")

_BASE = np.zeros((NUM_LANDMARKS, 3))
_BASE[L.NOSE] = (0.00, 1.65, 0.00)
_BASE[L.L_SHOULDER] = (-0.20, 1.45, 0.00)
_BASE[L.R_SHOULDER] = (0.20, 1.45, 0.00)
_BASE[L.L_ELBOW] = (-0.25, 1.20, 0.02)
_BASE[L.R_ELBOW] = (0.25, 1.20, 0.02)
_BASE[L.L_WRIST] = (-0.27, 0.95, 0.05)
_BASE[L.R_WRIST] = (0.27, 0.95, 0.05)
_BASE[L.L_HIP] = (-0.12, 0.95, 0.00)
_BASE[L.R_HIP] = (0.12, 0.95, 0.00)
_BASE[L.L_KNEE] = (-0.13, 0.50, 0.02)
_BASE[L.R_KNEE] = (0.13, 0.50, 0.02)
_BASE[L.L_HEEL] = (-0.14, 0.02, -0.05)
_BASE[L.R_HEEL] = (0.14, 0.02, -0.05)


def _arm_raise(pts, u, amp, side="right"):
    """Swing one arm from hanging to overhead; u in [0, 1] is the progress."""
    sh, el, wr = ((L.R_SHOULDER, L.R_ELBOW, L.R_WRIST) if side == "right"
                  else (L.L_SHOULDER, L.L_ELBOW, L.L_WRIST))
    sign = 1.0 if side == "right" else -1.0
    angle = amp * u * np.pi * 0.95        # just short of straight up
    shoulder = pts[sh]
    # Arm stays straight in the frontal plane, pivoting about the shoulder.
    direction = np.array([sign * np.sin(np.pi / 2 - angle),
                          -np.cos(np.pi / 2 - angle), 0.0])
    pts[el] = shoulder + 0.28 * direction
    pts[wr] = shoulder + 0.55 * direction


def _gesture_frame(name: str, u: float, amp: float) -> np.ndarray:
    pts = _BASE.copy()
    env = np.sin(np.pi * u)              # out-and-back envelope
    if name == "raise_right":
        _arm_raise(pts, env, amp, "right")
    elif name == "lower_right":
        _arm_raise(pts, 1.0 - env, amp, "right")
    elif name == "swipe_left":
        # Right arm extended forward, sweeping across the body.
        sh = pts[L.R_SHOULDER]
        x = 0.45 - amp * 0.85 * env
        pts[L.R_ELBOW] = sh + np.array([0.5 * (x - 0.2), 0.0, 0.18])
        pts[L.R_WRIST] = sh + np.array([x - 0.2, 0.0, 0.35])
    elif name == "swipe_right":
        sh = pts[L.L_SHOULDER]
        x = -0.45 + amp * 0.85 * env
        pts[L.L_ELBOW] = sh + np.array([0.5 * (x + 0.2), 0.0, 0.18])
        pts[L.L_WRIST] = sh + np.array([x + 0.2, 0.0, 0.35])
    elif name == "circle_right":
        sh = pts[L.R_SHOULDER]
        phase = 2 * np.pi * u
        radius = amp * 0.25
        offset = np.array([0.2 + radius * np.cos(phase),
                           0.1 + radius * np.sin(phase), 0.15])
        pts[L.R_WRIST] = sh + offset
        pts[L.R_ELBOW] = sh + 0.5 * offset + np.array([0.0, -0.05, 0.0])
    elif name == "squat":
        dip = amp * 0.28 * env
        for lm in (L.NOSE, L.L_SHOULDER, L.R_SHOULDER, L.L_ELBOW, L.R_ELBOW,
                   L.L_WRIST, L.R_WRIST, L.L_HIP, L.R_HIP):
            pts[lm] += (0.0, -dip, 0.0)
        for lm in (L.L_KNEE, L.R_KNEE):
            pts[lm] += (0.0, -0.4 * dip, 0.55 * dip)
    else:
        raise ValidationError(f"unknown gesture class {name!r}")
    return pts


def make_sequence(name: str, rng: np.random.Generator,
                  noise_sigma: float = 0.02, fps: float = 30.0) -> PoseSequence:
    """One noisy rendition of a gesture, 55 to 65 frames long."""
    n = int(rng.integers(55, 66))
    amp = rng.uniform(0.85, 1.15)
    stance = np.array([rng.uniform(-0.3, 0.3), rng.uniform(-0.05, 0.05),
                       rng.uniform(2.0, 3.5)])
    frames = []
    for i in range(n):
        u = i / (n - 1)
        pts = _gesture_frame(name, u, amp) + stance
        pts += rng.normal(0.0, noise_sigma, size=pts.shape)
        frames.append(Skeleton3D(timestamp=i / fps, points=pts,
                                 visibility=np.ones(NUM_LANDMARKS)))
    return PoseSequence(frames=frames, label=name)


def make_dataset(per_class: int = 32, seed: int = 0,
                 noise_sigma: float = 0.02,
                 classes: tuple[str, ...] = GESTURE_CLASSES
                 ) -> list[PoseSequence]:
    """A balanced labeled gesture set, deterministic for a given seed."""
    rng = np.random.default_rng(seed)
    out = []
    for name in classes:
        for _ in range(per_class):
            out.append(make_sequence(name, rng, noise_sigma=noise_sigma))
    return out
