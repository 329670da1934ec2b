"""Three-stage pose normalization: translation, scale, optional orientation.

Translation puts the hip midpoint at the origin. Scale divides by the
larger of (torso multiplier x torso length) and the maximum landmark
distance from the pose center, so every normalized pose fits a unit-order
bounding sphere. Orientation applies the minimal rotation taking the
hip-to-shoulder direction onto a target direction; rotation about that
axis (body yaw) is deliberately left alone, since it carries directional
command information.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneratePose, ValidationError
from .landmarks import LandmarkId
from .skeleton_io import PoseSequence, Skeleton3D

log = logging.getLogger(__name__)

_HIPS = (LandmarkId.L_HIP, LandmarkId.R_HIP)
_SHOULDERS = (LandmarkId.L_SHOULDER, LandmarkId.R_SHOULDER)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


@dataclass
class NormalizeConfig:
    torso_multiplier: float = 2.5
    orient: bool = True
    target_direction: np.ndarray = field(
        default_factory=lambda: np.array([0.0, 1.0, 0.0]))

    def __post_init__(self):
        self.target_direction = np.asarray(self.target_direction, dtype=np.float64)
        if self.torso_multiplier <= 0:
            raise ValidationError("torso_multiplier must be positive")
        if abs(np.linalg.norm(self.target_direction) - 1.0) > 1e-9:
            raise ValidationError("target_direction must be a unit vector")


def rotation_between(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Minimal rotation matrix taking unit vector u onto unit vector v."""
    axis = np.cross(u, v)
    s = np.linalg.norm(axis)
    c = float(np.dot(u, v))
    if s < 1e-12:
        if c > 0:
            return np.eye(3)
        # Antiparallel: rotate pi about any axis perpendicular to u.
        perp = np.cross(u, [1.0, 0.0, 0.0])
        if np.linalg.norm(perp) < 1e-6:
            perp = np.cross(u, [0.0, 1.0, 0.0])
        perp = _unit(perp)
        return 2.0 * np.outer(perp, perp) - np.eye(3)
    axis = axis / s
    k = np.array([[0, -axis[2], axis[1]],
                  [axis[2], 0, -axis[0]],
                  [-axis[1], axis[0], 0]])
    return np.eye(3) + s * k + (1 - c) * (k @ k)


def normalize_pose(pose: Skeleton3D, cfg: NormalizeConfig | None = None) -> Skeleton3D:
    cfg = cfg or NormalizeConfig()
    pts = pose.points.copy()
    hip_center = pts[list(_HIPS)].mean(axis=0)
    pts -= hip_center

    shoulder_center = pts[list(_SHOULDERS)].mean(axis=0)
    torso = np.linalg.norm(shoulder_center)
    if torso < 1e-12:
        raise DegeneratePose("hip and shoulder midpoints coincide")
    scale = max(cfg.torso_multiplier * torso,
                float(np.linalg.norm(pts, axis=1).max()))
    pts /= scale

    if cfg.orient:
        rot = rotation_between(_unit(shoulder_center), cfg.target_direction)
        pts = pts @ rot.T

    return Skeleton3D(timestamp=pose.timestamp, points=pts,
                      visibility=pose.visibility.copy())


def normalize_sequence(seq: PoseSequence,
                       cfg: NormalizeConfig | None = None) -> PoseSequence:
    """Normalize every frame; degenerate frames are dropped with a warning."""
    out = []
    for i, frame in enumerate(seq.frames):
        try:
            out.append(normalize_pose(frame, cfg))
        except DegeneratePose as e:
            log.warning("dropping degenerate frame %d of %s: %s",
                        i, seq.label or "<unlabeled>", e)
    return PoseSequence(out, label=seq.label, subject=seq.subject, trial=seq.trial)
