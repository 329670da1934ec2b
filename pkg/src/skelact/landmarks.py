"""The 13-landmark body model used throughout the package.

Indices are stable: they define serialization order and the feature
vector layout, so they must never be reordered.
"""
from __future__ import annotations

from enum import IntEnum


class LandmarkId(IntEnum):
    NOSE = 0
    L_SHOULDER = 1
    R_SHOULDER = 2
    L_ELBOW = 3
    R_ELBOW = 4
    L_WRIST = 5
    R_WRIST = 6
    L_HIP = 7
    R_HIP = 8
    L_KNEE = 9
    R_KNEE = 10
    L_HEEL = 11
    R_HEEL = 12


NUM_LANDMARKS = 13

LANDMARK_NAMES = tuple(lm.name for lm in LandmarkId)

# Unordered landmark pairs in lexicographic order: the default pair set
# for the feature embedding (78 pairs for 13 landmarks).
ALL_PAIRS: tuple[tuple[int, int], ...] = tuple(
    (j, k) for j in range(NUM_LANDMARKS) for k in range(j + 1, NUM_LANDMARKS)
)

# Default joint chains (A, B, C) for the three-landmark features: the four
# limbs plus four torso-adjacent chains.
DEFAULT_TRIPLES: tuple[tuple[int, int, int], ...] = (
    (LandmarkId.L_SHOULDER, LandmarkId.L_ELBOW, LandmarkId.L_WRIST),
    (LandmarkId.R_SHOULDER, LandmarkId.R_ELBOW, LandmarkId.R_WRIST),
    (LandmarkId.L_HIP, LandmarkId.L_KNEE, LandmarkId.L_HEEL),
    (LandmarkId.R_HIP, LandmarkId.R_KNEE, LandmarkId.R_HEEL),
    (LandmarkId.L_ELBOW, LandmarkId.L_SHOULDER, LandmarkId.L_HIP),
    (LandmarkId.R_ELBOW, LandmarkId.R_SHOULDER, LandmarkId.R_HIP),
    (LandmarkId.L_SHOULDER, LandmarkId.L_HIP, LandmarkId.L_KNEE),
    (LandmarkId.R_SHOULDER, LandmarkId.R_HIP, LandmarkId.R_KNEE),
)
