"""Landmark vocabulary of the neutral frame format, plus the model mapping.

The emitted format carries 13 landmarks in a fixed order; that order is
part of the wire contract and must match the consumer's expectations
exactly. The pose model reports 33 landmarks; the subset mapping below is
shipped as data so a different backend only needs a different table.
"""

# Wire order of the 13 neutral landmarks.
NEUTRAL_NAMES = (
    "NOSE",
    "L_SHOULDER", "R_SHOULDER",
    "L_ELBOW", "R_ELBOW",
    "L_WRIST", "R_WRIST",
    "L_HIP", "R_HIP",
    "L_KNEE", "R_KNEE",
    "L_HEEL", "R_HEEL",
)

NUM_NEUTRAL = len(NEUTRAL_NAMES)

# Index into the 33-landmark pose-model output for each neutral landmark,
# in wire order. The model has true heel points, so no ankle stand-ins.
MODEL_TO_NEUTRAL = (
    0,        # nose
    11, 12,   # shoulders
    13, 14,   # elbows
    15, 16,   # wrists
    23, 24,   # hips
    25, 26,   # knees
    29, 30,   # heels
)

NUM_MODEL_LANDMARKS = 33
