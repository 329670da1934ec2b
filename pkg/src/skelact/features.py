"""Per-frame feature embedding of normalized poses, plus min-max scaling.

Every frame yields a fixed-layout vector built from three blocks:

* per-landmark: position, velocity, acceleration, axis angles (angle of
  the position vector to each coordinate axis), angular velocity, angular
  acceleration, displacement -- 7 kinds x 3 values;
* per landmark pair: the difference vector and the same derived kinds
  except displacement -- 6 kinds x 3 values;
* per joint chain (A, B, C): the "bend" vector (the unit normal of the
  A-B-C plane scaled by the inter-segment angle) and its first and second
  time differences -- 3 kinds x 3 values.

All time-derivative kinds are zero on the first frame, and second-order
(acceleration-type) kinds are also zero on the second frame. With the
default pair/triple sets the layout is 13*21 + 78*18 + 8*9 = 1749 wide.

Scaling divides each dimension by the largest training-set magnitude so
values keep their sign and land in [-1, 1]; unseen out-of-range values are
clamped to [-1.5, 1.5].
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInput, LayoutMismatch, NonMonotonicTime, ValidationError
from .landmarks import ALL_PAIRS, DEFAULT_TRIPLES, LANDMARK_NAMES, NUM_LANDMARKS
from .skeleton_io import PoseSequence, Skeleton3D

SINGLE_KINDS = ("pos", "vel", "acc", "ang", "ang_vel", "ang_acc", "disp")
PAIR_KINDS = ("vec", "vel", "acc", "ang", "ang_vel", "ang_acc")
TRIPLE_KINDS = ("bend", "bend_vel", "bend_acc")

_EPS = 1e-12


@dataclass(frozen=True)
class EmbeddingConfig:
    pairs: tuple[tuple[int, int], ...] = ALL_PAIRS
    triples: tuple[tuple[int, int, int], ...] = DEFAULT_TRIPLES
    single_kinds: tuple[str, ...] = SINGLE_KINDS
    pair_kinds: tuple[str, ...] = PAIR_KINDS
    triple_kinds: tuple[str, ...] = TRIPLE_KINDS

    def __post_init__(self):
        for t in self.triples:
            if len(set(t)) != 3:
                raise ValidationError(f"repeated landmark in triple {t}")
        for kinds, allowed in ((self.single_kinds, SINGLE_KINDS),
                               (self.pair_kinds, PAIR_KINDS),
                               (self.triple_kinds, TRIPLE_KINDS)):
            unknown = set(kinds) - set(allowed)
            if unknown:
                raise ValidationError(f"unknown feature kinds {sorted(unknown)}")

    @property
    def dim(self) -> int:
        return 3 * (NUM_LANDMARKS * len(self.single_kinds)
                    + len(self.pairs) * len(self.pair_kinds)
                    + len(self.triples) * len(self.triple_kinds))

    @property
    def layout(self) -> str:
        """Stable identifier of the feature layout this config produces."""
        canon = json.dumps({
            "pairs": [list(p) for p in self.pairs],
            "triples": [list(t) for t in self.triples],
            "single_kinds": list(self.single_kinds),
            "pair_kinds": list(self.pair_kinds),
            "triple_kinds": list(self.triple_kinds),
        }, separators=(",", ":"))
        h = hashlib.md5(canon.encode()).hexdigest()[:8]
        return f"emb1:{h}:d{self.dim}"


def layout_manifest(cfg: EmbeddingConfig) -> list[str]:
    """Semantic name of every feature dimension, in layout order."""
    names = []
    axes = ("x", "y", "z")
    for i in range(NUM_LANDMARKS):
        for kind in cfg.single_kinds:
            names += [f"lm/{LANDMARK_NAMES[i]}/{kind}/{ax}" for ax in axes]
    for j, k in cfg.pairs:
        tag = f"{LANDMARK_NAMES[j]}-{LANDMARK_NAMES[k]}"
        for kind in cfg.pair_kinds:
            names += [f"pair/{tag}/{kind}/{ax}" for ax in axes]
    for a, b, c in cfg.triples:
        tag = f"{LANDMARK_NAMES[a]}-{LANDMARK_NAMES[b]}-{LANDMARK_NAMES[c]}"
        for kind in cfg.triple_kinds:
            names += [f"tri/{tag}/{kind}/{ax}" for ax in axes]
    return names


@dataclass
class FrameHistory:
    """Previous-frame state needed for first-difference features."""

    count: int = 0
    t: float = 0.0
    pos: np.ndarray | None = None
    vel: np.ndarray | None = None
    ang: np.ndarray | None = None
    ang_vel: np.ndarray | None = None
    pair_vec: np.ndarray | None = None
    pair_vel: np.ndarray | None = None
    pair_ang: np.ndarray | None = None
    pair_ang_vel: np.ndarray | None = None
    bend: np.ndarray | None = None
    bend_vel: np.ndarray | None = None


@dataclass(frozen=True)
class FeatureFrame:
    timestamp: float
    values: np.ndarray
    layout: str


@dataclass
class FeatureSequence:
    """Per-frame feature vectors for one pose sequence."""

    timestamps: np.ndarray   # (n,)
    values: np.ndarray       # (n, dim)
    layout: str
    label: str | None = None

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def mean_frame(self) -> np.ndarray:
        return self.values.mean(axis=0)


def _axis_angles(vectors: np.ndarray) -> np.ndarray:
    """Angle of each row vector to the x, y and z axes, in [0, pi].

    A zero-length vector gets all three angles 0 (the arccos argument is
    otherwise 0/0); this only occurs for a landmark sitting exactly at the
    pose center.
    """
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    safe = np.where(norms > _EPS, norms, 1.0)
    cosines = np.clip(vectors / safe, -1.0, 1.0)
    angles = np.arccos(cosines)
    return np.where(norms > _EPS, angles, 0.0)


def _bend_vectors(pts: np.ndarray, triples) -> np.ndarray:
    """Angle-scaled plane normals of joint chains, (n_triples, 3).

    For a chain A-B-C: the angle between AB and BC scales the unit normal
    of their plane. Collinear chains have no defined plane and map to the
    zero vector (the feature stays continuous through the degeneracy).
    """
    out = np.zeros((len(triples), 3))
    for idx, (a, b, c) in enumerate(triples):
        ab = pts[b] - pts[a]
        bc = pts[c] - pts[b]
        nab, nbc = np.linalg.norm(ab), np.linalg.norm(bc)
        if nab < _EPS or nbc < _EPS:
            continue
        cos_t = np.clip(np.dot(ab, bc) / (nab * nbc), -1.0, 1.0)
        theta = np.arccos(cos_t)
        normal = np.cross(ab, bc)
        nn = np.linalg.norm(normal)
        if nn < _EPS:
            continue
        out[idx] = theta * (normal / nn)
    return out


def embed_frame(pose: Skeleton3D, history: FrameHistory,
                cfg: EmbeddingConfig | None = None
                ) -> tuple[FeatureFrame, FrameHistory]:
    """Embed one normalized pose, threading the first-difference history."""
    cfg = cfg or EmbeddingConfig()
    pts = pose.points
    t = pose.timestamp

    if history.count > 0:
        dt = t - history.t
        if dt <= 0:
            raise NonMonotonicTime(f"dt={dt} between frames")
    else:
        dt = 0.0  # unused: every derivative is zeroed on the first frame

    def diff(cur, prev, order):
        # First differences appear from the second frame on; second-order
        # quantities only from the third.
        if history.count >= order:
            return (cur - prev) / dt
        return np.zeros_like(cur)

    pos = pts
    ang = _axis_angles(pts)
    vel = diff(pos, history.pos, 1)
    acc = diff(vel, history.vel, 2)
    ang_vel = diff(ang, history.ang, 1)
    ang_acc = diff(ang_vel, history.ang_vel, 2)
    disp = pos - history.pos if history.count >= 1 else np.zeros_like(pos)

    pair_idx = np.array(cfg.pairs, dtype=np.intp).reshape(-1, 2)
    pair_vec = pts[pair_idx[:, 0]] - pts[pair_idx[:, 1]]
    pair_ang = _axis_angles(pair_vec)
    pair_vel = diff(pair_vec, history.pair_vec, 1)
    pair_acc = diff(pair_vel, history.pair_vel, 2)
    pair_ang_vel = diff(pair_ang, history.pair_ang, 1)
    pair_ang_acc = diff(pair_ang_vel, history.pair_ang_vel, 2)

    bend = _bend_vectors(pts, cfg.triples)
    bend_vel = diff(bend, history.bend, 1)
    bend_acc = diff(bend_vel, history.bend_vel, 2)

    single_by_kind = {"pos": pos, "vel": vel, "acc": acc, "ang": ang,
                      "ang_vel": ang_vel, "ang_acc": ang_acc, "disp": disp}
    pair_by_kind = {"vec": pair_vec, "vel": pair_vel, "acc": pair_acc,
                    "ang": pair_ang, "ang_vel": pair_ang_vel,
                    "ang_acc": pair_ang_acc}
    triple_by_kind = {"bend": bend, "bend_vel": bend_vel, "bend_acc": bend_acc}

    blocks = []
    for group, kinds, n in ((single_by_kind, cfg.single_kinds, NUM_LANDMARKS),
                            (pair_by_kind, cfg.pair_kinds, len(cfg.pairs)),
                            (triple_by_kind, cfg.triple_kinds, len(cfg.triples))):
        if n == 0 or not kinds:
            continue
        # subject-major: all kinds of landmark 0, then landmark 1, ...
        stacked = np.stack([group[k] for k in kinds], axis=1)  # (n, kinds, 3)
        blocks.append(stacked.reshape(-1))
    values = np.concatenate(blocks) if blocks else np.zeros(0)

    new_history = FrameHistory(
        count=history.count + 1, t=t, pos=pos, vel=vel, ang=ang,
        ang_vel=ang_vel, pair_vec=pair_vec, pair_vel=pair_vel,
        pair_ang=pair_ang, pair_ang_vel=pair_ang_vel,
        bend=bend, bend_vel=bend_vel,
    )
    return FeatureFrame(timestamp=t, values=values, layout=cfg.layout), new_history


def embed_sequence(seq: PoseSequence,
                   cfg: EmbeddingConfig | None = None) -> FeatureSequence:
    cfg = cfg or EmbeddingConfig()
    history = FrameHistory()
    rows = []
    ts = []
    for frame in seq.frames:
        feat, history = embed_frame(frame, history, cfg)
        rows.append(feat.values)
        ts.append(feat.timestamp)
    if not rows:
        raise EmptyInput("cannot embed an empty sequence")
    return FeatureSequence(timestamps=np.array(ts), values=np.stack(rows),
                           layout=cfg.layout, label=seq.label)


# ---------------------------------------------------------------------------
# Min-max scaling

@dataclass
class ScalingStats:
    mins: np.ndarray
    maxs: np.ndarray
    layout: str

    def __post_init__(self):
        if np.any(self.mins > self.maxs):
            raise ValidationError("per-dimension min exceeds max")


def fit_scaling(sequences: list[FeatureSequence]) -> ScalingStats:
    """Per-dimension min/max over every frame of the training set."""
    if not sequences or sum(len(s) for s in sequences) == 0:
        raise EmptyInput("no frames to fit scaling on")
    layout = sequences[0].layout
    for s in sequences:
        if s.layout != layout:
            raise LayoutMismatch(f"{s.layout} != {layout}")
    stacked = np.concatenate([s.values for s in sequences], axis=0)
    return ScalingStats(mins=stacked.min(axis=0), maxs=stacked.max(axis=0),
                        layout=layout)


def apply_scaling(seq: FeatureSequence, stats: ScalingStats,
                  clamp: float = 1.5) -> FeatureSequence:
    """Sign-preserving scale into [-1, 1] by the training-set magnitude.

    Each dimension is divided by max(|min|, |max|, eps), so training values
    map into [-1, 1] and zero stays zero. Unseen values beyond that range
    are clamped to [-clamp, clamp].
    """
    if seq.layout != stats.layout:
        raise LayoutMismatch(f"sequence layout {seq.layout} != stats {stats.layout}")
    divisor = np.maximum(np.maximum(np.abs(stats.mins), np.abs(stats.maxs)), 1e-9)
    values = np.clip(seq.values / divisor, -clamp, clamp)
    return FeatureSequence(timestamps=seq.timestamps.copy(), values=values,
                           layout=seq.layout + "|scaled", label=seq.label)
