"""Skeleton sequence types, the neutral on-disk format, and dataset handling.

Neutral format: newline-delimited JSON records, one frame per line with
fields ``t`` (seconds), ``pts`` (13 x [x, y, z] meters, landmark order)
and ``vis`` (13 visibilities in [0, 1]). One sequence per file. A dataset
is indexed by a separate manifest file with one ``path,label,subject,trial``
record per line.
"""
from __future__ import annotations

import json
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyDataset, ParseError, ShapeError, ValidationError
from .landmarks import NUM_LANDMARKS

log = logging.getLogger(__name__)

DEFAULT_FRAME_RATE = 30.0  # synthesized timestamps for sources without them

MANIFEST_VERSION = 1
_MANIFEST_MAGIC = "#skelact-manifest"


@dataclass(frozen=True)
class Skeleton3D:
    """A single 3D pose: 13 landmark points in meters at one timestamp."""

    timestamp: float
    points: np.ndarray       # (13, 3) float64, meters
    visibility: np.ndarray   # (13,) float64 in [0, 1]

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        vis = np.asarray(self.visibility, dtype=np.float64)
        if pts.shape != (NUM_LANDMARKS, 3):
            raise ShapeError(f"points shape {pts.shape}, expected ({NUM_LANDMARKS}, 3)")
        if vis.shape != (NUM_LANDMARKS,):
            raise ShapeError(f"visibility shape {vis.shape}, expected ({NUM_LANDMARKS},)")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("non-finite coordinate in skeleton frame")
        if not (math.isfinite(self.timestamp) and self.timestamp >= 0):
            raise ValidationError(f"bad timestamp {self.timestamp}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "visibility", vis)


@dataclass
class PoseSequence:
    """An ordered sequence of skeleton frames with optional origin metadata."""

    frames: list[Skeleton3D]
    label: str | None = None
    subject: str | None = None
    trial: str | None = None

    def __len__(self) -> int:
        return len(self.frames)

    def timestamps(self) -> np.ndarray:
        return np.array([f.timestamp for f in self.frames])

    def points(self) -> np.ndarray:
        """Stacked coordinates, shape (n_frames, 13, 3)."""
        return np.stack([f.points for f in self.frames])

    def validate(self) -> "PoseSequence":
        ts = self.timestamps()
        if len(ts) >= 2 and not np.all(np.diff(ts) > 0):
            raise ValidationError("timestamps not strictly increasing")
        return self


@dataclass
class DatasetManifest:
    """Index of sequence files: (path, label, subject, trial) entries."""

    entries: list[tuple[str, str, str, str]]
    classes: list[str] = field(default_factory=list)
    version: int = MANIFEST_VERSION

    def __post_init__(self):
        if not self.classes:
            self.classes = sorted({e[1] for e in self.entries})
        missing = {e[1] for e in self.entries} - set(self.classes)
        if missing:
            raise ValidationError(f"labels not in class list: {sorted(missing)}")
        paths = [e[0] for e in self.entries]
        if len(paths) != len(set(paths)):
            raise ValidationError("duplicate paths in manifest")

    def __len__(self) -> int:
        return len(self.entries)

    def subset(self, classes: list[str]) -> "DatasetManifest":
        keep = [e for e in self.entries if e[1] in set(classes)]
        return DatasetManifest(keep, classes=list(classes), version=self.version)


# ---------------------------------------------------------------------------
# Neutral NDJSON format

def frame_to_record(frame: Skeleton3D) -> str:
    rec = {
        "t": frame.timestamp,
        "pts": frame.points.tolist(),
        "vis": frame.visibility.tolist(),
    }
    return json.dumps(rec, separators=(",", ":"))


def record_to_frame(line: str) -> Skeleton3D:
    try:
        rec = json.loads(line)
        return Skeleton3D(
            timestamp=float(rec["t"]),
            points=np.array(rec["pts"], dtype=np.float64),
            visibility=np.array(rec["vis"], dtype=np.float64),
        )
    except (KeyError, TypeError, ValueError, ShapeError, ValidationError,
            json.JSONDecodeError) as e:
        raise ParseError(f"malformed frame record: {e}") from e


def write_sequence(seq: PoseSequence, path: str | Path) -> None:
    with open(path, "w") as f:
        for frame in seq.frames:
            f.write(frame_to_record(frame) + "\n")


def load_sequence(path: str | Path, format: str = "neutral-ndjson",
                  label: str | None = None) -> PoseSequence:
    """Load one sequence file in the given format.

    ``neutral-ndjson`` is this package's own format; ``mhad-skeleton``
    reads the UTD-MHAD dataset's native MATLAB skeleton files (20 joints,
    timestamps synthesized at 30 Hz).
    """
    path = Path(path)
    if format == "neutral-ndjson":
        frames = []
        with open(path) as f:
            for i, line in enumerate(f):
                if not line.strip():
                    continue
                try:
                    frames.append(record_to_frame(line))
                except ParseError as e:
                    raise ParseError(f"{path}:{i + 1}: {e}") from e
        seq = PoseSequence(frames, label=label)
    elif format == "mhad-skeleton":
        seq = load_mhad_sequence(path)
        if label is not None:
            seq.label = label
    else:
        raise ValueError(f"unknown format {format!r}")
    return seq.validate()


# ---------------------------------------------------------------------------
# UTD-MHAD conversion

# Kinect v1 joint order of the dataset's 20-joint skeleton files.
MHAD_JOINT_NAMES = (
    "head", "shoulder_center", "spine", "hip_center",
    "left_shoulder", "left_elbow", "left_wrist", "left_hand",
    "right_shoulder", "right_elbow", "right_wrist", "right_hand",
    "left_hip", "left_knee", "left_ankle", "left_foot",
    "right_hip", "right_knee", "right_ankle", "right_foot",
)

# Source joint per landmark, in landmark-index order. Nose comes from the
# head joint and the heels from the ankles (the stabler estimate of the
# ankle/foot pair); spine, centers, hands and feet tips are dropped.
MHAD_TO_LANDMARK = (
    MHAD_JOINT_NAMES.index("head"),
    MHAD_JOINT_NAMES.index("left_shoulder"),
    MHAD_JOINT_NAMES.index("right_shoulder"),
    MHAD_JOINT_NAMES.index("left_elbow"),
    MHAD_JOINT_NAMES.index("right_elbow"),
    MHAD_JOINT_NAMES.index("left_wrist"),
    MHAD_JOINT_NAMES.index("right_wrist"),
    MHAD_JOINT_NAMES.index("left_hip"),
    MHAD_JOINT_NAMES.index("right_hip"),
    MHAD_JOINT_NAMES.index("left_knee"),
    MHAD_JOINT_NAMES.index("right_knee"),
    MHAD_JOINT_NAMES.index("left_ankle"),
    MHAD_JOINT_NAMES.index("right_ankle"),
)


def convert_mhad_joints(joints20: np.ndarray) -> np.ndarray:
    """Map a 20-joint Kinect skeleton to the 13-landmark model."""
    joints20 = np.asarray(joints20, dtype=np.float64)
    if joints20.shape != (20, 3):
        raise ShapeError(f"expected (20, 3) joints, got {joints20.shape}")
    return joints20[list(MHAD_TO_LANDMARK)]


_MHAD_NAME = re.compile(r"a(\d+)_s(\d+)_t(\d+)_skeleton")


def load_mhad_sequence(path: str | Path) -> PoseSequence:
    """Read one UTD-MHAD ``*_skeleton.mat`` file (d_skel: 20 x 3 x frames)."""
    from scipy.io import loadmat

    path = Path(path)
    try:
        mat = loadmat(path)
        d_skel = mat["d_skel"]
    except Exception as e:  # corrupt files raise a zoo of scipy errors
        raise ParseError(f"{path}: unreadable skeleton file: {e}") from e
    if d_skel.ndim != 3 or d_skel.shape[:2] != (20, 3):
        raise ParseError(f"{path}: unexpected d_skel shape {d_skel.shape}")

    frames = []
    for i in range(d_skel.shape[2]):
        pts = convert_mhad_joints(d_skel[:, :, i])
        frames.append(Skeleton3D(
            timestamp=i / DEFAULT_FRAME_RATE,
            points=pts,
            visibility=np.ones(NUM_LANDMARKS),
        ))

    label = subject = trial = None
    m = _MHAD_NAME.match(path.stem)
    if m:
        label, subject, trial = f"a{m.group(1)}", f"s{m.group(2)}", f"t{m.group(3)}"
    return PoseSequence(frames, label=label, subject=subject, trial=trial)


def convert_mhad_dataset(mhad_dir: str | Path, out_dir: str | Path) -> DatasetManifest:
    """Convert every readable ``*_skeleton.mat`` file to the neutral format.

    Unreadable files are skipped with a logged warning (the public dataset
    contains a few known-corrupt sequences).
    """
    mhad_dir, out_dir = Path(mhad_dir), Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for path in sorted(mhad_dir.glob("*_skeleton.mat")):
        try:
            seq = load_mhad_sequence(path).validate()
        except (ParseError, ValidationError) as e:
            log.warning("skipping %s: %s", path.name, e)
            continue
        out_name = path.stem.replace("_skeleton", "") + ".ndjson"
        write_sequence(seq, out_dir / out_name)
        entries.append((out_name, seq.label or "unknown",
                        seq.subject or "", seq.trial or ""))
    if not entries:
        raise EmptyDataset(f"no readable skeleton files under {mhad_dir}")
    manifest = DatasetManifest(entries)
    write_manifest(manifest, out_dir / "manifest.txt")
    return manifest


# ---------------------------------------------------------------------------
# Manifest files

def write_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    with open(path, "w") as f:
        f.write(f"{_MANIFEST_MAGIC} v{manifest.version}\n")
        f.write("#classes " + ",".join(manifest.classes) + "\n")
        for path_, label, subject, trial in manifest.entries:
            f.write(f"{path_},{label},{subject},{trial}\n")


def load_manifest(path: str | Path) -> DatasetManifest:
    path = Path(path)
    with open(path) as f:
        lines = [ln.rstrip("\n") for ln in f if ln.strip()]
    if not lines or not lines[0].startswith(_MANIFEST_MAGIC):
        raise ParseError(f"{path}: not a manifest file")
    version = int(lines[0].split(" v")[1])
    classes: list[str] = []
    entries = []
    for ln in lines[1:]:
        if ln.startswith("#classes "):
            classes = ln[len("#classes "):].split(",")
            continue
        parts = ln.split(",")
        if len(parts) != 4:
            raise ParseError(f"{path}: bad manifest record {ln!r}")
        entries.append(tuple(parts))
    return DatasetManifest(entries, classes=classes, version=version)


# ---------------------------------------------------------------------------
# Train/test split

def split(manifest: DatasetManifest, test_ratio: float,
          seed: int) -> tuple[DatasetManifest, DatasetManifest]:
    """Seeded uniform split. Test size is ceil(test_ratio * total)."""
    if not 0 < test_ratio < 1:
        raise ValueError(f"test_ratio {test_ratio} outside (0, 1)")
    n = len(manifest.entries)
    if n == 0:
        raise EmptyDataset("cannot split an empty manifest")
    n_test = math.ceil(test_ratio * n)
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    test_idx = set(order[:n_test].tolist())
    train = [e for i, e in enumerate(manifest.entries) if i not in test_idx]
    test = [e for i, e in enumerate(manifest.entries) if i in test_idx]
    cls = manifest.classes
    return (DatasetManifest(train, classes=cls, version=manifest.version),
            DatasetManifest(test, classes=cls, version=manifest.version))
