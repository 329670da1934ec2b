import numpy as np
import pytest
from scipy.io import savemat

from skelact.errors import (EmptyDataset, ParseError, ShapeError,
                            ValidationError)
from skelact.landmarks import LandmarkId as L
from skelact.landmarks import NUM_LANDMARKS
from skelact.skeleton_io import (MHAD_JOINT_NAMES, MHAD_TO_LANDMARK,
                                 DatasetManifest, PoseSequence, Skeleton3D,
                                 convert_mhad_dataset, convert_mhad_joints,
                                 load_manifest, load_mhad_sequence,
                                 load_sequence, split, write_manifest,
                                 write_sequence)


def make_seq(n=4, label=None, seed=0):
    rng = np.random.default_rng(seed)
    frames = [Skeleton3D(timestamp=i / 30.0,
                         points=rng.normal(size=(NUM_LANDMARKS, 3)),
                         visibility=rng.uniform(size=NUM_LANDMARKS))
              for i in range(n)]
    return PoseSequence(frames, label=label)


def test_frame_shape_validation():
    with pytest.raises(ShapeError):
        Skeleton3D(timestamp=0.0, points=np.zeros((5, 3)),
                   visibility=np.ones(5))
    with pytest.raises(ValidationError):
        Skeleton3D(timestamp=-1.0, points=np.zeros((NUM_LANDMARKS, 3)),
                   visibility=np.ones(NUM_LANDMARKS))
    bad = np.zeros((NUM_LANDMARKS, 3))
    bad[0, 0] = np.nan
    with pytest.raises(ValidationError):
        Skeleton3D(timestamp=0.0, points=bad, visibility=np.ones(NUM_LANDMARKS))


def test_ndjson_round_trip(tmp_path):
    seq = make_seq(n=6, label="a1")
    path = tmp_path / "seq.ndjson"
    write_sequence(seq, path)
    back = load_sequence(path, label="a1")
    assert len(back) == 6
    assert back.label == "a1"
    for orig, got in zip(seq.frames, back.frames):
        assert got.timestamp == orig.timestamp
        np.testing.assert_array_equal(got.points, orig.points)
        np.testing.assert_array_equal(got.visibility, orig.visibility)


def test_malformed_record_reports_line(tmp_path):
    path = tmp_path / "bad.ndjson"
    path.write_text('{"t":0.0,"pts":[[0,0,0]],"vis":[1]}\n')
    with pytest.raises(ParseError, match="bad.ndjson:1"):
        load_sequence(path)


def test_nonmonotonic_sequence_rejected(tmp_path):
    seq = make_seq(n=3)
    frames = [seq.frames[0], seq.frames[2], seq.frames[1]]
    path = tmp_path / "seq.ndjson"
    write_sequence(PoseSequence(frames), path)
    with pytest.raises(ValidationError):
        load_sequence(path)


def test_mhad_landmark_selection():
    joints = np.arange(60.0).reshape(20, 3)
    pts = convert_mhad_joints(joints)
    assert pts.shape == (NUM_LANDMARKS, 3)
    head = MHAD_JOINT_NAMES.index("head")
    np.testing.assert_array_equal(pts[L.NOSE], joints[head])
    np.testing.assert_array_equal(
        pts[L.L_HEEL], joints[MHAD_JOINT_NAMES.index("left_ankle")])
    np.testing.assert_array_equal(
        pts[L.R_WRIST], joints[MHAD_JOINT_NAMES.index("right_wrist")])
    assert len(set(MHAD_TO_LANDMARK)) == NUM_LANDMARKS


def test_mhad_shape_check():
    with pytest.raises(ShapeError):
        convert_mhad_joints(np.zeros((19, 3)))


def write_mat(path, frames=5, seed=0):
    rng = np.random.default_rng(seed)
    savemat(path, {"d_skel": rng.normal(size=(20, 3, frames))})


def test_mhad_file_loading(tmp_path):
    path = tmp_path / "a7_s2_t3_skeleton.mat"
    write_mat(path, frames=8)
    seq = load_mhad_sequence(path)
    assert len(seq) == 8
    assert (seq.label, seq.subject, seq.trial) == ("a7", "s2", "t3")
    assert seq.frames[1].timestamp == pytest.approx(1 / 30.0)


def test_mhad_dataset_conversion_skips_corrupt(tmp_path, caplog):
    src = tmp_path / "mhad"
    src.mkdir()
    for name in ("a1_s1_t1", "a1_s2_t1", "a2_s1_t1"):
        write_mat(src / f"{name}_skeleton.mat", seed=hash(name) % 1000)
    (src / "a2_s2_t1_skeleton.mat").write_bytes(b"not a mat file")
    out = tmp_path / "converted"
    manifest = convert_mhad_dataset(src, out)
    assert len(manifest) == 3
    assert manifest.classes == ["a1", "a2"]
    assert (out / "manifest.txt").exists()
    assert "a2_s2_t1" in " ".join(r.message for r in caplog.records)
    # every converted file loads back
    for path_, label, _, _ in manifest.entries:
        assert len(load_sequence(out / path_, label=label)) == 5


def test_empty_dataset_raises(tmp_path):
    src = tmp_path / "empty"
    src.mkdir()
    with pytest.raises(EmptyDataset):
        convert_mhad_dataset(src, tmp_path / "out")


def test_manifest_round_trip(tmp_path):
    manifest = DatasetManifest([("x.ndjson", "a1", "s1", "t1"),
                                ("y.ndjson", "a2", "s1", "t2")])
    path = tmp_path / "manifest.txt"
    write_manifest(manifest, path)
    back = load_manifest(path)
    assert back.entries == manifest.entries
    assert back.classes == ["a1", "a2"]


def test_manifest_rejects_duplicates():
    with pytest.raises(ValidationError):
        DatasetManifest([("x.ndjson", "a1", "s1", "t1"),
                         ("x.ndjson", "a1", "s1", "t2")])


def test_manifest_subset():
    manifest = DatasetManifest([(f"{i}.ndjson", f"a{i % 3}", "s", "t")
                                for i in range(9)])
    sub = manifest.subset(["a1"])
    assert len(sub) == 3
    assert sub.classes == ["a1"]


def fake_manifest(total):
    return DatasetManifest([(f"{i:04d}.ndjson", f"a{i % 5}", "s", "t")
                            for i in range(total)])


def test_split_counts_follow_ceil_rule():
    for total, expect_test in ((861, 173), (192, 39), (223, 45)):
        train, test = split(fake_manifest(total), 0.2, seed=7)
        assert len(test) == expect_test
        assert len(train) == total - expect_test


def test_split_is_seeded_and_disjoint():
    manifest = fake_manifest(40)
    a_train, a_test = split(manifest, 0.25, seed=3)
    b_train, b_test = split(manifest, 0.25, seed=3)
    assert a_test.entries == b_test.entries
    c_train, c_test = split(manifest, 0.25, seed=4)
    assert c_test.entries != a_test.entries
    together = {e[0] for e in a_train.entries} | {e[0] for e in a_test.entries}
    assert len(together) == 40


def test_split_ratio_validated():
    with pytest.raises(ValueError):
        split(fake_manifest(10), 0.0, seed=0)
