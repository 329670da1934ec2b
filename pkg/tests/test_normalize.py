import numpy as np
import pytest

from skelact.errors import DegeneratePose, ValidationError
from skelact.landmarks import LandmarkId as L
from skelact.landmarks import NUM_LANDMARKS
from skelact.normalize import (NormalizeConfig, normalize_pose,
                               normalize_sequence, rotation_between)
from skelact.skeleton_io import PoseSequence, Skeleton3D


def random_pose(rng, t=0.0):
    pts = rng.normal(scale=0.5, size=(NUM_LANDMARKS, 3))
    # Guarantee a real torso so the pose is never degenerate.
    pts[L.L_HIP] = (-0.1, 0.0, 0.0)
    pts[L.R_HIP] = (0.1, 0.0, 0.0)
    pts[L.L_SHOULDER] = (-0.15, 0.5, 0.05) + rng.normal(scale=0.02, size=3)
    pts[L.R_SHOULDER] = (0.15, 0.5, -0.05) + rng.normal(scale=0.02, size=3)
    return Skeleton3D(timestamp=t, points=pts, visibility=np.ones(NUM_LANDMARKS))


def test_hip_midpoint_lands_at_origin():
    rng = np.random.default_rng(0)
    out = normalize_pose(random_pose(rng))
    hip_mid = (out.points[L.L_HIP] + out.points[L.R_HIP]) / 2
    np.testing.assert_allclose(hip_mid, 0.0, atol=1e-12)


def test_all_landmarks_inside_unit_sphere():
    rng = np.random.default_rng(1)
    for _ in range(25):
        out = normalize_pose(random_pose(rng))
        assert np.linalg.norm(out.points, axis=1).max() <= 1.0 + 1e-12


def test_shoulder_center_aligned_to_target():
    rng = np.random.default_rng(2)
    out = normalize_pose(random_pose(rng))
    sc = (out.points[L.L_SHOULDER] + out.points[L.R_SHOULDER]) / 2
    direction = sc / np.linalg.norm(sc)
    np.testing.assert_allclose(direction, [0.0, 1.0, 0.0], atol=1e-9)


def test_orientation_stage_can_be_disabled():
    rng = np.random.default_rng(3)
    pose = random_pose(rng)
    out = normalize_pose(pose, NormalizeConfig(orient=False))
    sc = (out.points[L.L_SHOULDER] + out.points[L.R_SHOULDER]) / 2
    raw_sc = ((pose.points[L.L_SHOULDER] + pose.points[L.R_SHOULDER]) / 2
              - (pose.points[L.L_HIP] + pose.points[L.R_HIP]) / 2)
    np.testing.assert_allclose(sc / np.linalg.norm(sc),
                               raw_sc / np.linalg.norm(raw_sc), atol=1e-12)


def test_invariant_to_similarity_transforms():
    # Translation and uniform scale must wash out entirely.
    rng = np.random.default_rng(4)
    for _ in range(100):
        pose = random_pose(rng)
        reference = normalize_pose(pose)
        scale = float(rng.uniform(0.1, 10.0))
        shift = rng.uniform(-50.0, 50.0, size=3)
        moved = Skeleton3D(timestamp=pose.timestamp,
                           points=pose.points * scale + shift,
                           visibility=pose.visibility)
        out = normalize_pose(moved)
        np.testing.assert_allclose(out.points, reference.points, atol=1e-6)


def test_yaw_is_not_normalized():
    # Spin a pose about its own torso axis: the normalized outputs must
    # differ, because body yaw carries command direction.
    rng = np.random.default_rng(5)
    pose = random_pose(rng)
    reference = normalize_pose(pose)
    hip_mid = (pose.points[L.L_HIP] + pose.points[L.R_HIP]) / 2
    theta = np.pi / 3
    about_torso = np.array([[np.cos(theta), 0, np.sin(theta)],
                            [0, 1, 0],
                            [-np.sin(theta), 0, np.cos(theta)]])
    centered = pose.points - hip_mid
    sc = ((pose.points[L.L_SHOULDER] + pose.points[L.R_SHOULDER]) / 2 - hip_mid)
    to_y = rotation_between(sc / np.linalg.norm(sc), np.array([0.0, 1.0, 0.0]))
    spun = (centered @ to_y.T) @ about_torso.T
    spun_pose = Skeleton3D(timestamp=0.0, points=spun,
                           visibility=pose.visibility)
    out = normalize_pose(spun_pose)
    assert not np.allclose(out.points, reference.points, atol=1e-3)


def test_rotation_between_basics():
    rng = np.random.default_rng(6)
    for _ in range(50):
        u = rng.normal(size=3)
        u /= np.linalg.norm(u)
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        r = rotation_between(u, v)
        np.testing.assert_allclose(r @ u, v, atol=1e-12)
        np.testing.assert_allclose(r @ r.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(r) == pytest.approx(1.0)


def test_rotation_between_antiparallel():
    u = np.array([0.0, 1.0, 0.0])
    r = rotation_between(u, -u)
    np.testing.assert_allclose(r @ u, -u, atol=1e-12)
    np.testing.assert_allclose(r @ r.T, np.eye(3), atol=1e-12)


def test_degenerate_pose_raises():
    pts = np.zeros((NUM_LANDMARKS, 3))
    pose = Skeleton3D(timestamp=0.0, points=pts,
                      visibility=np.ones(NUM_LANDMARKS))
    with pytest.raises(DegeneratePose):
        normalize_pose(pose)


def test_degenerate_frames_dropped_from_sequence():
    rng = np.random.default_rng(7)
    good = random_pose(rng, t=0.0)
    bad = Skeleton3D(timestamp=1 / 30.0, points=np.zeros((NUM_LANDMARKS, 3)),
                     visibility=np.ones(NUM_LANDMARKS))
    good2 = random_pose(rng, t=2 / 30.0)
    out = normalize_sequence(PoseSequence([good, bad, good2], label="x"))
    assert len(out) == 2
    assert out.label == "x"


def test_target_direction_must_be_unit():
    with pytest.raises(ValidationError):
        NormalizeConfig(target_direction=np.array([0.0, 2.0, 0.0]))
