import io
import json

import numpy as np
import pytest
from scipy.io import savemat

from skelact.cli import main
from skelact.skeleton_io import (DatasetManifest, Skeleton3D, frame_to_record,
                                 load_sequence, write_manifest, write_sequence)
from skelact.synthetic import make_dataset, make_sequence


@pytest.fixture(scope="module")
def dataset_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("data")
    entries = []
    for i, seq in enumerate(make_dataset(per_class=3, seed=5)):
        name = f"{i:05d}.ndjson"
        write_sequence(seq, root / name)
        entries.append((name, seq.label, "s1", f"t{i}"))
    write_manifest(DatasetManifest(entries), root / "manifest.txt")
    return root


@pytest.fixture(scope="module")
def bundle_path(dataset_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("bundle") / "refs.skelact"
    rc = main(["build-refs", "--data", str(dataset_dir), "--out", str(out),
               "--config", "heavy"])
    assert rc == 0
    return out


def test_no_arguments_prints_help(capsys):
    assert main([]) == 1
    assert "COMMAND" in capsys.readouterr().err


def test_unknown_command(capsys):
    assert main(["frobnicate"]) == 1


def test_eval_needs_a_source(capsys):
    assert main(["eval", "--out", "/tmp/x"]) == 1
    assert "--data" in capsys.readouterr().err


def test_classify_needs_input_or_stream(capsys, bundle_path):
    assert main(["classify", "--bundle", str(bundle_path)]) == 1


def test_bad_override_key(capsys, tmp_path):
    rc = main(["eval", "--synthetic", "--out", str(tmp_path),
               "--set", "nope=1"])
    assert rc == 1
    assert "unknown config key" in capsys.readouterr().err


def test_missing_bundle_is_io_error(capsys, tmp_path):
    rc = main(["classify", "--bundle", str(tmp_path / "nope.skelact"),
               "--input", str(tmp_path / "nope.ndjson")])
    assert rc == 2


def test_missing_dataset_is_io_error(capsys, tmp_path):
    rc = main(["eval", "--data", str(tmp_path / "absent"),
               "--out", str(tmp_path)])
    assert rc == 2


def test_eval_synthetic_writes_artifacts(capsys, tmp_path):
    out = tmp_path / "run"
    rc = main(["eval", "--synthetic", "--per-class", "4",
               "--classes", "raise_right,swipe_left,squat",
               "--config", "heavy", "--out", str(out)])
    assert rc == 0
    line = capsys.readouterr().out.strip().splitlines()[-1]
    assert line.startswith("n=")
    assert "accuracy=" in line and "per_case_ms=" in line
    report = json.loads((out / "report.json").read_text())
    assert report["n_queries"] >= 1
    assert set(report["per_class_f1"]) == {"raise_right", "swipe_left", "squat"}
    assert report["config"]["classify.band"] == 1.0
    assert (out / "report.csv").exists()
    assert (out / "confusion.csv").exists()


def test_classify_file(capsys, dataset_dir, bundle_path):
    rc = main(["classify", "--bundle", str(bundle_path),
               "--input", str(dataset_dir / "00000.ndjson")])
    assert rc == 0
    result = json.loads(capsys.readouterr().out.strip())
    assert result["label"] == "raise_right"   # its own reference is distance 0
    assert result["null"] is False
    assert result["n_frames"] == len(load_sequence(dataset_dir / "00000.ndjson"))
    assert result["neighbors"][0][1] == pytest.approx(0.0, abs=1e-9)


def test_classify_stream(capsys, monkeypatch, bundle_path):
    rng = np.random.default_rng(12)
    gesture = make_sequence("swipe_right", rng)
    step = 1 / 30.0
    frames = []
    t = 0.0
    first = gesture.frames[0]
    for _ in range(18):                     # lead-in stillness
        frames.append(Skeleton3D(t, first.points.copy(), first.visibility))
        t += step
    for f in gesture.frames:
        frames.append(Skeleton3D(t, f.points, f.visibility))
        t += step
    last = gesture.frames[-1]
    for _ in range(24):                     # trailing stillness closes the gap
        frames.append(Skeleton3D(t, last.points.copy(), last.visibility))
        t += step
    text = "".join(frame_to_record(f) + "\n" for f in frames)
    monkeypatch.setattr("sys.stdin", io.StringIO(text))
    rc = main(["classify", "--bundle", str(bundle_path), "--stream",
               "--set", "stream.queue_size=1024"])
    captured = capsys.readouterr()
    assert rc == 0
    lines = [json.loads(l) for l in captured.out.strip().splitlines()]
    assert len(lines) == 1
    assert lines[0]["label"] == "swipe_right"
    assert "segments=1" in captured.err


def test_simulate(capsys, tmp_path):
    script = tmp_path / "scene.csv"
    script.write_text("0.0,6.0,0.0,a24\n4.0,8.0,0.0,a6\n")
    out = tmp_path / "log.csv"
    rc = main(["simulate", "--script", str(script), "--out", str(out)])
    assert rc == 0
    assert "2 commands" in capsys.readouterr().out
    header = out.read_text().splitlines()[0]
    assert header.split(",")[-1] == "command"


def test_bench_dtw(capsys):
    rc = main(["bench-dtw", "--lengths", "6,9", "--dim", "3",
               "--repeats", "1", "--seed", "0"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "n,m,dim,band,mean_ms"
    assert len(lines) == 5
    assert lines[1].startswith("6,6,3,")


def test_lift(capsys, tmp_path, monkeypatch):
    from skelact.depth import RawFrame, write_raw_stream
    from skelact.landmarks import NUM_LANDMARKS

    def raw(t, torso_valid=True):
        torso = np.full(64, 2000.0) if torso_valid else np.zeros(64)
        return RawFrame(
            timestamp=t,
            landmarks2d=np.tile([320.0, 240.0], (NUM_LANDMARKS, 1)),
            visibility=np.ones(NUM_LANDMARKS),
            patches=np.full((NUM_LANDMARKS, 15, 15), 2000.0),
            torso_samples=torso,
            pixel_pitch_at_1m=1.5,
            principal_point=(320.0, 240.0))

    src = tmp_path / "raw.ndjson"
    with open(src, "w") as f:
        write_raw_stream([raw(0.0), raw(1 / 30, torso_valid=False),
                          raw(2 / 30)], f)
    out = tmp_path / "poses.ndjson"
    rc = main(["lift", "--input", str(src), "--out", str(out)])
    assert rc == 0
    assert "2 frames (1 skipped)" in capsys.readouterr().out
    assert len(load_sequence(out)) == 2


def test_convert(capsys, tmp_path):
    src = tmp_path / "mhad"
    src.mkdir()
    rng = np.random.default_rng(0)
    for name in ("a1_s1_t1", "a2_s1_t1"):
        savemat(src / f"{name}_skeleton.mat",
                {"d_skel": rng.normal(size=(20, 3, 6))})
    out = tmp_path / "neutral"
    rc = main(["convert", "--mhad", str(src), "--out", str(out)])
    assert rc == 0
    assert "converted 2 sequences" in capsys.readouterr().out
    assert (out / "manifest.txt").exists()
