import json

import numpy as np
import pytest

from posespace.cli import main
from posespace.geometry import format_stream_line
from posespace.musicspace import save_catalog
from posespace.nets import Checkpoint, GestureClass
from posespace.synth import SynthParams, synth_catalog, synth_gesture
from posespace.training import load_clips


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """One synth-data -> train pipeline shared by the CLI tests."""
    root = tmp_path_factory.mktemp("cli")
    data = root / "clips.ndjson"
    ckpt = root / "model.json"
    assert main(["synth-data", "--clips", "4", "--frames", "16",
                 "--seed", "0", "--out", str(data)]) == 0
    assert main(["train", "--data", str(data), "--frames", "2",
                 "--epochs", "2", "--seed", "0", "--out", str(ckpt),
                 "--history", str(root / "history.json")]) == 0
    return root


def test_synth_data_writes_expected_clip_count(workspace):
    clips = load_clips(workspace / "clips.ndjson")
    assert len(clips) == 4 * 6
    assert all(len(c.frames) == 16 for c in clips)


def test_synth_data_class_filter(tmp_path):
    out = tmp_path / "subset.ndjson"
    assert main(["synth-data", "--classes", "5,6", "--clips", "2",
                 "--frames", "8", "--out", str(out)]) == 0
    labels = {c.label for c in load_clips(out)}
    assert labels == {GestureClass.PINCH, GestureClass.DOUBLE_PINCH}


def test_train_writes_loadable_checkpoint(workspace):
    ckpt = Checkpoint.load(workspace / "model.json")
    assert ckpt.autoencoder.n_frames == 2
    history = json.loads((workspace / "history.json").read_text())
    assert len(history) == 2 and "train_loss" in history[0]


def test_eval_writes_report(workspace):
    report = workspace / "report.json"
    assert main(["eval", "--ckpt", str(workspace / "model.json"),
                 "--data", str(workspace / "clips.ndjson"),
                 "--report", str(report)]) == 0
    doc = json.loads(report.read_text())
    assert 0.0 <= doc["overall_precision"] <= 100.0
    assert doc["latency_p95_ms"] >= 0.0


def test_embed_music_roundtrip(tmp_path):
    catalog = tmp_path / "catalog.csv"
    save_catalog(catalog, synth_catalog(40, np.random.default_rng(0)).tracks)
    out = tmp_path / "space.json"
    assert main(["embed-music", "--catalog", str(catalog), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["tracks"]) == 40


def test_embed_music_import_coordinates(tmp_path):
    tracks = synth_catalog(8, np.random.default_rng(1)).tracks
    catalog = tmp_path / "catalog.csv"
    save_catalog(catalog, tracks)
    xy = tmp_path / "xy.csv"
    xy.write_text("".join(f"{t.track_id},{i}.0,0.0\n" for i, t in enumerate(tracks)))
    out = tmp_path / "space.json"
    assert main(["embed-music", "--catalog", str(catalog),
                 "--import", str(xy), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["source"] == "imported"


def test_replay_twice_is_byte_identical(workspace, tmp_path):
    catalog = tmp_path / "catalog.csv"
    save_catalog(catalog, synth_catalog(60, np.random.default_rng(2)).tracks)
    space = tmp_path / "space.json"
    assert main(["embed-music", "--catalog", str(catalog), "--out", str(space)]) == 0

    params = SynthParams(seed=0, frames_per_clip=30)
    clip = synth_gesture(GestureClass.PINCH, params, np.random.default_rng(0))
    stream = tmp_path / "stream.ndjson"
    stream.write_text("".join(format_stream_line(f) + "\n" for f in clip.frames))

    logs = []
    for i in range(2):
        events = tmp_path / f"events-{i}.ndjson"
        assert main(["replay", "--ckpt", str(workspace / "model.json"),
                     "--space", str(space), "--stream", str(stream),
                     "--events", str(events)]) == 0
        logs.append(events.read_bytes())
    assert logs[0] == logs[1]


def test_missing_input_file_exits_2(tmp_path):
    assert main(["train", "--data", str(tmp_path / "nope.ndjson"),
                 "--out", str(tmp_path / "m.json")]) == 2


def test_unknown_subcommand_nonzero(capsys):
    assert main(["frobnicate"]) != 0
    capsys.readouterr()


def test_bad_listen_argument(capsys):
    assert main(["serve", "--ckpt", "a", "--space", "b", "--listen", "nope"]) != 0
    capsys.readouterr()
