import numpy as np
import pytest

from posespace.errors import MissingClass, ShapeMismatch, TooFewPoints
from posespace.nets import Checkpoint, Classifier, GestureClass, encode
from posespace.synth import LabeledClip, SynthParams, synth_dataset, synth_gesture
from posespace.training import (EvalReport, GestureDataset, TrainConfig,
                                average_precision, evaluate, load_clips,
                                make_windows, mean_average_precision, save_clips,
                                silhouette, split_by_clip, train_joint)


def small_clips(clips_per_class=3, frames=12, seed=0):
    params = SynthParams(seed=seed, frames_per_clip=frames)
    return synth_dataset(clips_per_class, params)


class TestMakeWindows:
    def test_count_formula(self):
        params = SynthParams(seed=0, frames_per_clip=10)
        clip = synth_gesture(GestureClass.PINCH, params, np.random.default_rng(0))
        ds = make_windows([clip], 2)
        assert len(ds.windows) == 9

    def test_short_clip_yields_none(self):
        params = SynthParams(seed=0, frames_per_clip=2)
        clip = synth_gesture(GestureClass.PINCH, params, np.random.default_rng(0))
        clip.frames = clip.frames[:1]
        assert len(make_windows([clip], 2).windows) == 0

    def test_windows_never_span_clips(self):
        params = SynthParams(seed=0, frames_per_clip=5)
        rng = np.random.default_rng(0)
        clips = [synth_gesture(GestureClass.PINCH, params, rng, clip_id=f"c{i}")
                 for i in range(2)]
        assert len(make_windows(clips, 8).windows) == 0
        ds = make_windows(clips, 2)
        assert len(ds.windows) == 8
        assert all(len({f.source_id for f in w.frames}) == 1 for w in ds.windows)


class TestSplit:
    def test_no_clip_shared_between_train_and_test(self):
        ds = make_windows(small_clips(4), 2)
        train, test = split_by_clip(ds, 0.75, seed=0)
        train_ids = {w.clip_id for w in train.windows}
        test_ids = {w.clip_id for w in test.windows}
        assert train_ids and test_ids
        assert not train_ids & test_ids

    def test_deterministic(self):
        ds = make_windows(small_clips(4), 2)
        a = split_by_clip(ds, 0.75, seed=1)
        b = split_by_clip(ds, 0.75, seed=1)
        assert [w.clip_id for w in a[0].windows] == [w.clip_id for w in b[0].windows]


class TestTrainJoint:
    def test_smoke_one_epoch(self):
        ds = make_windows(small_clips(2), 2)
        cfg = TrainConfig(frames_per_window=2, epochs=1, seed=0)
        result = train_joint(ds, cfg)
        assert len(result.history) == 1
        assert np.isfinite(result.history[0].train_loss)

    def test_missing_class_raises(self):
        clips = [c for c in small_clips(2) if c.label is not GestureClass.PINCH]
        ds = make_windows(clips, 2)
        with pytest.raises(MissingClass, match="PINCH"):
            train_joint(ds, TrainConfig(frames_per_window=2, epochs=1))

    def test_bitwise_deterministic(self):
        ds = make_windows(small_clips(2), 2)
        cfg = TrainConfig(frames_per_window=2, epochs=3, seed=7)
        a = train_joint(ds, cfg)
        b = train_joint(ds, cfg)
        assert a.history[-1].train_loss == b.history[-1].train_loss

    def test_reconstruction_trend_smoothed_nonincreasing(self):
        ds = make_windows(small_clips(4, frames=20), 2)
        result = train_joint(ds, TrainConfig(frames_per_window=2, epochs=5, seed=0))
        recon = np.array([h.train_recon for h in result.history])
        smooth = np.convolve(recon, np.ones(3) / 3, mode="valid")
        assert all(a >= b - 1e-12 for a, b in zip(smooth, smooth[1:]))

    def test_calibration_bounds_cover_training_latents(self):
        ds = make_windows(small_clips(2), 2)
        result = train_joint(ds, TrainConfig(frames_per_window=2, epochs=1, seed=0))
        calib = result.checkpoint.calibration
        z = encode(result.checkpoint.autoencoder, result.train_set.inputs("concat"))
        assert np.all(z >= calib[0] - 1e-12) and np.all(z <= calib[1] + 1e-12)

    def test_n_mismatch_raises(self):
        ds = make_windows(small_clips(2), 1)
        with pytest.raises(ShapeMismatch):
            train_joint(ds, TrainConfig(frames_per_window=2, epochs=1))


class TestMetrics:
    def test_average_precision_hand_computed(self):
        # Ranked by score: items 0,2 positive at ranks 1 and 3 of 6.
        scores = np.array([0.9, 0.8, 0.7, 0.6, 0.5, 0.4])
        positives = np.array([True, False, True, False, False, False])
        # precision@1 = 1/1, precision@3 = 2/3 -> AP = (1 + 2/3) / 2
        assert average_precision(scores, positives) == pytest.approx((1 + 2 / 3) / 2)

    def test_average_precision_tie_break_by_index(self):
        scores = np.array([0.5, 0.5])
        positives = np.array([False, True])
        assert average_precision(scores, positives) == pytest.approx(0.5)

    def test_map_perfect_scores(self):
        labels = np.array([1, 2, 3, 4, 5, 6])
        scores = np.eye(6)
        assert mean_average_precision(scores, labels) == pytest.approx(1.0)

    def test_silhouette_well_separated(self):
        rng = np.random.default_rng(0)
        a = rng.normal(scale=0.01, size=(40, 2))
        b = rng.normal(scale=0.01, size=(40, 2)) + 10.0
        points = np.vstack([a, b])
        labels = np.array([0] * 40 + [1] * 40)
        assert silhouette(points, labels) > 0.95

    def test_silhouette_shuffled_labels_near_zero(self):
        rng = np.random.default_rng(1)
        points = np.vstack([rng.normal(size=(60, 2)), rng.normal(size=(60, 2)) + 3.0])
        labels = rng.permutation(np.array([0] * 60 + [1] * 60))
        assert abs(silhouette(points, labels)) < 0.2

    def test_silhouette_matches_sklearn(self):
        sklearn_metrics = pytest.importorskip("sklearn.metrics")
        rng = np.random.default_rng(2)
        points = rng.normal(size=(50, 2))
        labels = rng.integers(0, 3, size=50)
        ours = silhouette(points, labels)
        theirs = sklearn_metrics.silhouette_score(points, labels)
        assert ours == pytest.approx(theirs, abs=1e-10)

    def test_silhouette_singleton_class_raises(self):
        points = np.zeros((3, 2))
        with pytest.raises(TooFewPoints):
            silhouette(points, np.array([0, 0, 1]))


class TestEvaluate:
    def trained(self, epochs=1, clips=2):
        ds = make_windows(small_clips(clips), 2)
        result = train_joint(ds, TrainConfig(frames_per_window=2, epochs=epochs, seed=0))
        return result

    def test_constant_classifier_hits_floor(self):
        result = self.trained()
        ckpt = result.checkpoint
        for layer in ckpt.classifier.head:
            layer.weights[:] = 0.0
            layer.bias[:] = 0.0
        ckpt.classifier.head[-1].bias[0] = 10.0  # always predicts class 1
        ds = make_windows(small_clips(2, seed=5), 2)
        report = evaluate(ckpt, ds)
        counts = np.array(list(ds.class_counts.values()), dtype=float)
        expected = 100.0 * counts[0] / counts.sum()
        assert report.overall_precision == pytest.approx(expected)
        assert report.confusion[:, 0].sum() == len(ds.windows)

    def test_report_invariants(self):
        result = self.trained()
        report = evaluate(result.checkpoint, result.test_set)
        counts = result.test_set.class_counts
        for cls in GestureClass:
            assert report.confusion[cls - 1].sum() == counts[cls]
        assert 0.0 <= report.overall_precision <= 100.0
        for v in report.per_class_precision.values():
            assert 0.0 <= v <= 100.0
        assert report.latency_p95_ms >= 0.0

    def test_n_mismatch_raises(self):
        result = self.trained()
        ds = make_windows(small_clips(1), 1)
        with pytest.raises(ShapeMismatch):
            evaluate(result.checkpoint, ds)

    def test_report_serializes(self, tmp_path):
        result = self.trained()
        report = evaluate(result.checkpoint, result.test_set)
        path = tmp_path / "report.json"
        report.save(path)
        import json
        doc = json.loads(path.read_text())
        assert set(doc) >= {"overall_precision", "map", "confusion", "latency_p95_ms"}


class TestClipFile:
    def test_round_trip(self, tmp_path):
        clips = small_clips(1, frames=5)
        path = tmp_path / "clips.ndjson"
        save_clips(path, clips)
        loaded = load_clips(path)
        assert len(loaded) == len(clips)
        for a, b in zip(clips, loaded):
            assert (a.clip_id, a.label) == (b.clip_id, b.label)
            for fa, fb in zip(a.frames, b.frames):
                np.testing.assert_array_equal(fa.points, fb.points)
                assert fa.timestamp == fb.timestamp
