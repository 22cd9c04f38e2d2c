import csv
import json
import os
import shutil
import tempfile
import unittest

import numpy as np

from app.detector import Lighting
from app.metrics import ConfusionMatrix, REAR_CAMERA_MATRIX, FRONT_CAMERA_MATRIX
from app.metrics import LatencyKind, LatencySample, latency_stats, write_json, write_records_csv
from app.metrics.exceptions import EmptySampleSetError, ZeroDenominatorError


class ConfusionMatrixTestCase(unittest.TestCase):
    """Tests for confusion matrix scores"""

    def test_rear_camera_scores(self):
        scores = REAR_CAMERA_MATRIX.scores()
        self.assertAlmostEqual(scores.precision, 0.9111, delta=0.001)
        self.assertAlmostEqual(scores.recall, 0.9762, delta=0.001)
        self.assertAlmostEqual(scores.accuracy, 0.9019, delta=0.001)

    def test_front_camera_scores(self):
        scores = FRONT_CAMERA_MATRIX.scores()
        self.assertAlmostEqual(scores.precision, 39 / 43, delta=0.001)
        self.assertAlmostEqual(scores.recall, 0.9286, delta=0.001)
        self.assertAlmostEqual(scores.accuracy, 0.8627, delta=0.001)

    def test_replayed_pairs(self):
        pairs = [(True, True)] * 41 + [(False, True)] + [(True, False)] * 4 + [(False, False)] * 5
        self.assertEqual(ConfusionMatrix.from_pairs(pairs), REAR_CAMERA_MATRIX)
        # order of the pairs does not matter
        shuffled = [pairs[i] for i in np.random.default_rng(5).permutation(len(pairs))]
        self.assertEqual(ConfusionMatrix.from_pairs(shuffled), REAR_CAMERA_MATRIX)
        self.assertEqual(REAR_CAMERA_MATRIX.total, 51)

    def test_update_is_immutable(self):
        matrix = ConfusionMatrix()
        updated = matrix.update(True, False)
        self.assertEqual(matrix.total, 0)
        self.assertEqual(updated.to_dict(), {'tp': 0, 'fp': 1, 'fn': 0, 'tn': 0})
        self.assertEqual(updated + updated, ConfusionMatrix(fp=2))

    def test_zero_denominators(self):
        with self.assertRaises(ZeroDenominatorError) as context:
            ConfusionMatrix().scores()
        self.assertEqual(context.exception.score, 'precision')
        with self.assertRaises(ZeroDenominatorError) as context:
            ConfusionMatrix(fp=3, tn=2).scores()
        self.assertEqual(context.exception.score, 'recall')
        self.assertEqual(str(context.exception), 'recall is undefined, its denominator is zero')
        with self.assertRaises(ZeroDenominatorError) as context:
            ConfusionMatrix(fn=3).scores()
        self.assertEqual(context.exception.score, 'precision')
        with self.assertRaises(ZeroDivisionError):
            ConfusionMatrix(tn=10).scores()

    def test_negative_counts(self):
        with self.assertRaises(ValueError):
            ConfusionMatrix(tp=-1)


class LatencyStatsTestCase(unittest.TestCase):
    """Tests for latency statistics"""

    def test_day_and_night(self):
        samples = [LatencySample(LatencyKind.END_TO_END, 450, Lighting.DAY),
                   LatencySample(LatencyKind.END_TO_END, 790, Lighting.NIGHT)]
        stats = latency_stats(samples)
        self.assertEqual(stats.mean_ms, 620)
        self.assertEqual(stats.p50, 450)
        self.assertEqual(stats.p95, 790)
        self.assertEqual(stats.count, 2)
        self.assertEqual(latency_stats(samples, lighting=Lighting.NIGHT).mean_ms, 790)

    def test_single_sample(self):
        stats = latency_stats([LatencySample(LatencyKind.INFERENCE, 28)])
        self.assertEqual((stats.mean_ms, stats.p50, stats.p95, stats.count), (28, 28, 28, 1))

    def test_nearest_rank(self):
        samples = [LatencySample(LatencyKind.UPLOAD, value) for value in range(1, 101)]
        stats = latency_stats(samples)
        self.assertEqual(stats.p50, 50)
        self.assertEqual(stats.p95, 95)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(8)
        values = rng.uniform(1, 2000, size=200)
        samples = [LatencySample(LatencyKind.END_TO_END, value) for value in values]
        shuffled = [samples[i] for i in rng.permutation(len(samples))]
        first, second = latency_stats(samples), latency_stats(shuffled)
        self.assertAlmostEqual(first.mean_ms, second.mean_ms)
        self.assertEqual((first.p50, first.p95), (second.p50, second.p95))

    def test_filters(self):
        samples = [LatencySample(LatencyKind.INFERENCE, 28), LatencySample(LatencyKind.END_TO_END, 1150)]
        self.assertEqual(latency_stats(samples, kind=LatencyKind.END_TO_END).count, 1)
        with self.assertRaises(EmptySampleSetError):
            latency_stats(samples, kind=LatencyKind.UPLOAD)
        with self.assertRaises(EmptySampleSetError):
            latency_stats([])

    def test_non_positive_sample(self):
        with self.assertRaises(ValueError):
            LatencySample(LatencyKind.INFERENCE, 0)


class ReportsTestCase(unittest.TestCase):
    """Tests for report files"""

    def setUp(self) -> None:
        self.directory = tempfile.mkdtemp(prefix='smr-reports-test-')

    def tearDown(self) -> None:
        shutil.rmtree(self.directory, ignore_errors=True)

    def test_records_csv(self):
        path = write_records_csv(os.path.join(self.directory, 'nested', 'rows.csv'),
                                 [{'strategy': 'onload', 'latency': 28.0}, {'strategy': 'offload', 'latency': 1150.0}])
        with open(path, newline='') as file:
            rows = list(csv.DictReader(file))
        self.assertEqual(rows[1], {'strategy': 'offload', 'latency': '1150.0'})

    def test_json(self):
        path = write_json(os.path.join(self.directory, 'report.json'), {'b': 1, 'a': [REAR_CAMERA_MATRIX.to_dict()]})
        with open(path) as file:
            self.assertEqual(json.load(file)['a'][0]['tp'], 41)
