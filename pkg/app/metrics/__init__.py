"""Evaluation of a monitoring session: confusion matrix scores, latency statistics and report files"""
import logging

logger = logging.getLogger(__name__)

from .confusion import ConfusionMatrix, Scores, REAR_CAMERA_MATRIX, FRONT_CAMERA_MATRIX
from .latency import LatencyKind, LatencySample, LatencyStats, latency_stats
from .reports import write_records_csv, write_json
