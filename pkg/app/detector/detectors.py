"""Detector implementations. Both are read-only after construction and draw all randomness from the given seed"""
import abc
import enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.quantkit import QuantizedTensor, PruneReport, StorageKind
from app.quantkit import quantize_affine, dequantize, quantization_error, prune_magnitude, storage_footprint
from . import logger
from .exceptions import DimensionMismatchError
from .models import SceneFrame, Detection, DetectionClass, DetectorProfile, Lighting
from .models import DEFAULT_FEATURE_DIMENSION, FULL_FRAME

# toy detections below this confidence are not emitted at all
EMISSION_FLOOR = 0.05


class WeightMode(str, enum.Enum):
    FLOAT = 'float'
    QUANTIZED = 'quantized'


class Detector(abc.ABC):
    """Common part of the detectors: a profile and a deterministic inference latency draw"""

    def __init__(self, profile: Optional[DetectorProfile] = None):
        self._profile = profile or DetectorProfile()

    @property
    def profile(self) -> DetectorProfile:
        return self._profile

    def draw_inference_ms(self, rng: np.random.Generator) -> float:
        if not self._profile.latency_jitter_ms:
            return self._profile.inference_ms
        value = rng.normal(self._profile.inference_ms, self._profile.latency_jitter_ms)
        return float(max(value, 0.1 * self._profile.inference_ms))

    @abc.abstractmethod
    def detect(self, frame: SceneFrame, rng_seed: int) -> Tuple[List[Detection], float]:
        """Runs inference on one frame and returns the detections with the simulated inference time in ms"""


class ScriptedDetector(Detector):
    """
    Replays the ground truth of a frame: one detection per truth label. Confidence is the base confidence minus the
    night penalty on night frames plus gaussian jitter, clamped to [0, 1].
    """

    def __init__(self, profile: Optional[DetectorProfile] = None, base_confidence: float = 0.9):
        super().__init__(profile)
        if not 0.0 <= base_confidence <= 1.0:
            raise ValueError('Base confidence must lie in [0, 1]')
        self._base_confidence = base_confidence

    @property
    def base_confidence(self) -> float:
        return self._base_confidence

    def detect(self, frame: SceneFrame, rng_seed: int) -> Tuple[List[Detection], float]:
        rng = np.random.default_rng(rng_seed)
        penalty = self.profile.night_penalty if frame.lighting is Lighting.NIGHT else 0.0
        detections = []
        for label in frame.truth:
            noise = rng.normal(0.0, self.profile.noise_sigma) if self.profile.noise_sigma else 0.0
            confidence = float(np.clip(self._base_confidence - penalty + noise, 0.0, 1.0))
            detections.append(Detection(category=label.category, bbox=label.bbox, confidence=confidence))
        return detections, self.draw_inference_ms(rng)


class ToyDetector(Detector):
    """
    Logistic violation scorer over the frame features: confidence = sigmoid(w . x + b).
    Use :func:`build_toy_detector` to create one.
    """

    def __init__(self, weights: np.ndarray, bias: float, mode: WeightMode, profile: Optional[DetectorProfile] = None,
                 quantized: Optional[QuantizedTensor] = None, prune_report: Optional[PruneReport] = None):
        super().__init__(profile)
        self._weights = np.array(weights, dtype=np.float64)
        self._weights.flags.writeable = False
        self._bias = float(bias)
        self._mode = WeightMode(mode)
        self._quantized = quantized
        self._prune_report = prune_report

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def bias(self) -> float:
        return self._bias

    @property
    def mode(self) -> WeightMode:
        return self._mode

    @property
    def dimension(self) -> int:
        return self._weights.size

    @property
    def quantized_tensor(self) -> Optional[QuantizedTensor]:
        return self._quantized

    @property
    def prune_report(self) -> Optional[PruneReport]:
        return self._prune_report

    @property
    def storage_bytes(self) -> int:
        """Bytes the weights take on the device"""
        kind = StorageKind.QUANTIZED if self._mode is WeightMode.QUANTIZED else StorageKind.FLOAT32
        return storage_footprint(kind, self.dimension)

    def score(self, frame: SceneFrame) -> float:
        """Raw violation confidence of the frame, without the emission floor"""
        if frame.dimension != self.dimension:
            raise DimensionMismatchError(f'Frame {frame.frame_id} has {frame.dimension} features, '
                                         f'detector expects {self.dimension}')
        logit = float(self._weights @ frame.features) + self._bias
        # tanh form of the sigmoid does not overflow for large negative logits
        return float(np.clip(0.5 * (1.0 + np.tanh(0.5 * logit)), 0.0, 1.0))

    def detect(self, frame: SceneFrame, rng_seed: int) -> Tuple[List[Detection], float]:
        rng = np.random.default_rng(rng_seed)
        confidence = self.score(frame)
        detections = []
        if confidence >= EMISSION_FLOOR:
            detections.append(Detection(category=DetectionClass.VIOLATION, bbox=FULL_FRAME, confidence=confidence))
        return detections, self.draw_inference_ms(rng)


def build_toy_detector(weights: Sequence[float], bias: float, mode: WeightMode = WeightMode.FLOAT,
                       profile: Optional[DetectorProfile] = None, dimension: int = DEFAULT_FEATURE_DIMENSION,
                       prune_fraction: float = 0.0) -> ToyDetector:
    """
    Creates a toy detector. In quantized mode the weights go through int8 affine quantization and are dequantized
    back before use, so the detector sees exactly what an 8-bit model would. An optional magnitude pruning pass runs
    before quantization. The detector cannot be changed afterwards.
    :param weights: one weight per feature
    :param bias: logit bias
    :param mode: float or quantized weights
    :param profile: latency profile
    :param dimension: expected feature dimension
    :param prune_fraction: share of the smallest weights to zero before quantization
    :return: ready detector
    :rtype: ToyDetector
    """
    vector = np.asarray(weights, dtype=np.float64).ravel()
    if vector.size != dimension:
        raise DimensionMismatchError(f'Detector expects {dimension} weights, got {vector.size}')
    mode = WeightMode(mode)
    prune_report = None
    if prune_fraction:
        vector, prune_report = prune_magnitude(vector, prune_fraction)
    quantized = None
    if mode is WeightMode.QUANTIZED:
        quantized = quantize_affine(vector)
        error = quantization_error(vector, quantized)
        logger.info(f'Weights were quantized to 8 bits, max error {error["max_abs_error"]:.3g} '
                    f'within {error["bound"]:.3g}')
        vector = dequantize(quantized)
    logger.debug(f'Toy detector with {dimension} {mode.value} weights was built')
    return ToyDetector(vector, bias, mode, profile=profile, quantized=quantized, prune_report=prune_report)


def detect(detector: Detector, frame: SceneFrame, rng_seed: int) -> Tuple[List[Detection], float]:
    """Runs the detector on one frame. Identical detector, frame and seed always give identical output"""
    return detector.detect(frame, rng_seed)
