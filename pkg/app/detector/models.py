"""Value types flowing out of the camera stream and the detector"""
import enum
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Tuple

import numpy as np

from .exceptions import InvalidDetectionError

DEFAULT_FEATURE_DIMENSION = 16


class Lighting(str, enum.Enum):
    DAY = 'day'
    NIGHT = 'night'


class DetectionClass(enum.IntEnum):
    """Classes of the detector. Integer values are the class codes of the incident envelope"""
    DRIVER = 0
    PASSENGER = 1
    VIOLATION = 2

    @property
    def label(self) -> str:
        return self.name.capitalize()

    @classmethod
    def parse(cls, value: Any) -> 'DetectionClass':
        """Accepts a class code, a `Violation`-like label or a member itself"""
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            try:
                return cls[value.strip().upper()]
            except KeyError as error:
                raise InvalidDetectionError(f"Unknown detection class '{value}'") from error
        try:
            return cls(int(value))
        except ValueError as error:
            raise InvalidDetectionError(f"Unknown detection class code '{value}'") from error


@dataclass(frozen=True)
class BoundingBox:
    """Normalized (x, y, w, h) box which must stay inside the frame"""
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if not all(0.0 <= value <= 1.0 for value in (self.x, self.y, self.w, self.h)):
            raise InvalidDetectionError(f'Box {self.as_tuple()} has coordinates out of [0, 1]')
        # a tiny tolerance for boxes written as decimals in scenario files
        if self.x + self.w > 1.0 + 1e-9 or self.y + self.h > 1.0 + 1e-9:
            raise InvalidDetectionError(f'Box {self.as_tuple()} leaves the frame')

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return self.x, self.y, self.w, self.h


FULL_FRAME = BoundingBox(0.0, 0.0, 1.0, 1.0)


@dataclass(frozen=True)
class TruthLabel:
    category: DetectionClass
    bbox: BoundingBox = FULL_FRAME

    @classmethod
    def from_dict(cls, data: Mapping) -> 'TruthLabel':
        bbox = data.get('bbox')
        return cls(category=DetectionClass.parse(data['class']), bbox=BoundingBox(*bbox) if bbox else FULL_FRAME)

    def to_dict(self) -> dict:
        return {'class': self.category.label, 'bbox': list(self.bbox.as_tuple())}


@dataclass(frozen=True, eq=False)
class SceneFrame:
    """
    One time-stamped sample of the scene view stream. Features stand for the image, truth labels are known only
    in simulation.
    """
    frame_id: int
    t_ms: int
    lighting: Lighting
    features: np.ndarray
    truth: Tuple[TruthLabel, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.frame_id < 0:
            raise InvalidDetectionError('Frame id cannot be negative')
        if self.t_ms < 0:
            raise InvalidDetectionError('Frame time cannot be negative')
        features = np.asarray(self.features, dtype=np.float64).ravel()
        features.flags.writeable = False
        object.__setattr__(self, 'features', features)
        object.__setattr__(self, 'lighting', Lighting(self.lighting))
        object.__setattr__(self, 'truth', tuple(self.truth))

    @property
    def dimension(self) -> int:
        return self.features.size

    @property
    def has_violation(self) -> bool:
        return any(label.category is DetectionClass.VIOLATION for label in self.truth)

    @classmethod
    def from_dict(cls, data: Mapping) -> 'SceneFrame':
        return cls(frame_id=int(data['frame_id']), t_ms=int(data['t_ms']), lighting=Lighting(data['lighting']),
                   features=np.asarray(data['features'], dtype=np.float64),
                   truth=tuple(TruthLabel.from_dict(label) for label in data.get('truth') or ()))

    def to_dict(self) -> dict:
        return {'frame_id': self.frame_id, 't_ms': self.t_ms, 'lighting': self.lighting.value,
                'features': [float(value) for value in self.features],
                'truth': [label.to_dict() for label in self.truth]}


@dataclass(frozen=True)
class Detection:
    category: DetectionClass
    bbox: BoundingBox
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise InvalidDetectionError(f'Confidence {self.confidence} is out of [0, 1]')


@dataclass(frozen=True)
class DetectorProfile:
    """
    Simulated behaviour of a detector on the device.
    :param inference_ms: mean inference latency; the on-device model averages 28 ms
    :param noise_sigma: standard deviation of the gaussian confidence jitter
    :param night_penalty: confidence subtracted on night frames
    :param latency_jitter_ms: standard deviation of the inference latency draw
    """
    inference_ms: float = 28.0
    noise_sigma: float = 0.0
    night_penalty: float = 0.0
    latency_jitter_ms: float = 0.0

    def __post_init__(self):
        if not self.inference_ms > 0:
            raise InvalidDetectionError('Inference latency must be positive')
        if self.noise_sigma < 0 or self.night_penalty < 0 or self.latency_jitter_ms < 0:
            raise InvalidDetectionError('Noise, night penalty and latency jitter cannot be negative')

    @classmethod
    def from_mapping(cls, data: Optional[Mapping]) -> 'DetectorProfile':
        data = data or {}
        return cls(**{key: float(data[key]) for key in
                      ('inference_ms', 'noise_sigma', 'night_penalty', 'latency_jitter_ms') if key in data})

    def to_dict(self) -> dict:
        return {'inference_ms': self.inference_ms, 'noise_sigma': self.noise_sigma,
                'night_penalty': self.night_penalty, 'latency_jitter_ms': self.latency_jitter_ms}
