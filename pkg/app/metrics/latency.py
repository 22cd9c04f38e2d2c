"""Latency samples and their statistics"""
import enum
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from app.detector import Lighting
from .exceptions import EmptySampleSetError


class LatencyKind(str, enum.Enum):
    INFERENCE = 'inference'
    END_TO_END = 'end_to_end'
    UPLOAD = 'upload'


@dataclass(frozen=True)
class LatencySample:
    kind: LatencyKind
    value_ms: float
    lighting: Lighting = Lighting.DAY

    def __post_init__(self):
        if not self.value_ms > 0:
            raise ValueError(f'Latency sample must be positive, got {self.value_ms}')


@dataclass(frozen=True)
class LatencyStats:
    mean_ms: float
    p50: float
    p95: float
    count: int

    def to_dict(self) -> dict:
        return {'mean_ms': self.mean_ms, 'p50': self.p50, 'p95': self.p95, 'count': self.count}


def latency_stats(samples: Iterable[LatencySample], kind: Optional[LatencyKind] = None,
                  lighting: Optional[Lighting] = None) -> LatencyStats:
    """
    Mean and nearest-rank percentiles of the samples which pass the filter.
    :param samples: latency samples
    :param kind: keep only samples of this kind
    :param lighting: keep only samples taken under this lighting
    :return: statistics
    """
    values = np.array([sample.value_ms for sample in samples
                       if (kind is None or sample.kind == kind) and (lighting is None or sample.lighting == lighting)],
                      dtype=np.float64)
    if values.size == 0:
        raise EmptySampleSetError('No latency sample matches the filter')
    # inverted_cdf is the nearest-rank definition: the smallest value with at least p percent of samples at or below
    p50, p95 = np.percentile(values, [50, 95], method='inverted_cdf')
    return LatencyStats(mean_ms=float(values.mean()), p50=float(p50), p95=float(p95), count=int(values.size))
