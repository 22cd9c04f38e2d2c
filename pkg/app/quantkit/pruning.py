"""Magnitude pruning: the smallest weights are cut off as connections between neurons"""
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .exceptions import EmptyInputError
from .quantization import VectorLike


@dataclass(frozen=True)
class PruneReport:
    kept: int
    zeroed: int

    @property
    def sparsity(self) -> float:
        total = self.kept + self.zeroed
        return self.zeroed / total if total else 0.0


def prune_magnitude(values: VectorLike, fraction: float) -> Tuple[np.ndarray, PruneReport]:
    """
    Sets the floor(fraction * n) entries of the smallest absolute value to zero. Ties are broken by the lowest index,
    which is what a stable sort over magnitudes gives. The input is not modified.
    :param values: weights to prune
    :param fraction: share of weights to cut, from 0 to 1
    :return: pruned copy and a report
    """
    vector = np.asarray(values, dtype=np.float64).ravel()
    if vector.size == 0:
        raise EmptyInputError('Cannot prune an empty vector')
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f'Pruning fraction {fraction} is out of [0, 1]')
    count = math.floor(fraction * vector.size)
    pruned = vector.copy()
    order = np.argsort(np.abs(vector), kind='stable')
    pruned[order[:count]] = 0.0
    return pruned, PruneReport(kept=vector.size - count, zeroed=count)
