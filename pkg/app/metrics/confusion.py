"""Binary confusion matrix of violation detections against ground truth"""
from dataclasses import dataclass, replace
from typing import Iterable, Tuple

from .exceptions import ZeroDenominatorError


@dataclass(frozen=True)
class Scores:
    precision: float
    recall: float
    accuracy: float

    def to_dict(self) -> dict:
        return {'precision': self.precision, 'recall': self.recall, 'accuracy': self.accuracy}


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts of violation predictions. Positive class is a violation"""
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError('Confusion matrix counts cannot be negative')

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def update(self, predicted_violation: bool, actual_violation: bool) -> 'ConfusionMatrix':
        """Returns a new matrix with exactly one counter incremented"""
        if predicted_violation and actual_violation:
            return replace(self, tp=self.tp + 1)
        if predicted_violation:
            return replace(self, fp=self.fp + 1)
        if actual_violation:
            return replace(self, fn=self.fn + 1)
        return replace(self, tn=self.tn + 1)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[bool, bool]]) -> 'ConfusionMatrix':
        """Replays `(predicted, actual)` pairs starting from the zero matrix"""
        matrix = cls()
        for predicted, actual in pairs:
            matrix = matrix.update(bool(predicted), bool(actual))
        return matrix

    def __add__(self, other: 'ConfusionMatrix') -> 'ConfusionMatrix':
        return ConfusionMatrix(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn)

    def scores(self) -> Scores:
        """
        precision = tp / (tp + fp), recall = tp / (tp + fn), accuracy = (tp + tn) / total.
        :raises ZeroDenominatorError: naming the first score which is undefined
        """
        if self.tp + self.fp == 0:
            raise ZeroDenominatorError('precision')
        if self.tp + self.fn == 0:
            raise ZeroDenominatorError('recall')
        if self.total == 0:
            raise ZeroDenominatorError('accuracy')
        return Scores(precision=self.tp / (self.tp + self.fp), recall=self.tp / (self.tp + self.fn),
                      accuracy=(self.tp + self.tn) / self.total)

    def to_dict(self) -> dict:
        return {'tp': self.tp, 'fp': self.fp, 'fn': self.fn, 'tn': self.tn}


# published camera evaluations over 51 labelled scenes each
REAR_CAMERA_MATRIX = ConfusionMatrix(tp=41, fp=4, fn=1, tn=5)
FRONT_CAMERA_MATRIX = ConfusionMatrix(tp=39, fp=4, fn=3, tn=5)
