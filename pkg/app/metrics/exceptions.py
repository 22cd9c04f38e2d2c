"""Custom metrics exceptions"""


class ZeroDenominatorError(ZeroDivisionError):
    """Raises when a score is undefined because its denominator is zero. `score` names it"""
    def __init__(self, score: str):
        self.score = score
        super().__init__(f'{score} is undefined, its denominator is zero')


class EmptySampleSetError(ValueError):
    """Raises when no latency sample is left after filtering"""
    pass
