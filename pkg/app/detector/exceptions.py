"""Custom detector exceptions"""


class DimensionMismatchError(ValueError):
    """Raises when a feature vector or a weight vector does not have the configured dimension"""
    pass


class InvalidDetectionError(ValueError):
    """Raises when a detection or a frame breaks its value constraints (confidence, box, timing)"""
    pass
