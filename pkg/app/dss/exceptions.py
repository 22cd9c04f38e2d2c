"""Custom decision support exceptions"""


class TimeRegressionError(ValueError):
    """Raises when a frame is older than the moment the current phase was entered"""
    pass


class InvalidDssConfigError(ValueError):
    """Raises when thresholds or windows of the decision support config are out of range"""
    pass
