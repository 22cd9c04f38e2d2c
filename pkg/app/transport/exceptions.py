"""Custom transport exceptions"""


class QueueFullError(OverflowError):
    """Raises when the outbound queue has reached its capacity"""
    pass


class InvalidLinkModelError(ValueError):
    """Raises when link intervals overlap, are unsorted or have non-positive bandwidth"""
    pass
