"""Custom simulator exceptions"""


class ScenarioError(ValueError):
    """Raises when a scenario (or a strategy or device of a run) is not valid"""
    pass


class ConsentWithheldError(PermissionError):
    """Raises when a session without the passenger's consent is asked for results"""
    pass


class InsufficientComparisonError(ValueError):
    """Is raised when fewer than two strategy and device pairs are compared"""
    pass
