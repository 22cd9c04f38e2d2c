"""Custom agent exceptions"""


class UnknownKeyIdError(KeyError):
    """Raises when the agent holds no key with the id written in an envelope"""
    pass


class DuplicateEnvelopeError(ValueError):
    """Raises when a byte-identical incident (same session, timestamp and checksum) has already been ingested"""
    pass


class IncidentNotFoundError(IndexError):
    """Is raised when there is no incident by given id"""
    pass


class UnknownVehicleError(IndexError):
    """Is raised when there is no registered vehicle by given id"""
    pass


class InvalidRecordError(ValueError):
    """Raises when a vehicle record cannot be registered, e.g. its title is not valid"""
    def __init__(self, message, *args, **kwargs):
        self.message = message
        super().__init__(message, *args, **kwargs)
