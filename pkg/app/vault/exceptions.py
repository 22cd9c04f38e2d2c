"""Custom vault exceptions"""


class InvalidKeyError(ValueError):
    """Raises when an encryption key is empty or its id does not fit into one byte"""
    pass


class MalformedEnvelopeError(ValueError):
    """Raises when envelope bytes are truncated or their length does not match the declared payload length"""
    pass


class BadMagicError(MalformedEnvelopeError):
    """Raises when envelope bytes do not start with the envelope magic"""
    pass


class UnsupportedVersionError(MalformedEnvelopeError):
    """Raises when the envelope format version is unknown"""
    pass


class KeyMismatchError(ValueError):
    """Raises when the envelope was sealed with a key of another id"""
    pass


class IntegrityFailureError(ValueError):
    """Raises when the checksum of the decrypted payload does not match. Signals a wrong key or corruption"""
    pass


class StorageFullError(OSError):
    """Raises when the device store has no room for one more incident"""
    pass


class DuplicateIncidentError(FileExistsError):
    """Raises when an incident file with the same name has already been stored"""
    pass
