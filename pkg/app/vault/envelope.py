"""
Incident envelope format
========================
4 bytes  MAGIC "SMR1"
1 byte   VERSION (0x01)
1 byte   KEY_ID - id of the key the payload was encrypted with
16 bytes SESSION_ID
8 bytes  TIMESTAMP_MS (u64) - milliseconds since epoch
1 byte   CLASS (0 driver, 1 passenger, 2 violation)
2 bytes  CONFIDENCE_X1E4 (u16) - confidence times 10000, at most 10000
4 bytes  PLAINTEXT_CRC32 (u32) - CRC-32 of the payload before encryption
4 bytes  PAYLOAD_LEN (u32)
PAYLOAD_LEN bytes PAYLOAD - payload encrypted with the repeating-key XOR

All integers are big endian. The header travels in clear text so that the agent can route an incident before
decrypting it; only the payload (the captured scene) is encrypted.
"""
import struct
import zlib
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from app.detector import DetectionClass
from .exceptions import InvalidKeyError, MalformedEnvelopeError, BadMagicError, UnsupportedVersionError
from .exceptions import KeyMismatchError, IntegrityFailureError

MAGIC = b'SMR1'
VERSION = 0x01
_HEADER = struct.Struct('>4sBB16sQBHII')
ENVELOPE_HEADER_SIZE = _HEADER.size
MAX_CONFIDENCE_X1E4 = 10000


@dataclass(frozen=True)
class EncryptionKey:
    """Shared key of the device and the agent. The id travels in the envelope, the bytes never do"""
    key_bytes: bytes
    key_id: int = 1

    def __post_init__(self):
        if not self.key_bytes:
            raise InvalidKeyError('Encryption key cannot be empty')
        if not 0 <= self.key_id <= 0xFF:
            raise InvalidKeyError(f'Key id {self.key_id} does not fit into one byte')

    @classmethod
    def from_hex(cls, key_hex: str, key_id: int = 1) -> 'EncryptionKey':
        try:
            key_bytes = bytes.fromhex(key_hex)
        except ValueError as error:
            raise InvalidKeyError('Key is not a valid hex string') from error
        return cls(key_bytes, int(key_id))

    def __repr__(self) -> str:
        return f'EncryptionKey(key_id={self.key_id}, length={len(self.key_bytes)})'


@dataclass(frozen=True)
class IncidentMeta:
    session_id: bytes
    timestamp_ms: int
    category: DetectionClass
    confidence: float

    def __post_init__(self):
        if len(self.session_id) != 16:
            raise ValueError('Session id must be 16 bytes long')
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f'Confidence {self.confidence} is out of [0, 1]')

    @property
    def confidence_x1e4(self) -> int:
        # python round() is half to even
        return round(self.confidence * MAX_CONFIDENCE_X1E4)


@dataclass(frozen=True)
class EnvelopeHeader:
    """Clear-text part of an envelope"""
    version: int
    key_id: int
    session_id: bytes
    timestamp_ms: int
    category: DetectionClass
    confidence_x1e4: int
    plaintext_crc32: int
    payload_len: int

    @property
    def envelope_len(self) -> int:
        return ENVELOPE_HEADER_SIZE + self.payload_len

    def to_meta(self) -> IncidentMeta:
        return IncidentMeta(session_id=self.session_id, timestamp_ms=self.timestamp_ms, category=self.category,
                            confidence=self.confidence_x1e4 / MAX_CONFIDENCE_X1E4)


def xor_transform(data: bytes, key: EncryptionKey) -> bytes:
    """
    XORs every byte with the key repeated over the data length. Applying it twice with the same key gives the data
    back.
    """
    if not data:
        return b''
    buffer = np.frombuffer(data, dtype=np.uint8)
    pad = np.resize(np.frombuffer(key.key_bytes, dtype=np.uint8), buffer.size)
    return np.bitwise_xor(buffer, pad).tobytes()


def seal_incident(payload: bytes, meta: IncidentMeta, key: EncryptionKey) -> bytes:
    """
    Encrypts the payload and packs it together with the incident metadata.
    :param payload: captured scene
    :param meta: session, time, class and confidence of the triggering detection
    :param key: device key
    :return: envelope bytes
    """
    header = _HEADER.pack(MAGIC, VERSION, key.key_id, meta.session_id, meta.timestamp_ms, int(meta.category),
                          meta.confidence_x1e4, zlib.crc32(payload) & 0xFFFFFFFF, len(payload))
    return header + xor_transform(payload, key)


def parse_envelope_header(envelope: bytes) -> EnvelopeHeader:
    """Validates the framing of envelope bytes and decodes the clear-text header without touching the payload"""
    if len(envelope) < ENVELOPE_HEADER_SIZE:
        raise MalformedEnvelopeError(f'Envelope has {len(envelope)} bytes, the header alone takes '
                                     f'{ENVELOPE_HEADER_SIZE}')
    magic, version, key_id, session_id, timestamp_ms, category, confidence_x1e4, crc, payload_len = \
        _HEADER.unpack_from(envelope)
    if magic != MAGIC:
        raise BadMagicError(f'Envelope magic {magic!r} is not {MAGIC!r}')
    if version != VERSION:
        raise UnsupportedVersionError(f'Envelope version {version} is not supported')
    if len(envelope) != ENVELOPE_HEADER_SIZE + payload_len:
        raise MalformedEnvelopeError(f'Envelope declares {payload_len} payload bytes but carries '
                                     f'{len(envelope) - ENVELOPE_HEADER_SIZE}')
    if confidence_x1e4 > MAX_CONFIDENCE_X1E4:
        raise MalformedEnvelopeError(f'Confidence {confidence_x1e4} exceeds {MAX_CONFIDENCE_X1E4}')
    try:
        category = DetectionClass(category)
    except ValueError as error:
        raise MalformedEnvelopeError(f'Unknown class code {category}') from error
    return EnvelopeHeader(version=version, key_id=key_id, session_id=session_id, timestamp_ms=timestamp_ms,
                          category=category, confidence_x1e4=confidence_x1e4, plaintext_crc32=crc,
                          payload_len=payload_len)


def open_incident(envelope: bytes, key: EncryptionKey) -> Tuple[IncidentMeta, bytes]:
    """
    Checks and decrypts an envelope.
    :param envelope: envelope bytes
    :param key: key with the id written in the envelope
    :return: metadata and decrypted payload
    """
    header = parse_envelope_header(envelope)
    if header.key_id != key.key_id:
        raise KeyMismatchError(f'Envelope was sealed with key {header.key_id}, not with key {key.key_id}')
    payload = xor_transform(envelope[ENVELOPE_HEADER_SIZE:], key)
    if zlib.crc32(payload) & 0xFFFFFFFF != header.plaintext_crc32:
        raise IntegrityFailureError('Payload checksum does not match: wrong key or corrupted envelope')
    return header.to_meta(), payload


def declared_envelope_len(data: bytes) -> int:
    """Total envelope length declared by a header prefix. Lets a reader split a stream of concatenated envelopes"""
    if len(data) < ENVELOPE_HEADER_SIZE:
        raise MalformedEnvelopeError('Envelope header is truncated')
    return ENVELOPE_HEADER_SIZE + _HEADER.unpack_from(data)[-1]
