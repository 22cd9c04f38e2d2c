"""Storage accounting of float32 against quantized weights"""
import enum

from .exceptions import UnsupportedBitWidthError

FLOAT32_BYTES = 4
# scale (8) + zero point (4) + lengths (8)
HEADER_BYTES = 20


class StorageKind(enum.Enum):
    FLOAT32 = 'float32'
    QUANTIZED = 'quantized'


def storage_footprint(kind: StorageKind, n: int, bit_width: int = 8) -> int:
    """
    Returns how many bytes `n` weights take.
    float32 weights take 4 bytes each; quantized ones take one byte each plus a fixed header.
    """
    if n < 0:
        raise ValueError('Number of weights cannot be negative')
    kind = StorageKind(kind)
    if kind is StorageKind.FLOAT32:
        return FLOAT32_BYTES * n
    if bit_width != 8:
        raise UnsupportedBitWidthError(f'Bit width {bit_width} is not supported')
    return n + HEADER_BYTES
