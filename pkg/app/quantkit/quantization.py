"""Affine (asymmetric) int8 quantization with a zero-inclusive range and its wire codec"""
import struct
from dataclasses import dataclass
from typing import Dict, Sequence, Union

import numpy as np

from . import logger
from .exceptions import EmptyInputError, NonFiniteValueError, UnsupportedBitWidthError, MalformedTensorError

SUPPORTED_BIT_WIDTHS = (8,)
# bit_width, original_len, zero_point, scale
_HEADER = struct.Struct('>BQid')

VectorLike = Union[Sequence[float], np.ndarray]


@dataclass(frozen=True, eq=False)
class QuantizedTensor:
    """
    Int8 representation of a real vector. Each stored quantum maps back to a real number as
    `(q - zero_point) * scale`.
    """
    q_values: np.ndarray
    scale: float
    zero_point: int
    bit_width: int = 8
    original_len: int = 0

    def __post_init__(self):
        levels = 2 ** self.bit_width - 1
        if self.bit_width not in SUPPORTED_BIT_WIDTHS:
            raise UnsupportedBitWidthError(f'Bit width {self.bit_width} is not supported')
        if not self.scale > 0:
            raise ValueError('Scale must be positive')
        if not 0 <= self.zero_point <= levels:
            raise ValueError(f'Zero point {self.zero_point} is out of [0, {levels}]')
        if len(self.q_values) != self.original_len:
            raise ValueError('Original length does not match the number of stored values')
        if len(self.q_values) and (int(self.q_values.min()) < 0 or int(self.q_values.max()) > levels):
            raise ValueError(f'Quantized values must lie in [0, {levels}]')
        self.q_values.flags.writeable = False

    def to_bytes(self) -> bytes:
        """Serializes the tensor: bit width, length, zero point and scale in big-endian order, then one byte a value"""
        header = _HEADER.pack(self.bit_width, self.original_len, self.zero_point, self.scale)
        return header + self.q_values.astype(np.uint8).tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> 'QuantizedTensor':
        """Decodes bytes produced by :meth:`to_bytes`"""
        if len(data) < _HEADER.size:
            raise MalformedTensorError('Quantized tensor header is truncated')
        bit_width, original_len, zero_point, scale = _HEADER.unpack_from(data)
        body = data[_HEADER.size:]
        if len(body) != original_len:
            raise MalformedTensorError(f'Expected {original_len} quantized values, got {len(body)}')
        q_values = np.frombuffer(body, dtype=np.uint8).copy()
        return cls(q_values=q_values, scale=scale, zero_point=zero_point, bit_width=bit_width,
                   original_len=original_len)


def _as_finite_vector(values: VectorLike) -> np.ndarray:
    vector = np.asarray(values, dtype=np.float64).ravel()
    if vector.size == 0:
        raise EmptyInputError('Cannot quantize an empty vector')
    if not np.all(np.isfinite(vector)):
        raise NonFiniteValueError('Vector contains NaN or infinite values')
    return vector


def quantize_affine(values: VectorLike, bit_width: int = 8) -> QuantizedTensor:
    """
    Quantizes a real vector to `bit_width` unsigned integers.
    The quantization range is widened to include zero, so zeroed (pruned) weights stay exact zeros.
    Rounding uses numpy's round-half-to-even.
    :param values: finite real numbers
    :type values: sequence of float or np.ndarray
    :param bit_width: only 8 is supported
    :type bit_width: int
    :return: quantized tensor
    :rtype: QuantizedTensor
    """
    if bit_width not in SUPPORTED_BIT_WIDTHS:
        raise UnsupportedBitWidthError(f'Bit width {bit_width} is not supported, use one of {SUPPORTED_BIT_WIDTHS}')
    vector = _as_finite_vector(values)
    levels = 2 ** bit_width - 1
    range_min = min(0.0, float(vector.min()))
    range_max = max(0.0, float(vector.max()))
    scale = (range_max - range_min) / levels if range_max != range_min else 1.0
    zero_point = int(np.clip(np.round(-range_min / scale), 0, levels))
    q_values = np.clip(np.round(vector / scale) + zero_point, 0, levels).astype(np.uint8)
    return QuantizedTensor(q_values=q_values, scale=scale, zero_point=zero_point, bit_width=bit_width,
                           original_len=vector.size)


def dequantize(qt: QuantizedTensor) -> np.ndarray:
    """Maps every quantum back to a real number"""
    return (qt.q_values.astype(np.float64) - qt.zero_point) * qt.scale


def quantization_error(values: VectorLike, qt: QuantizedTensor) -> Dict[str, float]:
    """Summarizes how far the reconstruction is from the source vector"""
    vector = _as_finite_vector(values)
    error = np.abs(vector - dequantize(qt))
    result = {
        'max_abs_error': float(error.max()),
        'mean_abs_error': float(error.mean()),
        'bound': qt.scale / 2,
    }
    logger.debug(f'Quantization error of {vector.size} values: {result}')
    return result
