"""Custom exceptions of the quantization toolkit"""


class EmptyInputError(ValueError):
    """Raises when a weight vector to quantize or prune has no elements"""
    pass


class NonFiniteValueError(ValueError):
    """Raises when a weight vector contains NaN or infinity"""
    pass


class UnsupportedBitWidthError(ValueError):
    """Raises when a bit width other than 8 is requested"""
    pass


class MalformedTensorError(ValueError):
    """Is raised when serialized quantized tensor bytes cannot be decoded"""
    pass
