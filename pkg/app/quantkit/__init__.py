"""Post-training affine quantization and magnitude pruning of detector weights"""
import logging

logger = logging.getLogger(__name__)

from .quantization import QuantizedTensor, quantize_affine, dequantize, quantization_error
from .pruning import PruneReport, prune_magnitude
from .footprint import StorageKind, storage_footprint, HEADER_BYTES, FLOAT32_BYTES
