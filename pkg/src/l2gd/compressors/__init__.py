from src.l2gd.compressors.base import CompressedMessage, CompressorKind, CompressorSpec
from src.l2gd.compressors.operators import (
    bit_cost,
    compress,
    compress_rows,
    joint_variance_factor,
    variance_factor,
)
from src.l2gd.compressors.certify import Certificate, certify_compressor, z_threshold

__all__ = [
    'CompressedMessage',
    'CompressorKind',
    'CompressorSpec',
    'Certificate',
    'bit_cost',
    'certify_compressor',
    'compress',
    'compress_rows',
    'joint_variance_factor',
    'variance_factor',
    'z_threshold',
]
