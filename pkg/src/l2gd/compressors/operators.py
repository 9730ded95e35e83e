"""
Compression operators, variance factors and bit accounting.

Every operator works on a batch of rows (`compress_rows`), each row compressed
independently; `compress` is the single-vector form used by the engine.

Bit encodings (d = dimension, nnz = surviving nonzeros):
- identity: 32 bits per coordinate
- random dithering: 32-bit norm + d * (1 sign bit + ceil(log2(s+1)) level bits)
- natural: 9 bits per coordinate (sign + 8-bit exponent)
- terngrad: 32-bit scale + 2 bits per coordinate
- bernoulli, top_k: nnz index-value pairs of 32 + ceil(log2 d) bits
"""
import math

import numpy as np

from src.l2gd.compressors.base import CompressedMessage, CompressorKind, CompressorSpec
from src.l2gd.errors import InvariantViolation, NoVarianceCertificate


def _random_dithering(X: np.ndarray, levels: int, rng: np.random.Generator) -> np.ndarray:
    payload = np.zeros_like(X)
    norms = np.linalg.norm(X, axis=1)
    rows = norms > 0
    if not rows.any():
        return payload
    Xr = X[rows]
    scale = norms[rows][:, None]
    ratio = np.abs(Xr) / scale * levels
    lower = np.floor(ratio)
    level = lower + (rng.random(Xr.shape) < ratio - lower)
    payload[rows] = scale * np.sign(Xr) * level / levels
    return payload


def _natural(X: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    magnitude = np.abs(X)
    mantissa, exponent = np.frexp(magnitude)
    lower = np.ldexp(0.5, exponent)
    # magnitude = mantissa * 2**exponent with mantissa in [0.5, 1)
    round_up = rng.random(X.shape) < 2. * mantissa - 1.
    value = np.where(round_up, 2. * lower, lower)
    return np.where(magnitude > 0, np.sign(X) * value, 0.)


def _terngrad(X: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    payload = np.zeros_like(X)
    scale = np.max(np.abs(X), axis=1)
    rows = scale > 0
    if not rows.any():
        return payload
    Xr = X[rows]
    m = scale[rows][:, None]
    keep = rng.random(Xr.shape) < np.abs(Xr) / m
    payload[rows] = m * np.sign(Xr) * keep
    return payload


def _bernoulli(X: np.ndarray, q: float, rng: np.random.Generator) -> np.ndarray:
    keep = rng.random(X.shape) < q
    return np.where(keep, X / q, 0.)


def _top_k(X: np.ndarray, k: int) -> np.ndarray:
    # stable sort on -|x| keeps the lower index first among equal magnitudes
    order = np.argsort(-np.abs(X), axis=1, kind='stable')[:, :k]
    payload = np.zeros_like(X)
    np.put_along_axis(payload, order, np.take_along_axis(X, order, axis=1), axis=1)
    return payload


def compress_rows(spec: CompressorSpec, X: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """
    Compress every row of X independently.

    Returns:
        (payload with the shape of X, survivors per row)
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"compress_rows expects a 2-D batch, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InvariantViolation(f"{spec.label()}: non-finite input vector")
    spec.check_dimension(X.shape[1])

    if spec.kind == CompressorKind.IDENTITY:
        payload = X.copy()
    elif spec.kind == CompressorKind.RANDOM_DITHERING:
        payload = _random_dithering(X, spec.levels, rng)
    elif spec.kind == CompressorKind.NATURAL:
        payload = _natural(X, rng)
    elif spec.kind == CompressorKind.TERNGRAD:
        payload = _terngrad(X, rng)
    elif spec.kind == CompressorKind.BERNOULLI:
        payload = _bernoulli(X, spec.q, rng)
    elif spec.kind == CompressorKind.TOP_K:
        payload = _top_k(X, spec.k)
    else:
        raise ValueError(f"Unknown compressor kind {spec.kind}")
    return payload, np.count_nonzero(payload, axis=1)


def compress(spec: CompressorSpec, x: np.ndarray, rng: np.random.Generator) -> CompressedMessage:
    x = np.asarray(x, dtype=float)
    payload, survivors = compress_rows(spec, x[None, :], rng)
    nnz = int(survivors[0])
    return CompressedMessage(payload=payload[0], bit_cost=bit_cost(spec, x.shape[0], nnz), survivors=nnz)


def bit_cost(spec: CompressorSpec, d: int, survivors: int) -> int:
    """Bits needed to transmit one message of dimension d with `survivors` nonzeros."""
    if spec.kind == CompressorKind.IDENTITY:
        return 32 * d
    if spec.kind == CompressorKind.RANDOM_DITHERING:
        # ceil(log2(s + 1)) == s.bit_length()
        return 32 + d * (1 + spec.levels.bit_length())
    if spec.kind == CompressorKind.NATURAL:
        return 9 * d
    if spec.kind == CompressorKind.TERNGRAD:
        return 32 + 2 * d
    if spec.kind in (CompressorKind.BERNOULLI, CompressorKind.TOP_K):
        # ceil(log2 d) == (d - 1).bit_length()
        return survivors * (32 + (d - 1).bit_length())
    raise ValueError(f"Unknown compressor kind {spec.kind}")


def variance_factor(spec: CompressorSpec, d: int) -> float:
    """Analytic omega with E||C(x) - x||^2 <= omega ||x||^2."""
    if spec.kind == CompressorKind.IDENTITY:
        return 0.
    if spec.kind == CompressorKind.RANDOM_DITHERING:
        s = spec.levels
        return min(d / s ** 2, math.sqrt(d) / s)
    if spec.kind == CompressorKind.NATURAL:
        return 1. / 8.
    if spec.kind == CompressorKind.TERNGRAD:
        # sum_i (m|x_i| - x_i^2) <= (||x||_inf ||x||_1 - ||x||^2) <= (sqrt(d) - 1) ||x||^2
        return math.sqrt(d) - 1.
    if spec.kind == CompressorKind.BERNOULLI:
        return (1. - spec.q) / spec.q
    raise NoVarianceCertificate(spec.kind.value)


def joint_variance_factor(specs: list[CompressorSpec], d: int) -> float:
    """omega of the stacked operator (C_1, ..., C_n): the largest per-client omega."""
    if not specs:
        raise ValueError("joint_variance_factor needs at least one compressor")
    return max(variance_factor(spec, d) for spec in specs)
