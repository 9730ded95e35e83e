"""
Compressor descriptions and messages.

- CompressorKind: the operator family
- CompressorSpec: validated kind + parameters + RNG stream id
- CompressedMessage: decoded payload with its bit cost under the accounting contract
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.l2gd.errors import ConfigError


class CompressorKind(str, Enum):
    IDENTITY = 'identity'
    RANDOM_DITHERING = 'random_dithering'
    NATURAL = 'natural'
    TERNGRAD = 'terngrad'
    BERNOULLI = 'bernoulli'
    TOP_K = 'top_k'


UNBIASED_KINDS = frozenset({
    CompressorKind.IDENTITY,
    CompressorKind.RANDOM_DITHERING,
    CompressorKind.NATURAL,
    CompressorKind.TERNGRAD,
    CompressorKind.BERNOULLI,
})


class CompressorSpec(BaseModel):
    """
    One compression operator.

    Only the parameter matching `kind` is used: `levels` (s) for random dithering,
    `q` (keep probability) for Bernoulli, `k` for TopK.
    """

    model_config = ConfigDict(frozen=True, extra='forbid')

    kind: CompressorKind = CompressorKind.IDENTITY
    levels: int = Field(8, ge=1)
    q: float = Field(0.5, gt=0., le=1.)
    k: int = Field(10, ge=1)
    stream_id: int = Field(0, ge=0)

    @property
    def unbiased(self) -> bool:
        return self.kind in UNBIASED_KINDS

    def check_dimension(self, d: int) -> None:
        if self.kind == CompressorKind.TOP_K and self.k > d:
            raise ConfigError(f"top_k: k={self.k} exceeds dimension d={d}")

    def label(self) -> str:
        if self.kind == CompressorKind.RANDOM_DITHERING:
            return f"{self.kind.value}(s={self.levels})"
        if self.kind == CompressorKind.BERNOULLI:
            return f"{self.kind.value}(q={self.q})"
        if self.kind == CompressorKind.TOP_K:
            return f"{self.kind.value}(k={self.k})"
        return self.kind.value


@dataclass(frozen=True)
class CompressedMessage:
    payload: np.ndarray
    bit_cost: int
    survivors: int
