from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.l2gd.compressors.base import CompressorSpec

COIN_STREAM = 0
CLIENT_STREAM = 1
MASTER_STREAM = 2
ESTIMATOR_STREAM = 3


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for (seed, key); distinct keys never share draws."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


@dataclass(frozen=True)
class StreamSet:
    """
    Random streams owned by one run.

    The coin stream drives xi_k only, so changing a compressor never changes the
    xi sequence at a fixed seed. Client i compresses with the stream keyed by
    (i, stream_id of its spec); the master by its own stream_id.
    """

    coin: np.random.Generator
    clients: tuple[np.random.Generator, ...]
    master: np.random.Generator

    @classmethod
    def create(cls, seed: int, client_specs: tuple[CompressorSpec, ...], master_spec: CompressorSpec) -> StreamSet:
        return cls(
            coin=stream(seed, COIN_STREAM),
            clients=tuple(
                stream(seed, CLIENT_STREAM, i, spec.stream_id) for i, spec in enumerate(client_specs)
            ),
            master=stream(seed, MASTER_STREAM, master_spec.stream_id),
        )


def estimator_stream(seed: int, purpose: int = 0) -> np.random.Generator:
    """Stream for Monte-Carlo estimators, disjoint from every run stream."""
    return stream(seed, ESTIMATOR_STREAM, purpose)
