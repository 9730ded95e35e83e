"""
Labeled examples and client partitions.

Examples stay sparse (0-based index/value pairs) at the I/O boundary; each client
shard is materialized densely once, on first use.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class LabeledExample:
    indices: tuple[int, ...]
    values: tuple[float, ...]
    label: int

    @classmethod
    def from_dense(cls, features: np.ndarray, label: int) -> LabeledExample:
        nonzero = np.flatnonzero(features)
        return cls(
            indices=tuple(int(i) for i in nonzero),
            values=tuple(float(features[i]) for i in nonzero),
            label=label,
        )

    @property
    def max_index(self) -> int:
        return self.indices[-1] if self.indices else -1

    def dense(self, d: int) -> np.ndarray:
        out = np.zeros(d)
        if self.indices:
            out[list(self.indices)] = self.values
        return out


@dataclass(frozen=True)
class ClientShard:
    features: np.ndarray  # (n_i, d)
    labels: np.ndarray  # (n_i,) with entries in {+1, -1}

    @property
    def size(self) -> int:
        return self.labels.shape[0]


@dataclass(frozen=True)
class PartitionedDataset:
    clients: tuple[tuple[LabeledExample, ...], ...]
    d: int
    name: str = field(default='dataset', compare=False)

    @property
    def n(self) -> int:
        return len(self.clients)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(examples) for examples in self.clients)

    @cached_property
    def shards(self) -> tuple[ClientShard, ...]:
        shards = []
        for examples in self.clients:
            features = np.zeros((len(examples), self.d))
            for row, example in enumerate(examples):
                if example.indices:
                    features[row, list(example.indices)] = example.values
            labels = np.array([example.label for example in examples], dtype=float)
            shards.append(ClientShard(features=features, labels=labels))
        return tuple(shards)

    def pooled(self) -> ClientShard:
        return ClientShard(
            features=np.vstack([shard.features for shard in self.shards]),
            labels=np.concatenate([shard.labels for shard in self.shards]),
        )

    def multiset(self) -> Counter:
        return Counter(example for examples in self.clients for example in examples)
