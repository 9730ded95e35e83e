from __future__ import annotations

from typing import Sequence

import numpy as np

from src.l2gd.errors import ConfigError
from src.l2gd.loader.dataset import LabeledExample, PartitionedDataset


def split_sizes(count: int, n: int) -> list[int]:
    """Equal split; the remainder goes to the first clients."""
    if n < 1:
        raise ConfigError(f"number of clients must be >= 1, got {n}")
    if n > count:
        raise ConfigError(f"cannot split {count} examples across {n} clients")
    base, remainder = divmod(count, n)
    return [base + 1 if i < remainder else base for i in range(n)]


def partition_sequential(
        examples: Sequence[LabeledExample], n: int, d: int, name: str = 'dataset'
) -> PartitionedDataset:
    """Contiguous blocks in file order."""
    clients = []
    start = 0
    for size in split_sizes(len(examples), n):
        clients.append(tuple(examples[start:start + size]))
        start += size
    return PartitionedDataset(clients=tuple(clients), d=d, name=name)


def partition_shuffled(
        examples: Sequence[LabeledExample], n: int, d: int, seed: int, name: str = 'dataset'
) -> PartitionedDataset:
    """Seeded permutation followed by the sequential split."""
    order = np.random.default_rng(seed).permutation(len(examples))
    return partition_sequential([examples[i] for i in order], n, d, name=name)
