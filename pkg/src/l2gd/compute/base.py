"""
Base class of the lazy experiment graph.

LazyNode: typed computation node caching one result per parameter set.
"""
from abc import ABC, abstractmethod
from typing import Any, Generic, Hashable, TypeVar

import numpy as np
from pydantic import BaseModel

T = TypeVar('T')


def cache_key_part(value: Any) -> Hashable:
    """Hashable stand-in for a node parameter: models by their JSON dump, containers recursively."""
    if isinstance(value, BaseModel):
        return type(value).__name__, value.model_dump_json()
    if isinstance(value, (list, tuple)):
        return tuple(cache_key_part(v) for v in value)
    if isinstance(value, dict):
        return tuple(sorted((k, cache_key_part(v)) for k, v in value.items()))
    if isinstance(value, np.ndarray):
        return value.shape, value.tobytes()
    return value


class LazyNode(ABC, Generic[T]):
    """
    A cached step of the experiment graph.

    Subclasses declare their output type through Generic[T], receive upstream
    nodes in __init__ and call them inside compute(). Calling a node with the
    same keyword parameters twice returns the cached object.

    Example:
        class DatasetNode(LazyNode[PartitionedDataset]):
            def compute(self, dataset: DatasetConfig, n: int) -> PartitionedDataset:
                return load_dataset(dataset, n)

        node = DatasetNode()
        a = node(dataset=config.dataset, n=5)  # loads
        b = node(dataset=config.dataset, n=5)  # cache hit, a is b
    """

    def __init__(self):
        self._cache: dict[tuple, T] = {}
        self.hits = 0
        self.misses = 0

    @abstractmethod
    def compute(self, **params) -> T:
        raise NotImplementedError

    def __call__(self, **params) -> T:
        key = tuple((name, cache_key_part(value)) for name, value in sorted(params.items()))
        if key in self._cache:
            self.hits += 1
        else:
            self.misses += 1
            self._cache[key] = self.compute(**params)
        return self._cache[key]

    def clear_cache(self) -> None:
        self._cache.clear()
        self.hits = self.misses = 0

    @property
    def cache_size(self) -> int:
        return len(self._cache)

    def cache_info(self) -> dict:
        return {'size': self.cache_size, 'hits': self.hits, 'misses': self.misses}
