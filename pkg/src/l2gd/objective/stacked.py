from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.l2gd.errors import InvariantViolation


def block_average(blocks: np.ndarray) -> np.ndarray:
    """
    Mean over the client axis (axis -2), accumulated client by client.

    Works for a single stacked model (n, d) and for batches (m, n, d); the
    summation order is fixed so equal inputs give bit-identical averages.
    """
    n = blocks.shape[-2]
    total = np.zeros(blocks.shape[:-2] + blocks.shape[-1:])
    for i in range(n):
        total += blocks[..., i, :]
    return total / n


@dataclass(frozen=True, eq=False)
class StackedModel:
    """The iterate x in R^{nd}: n personalized blocks of dimension d plus the cached average."""

    blocks: np.ndarray
    cached_average: np.ndarray | None = None

    @classmethod
    def of(cls, blocks: np.ndarray) -> StackedModel:
        blocks = np.array(blocks, dtype=float)
        if blocks.ndim != 2:
            raise ValueError(f"StackedModel expects (n, d) blocks, got shape {blocks.shape}")
        return cls(blocks=blocks, cached_average=block_average(blocks))

    @classmethod
    def zeros(cls, n: int, d: int) -> StackedModel:
        return cls.of(np.zeros((n, d)))

    @classmethod
    def consensus(cls, w: np.ndarray, n: int) -> StackedModel:
        """Qw: every block equal to w."""
        return cls.of(np.tile(np.asarray(w, dtype=float), (n, 1)))

    @property
    def n(self) -> int:
        return self.blocks.shape[0]

    @property
    def d(self) -> int:
        return self.blocks.shape[1]

    @property
    def average(self) -> np.ndarray:
        if self.cached_average is not None:
            return self.cached_average
        return block_average(self.blocks)

    def flat(self) -> np.ndarray:
        return self.blocks.ravel()

    def distance_sq(self, other: StackedModel) -> float:
        diff = self.blocks - other.blocks
        return float(np.sum(diff * diff))

    def block_distances_sq(self, other: StackedModel) -> np.ndarray:
        diff = self.blocks - other.blocks
        return np.sum(diff * diff, axis=1)

    def check(self) -> None:
        if not np.all(np.isfinite(self.blocks)):
            raise InvariantViolation("non-finite iterate")
        if self.cached_average is None:
            return
        drift = float(np.linalg.norm(self.cached_average - block_average(self.blocks)))
        if drift > 1e-12 * max(1., float(np.linalg.norm(self.blocks))):
            raise InvariantViolation(f"cached average drifted from the block mean by {drift:.3g}")
