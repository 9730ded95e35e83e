from dataclasses import dataclass

from src.l2gd.errors import ConfigError, DataError
from src.l2gd.loader.dataset import PartitionedDataset


@dataclass(frozen=True)
class ProblemSpec:
    """Partitioned data with the l2 weight on each local loss and the penalty weight lambda."""

    dataset: PartitionedDataset
    l2: float
    lam: float

    def __post_init__(self):
        if self.l2 < 0:
            raise ConfigError(f"l2 must be >= 0, got {self.l2}")
        if self.lam < 0:
            raise ConfigError(f"lambda must be >= 0, got {self.lam}")
        for i, size in enumerate(self.dataset.sizes):
            if size < 1:
                raise DataError(f"client {i} holds no examples")

    @property
    def n(self) -> int:
        return self.dataset.n

    @property
    def d(self) -> int:
        return self.dataset.d
