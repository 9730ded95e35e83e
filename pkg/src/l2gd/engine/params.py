from __future__ import annotations

from dataclasses import dataclass

from src.l2gd.compressors.base import CompressorSpec
from src.l2gd.errors import ConfigError


@dataclass(frozen=True)
class L2gdParams:
    eta: float
    p: float
    iterations: int
    client_compressors: tuple[CompressorSpec, ...]
    master_compressor: CompressorSpec
    record_every: int = 1

    def __post_init__(self):
        if not 0. < self.p < 1.:
            raise ConfigError(f"p must lie in (0, 1), got {self.p}")
        if not self.eta > 0:
            raise ConfigError(f"eta must be > 0, got {self.eta}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if self.record_every < 1:
            raise ConfigError(f"record_every must be >= 1, got {self.record_every}")


@dataclass(frozen=True)
class FedAvgParams:
    """
    FedAvg rounds with either a fixed local-step count or, when `p` is set, a count
    drawn each round as the failures of a p-coin before its first success (the
    lengths of L2GD's local phases).
    """

    lr: float
    local_steps: int | None
    rounds: int
    client_compressors: tuple[CompressorSpec, ...]
    master_compressor: CompressorSpec
    record_every: int = 1
    p: float | None = None

    def __post_init__(self):
        if not self.lr > 0:
            raise ConfigError(f"local stepsize must be > 0, got {self.lr}")
        if (self.local_steps is None) == (self.p is None):
            raise ConfigError("set exactly one of local_steps and p")
        if self.local_steps is not None and self.local_steps < 1:
            raise ConfigError(f"local_steps must be >= 1, got {self.local_steps}")
        if self.p is not None and not 0. < self.p < 1.:
            raise ConfigError(f"p must lie in (0, 1), got {self.p}")
        if self.rounds < 1:
            raise ConfigError(f"rounds must be >= 1, got {self.rounds}")
        if self.record_every < 1:
            raise ConfigError(f"record_every must be >= 1, got {self.record_every}")
