from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from src.l2gd.objective.models import PersonalizedObjective
from src.l2gd.objective.stacked import StackedModel

TRACE_SCHEMA = 1


@dataclass(frozen=True)
class TraceRecord:
    """
    Metrics after iteration k (k = 0 is the initial point, xi is None there).

    Bit counters are cumulative; `downlink_bits` counts each broadcast once and
    `downlink_bits_total` counts it once per client.
    """

    k: int
    xi: int | None
    loss: float
    f: float
    h: float
    dist_sq: float | None
    block_dist_sq: tuple[float, ...] | None
    uplink_bits: int
    downlink_bits: int
    downlink_bits_total: int
    rounds: int

    def to_dict(self) -> dict:
        return {
            'schema': TRACE_SCHEMA,
            'k': self.k,
            'xi': self.xi,
            'loss': self.loss,
            'f': self.f,
            'h': self.h,
            'dist_sq': self.dist_sq,
            'block_dist_sq': None if self.block_dist_sq is None else list(self.block_dist_sq),
            'uplink_bits': self.uplink_bits,
            'downlink_bits': self.downlink_bits,
            'downlink_bits_total': self.downlink_bits_total,
            'rounds': self.rounds,
        }


def measure(
        objective: PersonalizedObjective,
        x: StackedModel,
        k: int,
        xi: int | None,
        uplink_bits: int,
        downlink_bits: int,
        rounds: int,
        x_star: StackedModel | None = None,
) -> TraceRecord:
    f = objective.f_value(x)
    h = objective.h_value(x)
    dist_sq = block_dist_sq = None
    if x_star is not None:
        per_block = x.block_distances_sq(x_star)
        block_dist_sq = tuple(float(v) for v in per_block)
        dist_sq = float(np.sum(per_block))
    return TraceRecord(
        k=k,
        xi=xi,
        loss=f + h,
        f=f,
        h=h,
        dist_sq=dist_sq,
        block_dist_sq=block_dist_sq,
        uplink_bits=uplink_bits,
        downlink_bits=downlink_bits,
        downlink_bits_total=downlink_bits * objective.n,
        rounds=rounds,
    )


@dataclass
class MetricsTrace:
    algorithm: str
    n: int
    seed: int
    records: list[TraceRecord] = field(default_factory=list)
    # final iterate (Qw for fedavg)
    model: StackedModel | None = None

    def append(self, record: TraceRecord) -> None:
        self.records.append(record)

    @property
    def initial(self) -> TraceRecord:
        return self.records[0]

    @property
    def final(self) -> TraceRecord:
        return self.records[-1]

    def losses(self) -> np.ndarray:
        return np.array([record.loss for record in self.records])

    def distances(self) -> np.ndarray:
        return np.array([np.nan if r.dist_sq is None else r.dist_sq for r in self.records])

    @property
    def total_bits(self) -> int:
        return self.final.uplink_bits + self.final.downlink_bits_total

    @property
    def bits_per_client(self) -> float:
        """(uplink + downlink counted once per broadcast) / n."""
        return (self.final.uplink_bits + self.final.downlink_bits) / self.n

    def summary(self) -> dict:
        final = self.final
        return {
            'algorithm': self.algorithm,
            'seed': self.seed,
            'iterations': final.k,
            'initial_loss': self.initial.loss,
            'final_loss': final.loss,
            'final_f': final.f,
            'final_h': final.h,
            'final_dist_sq': final.dist_sq,
            'uplink_bits': final.uplink_bits,
            'downlink_bits': final.downlink_bits,
            'downlink_bits_total': final.downlink_bits_total,
            'total_bits': self.total_bits,
            'bits_per_client': self.bits_per_client,
            'rounds': final.rounds,
            'round_frequency': final.rounds / final.k if final.k else 0.,
        }
