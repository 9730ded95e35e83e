"""
Personalized objective F(x) = f(x) + h(x) over a stacked model x = (x_1, ..., x_n).

- f(x) = (1/n) sum_i f_i(x_i), f_i the mean margin loss on client i plus (l2/2)||x_i||^2
- h(x) = (1/n) sum_i (lambda/2) ||x_i - x_bar||^2

Objectives:
- PersonalizedObjective: base class; subclasses define the per-example margin loss
  - LogisticObjective: log(1 + exp(-b a^T x)), convex
  - SigmoidObjective: 1 / (1 + exp(b a^T x)), smooth and nonconvex
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import expit

from src.l2gd.objective.problem import ProblemSpec
from src.l2gd.objective.stacked import StackedModel, block_average


@dataclass(frozen=True)
class SmoothnessConstants:
    L_f: float
    L: float
    mu: float
    L_F: float
    strongly_convex: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Accuracy:
    personalized: tuple[float, ...]
    personalized_pooled: float
    averaged_pooled: float

    def to_dict(self) -> dict:
        return {
            'personalized': list(self.personalized),
            'personalized_pooled': self.personalized_pooled,
            'averaged_pooled': self.averaged_pooled,
        }


def _blocks(x: StackedModel | np.ndarray) -> np.ndarray:
    return x.blocks if isinstance(x, StackedModel) else np.asarray(x, dtype=float)


def _average(x: StackedModel | np.ndarray) -> np.ndarray:
    return x.average if isinstance(x, StackedModel) else block_average(np.asarray(x, dtype=float))


class PersonalizedObjective:

    name: str = 'base'
    # sup of |second derivative| of the margin loss
    curvature: float = 0.
    convex: bool = True

    def __init__(self, problem: ProblemSpec):
        self.problem = problem
        self.shards = problem.dataset.shards

    @property
    def n(self) -> int:
        return self.problem.n

    @property
    def d(self) -> int:
        return self.problem.d

    @property
    def lam(self) -> float:
        return self.problem.lam

    @property
    def l2(self) -> float:
        return self.problem.l2

    def margin_loss(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def margin_slope(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _margins(self, i: int, x_i: np.ndarray) -> np.ndarray:
        shard = self.shards[i]
        return shard.labels * (shard.features @ x_i)

    def local_loss(self, i: int, x_i: np.ndarray) -> float:
        z = self._margins(i, x_i)
        return float(np.mean(self.margin_loss(z)) + 0.5 * self.l2 * float(x_i @ x_i))

    def local_gradient(self, i: int, x_i: np.ndarray) -> np.ndarray:
        shard = self.shards[i]
        z = self._margins(i, x_i)
        weights = shard.labels * self.margin_slope(z) / shard.size
        return shard.features.T @ weights + self.l2 * x_i

    def local_gradients(self, blocks: np.ndarray) -> np.ndarray:
        """Stack of the un-normalized client gradients grad f_i(x_i)."""
        return np.stack([self.local_gradient(i, blocks[i]) for i in range(self.n)])

    def f_value(self, x: StackedModel | np.ndarray) -> float:
        blocks = _blocks(x)
        return sum(self.local_loss(i, blocks[i]) for i in range(self.n)) / self.n

    def f_gradient(self, x: StackedModel | np.ndarray) -> np.ndarray:
        return self.local_gradients(_blocks(x)) / self.n

    def h_value(self, x: StackedModel | np.ndarray) -> float:
        spread = _blocks(x) - _average(x)
        return 0.5 * self.lam * float(np.sum(spread * spread)) / self.n

    def h_gradient(self, x: StackedModel | np.ndarray) -> np.ndarray:
        return (self.lam / self.n) * (_blocks(x) - _average(x))

    def value(self, x: StackedModel | np.ndarray) -> float:
        return self.f_value(x) + self.h_value(x)

    def gradient(self, x: StackedModel | np.ndarray) -> np.ndarray:
        return self.f_gradient(x) + self.h_gradient(x)

    def smoothness_constants(self) -> SmoothnessConstants:
        per_client = []
        for shard in self.shards:
            spectral = float(np.linalg.norm(shard.features, ord=2)) ** 2 if shard.features.size else 0.
            per_client.append(self.curvature * spectral / shard.size + self.l2)
        L_f = max(per_client) / self.n
        strongly_convex = self.convex and self.l2 > 0
        return SmoothnessConstants(
            L_f=L_f,
            L=self.n * L_f,
            mu=self.l2 / self.n if strongly_convex else 0.,
            L_F=L_f + self.lam / self.n,
            strongly_convex=strongly_convex,
        )

    def accuracy(self, x: StackedModel | np.ndarray) -> Accuracy:
        blocks = _blocks(x)
        average = _average(x)
        personalized = []
        correct = 0
        for i, shard in enumerate(self.shards):
            hits = int(np.sum(_predict(shard.features, blocks[i]) == shard.labels))
            personalized.append(hits / shard.size)
            correct += hits
        pooled = self.problem.dataset.pooled()
        averaged_hits = int(np.sum(_predict(pooled.features, average) == pooled.labels))
        return Accuracy(
            personalized=tuple(personalized),
            personalized_pooled=correct / pooled.size,
            averaged_pooled=averaged_hits / pooled.size,
        )


def _predict(features: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.where(features @ w >= 0, 1., -1.)


class LogisticObjective(PersonalizedObjective):

    name = 'logistic'
    curvature = 0.25
    convex = True

    def margin_loss(self, z: np.ndarray) -> np.ndarray:
        # log(1 + exp(-z)) without overflow for large |z|
        return np.logaddexp(0., -z)

    def margin_slope(self, z: np.ndarray) -> np.ndarray:
        return -expit(-z)


class SigmoidObjective(PersonalizedObjective):

    name = 'sigmoid'
    curvature = 1. / (6. * np.sqrt(3.))
    convex = False

    def margin_loss(self, z: np.ndarray) -> np.ndarray:
        return expit(-z)

    def margin_slope(self, z: np.ndarray) -> np.ndarray:
        return -expit(z) * expit(-z)


OBJECTIVES: dict[str, type[PersonalizedObjective]] = {
    LogisticObjective.name: LogisticObjective,
    SigmoidObjective.name: SigmoidObjective,
}


def build_objective(problem: ProblemSpec, loss: str = 'logistic') -> PersonalizedObjective:
    try:
        return OBJECTIVES[loss](problem)
    except KeyError:
        raise ValueError(f"Unknown loss '{loss}', expected one of {sorted(OBJECTIVES)}") from None
