"""
Monte-Carlo estimators of the analysis constants and of the protocol's expectations.

All estimators take an owned generator and return running statistics, so the
reported value always comes with its standard error.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.l2gd.aggregate import Aggregate
from src.l2gd.compressors.base import CompressorSpec
from src.l2gd.compressors.operators import joint_variance_factor, variance_factor
from src.l2gd.engine.l2gd import compressed_average_rows, sample_stochastic_gradients
from src.l2gd.errors import ConfigError
from src.l2gd.objective.models import PersonalizedObjective
from src.l2gd.objective.stacked import StackedModel
from src.l2gd.theory.constants import compression_factor

MIN_BETA_SAMPLES = 10_000


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    samples: int

    def to_dict(self) -> dict:
        return {'value': self.value, 'stderr': self.stderr, 'samples': self.samples}


def _batches(samples: int, batch: int):
    remaining = samples
    while remaining > 0:
        m = min(batch, remaining)
        yield m
        remaining -= m


def master_average_estimate(
        x: StackedModel,
        client_specs: tuple[CompressorSpec, ...],
        master_spec: CompressorSpec,
        samples: int,
        rng: np.random.Generator,
        batch: int = 10_000,
) -> Aggregate:
    """Coordinatewise statistics of C_M(mean_i C_i(x_i)); its mean is x_bar for unbiased compressors."""
    out = Aggregate()
    for m in _batches(samples, batch):
        out.update(Aggregate.of(compressed_average_rows(x.blocks, client_specs, master_spec, m, rng)))
    return out


def broadcast_error(
        x: StackedModel,
        client_specs: tuple[CompressorSpec, ...],
        master_spec: CompressorSpec,
        samples: int,
        rng: np.random.Generator,
        batch: int = 10_000,
) -> Aggregate:
    """Statistics of ||C_M(y_bar) - x_bar||^2."""
    average = x.average
    out = Aggregate()
    for m in _batches(samples, batch):
        broadcast = compressed_average_rows(x.blocks, client_specs, master_spec, m, rng)
        out.update(Aggregate.of(np.sum(np.square(broadcast - average), axis=1)))
    return out


def beta_estimate(
        x_star: StackedModel,
        client_specs: tuple[CompressorSpec, ...],
        master_spec: CompressorSpec,
        samples: int,
        rng: np.random.Generator,
        batch: int = 10_000,
) -> Estimate:
    """
    beta = 2 (4 omega + 4 omega_M (1 + omega)) ||x*||^2 + 4 E||Q C_M(y_bar*) - Q x_bar*||^2.

    The first term is exact; ||Q v||^2 = n ||v||^2 turns the second into 4 n E||C_M(y_bar*) - x_bar*||^2.
    Raises NoVarianceCertificate for biased compressors and ConfigError below MIN_BETA_SAMPLES draws.
    """
    if samples < MIN_BETA_SAMPLES:
        raise ConfigError(f"beta needs at least {MIN_BETA_SAMPLES} Monte-Carlo samples, got {samples}")
    omega = joint_variance_factor(list(client_specs), x_star.d)
    omega_M = variance_factor(master_spec, x_star.d)
    exact = 2. * compression_factor(omega, omega_M) * float(np.sum(np.square(x_star.blocks)))
    error = broadcast_error(x_star, client_specs, master_spec, samples, rng, batch).scaled(4. * x_star.n)
    return Estimate(value=exact + float(error.p), stderr=float(error.stderr), samples=samples)


def gradient_second_moment(
        objective: PersonalizedObjective,
        x: StackedModel,
        p: float,
        client_specs: tuple[CompressorSpec, ...],
        master_spec: CompressorSpec,
        samples: int,
        rng: np.random.Generator,
        batch: int = 10_000,
) -> Estimate:
    """
    E||G(x)||^2 over independent Bernoulli(p) draws of (xi_k, xi_{k-1}).

    The expectation over xi is taken exactly:
    (1-p) ||G_local||^2 + p (1-p) E||G_fresh||^2 + p^2 ||G_settled||^2,
    only the fresh-broadcast term is sampled.
    """
    n = objective.n
    local = objective.local_gradients(x.blocks) / (n * (1. - p))
    pull = objective.lam / (n * p)
    settled = pull * (x.blocks - x.average)

    fresh = Aggregate()
    for m in _batches(samples, batch):
        broadcast = compressed_average_rows(x.blocks, client_specs, master_spec, m, rng)
        draws = pull * (x.blocks[None, :, :] - broadcast[:, None, :])
        fresh.update(Aggregate.of(np.sum(np.square(draws), axis=(1, 2))))

    weight = p * (1. - p)
    value = (1. - p) * float(np.sum(local * local)) + weight * float(fresh.p) + p * p * float(np.sum(settled * settled))
    return Estimate(value=value, stderr=weight * float(fresh.stderr), samples=samples)


def gradient_mean_estimate(
        objective: PersonalizedObjective,
        x: StackedModel,
        p: float,
        client_specs: tuple[CompressorSpec, ...],
        master_spec: CompressorSpec,
        samples: int,
        rng: np.random.Generator,
        batch: int = 2_000,
) -> Aggregate:
    """Coordinatewise statistics of G(x); its mean is grad F(x) for unbiased compressors."""
    mean, _ = sample_stochastic_gradients(objective, x, p, client_specs, master_spec, samples, rng, batch)
    return mean


def aggregation_error(
        x: StackedModel,
        x_star: StackedModel,
        client_specs: tuple[CompressorSpec, ...],
        master_spec: CompressorSpec,
        samples: int,
        rng: np.random.Generator,
        batch: int = 10_000,
) -> Aggregate:
    """Statistics of ||x - Q C_M(y_bar) - x* + Q C_M(y_bar*)||^2 with independent compressions at x and x*."""
    offset = x.blocks - x_star.blocks
    out = Aggregate()
    for m in _batches(samples, batch):
        at_x = compressed_average_rows(x.blocks, client_specs, master_spec, m, rng)
        at_star = compressed_average_rows(x_star.blocks, client_specs, master_spec, m, rng)
        diff = offset[None, :, :] - (at_x - at_star)[:, None, :]
        out.update(Aggregate.of(np.sum(np.square(diff), axis=(1, 2))))
    return out
