"""
Convergence bounds and deterministic or Monte-Carlo checks of the intermediate inequalities.

- strongly_convex_bound: (1 - eta mu / n)^k ||x0 - x*||^2 + n eta delta / mu
- nonconvex_budget: stepsize and iteration count reaching min_k E||grad F(x^k)|| <= eps
- recursion_bound_check: the descent recursion behind the nonconvex budget
- iterate_norm_check: ||x||^2 <= (4/mu)(F(x) - F*) + 2 ||x*||^2
- aggregation_error_check: the aggregation error bound with the Monte-Carlo beta
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from src.l2gd.compressors.base import CompressorSpec
from src.l2gd.errors import ConfigError
from src.l2gd.objective.models import PersonalizedObjective
from src.l2gd.objective.stacked import StackedModel
from src.l2gd.theory.estimators import Estimate, aggregation_error


@dataclass(frozen=True)
class StronglyConvexBound:
    values: np.ndarray
    neighborhood: float
    contraction: float
    precondition_ok: bool | None


def strongly_convex_bound(
        k: int | np.ndarray,
        x0: StackedModel,
        x_star: StackedModel,
        eta: float,
        mu: float,
        n: int,
        delta: float,
        gamma: float | None = None,
) -> StronglyConvexBound:
    """Bound on E||x^k - x*||^2 at every k given; `gamma` enables the eta <= 1/(2 gamma) check."""
    if mu <= 0:
        raise ConfigError("the strongly convex bound needs mu > 0")
    contraction = 1. - eta * mu / n
    neighborhood = n * eta * delta / mu
    ks = np.asarray(k, dtype=float)
    values = contraction ** ks * x0.distance_sq(x_star) + neighborhood

    precondition_ok = None
    if gamma is not None:
        precondition_ok = eta <= 1. / (2. * gamma) * (1. + 1e-12)
        if not precondition_ok:
            logging.warning(f"stepsize {eta:.4g} exceeds 1/(2 gamma) = {1. / (2. * gamma):.4g}; the bound may not hold")
    return StronglyConvexBound(
        values=values,
        neighborhood=neighborhood,
        contraction=contraction,
        precondition_ok=precondition_ok,
    )


@dataclass(frozen=True)
class NonconvexBudget:
    eta: float
    iterations: int

    def to_dict(self) -> dict:
        return {'eta': self.eta, 'iterations': self.iterations}


def nonconvex_budget(epsilon: float, L: float, gamma: float, delta: float, gap: float) -> NonconvexBudget:
    """
    K = ceil((6 L / eps^4) max{12 gamma gap^2, delta}), eta = min{1 / sqrt(2 L gamma K), eps^2 / (L delta)}.

    gap is F(x0) - F(x*) (or a lower bound of F in place of F(x*)).
    """
    if epsilon <= 0:
        raise ConfigError(f"epsilon must be > 0, got {epsilon}")
    if L <= 0 or gamma <= 0 or delta < 0 or gap < 0:
        raise ConfigError(f"need L, gamma > 0 and delta, gap >= 0; got L={L}, gamma={gamma}, delta={delta}, gap={gap}")
    iterations = max(1, math.ceil(6. * L / epsilon ** 4 * max(12. * gamma * gap ** 2, delta)))
    eta = 1. / math.sqrt(2. * L * gamma * iterations)
    if delta > 0:
        eta = min(eta, epsilon ** 2 / (L * delta))
    return NonconvexBudget(eta=eta, iterations=iterations)


def recursion_bound_check(
        p_seq: np.ndarray,
        q_seq: np.ndarray,
        a: float,
        b: float,
        c: float,
        tol: float = 1e-9,
) -> bool:
    """
    Given p_{k+1} <= (1 + a) p_k - b q_k + c for k < K (K = len(p_seq) - 1), check
    min_{k<K} q_k <= (1 + a)^K p_0 / (b K) + c / b.

    Raises ConfigError when the inputs violate the recursion's preconditions.
    """
    p_seq = np.asarray(p_seq, dtype=float)
    q_seq = np.asarray(q_seq, dtype=float)
    K = len(p_seq) - 1
    if K < 1 or len(q_seq) < K:
        raise ConfigError(f"need at least two p values and K = {K} q values")
    if a < 0 or c < 0 or b <= 0:
        raise ConfigError(f"need a, c >= 0 and b > 0; got a={a}, b={b}, c={c}")
    if np.any(p_seq < 0) or np.any(q_seq < 0):
        raise ConfigError("sequences must be non-negative")
    q_seq = q_seq[:K]
    rhs = (1. + a) * p_seq[:-1] - b * q_seq + c
    slack = tol * (1. + np.abs((1. + a) * p_seq[:-1]) + b * q_seq + c)
    if np.any(p_seq[1:] > rhs + slack):
        raise ConfigError("sequences violate p_{k+1} <= (1 + a) p_k - b q_k + c")
    bound = (1. + a) ** K * p_seq[0] / (b * K) + c / b
    return bool(np.min(q_seq) <= bound * (1. + tol) + tol)


@dataclass(frozen=True)
class InequalityCheck:
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + 1e-12 * max(1., abs(self.rhs))

    def to_dict(self) -> dict:
        return {'lhs': self.lhs, 'rhs': self.rhs, 'holds': self.holds}


def iterate_norm_check(
        objective: PersonalizedObjective,
        x: StackedModel,
        x_star: StackedModel,
        value_star: float | None = None,
) -> InequalityCheck:
    mu = objective.smoothness_constants().mu
    if mu <= 0:
        raise ConfigError("iterate_norm_check needs a strongly convex objective")
    value_star = objective.value(x_star) if value_star is None else value_star
    lhs = float(np.sum(np.square(x.blocks)))
    rhs = 4. / mu * (objective.value(x) - value_star) + 2. * float(np.sum(np.square(x_star.blocks)))
    return InequalityCheck(lhs=lhs, rhs=rhs)


def aggregation_error_check(
        objective: PersonalizedObjective,
        x: StackedModel,
        x_star: StackedModel,
        client_specs: tuple[CompressorSpec, ...],
        master_spec: CompressorSpec,
        alpha: float,
        beta: Estimate,
        samples: int,
        rng: np.random.Generator,
        threshold: float = 4.,
) -> InequalityCheck:
    """
    E||x - Q C_M(y_bar) - x* + Q C_M(y_bar*)||^2
        <= (4 n^2 / lam^2) ||grad h(x) - grad h(x*)||^2 + alpha (F(x) - F(x*)) + beta.

    Both sides carry Monte-Carlo error; the check compares lower and upper confidence ends.
    """
    lam = objective.lam
    if lam <= 0:
        raise ConfigError("aggregation_error_check needs lambda > 0")
    error = aggregation_error(x, x_star, client_specs, master_spec, samples, rng)
    h_diff = objective.h_gradient(x) - objective.h_gradient(x_star)
    rhs = (
        4. * objective.n ** 2 / lam ** 2 * float(np.sum(h_diff * h_diff))
        + alpha * (objective.value(x) - objective.value(x_star))
        + beta.value
        + threshold * beta.stderr
    )
    return InequalityCheck(lhs=float(error.p) - threshold * float(error.stderr), rhs=rhs)
