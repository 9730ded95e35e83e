"""
Optimal aggregation probability.

- optimal_p_rate: p* minimizing gamma (iteration complexity), p* = max{p_e, p_A}
- optimal_p_rate_upper: crossing point of the relaxed gamma_u
- optimal_p_communication: p* minimizing C = p (1 - p) gamma (communication rounds)
- grid_minimizer: brute-force oracle over a uniform grid on (1e-6, 1 - 1e-6)

L is the smoothness of the stacked f scaled by n (L = n L_f); all formulas use
L_f = L / n.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from src.l2gd.errors import ConfigError
from src.l2gd.theory.constants import communication_cost, gamma

GRID_POINTS = 100_000
GRID_LOW = 1e-6
GRID_HIGH = 1. - 1e-6

NO_COMMUNICATION = 'no_communication'
ALPHA_ZERO = 'alpha_zero'
GRID_FALLBACK = 'grid_fallback'
GRID_MISMATCH = 'grid_mismatch'
P_A_OUTSIDE = 'p_A_outside_unit_interval'


@dataclass(frozen=True)
class OptimalProbability:
    p_star: float
    p_e: float
    p_A: float | None
    flags: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {'p_star': self.p_star, 'p_e': self.p_e, 'p_A': self.p_A, 'flags': list(self.flags)}


@dataclass(frozen=True)
class GridVerdict:
    closed_form: float
    grid: float
    grid_step: float

    @property
    def agrees(self) -> bool:
        # one grid step plus the clamp to the grid range
        return abs(self.closed_form - self.grid) <= self.grid_step + GRID_LOW

    def to_dict(self) -> dict:
        return {'closed_form': self.closed_form, 'grid': self.grid, 'grid_step': self.grid_step, 'agrees': self.agrees}


def _check(lam: float, L: float, n: int, alpha_: float) -> None:
    if lam < 0 or L <= 0 or n < 1 or alpha_ < 0:
        raise ConfigError(f"need lam >= 0, L > 0, n >= 1, alpha >= 0; got lam={lam}, L={L}, n={n}, alpha={alpha_}")


def p_e(lam: float, L: float) -> float:
    """
    Crossing point of L_f / (1-p) and (lam/n)(1 + 4(1-p)/p): the smaller root of 3 lam p^2 - (7 lam + L) p + 4 lam.

    Written as (4/3) over the larger root, which keeps full precision when lam << L.
    """
    if lam == 0:
        return 0.
    return 8. * lam / (7. * lam + L + math.sqrt(lam ** 2 + 14. * lam * L + L ** 2))


def optimal_p_rate_upper(lam: float, L: float) -> float:
    """Crossing point of the relaxed gamma_u: 4 lam / (L + 4 lam)."""
    if lam < 0 or L <= 0:
        raise ConfigError(f"need lam >= 0 and L > 0, got lam={lam}, L={L}")
    return 4. * lam / (L + 4. * lam)


def p_A_candidates(lam: float, L: float, n: int, alpha_: float) -> tuple[float, ...]:
    """
    Stationary points of alpha lam^2 (1-p) / (2 n^2 p) + L / (n (1-p)).

    With a = alpha lam^2 and b = 2 n L they are (-a +/- sqrt(ab)) / (b - a), or 1/2 when a = b.
    """
    a = alpha_ * lam ** 2
    b = 2. * n * L
    if a == b:
        return (0.5,)
    root = math.sqrt(a * b)
    return ((-a + root) / (b - a), (-a - root) / (b - a))


def grid(points: int = GRID_POINTS) -> np.ndarray:
    return np.linspace(GRID_LOW, GRID_HIGH, points)


def grid_minimizer(fn: Callable[[np.ndarray], np.ndarray], points: int = GRID_POINTS) -> tuple[float, float]:
    """(argmin, min) of a vectorized fn over the uniform grid."""
    ps = grid(points)
    values = fn(ps)
    index = int(np.argmin(values))
    return float(ps[index]), float(values[index])


def grid_step(points: int = GRID_POINTS) -> float:
    return (GRID_HIGH - GRID_LOW) / (points - 1)


def optimal_p_rate(lam: float, L: float, n: int, alpha_: float, points: int = GRID_POINTS) -> OptimalProbability:
    _check(lam, L, n, alpha_)
    pe = p_e(lam, L)
    if lam == 0:
        logging.info("lambda = 0: gamma decreases as p -> 0, no communication is optimal")
        return OptimalProbability(p_star=0., p_e=pe, p_A=None, flags=(NO_COMMUNICATION,))
    if alpha_ == 0:
        return OptimalProbability(p_star=pe, p_e=pe, p_A=None, flags=(ALPHA_ZERO,))

    inside = [c for c in p_A_candidates(lam, L, n, alpha_) if 0. < c < 1.]
    if len(inside) == 1:
        return OptimalProbability(p_star=max(pe, inside[0]), p_e=pe, p_A=inside[0])

    L_f = L / n
    pa, _ = grid_minimizer(lambda ps: gamma(ps, lam, n, L_f, alpha_), points)
    logging.warning(f"p_A root selection found {len(inside)} candidates in (0, 1); using grid minimizer {pa:.6g}")
    return OptimalProbability(p_star=max(pe, pa), p_e=pe, p_A=pa, flags=(GRID_FALLBACK,))


def optimal_p_communication(lam: float, L: float, n: int, alpha_: float) -> OptimalProbability:
    """
    p* = max{p_e, p_A} with p_A = 1 - L n / (alpha lam^2).

    When L n >= alpha lam^2, p_A <= 0 and p* = p_e. alpha = 0 leaves p_A undefined.
    """
    _check(lam, L, n, alpha_)
    pe = p_e(lam, L)
    if lam == 0:
        return OptimalProbability(p_star=0., p_e=pe, p_A=None, flags=(NO_COMMUNICATION,))
    if alpha_ == 0:
        return OptimalProbability(p_star=pe, p_e=pe, p_A=None, flags=(ALPHA_ZERO,))
    pa = 1. - L * n / (alpha_ * lam ** 2)
    flags = () if 0. < pa < 1. else (P_A_OUTSIDE,)
    return OptimalProbability(p_star=max(pe, pa), p_e=pe, p_A=pa, flags=flags)


def check_rate_on_grid(lam: float, L: float, n: int, alpha_: float, points: int = GRID_POINTS) -> GridVerdict:
    closed = optimal_p_rate(lam, L, n, alpha_, points).p_star
    arg, _ = grid_minimizer(lambda ps: gamma(ps, lam, n, L / n, alpha_), points)
    return GridVerdict(closed_form=closed, grid=arg, grid_step=grid_step(points))


def check_communication_on_grid(lam: float, L: float, n: int, alpha_: float, points: int = GRID_POINTS) -> GridVerdict:
    closed = optimal_p_communication(lam, L, n, alpha_).p_star
    arg, _ = grid_minimizer(lambda ps: communication_cost(ps, lam, n, L / n, alpha_), points)
    verdict = GridVerdict(closed_form=closed, grid=arg, grid_step=grid_step(points))
    if not verdict.agrees:
        logging.warning(
            f"communication-optimal p {closed:.6g} disagrees with the grid minimizer {arg:.6g} "
            f"(lam={lam}, L={L}, n={n}, alpha={alpha_})"
        )
    return verdict
