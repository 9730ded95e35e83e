"""
Closed-form constants of the expected smoothness analysis.

Every function accepts scalars or numpy arrays for `p` so grid oracles can
evaluate a whole grid at once.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from src.l2gd.errors import ConfigError


def _check_p(p: float | np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0.) or np.any(p >= 1.):
        raise ConfigError(f"p must lie in (0, 1), got {p if p.ndim == 0 else 'a grid outside (0, 1)'}")
    return p


def _out(value: np.ndarray) -> float | np.ndarray:
    return float(value) if np.ndim(value) == 0 else value


def compression_factor(omega: float, omega_M: float) -> float:
    """4 omega + 4 omega_M (1 + omega); zero without compression."""
    return 4. * omega + 4. * omega_M * (1. + omega)


def alpha(omega: float, omega_M: float, mu: float) -> float:
    factor = compression_factor(omega, omega_M)
    if factor == 0.:
        return 0.
    if mu <= 0.:
        raise ConfigError("alpha needs a strongly convex objective (mu > 0) when compressors are lossy")
    return 4. * factor / mu


def gamma(p, lam: float, n: int, L_f: float, alpha_: float, relaxation: float = 4.) -> float | np.ndarray:
    """
    alpha lam^2 (1-p) / (2 n^2 p) + max{L_f / (1-p), (lam/n) (1 + relaxation (1-p) / p)}.

    relaxation=4 is the general constant; relaxation=1 gives the uncompressed form
    max{L / (n (1-p)), lam / (n p)}.
    """
    p = _check_p(p)
    compression = alpha_ * lam ** 2 * (1. - p) / (2. * n ** 2 * p)
    smooth = np.maximum(L_f / (1. - p), (lam / n) * (1. + relaxation * (1. - p) / p))
    return _out(compression + smooth)


def gamma_upper(p, lam: float, n: int, L_f: float, alpha_: float) -> float | np.ndarray:
    p = _check_p(p)
    compression = alpha_ * lam ** 2 * (1. - p) / (2. * n ** 2 * p)
    return _out(compression + np.maximum(L_f / (1. - p), 4. * lam / (n * p)))


def communication_cost(p, lam: float, n: int, L_f: float, alpha_: float) -> float | np.ndarray:
    """C = p (1 - p) gamma: proportional to the expected number of communication rounds."""
    p = _check_p(p)
    return _out(p * (1. - p) * gamma(p, lam, n, L_f, alpha_))


def delta(beta: float, lam: float, n: int, p: float, grad_star_sq: float) -> float:
    _check_p(p)
    return 2. * beta * lam ** 2 * (1. - p) / (n ** 2 * p) + 2. * grad_star_sq


def stepsize_bound(gamma_: float) -> float:
    return 1. / (2. * gamma_)


@dataclass(frozen=True)
class TheoryConstants:
    """Everything derived for one (problem, compressors, p, lambda) setting; None where undefined."""

    L_f: float
    L: float
    mu: float
    L_F: float
    omega: float | None
    omega_M: float | None
    alpha: float | None
    beta: float | None
    beta_stderr: float | None
    grad_star_sq: float | None
    grad_star_sq_stderr: float | None
    gamma: float | None
    gamma_upper: float | None
    gamma_uncompressed: float | None
    delta: float | None
    delta_stderr: float | None
    p_e: float | None
    p_A: float | None
    p_star: float | None
    stepsize_bound: float | None
    contraction: float | None
    neighborhood: float | None

    def to_dict(self) -> dict:
        return asdict(self)
