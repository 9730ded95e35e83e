"""
Theory report: every derived constant for one run configuration plus the
grid-oracle verdicts on the closed-form optimal probabilities.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from src.l2gd.compressors.base import CompressorSpec
from src.l2gd.compressors.operators import joint_variance_factor, variance_factor
from src.l2gd.errors import ConfigError, NoVarianceCertificate
from src.l2gd.objective.models import PersonalizedObjective
from src.l2gd.objective.optimum import Optimum
from src.l2gd.objective.stacked import StackedModel
from src.l2gd.theory import constants as c
from src.l2gd.theory.bounds import nonconvex_budget, strongly_convex_bound
from src.l2gd.theory.estimators import Estimate, beta_estimate, gradient_second_moment
from src.l2gd.theory.optimal_p import (
    GRID_MISMATCH,
    GRID_POINTS,
    GridVerdict,
    OptimalProbability,
    check_communication_on_grid,
    check_rate_on_grid,
    optimal_p_communication,
    optimal_p_rate,
    optimal_p_rate_upper,
)

BIASED_COMPRESSOR = 'biased_compressor'
NOT_STRONGLY_CONVEX = 'not_strongly_convex'
NO_OPTIMUM = 'no_optimum'
STEPSIZE_ABOVE_BOUND = 'stepsize_above_bound'
COMMUNICATION_FORM_NOTE = (
    "p_A = 1 - L n / (alpha lambda^2) is the closed form of the stationary point; it is "
    "cross-checked against a grid minimization of the communication cost"
)


@dataclass(frozen=True)
class TheoryReport:
    constants: c.TheoryConstants
    p: float
    rate: OptimalProbability
    rate_grid: GridVerdict
    rate_upper: float
    communication: OptimalProbability | None
    communication_grid: GridVerdict | None
    strongly_convex: dict | None
    nonconvex: dict | None
    flags: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            'constants': self.constants.to_dict(),
            'p': self.p,
            'optimal_p_rate': {**self.rate.to_dict(), 'grid_check': self.rate_grid.to_dict()},
            'optimal_p_rate_upper': self.rate_upper,
            'optimal_p_communication': None if self.communication is None else {
                **self.communication.to_dict(),
                'grid_check': self.communication_grid.to_dict(),
                'note': COMMUNICATION_FORM_NOTE,
            },
            'strongly_convex': self.strongly_convex,
            'nonconvex': self.nonconvex,
            'flags': list(self.flags),
        }


def _omegas(client_specs, master_spec, d) -> tuple[float | None, float | None]:
    try:
        return joint_variance_factor(list(client_specs), d), variance_factor(master_spec, d)
    except NoVarianceCertificate as exc:
        logging.warning(f"{exc}; omega-dependent constants are left undefined")
        return None, None


def build_theory_report(
        objective: PersonalizedObjective,
        client_specs: tuple[CompressorSpec, ...],
        master_spec: CompressorSpec,
        p: float,
        optimum: Optimum | None,
        rng: np.random.Generator,
        samples: int = 10_000,
        eta: float | None = None,
        iterations: int | None = None,
        epsilon: float = 0.3,
        x0: StackedModel | None = None,
        grid_points: int = GRID_POINTS,
) -> TheoryReport:
    """
    Args:
        eta: stepsize the run uses; None means the theoretical default 1 / (2 gamma)
        iterations: K for the final value of the strongly convex bound
        epsilon: target precision of the nonconvex budget
    """
    if not 0. < p < 1.:
        raise ConfigError(f"p must lie in (0, 1), got {p}")
    n, d, lam = objective.n, objective.d, objective.lam
    smooth = objective.smoothness_constants()
    flags: list[str] = []

    omega, omega_M = _omegas(client_specs, master_spec, d)
    alpha = None
    if omega is None:
        flags.append(BIASED_COMPRESSOR)
    else:
        try:
            alpha = c.alpha(omega, omega_M, smooth.mu)
        except ConfigError as exc:
            logging.warning(f"{exc}; alpha is left undefined")
    if not smooth.strongly_convex:
        flags.append(NOT_STRONGLY_CONVEX)

    gamma = gamma_u = None
    if alpha is not None:
        gamma = c.gamma(p, lam, n, smooth.L_f, alpha)
        gamma_u = c.gamma_upper(p, lam, n, smooth.L_f, alpha)
    gamma_uncompressed = c.gamma(p, lam, n, smooth.L_f, 0., relaxation=1.)

    beta = grad_star = None
    delta = delta_stderr = None
    if optimum is None:
        flags.append(NO_OPTIMUM)
    elif omega is not None:
        beta = beta_estimate(optimum.x, client_specs, master_spec, samples, rng)
        grad_star = gradient_second_moment(objective, optimum.x, p, client_specs, master_spec, samples, rng)
        delta = c.delta(beta.value, lam, n, p, grad_star.value)
        delta_stderr = _delta_stderr(beta, grad_star, lam, n, p)

    bound = c.stepsize_bound(gamma) if gamma is not None else None
    step = eta if eta is not None else bound
    contraction = neighborhood = None
    if step is not None and smooth.mu > 0:
        contraction = 1. - step * smooth.mu / n
        if delta is not None:
            neighborhood = n * step * delta / smooth.mu
    if eta is not None and bound is not None and eta > bound * (1. + 1e-12):
        flags.append(STEPSIZE_ABOVE_BOUND)
        logging.warning(f"stepsize {eta:.4g} exceeds 1/(2 gamma) = {bound:.4g}")

    alpha_for_p = 0. if alpha is None else alpha
    rate = optimal_p_rate(lam, smooth.L, n, alpha_for_p, grid_points)
    rate_grid = check_rate_on_grid(lam, smooth.L, n, alpha_for_p, grid_points)
    if not rate_grid.agrees:
        flags.append(GRID_MISMATCH)
    communication = communication_grid = None
    if alpha is not None:
        communication = optimal_p_communication(lam, smooth.L, n, alpha)
        communication_grid = check_communication_on_grid(lam, smooth.L, n, alpha, grid_points)
        if not communication_grid.agrees:
            flags.append(GRID_MISMATCH)

    constants = c.TheoryConstants(
        L_f=smooth.L_f,
        L=smooth.L,
        mu=smooth.mu,
        L_F=smooth.L_F,
        omega=omega,
        omega_M=omega_M,
        alpha=alpha,
        beta=None if beta is None else beta.value,
        beta_stderr=None if beta is None else beta.stderr,
        grad_star_sq=None if grad_star is None else grad_star.value,
        grad_star_sq_stderr=None if grad_star is None else grad_star.stderr,
        gamma=gamma,
        gamma_upper=gamma_u,
        gamma_uncompressed=gamma_uncompressed,
        delta=delta,
        delta_stderr=delta_stderr,
        p_e=rate.p_e,
        p_A=rate.p_A,
        p_star=rate.p_star,
        stepsize_bound=bound,
        contraction=contraction,
        neighborhood=neighborhood,
    )

    x0 = x0 if x0 is not None else StackedModel.zeros(n, d)
    strongly_convex = nonconvex = None
    if optimum is not None and step is not None and delta is not None and smooth.mu > 0:
        ks = np.array([0, iterations or 0])
        sc = strongly_convex_bound(ks, x0, optimum.x, step, smooth.mu, n, delta, gamma)
        strongly_convex = {
            'eta': step,
            'contraction': sc.contraction,
            'neighborhood': sc.neighborhood,
            'initial_bound': float(sc.values[0]),
            'final_bound': float(sc.values[1]),
            'iterations': iterations or 0,
            'precondition_ok': sc.precondition_ok,
        }
    if optimum is not None and gamma is not None and delta is not None:
        gap = max(objective.value(x0) - optimum.value, 0.)
        budget = nonconvex_budget(epsilon, smooth.L_F, gamma, delta, gap)
        nonconvex = {'epsilon': epsilon, 'L': smooth.L_F, 'gap': gap, **budget.to_dict()}

    for flag in rate.flags:
        flags.append(f"rate:{flag}")
    if communication is not None:
        for flag in communication.flags:
            flags.append(f"communication:{flag}")

    report = TheoryReport(
        constants=constants,
        p=p,
        rate=rate,
        rate_grid=rate_grid,
        rate_upper=optimal_p_rate_upper(lam, smooth.L),
        communication=communication,
        communication_grid=communication_grid,
        strongly_convex=strongly_convex,
        nonconvex=nonconvex,
        flags=tuple(dict.fromkeys(flags)),
    )
    logging.info(
        f"theory: L_f={smooth.L_f:.4g} mu={smooth.mu:.4g} alpha={alpha} gamma={gamma} "
        f"delta={delta} p*={rate.p_star:.4g} flags={list(report.flags)}"
    )
    return report


def _delta_stderr(beta: Estimate, grad_star: Estimate, lam: float, n: int, p: float) -> float:
    # independent estimates: errors add in quadrature
    scale = 2. * lam ** 2 * (1. - p) / (n ** 2 * p)
    return float(np.hypot(scale * beta.stderr, 2. * grad_star.stderr))
