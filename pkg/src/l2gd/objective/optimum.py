import logging
from dataclasses import dataclass

import numpy as np

from src.l2gd.objective.models import PersonalizedObjective
from src.l2gd.objective.stacked import StackedModel


@dataclass(frozen=True)
class Optimum:
    x: StackedModel
    value: float
    gradient_norm: float
    iterations: int
    converged: bool


def solve_optimum(
        objective: PersonalizedObjective,
        x0: StackedModel | None = None,
        tol: float = 1e-10,
        max_iter: int = 1_000_000,
) -> Optimum:
    """
    Minimize F by full-gradient descent with stepsize 1 / (L_f + 2 lambda / n) until ||grad F|| <= tol.

    For nonconvex objectives the result is a stationary point.
    """
    constants = objective.smoothness_constants()
    step = 1. / (constants.L_f + 2. * objective.lam / objective.n)
    blocks = (x0 or StackedModel.zeros(objective.n, objective.d)).blocks.copy()

    grad = objective.gradient(blocks)
    grad_norm = float(np.linalg.norm(grad))
    iterations = 0
    while grad_norm > tol and iterations < max_iter:
        blocks -= step * grad
        grad = objective.gradient(blocks)
        grad_norm = float(np.linalg.norm(grad))
        iterations += 1

    converged = grad_norm <= tol
    x = StackedModel.of(blocks)
    if converged:
        logging.info(f"x* oracle converged in {iterations} iterations (||grad F|| = {grad_norm:.3g})")
    else:
        logging.warning(f"x* oracle stopped after {iterations} iterations with ||grad F|| = {grad_norm:.3g} > {tol:g}")
    return Optimum(x=x, value=objective.value(x), gradient_norm=grad_norm, iterations=iterations, converged=converged)
