from src.l2gd.theory.bounds import (
    InequalityCheck,
    NonconvexBudget,
    StronglyConvexBound,
    aggregation_error_check,
    iterate_norm_check,
    nonconvex_budget,
    recursion_bound_check,
    strongly_convex_bound,
)
from src.l2gd.theory.constants import (
    TheoryConstants,
    alpha,
    communication_cost,
    delta,
    gamma,
    gamma_upper,
    stepsize_bound,
)
from src.l2gd.theory.estimators import (
    Estimate,
    beta_estimate,
    gradient_mean_estimate,
    gradient_second_moment,
    master_average_estimate,
)
from src.l2gd.theory.optimal_p import (
    OptimalProbability,
    grid_minimizer,
    optimal_p_communication,
    optimal_p_rate,
    optimal_p_rate_upper,
    p_e,
)
from src.l2gd.theory.report import TheoryReport, build_theory_report

__all__ = [
    'Estimate',
    'InequalityCheck',
    'NonconvexBudget',
    'OptimalProbability',
    'StronglyConvexBound',
    'TheoryConstants',
    'TheoryReport',
    'aggregation_error_check',
    'alpha',
    'beta_estimate',
    'build_theory_report',
    'communication_cost',
    'delta',
    'gamma',
    'gamma_upper',
    'gradient_mean_estimate',
    'gradient_second_moment',
    'grid_minimizer',
    'iterate_norm_check',
    'master_average_estimate',
    'nonconvex_budget',
    'optimal_p_communication',
    'optimal_p_rate',
    'optimal_p_rate_upper',
    'p_e',
    'recursion_bound_check',
    'stepsize_bound',
]
