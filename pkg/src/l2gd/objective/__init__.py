from src.l2gd.objective.models import (
    Accuracy,
    LogisticObjective,
    PersonalizedObjective,
    SigmoidObjective,
    SmoothnessConstants,
    build_objective,
)
from src.l2gd.objective.optimum import Optimum, solve_optimum
from src.l2gd.objective.problem import ProblemSpec
from src.l2gd.objective.stacked import StackedModel, block_average

__all__ = [
    'Accuracy',
    'LogisticObjective',
    'Optimum',
    'PersonalizedObjective',
    'ProblemSpec',
    'SigmoidObjective',
    'SmoothnessConstants',
    'StackedModel',
    'block_average',
    'build_objective',
    'solve_optimum',
]
