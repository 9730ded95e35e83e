from src.l2gd.compute.base import LazyNode
from src.l2gd.compute.pipeline import ExperimentPipeline, RunResult

__all__ = ['ExperimentPipeline', 'LazyNode', 'RunResult']
