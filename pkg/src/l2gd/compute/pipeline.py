"""
Lazy experiment pipeline.

Nodes:
- DatasetNode: loads or generates the partitioned dataset
- ObjectiveNode: builds F = f + h on it
- OptimumNode: high-precision full-gradient x*
- StepsizeNode: resolves eta='auto'
- TheoryNode: the theory report of one configuration

Pipeline:
- ExperimentPipeline: coordinates the nodes; run(), theory(), stepsize()
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

from src.l2gd.compressors.operators import joint_variance_factor, variance_factor
from src.l2gd.compute.base import LazyNode
from src.l2gd.config import DatasetConfig, RunConfig
from src.l2gd.engine.fedavg import run_fedavg
from src.l2gd.engine.l2gd import run_l2gd
from src.l2gd.engine.params import FedAvgParams, L2gdParams
from src.l2gd.engine.streams import estimator_stream
from src.l2gd.engine.trace import MetricsTrace
from src.l2gd.errors import ConfigError, NoVarianceCertificate
from src.l2gd.loader.dataset import PartitionedDataset
from src.l2gd.loader.load import load_dataset
from src.l2gd.objective.models import PersonalizedObjective, build_objective
from src.l2gd.objective.optimum import Optimum, solve_optimum
from src.l2gd.objective.problem import ProblemSpec
from src.l2gd.theory import constants
from src.l2gd.theory.report import TheoryReport, build_theory_report


class DatasetNode(LazyNode[PartitionedDataset]):

    def compute(self, dataset: DatasetConfig, n: int) -> PartitionedDataset:
        return load_dataset(dataset, n)


class ObjectiveNode(LazyNode[PersonalizedObjective]):

    def __init__(self, dataset: DatasetNode):
        super().__init__()
        self.dataset = dataset

    def compute(self, dataset: DatasetConfig, n: int, l2: float, lam: float, loss: str) -> PersonalizedObjective:
        problem = ProblemSpec(dataset=self.dataset(dataset=dataset, n=n), l2=l2, lam=lam)
        return build_objective(problem, loss)


class OptimumNode(LazyNode[Optimum]):

    def __init__(self, objective: ObjectiveNode):
        super().__init__()
        self.objective = objective

    def compute(self, **params) -> Optimum:
        return solve_optimum(self.objective(**params))


class StepsizeNode(LazyNode[float]):
    """
    eta='auto' is 1 / (2 gamma) for l2gd (needs unbiased compressors), 1 / L for fedavg
    and n p / lam for fedavg with coin-drawn local steps.

    Params:
        config: the run configuration; only the fields eta depends on are used
    """

    def __init__(self, objective: ObjectiveNode):
        super().__init__()
        self.objective = objective

    def compute(self, config: RunConfig) -> float:
        if config.eta != 'auto':
            return float(config.eta)
        objective = self.objective(**_problem_params(config))
        smooth = objective.smoothness_constants()
        if config.coin_drawn_steps:
            if config.lam == 0:
                raise ConfigError("eta='auto' for coin-drawn fedavg needs lam > 0")
            return objective.n * config.probability / config.lam
        if config.algorithm == 'fedavg':
            return 1. / smooth.L
        try:
            omega = joint_variance_factor(list(config.client_specs()), objective.d)
            omega_M = variance_factor(config.master_compressor, objective.d)
        except NoVarianceCertificate as exc:
            raise ConfigError(f"eta='auto' needs unbiased compressors: {exc}") from exc
        alpha = constants.alpha(omega, omega_M, smooth.mu)
        gamma = constants.gamma(config.probability, config.lam, objective.n, smooth.L_f, alpha)
        return constants.stepsize_bound(gamma)


class TheoryNode(LazyNode[TheoryReport]):

    def __init__(self, objective: ObjectiveNode, optimum: OptimumNode):
        super().__init__()
        self.objective = objective
        self.optimum = optimum

    def compute(self, config: RunConfig) -> TheoryReport:
        params = _problem_params(config)
        objective = self.objective(**params)
        optimum = self.optimum(**params) if config.track_optimum else None
        return build_theory_report(
            objective,
            config.client_specs(),
            config.master_compressor,
            config.probability,
            optimum,
            estimator_stream(config.seed),
            samples=config.mc_samples,
            eta=None if config.eta == 'auto' else float(config.eta),
            iterations=config.iterations,
            epsilon=config.epsilon,
        )


def _problem_params(config: RunConfig) -> dict:
    return {
        'dataset': config.dataset,
        'n': config.n_clients,
        'l2': config.l2,
        'lam': config.lam,
        'loss': config.loss,
    }


@dataclass
class RunResult:
    config: RunConfig
    eta: float
    traces: list[MetricsTrace]
    summaries: list[dict]
    theory: TheoryReport | None = None

    @property
    def mean_final_loss(self) -> float:
        return sum(s['final_loss'] for s in self.summaries) / len(self.summaries)


class ExperimentPipeline:
    """
    Lazy, cached pipeline shared by runs, sweep points and theory reports.

    Example:
        pipeline = ExperimentPipeline()
        result = pipeline.run(config)             # loads data, solves x*, runs every seed
        report = pipeline.theory(config)          # reuses the cached objective and x*
        other = pipeline.run(config.with_values(p=0.3))  # reuses data and x*
    """

    def __init__(self):
        self.dataset = DatasetNode()
        self.objective = ObjectiveNode(self.dataset)
        self.optimum = OptimumNode(self.objective)
        self.stepsize_node = StepsizeNode(self.objective)
        self.theory_node = TheoryNode(self.objective, self.optimum)

    def problem(self, config: RunConfig) -> PersonalizedObjective:
        return self.objective(**_problem_params(config))

    def stepsize(self, config: RunConfig) -> float:
        return self.stepsize_node(config=_stepsize_view(config))

    def theory(self, config: RunConfig) -> TheoryReport:
        return self.theory_node(config=_theory_view(config))

    def run(self, config: RunConfig, with_theory: bool = True) -> RunResult:
        """Run every seed of `config`; the theory report uses the first seed's estimator stream."""
        objective = self.problem(config)
        x_star = self.optimum(**_problem_params(config)).x if config.track_optimum else None
        eta = self.stepsize(config)
        theory = self.theory(config) if with_theory else None

        traces, summaries = [], []
        for seed in range(config.seed, config.seed + config.seeds):
            trace = self._run_one(objective, config, eta, seed, x_star)
            summary = trace.summary()
            summary['eta'] = eta
            summary['accuracy'] = objective.accuracy(trace.model).to_dict()
            if config.algorithm == 'l2gd':
                p = config.probability
                summary['expected_round_frequency'] = p * (1. - p)
            traces.append(trace)
            summaries.append(summary)
        result = RunResult(config=config, eta=eta, traces=traces, summaries=summaries, theory=theory)
        logging.info(f"{config.algorithm}: {config.seeds} seed(s), mean final loss {result.mean_final_loss:.6g}")
        return result

    @staticmethod
    def _run_one(objective, config: RunConfig, eta: float, seed: int, x_star) -> MetricsTrace:
        if config.algorithm == 'fedavg':
            lr = eta
            if config.coin_drawn_steps:
                lr = eta / (objective.n * (1. - config.probability))
            params = FedAvgParams(
                lr=lr,
                local_steps=config.local_step_count,
                p=config.p if config.coin_drawn_steps else None,
                rounds=config.iterations,
                client_compressors=config.client_specs(),
                master_compressor=config.master_compressor,
                record_every=config.record_every,
            )
            return run_fedavg(objective, params, seed, x_star=x_star)
        params = L2gdParams(
            eta=eta,
            p=config.probability,
            iterations=config.iterations,
            client_compressors=config.client_specs(),
            master_compressor=config.master_compressor,
            record_every=config.record_every,
        )
        return run_l2gd(objective, params, seed, x_star=x_star)

    def clear_cache(self) -> None:
        for node in self._nodes():
            node.clear_cache()

    def cache_info(self) -> dict:
        return {type(node).__name__: node.cache_info() for node in self._nodes()}

    def _nodes(self) -> list[LazyNode]:
        return [self.dataset, self.objective, self.optimum, self.stepsize_node, self.theory_node]


def _stepsize_view(config: RunConfig) -> RunConfig:
    """Drop the fields eta does not depend on so runs differing only in them share the cache entry."""
    return config.with_values(seed=0, seeds=1, out_dir='', jobs=1, record_every=1, iterations=1, track_optimum=False)


def _theory_view(config: RunConfig) -> RunConfig:
    return config.with_values(seeds=1, out_dir='', jobs=1, record_every=1)
