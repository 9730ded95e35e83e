"""
Run and sweep configuration.

- DatasetConfig: where the data comes from (LIBSVM file or synthetic generator)
- RunConfig: every parameter of one run, fully defaulted
- SweepSpec: p and lambda grids over a base RunConfig

Configs are YAML files validated by pydantic; `--set key=value` overrides use
dotted keys for nested fields (e.g. `client_compressor.kind=bernoulli`).
"""
from __future__ import annotations

import copy
from typing import Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.l2gd.compressors.base import CompressorSpec
from src.l2gd.errors import ConfigError


class DatasetConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    source: Literal['libsvm', 'synth'] = 'libsvm'
    name: str = 'a1a'
    path: str | None = None
    target_d: int | None = Field(124, ge=1)
    shuffle_seed: int | None = None
    fetch: bool = False
    n_per_client: int = Field(50, ge=1)
    d: int = Field(10, ge=1)
    heterogeneity: float = Field(1., ge=0.)
    synth_seed: int = 0


class RunConfig(BaseModel):
    """
    All parameters of one run.

    `local_steps` belongs to fedavg; unset it means 1, or, when fedavg is given `p`,
    a local-step count drawn each round from the p-coin with the local stepsize
    eta / (n (1 - p)). `p` unset means 0.5 for l2gd. `eta='auto'` means 1/(2 gamma)
    for l2gd, 1/L for fedavg and n p / lam (aggregation weight 1) for coin-drawn fedavg.
    """

    model_config = ConfigDict(frozen=True, extra='forbid')

    algorithm: Literal['l2gd', 'fedavg'] = 'l2gd'
    loss: Literal['logistic', 'sigmoid'] = 'logistic'
    dataset: DatasetConfig = Field(default_factory=DatasetConfig)
    n_clients: int = Field(5, ge=1)
    p: float | None = Field(None, gt=0., lt=1.)
    lam: float = Field(10., ge=0.)
    l2: float = Field(0.01, ge=0.)
    eta: float | Literal['auto'] = 'auto'
    iterations: int = Field(100, ge=1)
    local_steps: int | None = Field(None, ge=1)
    client_compressor: CompressorSpec = Field(default_factory=CompressorSpec)
    master_compressor: CompressorSpec = Field(default_factory=CompressorSpec)
    seed: int = Field(0, ge=0)
    seeds: int = Field(1, ge=1)
    out_dir: str = 'runs/latest'
    track_optimum: bool = True
    mc_samples: int = Field(10_000, ge=10_000)
    epsilon: float = Field(0.3, gt=0.)
    record_every: int = Field(1, ge=1)
    jobs: int = Field(1, ge=1)

    @model_validator(mode='after')
    def _consistent(self) -> RunConfig:
        if self.algorithm == 'l2gd' and self.local_steps is not None:
            raise ValueError("local_steps only applies to algorithm=fedavg")
        if self.algorithm == 'fedavg' and self.p is not None and self.local_steps is not None:
            raise ValueError("fedavg takes either local_steps or p, not both")
        if isinstance(self.eta, float) and self.eta <= 0:
            raise ValueError(f"eta must be > 0, got {self.eta}")
        return self

    @property
    def probability(self) -> float:
        return 0.5 if self.p is None else self.p

    @property
    def coin_drawn_steps(self) -> bool:
        return self.algorithm == 'fedavg' and self.p is not None

    @property
    def local_step_count(self) -> int | None:
        if self.coin_drawn_steps:
            return None
        return 1 if self.local_steps is None else self.local_steps

    def client_specs(self) -> tuple[CompressorSpec, ...]:
        return (self.client_compressor,) * self.n_clients

    def with_values(self, **values: Any) -> RunConfig:
        return RunConfig.model_validate({**self.model_dump(mode='json'), **values})


class SweepSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    base: RunConfig
    p_grid: list[float] = Field(min_length=1)
    lam_grid: list[float] = Field(min_length=1)

    @model_validator(mode='after')
    def _grids(self) -> SweepSpec:
        if self.base.algorithm != 'l2gd':
            raise ValueError("sweeps vary p and lambda and need algorithm=l2gd")
        for p in self.p_grid:
            if not 0. < p < 1.:
                raise ValueError(f"p grid value {p} outside (0, 1)")
        for lam in self.lam_grid:
            if lam < 0:
                raise ValueError(f"lambda grid value {lam} is negative")
        return self

    def points(self) -> list[tuple[int, int, int, RunConfig]]:
        """(p_index, lam_index, seed, config) for every grid point and seed, in output order."""
        out = []
        for p_index, p in enumerate(self.p_grid):
            for lam_index, lam in enumerate(self.lam_grid):
                for seed in range(self.base.seed, self.base.seed + self.base.seeds):
                    config = self.base.with_values(p=p, lam=lam, seed=seed, seeds=1)
                    out.append((p_index, lam_index, seed, config))
        return out


def load_raw(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, 'r') as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a mapping at the top level")
    return raw


def apply_overrides(raw: dict, overrides: list[str]) -> dict:
    """Apply `key=value` overrides; dotted keys reach nested mappings, values are parsed as YAML."""
    out = copy.deepcopy(raw)
    for item in overrides:
        key, sep, value = item.partition('=')
        if not sep or not key:
            raise ConfigError(f"override '{item}' is not of the form key=value")
        node = out
        parts = key.split('.')
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(f"override '{item}': '{part}' is not a mapping")
            node = child
        try:
            node[parts[-1]] = yaml.safe_load(value)
        except yaml.YAMLError as exc:
            raise ConfigError(f"override '{item}': cannot parse value: {exc}") from exc
    return out


def split_sweep(raw: dict) -> tuple[dict, dict | None]:
    """Separate the optional `sweep:` section (p and lam grids) from run fields."""
    run = dict(raw)
    sweep = run.pop('sweep', None)
    return run, sweep


def parse_run_config(raw: dict) -> RunConfig:
    run, _ = split_sweep(raw)
    return RunConfig.model_validate(run)


def parse_sweep_spec(raw: dict) -> SweepSpec:
    run, sweep = split_sweep(raw)
    base = RunConfig.model_validate(run)
    sweep = sweep or {}
    return SweepSpec(
        base=base,
        p_grid=sweep.get('p', [base.probability]),
        lam_grid=sweep.get('lam', [base.lam]),
    )


def normalize_config(raw: dict) -> dict:
    """Fully defaulted, JSON-compatible form of a run config."""
    return parse_run_config(raw).model_dump(mode='json')


def dump_config(config: RunConfig) -> str:
    return yaml.safe_dump(config.model_dump(mode='json'), sort_keys=False)
