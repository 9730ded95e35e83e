"""
Pytest configuration and shared fixtures.

Fast tests run on small synthetic instances. Checks on the LIBSVM a1a/a2a files
skip when the files are not in data/libsvm/ (download with
`uv run -m src.l2gd.loader.fetch a1a a2a`).
"""
import os

import pytest

from src.l2gd.compressors.base import CompressorKind, CompressorSpec
from src.l2gd.loader.libsvm import parse_libsvm
from src.l2gd.loader.partition import partition_sequential
from src.l2gd.loader.synth import synth_instance
from src.l2gd.loader.utils import DATA_ROOT, read_text
from src.l2gd.objective.models import LogisticObjective
from src.l2gd.objective.optimum import solve_optimum
from src.l2gd.objective.problem import ProblemSpec

IDENTITY = CompressorSpec()
BERNOULLI_HALF = CompressorSpec(kind=CompressorKind.BERNOULLI, q=0.5)
NATURAL = CompressorSpec(kind=CompressorKind.NATURAL)


def libsvm_file(name: str) -> str:
    path = os.path.join(DATA_ROOT, name)
    if not os.path.isfile(path):
        pytest.skip(f"{path} not downloaded")
    return path


def libsvm_objective(name: str, n: int = 5, lam: float = 10., l2: float = 0.01) -> LogisticObjective:
    parsed = parse_libsvm(read_text(libsvm_file(name)), target_d=124)
    dataset = partition_sequential(parsed.examples, n, parsed.d, name=name)
    return LogisticObjective(ProblemSpec(dataset=dataset, l2=l2, lam=lam))


@pytest.fixture(scope='session')
def synth_dataset():
    return synth_instance(n=3, d=4, per_client=30, heterogeneity=1., seed=0)


@pytest.fixture(scope='session')
def objective(synth_dataset):
    return LogisticObjective(ProblemSpec(dataset=synth_dataset, l2=0.1, lam=2.))


@pytest.fixture(scope='session')
def optimum(objective):
    return solve_optimum(objective)


@pytest.fixture(scope='session')
def a1a_objective():
    return libsvm_objective('a1a')
