import numpy as np
from scipy.special import expit

from src.l2gd.errors import ConfigError
from src.l2gd.loader.dataset import LabeledExample, PartitionedDataset


def synth_instance(n: int, d: int, per_client: int, heterogeneity: float, seed: int) -> PartitionedDataset:
    """
    Synthetic strongly convex test instance.

    Client i draws features from N(heterogeneity * s_i, I) and labels from a
    logistic model around the separator w_0 + heterogeneity * v_i, where w_0 is
    shared and s_i, v_i are client-specific standard Gaussian vectors. With
    heterogeneity 0 every client samples the same distribution.
    """
    if n < 1 or d < 1 or per_client < 1:
        raise ConfigError(f"synth_instance needs positive counts, got n={n} d={d} per_client={per_client}")
    if heterogeneity < 0:
        raise ConfigError(f"heterogeneity must be >= 0, got {heterogeneity}")

    rng = np.random.default_rng(seed)
    shared = rng.standard_normal(d) / np.sqrt(d) * 2.
    clients = []
    for _ in range(n):
        shift = heterogeneity * rng.standard_normal(d)
        separator = shared + heterogeneity * rng.standard_normal(d) / np.sqrt(d) * 2.
        features = shift + rng.standard_normal((per_client, d))
        labels = np.where(rng.random(per_client) < expit(features @ separator), 1, -1)
        clients.append(tuple(
            LabeledExample.from_dense(row, int(label)) for row, label in zip(features, labels)
        ))
    return PartitionedDataset(clients=tuple(clients), d=d, name=f'synth(n={n},d={d},h={heterogeneity},seed={seed})')
