"""
Build the partitioned dataset a run needs.

- libsvm: read `dataset.path` (default `data/libsvm/<name>`), optionally downloading it
  first, parse with the dimension raised to `target_d`, then split sequentially or
  with a seeded shuffle
- synth: generate a synthetic instance with `synth_instance`
"""
import asyncio
import logging

from src.l2gd.config import DatasetConfig
from src.l2gd.errors import DataError
from src.l2gd.loader.dataset import PartitionedDataset
from src.l2gd.loader.fetch import fetch_all
from src.l2gd.loader.libsvm import parse_libsvm
from src.l2gd.loader.partition import partition_sequential, partition_shuffled
from src.l2gd.loader.synth import synth_instance
from src.l2gd.loader.utils import DATA_ROOT, dataset_path, read_text


def load_dataset(config: DatasetConfig, n: int) -> PartitionedDataset:
    if config.source == 'synth':
        dataset = synth_instance(n, config.d, config.n_per_client, config.heterogeneity, config.synth_seed)
        logging.info(f"Generated {dataset.name}: sizes={dataset.sizes}")
        return dataset

    path = dataset_path(config.name, config.path)
    if config.fetch and config.path is None:
        asyncio.run(fetch_all([config.name], DATA_ROOT))
    parsed = parse_libsvm(read_text(path), target_d=config.target_d)
    if not parsed.examples:
        raise DataError(f"dataset file {path} holds no examples")
    if config.shuffle_seed is None:
        dataset = partition_sequential(parsed.examples, n, parsed.d, name=config.name)
    else:
        dataset = partition_shuffled(parsed.examples, n, parsed.d, config.shuffle_seed, name=config.name)
    logging.info(f"Loaded {path}: {len(parsed.examples)} examples, d={parsed.d}, client sizes={dataset.sizes}")
    return dataset
