"""
Sweep surface.

Workers stage one JSON file per (p, lambda, seed) point under `<out>/.staging/`;
the coordinator merges them into `sweep.jsonl` and `sweep.csv` sorted by
(p_index, lam_index, seed), so the output never depends on completion order.
"""
import csv
import glob
import json
import os
import shutil

from src.l2gd.config import RunConfig
from src.l2gd.loader.utils import ensure_dir_exists

STAGING = '.staging'
SORT_KEY = ('p_index', 'lam_index', 'seed')


def sweep_record(p_index: int, lam_index: int, seed: int, config: RunConfig, summary: dict) -> dict:
    return {
        'p_index': p_index,
        'lam_index': lam_index,
        'seed': seed,
        'p': config.probability,
        'lam': config.lam,
        'eta': summary['eta'],
        'iterations': summary['iterations'],
        'final_loss': summary['final_loss'],
        'final_f': summary['final_f'],
        'final_h': summary['final_h'],
        'final_dist_sq': summary['final_dist_sq'],
        'total_bits': summary['total_bits'],
        'bits_per_client': summary['bits_per_client'],
        'rounds': summary['rounds'],
    }


def staging_dir(out_dir: str) -> str:
    return os.path.join(out_dir, STAGING)


def reset_staging(out_dir: str) -> None:
    """Drop records left behind by an interrupted sweep."""
    shutil.rmtree(staging_dir(out_dir), ignore_errors=True)


def stage_record(out_dir: str, record: dict) -> str:
    path = os.path.join(staging_dir(out_dir), f"point_{record['p_index']}_{record['lam_index']}_{record['seed']}.json")
    ensure_dir_exists(path)
    with open(path, 'w') as fh:
        json.dump(record, fh)
    return path


def merge_staged(out_dir: str) -> list[dict]:
    """Merge staged records into the sorted sweep files and drop the staging directory."""
    directory = staging_dir(out_dir)
    records = []
    for path in glob.glob(os.path.join(directory, 'point_*.json')):
        with open(path, 'r') as fh:
            records.append(json.load(fh))
    records.sort(key=lambda r: tuple(r[k] for k in SORT_KEY))
    ensure_dir_exists(os.path.join(out_dir, 'sweep.jsonl'))

    with open(os.path.join(out_dir, 'sweep.jsonl'), 'w') as fh:
        for record in records:
            fh.write(json.dumps(record) + '\n')
    if records:
        with open(os.path.join(out_dir, 'sweep.csv'), 'w', newline='') as fh:
            writer = csv.DictWriter(fh, fieldnames=list(records[0]))
            writer.writeheader()
            writer.writerows(records)
    shutil.rmtree(directory, ignore_errors=True)
    return records
