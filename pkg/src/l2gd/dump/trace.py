"""
Run outputs.

- trace_seed<seed>.jsonl: one self-describing record per recorded iteration
- trace_seed<seed>.csv: the same records flattened for plotting
- theory.json, summary.json, config.yaml
"""
import csv
import json
import os

import yaml

from src.l2gd.compute.pipeline import RunResult
from src.l2gd.engine.trace import MetricsTrace
from src.l2gd.loader.utils import ensure_dir_exists


def _flatten(record: dict) -> dict:
    row = {k: v for k, v in record.items() if k != 'block_dist_sq'}
    blocks = record.get('block_dist_sq')
    if blocks is not None:
        for i, value in enumerate(blocks):
            row[f'block_dist_sq_{i}'] = value
    return row


def write_trace_jsonl(trace: MetricsTrace, path: str) -> None:
    with open(path, 'w') as fh:
        for record in trace.records:
            fh.write(json.dumps(record.to_dict()) + '\n')


def write_trace_csv(trace: MetricsTrace, path: str) -> None:
    rows = [_flatten(record.to_dict()) for record in trace.records]
    with open(path, 'w', newline='') as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)


def write_json(payload: dict, path: str) -> None:
    with open(path, 'w') as fh:
        json.dump(payload, fh, indent=2)
        fh.write('\n')


def write_run(result: RunResult, out_dir: str) -> list[str]:
    """Write every file of one run into out_dir; returns the written paths."""
    ensure_dir_exists(os.path.join(out_dir, 'summary.json'))
    written = []
    for trace in result.traces:
        stem = os.path.join(out_dir, f'trace_seed{trace.seed}')
        write_trace_jsonl(trace, stem + '.jsonl')
        write_trace_csv(trace, stem + '.csv')
        written += [stem + '.jsonl', stem + '.csv']

    if result.theory is not None:
        path = os.path.join(out_dir, 'theory.json')
        write_json(result.theory.to_dict(), path)
        written.append(path)

    path = os.path.join(out_dir, 'summary.json')
    write_json({'runs': result.summaries, 'mean_final_loss': result.mean_final_loss}, path)
    written.append(path)

    path = os.path.join(out_dir, 'config.yaml')
    with open(path, 'w') as fh:
        yaml.safe_dump(result.config.model_dump(mode='json'), fh, sort_keys=False)
    written.append(path)
    return written
