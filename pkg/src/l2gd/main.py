"""
Command-line front end.

Subcommands:
- run: one configuration over `seeds` seeds; writes traces, theory.json, summary.json
- sweep: every (p, lambda, seed) point of the `sweep:` grids; writes sweep.jsonl/.csv
- theory: the theory report only, no run

Exit codes: 0 success, 1 configuration error, 2 data error, 3 internal invariant violation.

Run with: uv run -m src.l2gd.main run --config configs/a1a.yaml --set p=0.4
"""
import argparse
import logging
import os
import sys
from concurrent.futures import FIRST_EXCEPTION, ProcessPoolExecutor, wait

from pydantic import ValidationError

from src.l2gd.compute.pipeline import ExperimentPipeline
from src.l2gd.config import RunConfig, apply_overrides, load_raw, parse_run_config, parse_sweep_spec
from src.l2gd.dump.sweep import merge_staged, reset_staging, stage_record, sweep_record
from src.l2gd.dump.trace import write_json, write_run
from src.l2gd.errors import SweepPointError, exit_code_for

_worker_pipeline: ExperimentPipeline | None = None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='l2gd', description="Compressed L2GD experiments")
    subparsers = parser.add_subparsers(dest='command', required=True)
    for name, help_text in (
            ('run', "run one configuration"),
            ('sweep', "run a (p, lambda) sweep"),
            ('theory', "write the theory report without running"),
    ):
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument('--config', help="YAML config file")
        sub.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                         help="override a config field (repeatable, dotted keys for nested fields)")
        sub.add_argument('--out', help="output directory (overrides out_dir)")
        sub.add_argument('--seeds', type=int, help="number of seeds (overrides seeds)")
        sub.add_argument('--jobs', type=int, help="parallel workers for sweeps (overrides jobs)")
        verbosity = sub.add_mutually_exclusive_group()
        verbosity.add_argument('--verbose', action='store_true', help="debug logging")
        verbosity.add_argument('--quiet', action='store_true', help="warnings and errors only")
    return parser


def raw_config(args: argparse.Namespace) -> dict:
    raw = apply_overrides(load_raw(args.config), args.overrides)
    if args.out is not None:
        raw['out_dir'] = args.out
    if args.seeds is not None:
        raw['seeds'] = args.seeds
    if args.jobs is not None:
        raw['jobs'] = args.jobs
    return raw


def run_command(raw: dict) -> None:
    config = parse_run_config(raw)
    result = ExperimentPipeline().run(config)
    for path in write_run(result, config.out_dir):
        logging.debug(f"wrote {path}")
    logging.info(f"run finished: {len(result.traces)} trace(s) in {config.out_dir}")


def theory_command(raw: dict) -> None:
    config = parse_run_config(raw)
    report = ExperimentPipeline().theory(config)
    path = os.path.join(config.out_dir, 'theory.json')
    os.makedirs(config.out_dir, exist_ok=True)
    write_json(report.to_dict(), path)
    logging.info(f"theory report written to {path}")


def run_sweep_point(p_index: int, lam_index: int, seed: int, config_json: str) -> dict:
    """Worker entry point: run one sweep point and stage its record."""
    global _worker_pipeline
    if _worker_pipeline is None:
        _worker_pipeline = ExperimentPipeline()
    config = RunConfig.model_validate_json(config_json)
    result = _worker_pipeline.run(config, with_theory=False)
    record = sweep_record(p_index, lam_index, seed, config, result.summaries[0])
    stage_record(config.out_dir, record)
    logging.info(f"sweep point p={config.probability} lam={config.lam} seed={seed}: loss {record['final_loss']:.6g}")
    return record


def sweep_command(raw: dict) -> None:
    spec = parse_sweep_spec(raw)
    points = spec.points()
    out_dir = spec.base.out_dir
    reset_staging(out_dir)
    logging.info(f"sweep: {len(spec.p_grid)} p x {len(spec.lam_grid)} lambda x {spec.base.seeds} seed(s), jobs={spec.base.jobs}")

    if spec.base.jobs == 1:
        for p_index, lam_index, seed, config in points:
            try:
                run_sweep_point(p_index, lam_index, seed, config.model_dump_json())
            except Exception as exc:
                raise SweepPointError(p_index, lam_index, seed, exc) from exc
    else:
        with ProcessPoolExecutor(max_workers=spec.base.jobs) as pool:
            futures = {
                pool.submit(run_sweep_point, p_index, lam_index, seed, config.model_dump_json()): (p_index, lam_index, seed)
                for p_index, lam_index, seed, config in points
            }
            done, _ = wait(futures, return_when=FIRST_EXCEPTION)
            for future in done:
                if future.exception() is not None:
                    pool.shutdown(cancel_futures=True)
                    raise SweepPointError(*futures[future], future.exception()) from future.exception()

    records = merge_staged(out_dir)
    logging.info(f"sweep finished: {len(records)} record(s) in {out_dir}")


COMMANDS = {
    'run': run_command,
    'sweep': sweep_command,
    'theory': theory_command,
}


def describe_validation_error(exc: ValidationError) -> str:
    lines = [f"{exc.error_count()} invalid config field(s):"]
    for error in exc.errors():
        location = '.'.join(str(part) for part in error['loc']) or '<root>'
        lines.append(f"  {location}: {error['msg']}")
    return '\n'.join(lines)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, force=True)

    try:
        COMMANDS[args.command](raw_config(args))
    except ValidationError as exc:
        logging.error(describe_validation_error(exc))
        return exit_code_for(exc)
    except SweepPointError as exc:
        if isinstance(exc.cause, ValidationError):
            logging.error(f"{exc}\n{describe_validation_error(exc.cause)}")
        else:
            logging.error(str(exc))
        return exc.exit_code
    except Exception as exc:
        code = exit_code_for(exc)
        if code == 3 and not hasattr(exc, 'exit_code'):
            logging.exception(f"internal error: {exc}")
        else:
            logging.error(f"{type(exc).__name__}: {exc}")
        return code
    return 0


if __name__ == '__main__':
    sys.exit(main())
