import asyncio
import logging

import yaml
from mcp.server.fastmcp import FastMCP

from src.l2gd.compressors.base import CompressorKind, CompressorSpec
from src.l2gd.compressors.operators import bit_cost, variance_factor
from src.l2gd.compute.pipeline import ExperimentPipeline
from src.l2gd.config import parse_run_config
from src.l2gd.errors import ConfigError, NoVarianceCertificate
from src.l2gd.theory.optimal_p import optimal_p_communication, optimal_p_rate, optimal_p_rate_upper

logging.basicConfig(level=logging.INFO)

mcp = FastMCP("L2GD")


class Server:
    """
    State shared by the tools: one lazy pipeline, so repeated reports reuse data and x*.
    """

    pipeline: ExperimentPipeline = ExperimentPipeline()


@mcp.tool()
async def theory_report(config_yaml: str) -> dict:
    """
    Compute the theory report of a run configuration without running it.

    Args:
        config_yaml (str): run configuration as YAML text (same fields as the CLI config file)

    Returns:
        dict: smoothness constants, omega/alpha/beta/gamma/delta, optimal probabilities
              with grid-oracle verdicts, budget numbers and flags

    Raises:
        ValueError: If the configuration is invalid or the dataset cannot be loaded

    Example:
        theory_report("dataset: {source: synth}\\nlam: 5.0\\n")
    """
    raw = yaml.safe_load(config_yaml) or {}
    if not isinstance(raw, dict):
        raise ConfigError("config_yaml must be a YAML mapping")
    config = parse_run_config(raw)
    report = await asyncio.to_thread(Server.pipeline.theory, config)
    return report.to_dict()


@mcp.tool()
async def optimal_probability(lam: float, L: float, n: int, alpha: float = 0.) -> dict:
    """
    Aggregation probability minimizing iterations (rate) and communication rounds.

    Args:
        lam (float): penalty weight lambda >= 0
        L (float): smoothness constant L = n L_f > 0
        n (int): number of clients
        alpha (float): compression constant alpha (0 without compression)

    Returns:
        dict: {'rate': {...}, 'rate_upper': float, 'communication': {...}}, each with p_star,
              p_e, p_A and flags

    Example:
        optimal_probability(lam=1.0, L=1.0, n=5) -> rate.p_star == 2/3
    """
    return {
        'rate': optimal_p_rate(lam, L, n, alpha).to_dict(),
        'rate_upper': optimal_p_rate_upper(lam, L),
        'communication': optimal_p_communication(lam, L, n, alpha).to_dict(),
    }


@mcp.tool()
async def compressor_summary(kind: str, d: int, levels: int = 8, q: float = 0.5, k: int = 10) -> dict:
    """
    Variance factor and per-message bit cost of a compressor at dimension d.

    Args:
        kind (str): one of identity, random_dithering, natural, terngrad, bernoulli, top_k
        d (int): vector dimension
        levels (int): random dithering levels s
        q (float): Bernoulli keep probability
        k (int): TopK kept coordinates

    Returns:
        dict: label, unbiased, omega (None for biased kinds) and bits for a dense input
              (expected bits for Bernoulli)

    Example:
        compressor_summary('natural', 124) -> {'omega': 0.125, 'bits': 1116, ...}
    """
    spec = CompressorSpec(kind=CompressorKind(kind), levels=levels, q=q, k=k)
    spec.check_dimension(d)
    try:
        omega = variance_factor(spec, d)
    except NoVarianceCertificate:
        omega = None
    if spec.kind == CompressorKind.BERNOULLI:
        bits = spec.q * bit_cost(spec, d, d)
    elif spec.kind == CompressorKind.TOP_K:
        bits = bit_cost(spec, d, spec.k)
    else:
        bits = bit_cost(spec, d, d)
    return {'label': spec.label(), 'unbiased': spec.unbiased, 'omega': omega, 'bits': bits}


if __name__ == "__main__":
    mcp.run(transport='stdio')
