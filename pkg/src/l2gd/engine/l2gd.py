"""
Compressed loopless local gradient descent.

Each iteration flips a p-coin xi_k:
- xi_k = 0: local step x_i <- x_i - eta / (n (1 - p)) grad f_i(x_i), no communication
- xi_k = 1 after xi_{k-1} = 0: clients upload C_i(x_i), the master broadcasts
  C_M(mean of uploads) and every block moves toward it
- xi_k = 1 after xi_{k-1} = 1: blocks move toward the stored broadcast, no communication
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from src.l2gd.aggregate import Aggregate
from src.l2gd.compressors.base import CompressorSpec
from src.l2gd.compressors.operators import compress, compress_rows
from src.l2gd.engine.params import L2gdParams
from src.l2gd.engine.streams import StreamSet
from src.l2gd.engine.trace import MetricsTrace, measure
from src.l2gd.errors import ConfigError, InvariantViolation
from src.l2gd.objective.models import PersonalizedObjective
from src.l2gd.objective.stacked import StackedModel


@dataclass(frozen=True)
class MasterAverage:
    """One uplink/downlink exchange: mean of the uploads and the broadcast C_M of it."""

    uploaded_mean: np.ndarray
    broadcast: np.ndarray
    uplink_bits: int
    downlink_bits: int


@dataclass(frozen=True)
class GradientDraw:
    """
    One draw of the stochastic gradient G(x).

    `target` is the vector blocks are pulled toward on an aggregation step
    (None on a local step).
    """

    gradient: np.ndarray
    target: np.ndarray | None
    exchange: MasterAverage | None = None


@dataclass(frozen=True, eq=False)
class L2gdState:
    x: StackedModel
    prev_xi: int
    stored_average: np.ndarray
    k: int
    streams: StreamSet
    uplink_bits: int = 0
    downlink_bits: int = 0
    rounds: int = 0


def init_state(params: L2gdParams, x0: StackedModel, seed: int) -> L2gdState:
    if len(params.client_compressors) != x0.n:
        raise ConfigError(f"{len(params.client_compressors)} client compressors for {x0.n} clients")
    for spec in (*params.client_compressors, params.master_compressor):
        spec.check_dimension(x0.d)
    return L2gdState(
        x=x0,
        prev_xi=1,
        stored_average=x0.average.copy(),
        k=0,
        streams=StreamSet.create(seed, params.client_compressors, params.master_compressor),
    )


def compressed_average(
        x: StackedModel,
        client_specs: tuple[CompressorSpec, ...],
        master_spec: CompressorSpec,
        client_rngs: tuple[np.random.Generator, ...],
        master_rng: np.random.Generator,
) -> MasterAverage:
    # accumulate in client order: identity compressors reproduce x.average bit for bit
    uploaded = np.zeros(x.d)
    uplink_bits = 0
    for i in range(x.n):
        message = compress(client_specs[i], x.blocks[i], client_rngs[i])
        uploaded += message.payload
        uplink_bits += message.bit_cost
    uploaded /= x.n
    broadcast = compress(master_spec, uploaded, master_rng)
    return MasterAverage(
        uploaded_mean=uploaded,
        broadcast=broadcast.payload,
        uplink_bits=uplink_bits,
        downlink_bits=broadcast.bit_cost,
    )


def compressed_average_rows(
        blocks: np.ndarray,
        client_specs: tuple[CompressorSpec, ...],
        master_spec: CompressorSpec,
        draws: int,
        rng: np.random.Generator,
) -> np.ndarray:
    """`draws` independent samples of C_M(mean_i C_i(x_i)), shape (draws, d); for Monte-Carlo estimators."""
    n, d = blocks.shape
    uploaded = np.zeros((draws, d))
    for i in range(n):
        payload, _ = compress_rows(client_specs[i], np.broadcast_to(blocks[i], (draws, d)), rng)
        uploaded += payload
    uploaded /= n
    broadcast, _ = compress_rows(master_spec, uploaded, rng)
    return broadcast


def aggregation_weight(eta: float, lam: float, n: int, p: float) -> float:
    """eta lambda / (n p): the fraction of the way each block moves toward the target."""
    return eta * lam / (n * p)


def stochastic_gradient(
        objective: PersonalizedObjective,
        x: StackedModel,
        xi: int,
        prev_xi: int,
        p: float,
        client_specs: tuple[CompressorSpec, ...],
        master_spec: CompressorSpec,
        client_rngs: tuple[np.random.Generator, ...],
        master_rng: np.random.Generator,
        stored_average: np.ndarray | None = None,
) -> GradientDraw:
    """
    The three-case estimator G(x).

    On (xi, prev_xi) = (1, 1) the target is `stored_average`; None selects the
    exact block average x_bar, which is the estimator as analysed.
    """
    if not 0. < p < 1.:
        raise ConfigError(f"p must lie in (0, 1), got {p}")
    n = objective.n
    if xi == 0:
        return GradientDraw(gradient=objective.local_gradients(x.blocks) / (n * (1. - p)), target=None)

    exchange = None
    if prev_xi == 0:
        exchange = compressed_average(x, client_specs, master_spec, client_rngs, master_rng)
        target = exchange.broadcast
    else:
        target = x.average if stored_average is None else stored_average
    gradient = (objective.lam / (n * p)) * (x.blocks - target)
    return GradientDraw(gradient=gradient, target=target, exchange=exchange)


def l2gd_step(objective: PersonalizedObjective, state: L2gdState, params: L2gdParams) -> tuple[L2gdState, int]:
    """
    One iteration; returns the new state and the drawn xi_k.

    The aggregation update is written (1 - c) x_i + c target with c = eta lambda / (n p),
    which equals x - eta G(x) and makes c = 1 land on the target exactly.
    """
    xi = int(state.streams.coin.random() < params.p)
    draw = stochastic_gradient(
        objective,
        state.x,
        xi,
        state.prev_xi,
        params.p,
        params.client_compressors,
        params.master_compressor,
        state.streams.clients,
        state.streams.master,
        stored_average=state.stored_average,
    )

    if xi == 0:
        x = StackedModel.of(state.x.blocks - params.eta * draw.gradient)
    else:
        c = aggregation_weight(params.eta, objective.lam, objective.n, params.p)
        x = StackedModel.of((1. - c) * state.x.blocks + c * draw.target)

    uplink_bits, downlink_bits, rounds = state.uplink_bits, state.downlink_bits, state.rounds
    stored_average = state.stored_average
    if draw.exchange is not None:
        if not (xi == 1 and state.prev_xi == 0):
            raise InvariantViolation(f"communication outside a 0->1 transition at k={state.k}")
        uplink_bits += draw.exchange.uplink_bits
        downlink_bits += draw.exchange.downlink_bits
        rounds += 1
        stored_average = draw.exchange.broadcast
    elif xi == 1 and state.prev_xi == 0:
        raise InvariantViolation(f"0->1 transition without communication at k={state.k}")

    x.check()
    return replace(
        state,
        x=x,
        prev_xi=xi,
        stored_average=stored_average,
        k=state.k + 1,
        uplink_bits=uplink_bits,
        downlink_bits=downlink_bits,
        rounds=rounds,
    ), xi


def run_l2gd(
        objective: PersonalizedObjective,
        params: L2gdParams,
        seed: int,
        x0: StackedModel | None = None,
        x_star: StackedModel | None = None,
) -> MetricsTrace:
    """Run K iterations from x0 (zeros by default), recording metrics before step 0 and every `record_every` steps."""
    x0 = x0 if x0 is not None else StackedModel.zeros(objective.n, objective.d)
    state = init_state(params, x0, seed)
    trace = MetricsTrace(algorithm='l2gd', n=objective.n, seed=seed)
    trace.append(measure(objective, state.x, 0, None, 0, 0, 0, x_star))

    logging.debug(f"l2gd: K={params.iterations} eta={params.eta:.4g} p={params.p} seed={seed}")
    for _ in range(params.iterations):
        state, xi = l2gd_step(objective, state, params)
        if state.k % params.record_every == 0 or state.k == params.iterations:
            trace.append(measure(
                objective, state.x, state.k, xi, state.uplink_bits, state.downlink_bits, state.rounds, x_star,
            ))

    trace.model = state.x
    final = trace.final
    logging.info(
        f"l2gd seed={seed}: K={params.iterations} final loss={final.loss:.6g} "
        f"rounds={final.rounds} bits/n={trace.bits_per_client:.4g}"
    )
    return trace


def run_states(objective: PersonalizedObjective, params: L2gdParams, seed: int, x0: StackedModel | None = None):
    """Yield (state, xi) after every step; used by checks that need the full iterate sequence."""
    x0 = x0 if x0 is not None else StackedModel.zeros(objective.n, objective.d)
    state = init_state(params, x0, seed)
    for _ in range(params.iterations):
        state, xi = l2gd_step(objective, state, params)
        yield state, xi


def sample_stochastic_gradients(
        objective: PersonalizedObjective,
        x: StackedModel,
        p: float,
        client_specs: tuple[CompressorSpec, ...],
        master_spec: CompressorSpec,
        draws: int,
        rng: np.random.Generator,
        batch: int = 2_000,
) -> tuple[Aggregate, Aggregate]:
    """
    Monte-Carlo statistics of G(x) with (xi_k, xi_{k-1}) independent Bernoulli(p) draws.

    Returns:
        (coordinatewise statistics of G over the (n, d) blocks, statistics of ||G||^2)
    """
    n = objective.n
    local = objective.local_gradients(x.blocks) / (n * (1. - p))
    pull = objective.lam / (n * p)
    settled = pull * (x.blocks - x.average)

    mean = Aggregate()
    sq_norm = Aggregate()
    remaining = draws
    while remaining > 0:
        m = min(batch, remaining)
        xi = rng.random(m) < p
        prev_xi = rng.random(m) < p
        samples = np.empty((m,) + x.blocks.shape)
        samples[~xi] = local
        samples[xi & prev_xi] = settled
        fresh = xi & ~prev_xi
        count = int(fresh.sum())
        if count:
            broadcast = compressed_average_rows(x.blocks, client_specs, master_spec, count, rng)
            samples[fresh] = pull * (x.blocks[None, :, :] - broadcast[:, None, :])
        mean.update(Aggregate.of(samples))
        sq_norm.update(Aggregate.of(np.sum(np.square(samples), axis=(1, 2))))
        remaining -= m
    return mean, sq_norm
