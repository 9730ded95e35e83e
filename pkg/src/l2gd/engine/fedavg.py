"""
FedAvg baseline with compressed differences.

Each round every client runs T full gradient steps on f_i from the shared model w,
forms g_computed = w - local_result and uploads C_i(g_computed - g_prev); both ends
then hold g = g_prev + C_i(g_computed - g_prev). The master broadcasts C_M(mean_i g_i)
and w moves by that amount. With identity compressors this is plain FedAvg.

With `p` set, round r runs T_r local steps, T_r being the number of failed p-coin
flips before a success on the run's coin stream. A round with T_r = 0 exchanges
nothing. At a matched seed, lr = eta / (n (1 - p)) and identity compressors this is
L2GD with aggregation weight eta lambda / (n p) = 1, observed at its aggregation steps.
"""
import logging

import numpy as np

from src.l2gd.compressors.operators import compress
from src.l2gd.engine.params import FedAvgParams
from src.l2gd.engine.streams import StreamSet
from src.l2gd.engine.trace import MetricsTrace, measure
from src.l2gd.errors import ConfigError
from src.l2gd.objective.models import PersonalizedObjective
from src.l2gd.objective.stacked import StackedModel


def local_descent(objective: PersonalizedObjective, i: int, w: np.ndarray, lr: float, steps: int) -> np.ndarray:
    local = w.copy()
    for _ in range(steps):
        local -= lr * objective.local_gradient(i, local)
    return local


def coin_local_steps(coin: np.random.Generator, p: float) -> int:
    """Failures of the p-coin before its first success."""
    steps = 0
    while not coin.random() < p:
        steps += 1
    return steps


def run_fedavg(
        objective: PersonalizedObjective,
        params: FedAvgParams,
        seed: int,
        w0: np.ndarray | None = None,
        x_star: StackedModel | None = None,
) -> MetricsTrace:
    """
    Run R rounds; metrics are measured at the consensus model Qw (h = 0 there).

    With a fixed local-step count record k counts rounds and `rounds` equals k.
    With coin-drawn counts k is the step count sum_r (T_r + 1), comparable to an
    L2GD iteration index, and `rounds` counts the rounds that communicated.
    """
    n, d = objective.n, objective.d
    if len(params.client_compressors) != n:
        raise ConfigError(f"{len(params.client_compressors)} client compressors for {n} clients")
    for spec in (*params.client_compressors, params.master_compressor):
        spec.check_dimension(d)

    streams = StreamSet.create(seed, params.client_compressors, params.master_compressor)
    w = np.zeros(d) if w0 is None else np.array(w0, dtype=float)
    memory = np.zeros((n, d))
    uplink_bits = downlink_bits = 0

    trace = MetricsTrace(algorithm='fedavg', n=n, seed=seed)
    trace.append(measure(objective, StackedModel.consensus(w, n), 0, None, 0, 0, 0, x_star))

    drawn = params.p is not None
    label = f"p={params.p}" if drawn else f"T={params.local_steps}"
    k = communicated = 0
    logging.debug(f"fedavg: R={params.rounds} {label} lr={params.lr:.4g} seed={seed}")
    for r in range(1, params.rounds + 1):
        steps = coin_local_steps(streams.coin, params.p) if drawn else params.local_steps
        k = k + steps + 1 if drawn else r
        if steps > 0:
            averaged = np.zeros(d)
            for i in range(n):
                computed = w - local_descent(objective, i, w, params.lr, steps)
                message = compress(params.client_compressors[i], computed - memory[i], streams.clients[i])
                memory[i] = memory[i] + message.payload
                uplink_bits += message.bit_cost
                averaged += memory[i]
            averaged /= n
            broadcast = compress(params.master_compressor, averaged, streams.master)
            downlink_bits += broadcast.bit_cost
            w = w - broadcast.payload
            communicated += 1

        if r % params.record_every == 0 or r == params.rounds:
            trace.append(measure(
                objective, StackedModel.consensus(w, n), k, None, uplink_bits, downlink_bits, communicated, x_star,
            ))

    trace.model = StackedModel.consensus(w, n)
    final = trace.final
    logging.info(
        f"fedavg seed={seed}: R={params.rounds} {label} final loss={final.loss:.6g} "
        f"bits/n={trace.bits_per_client:.4g}"
    )
    return trace
