from src.l2gd.engine.fedavg import run_fedavg
from src.l2gd.engine.l2gd import (
    GradientDraw,
    L2gdState,
    MasterAverage,
    aggregation_weight,
    compressed_average,
    compressed_average_rows,
    init_state,
    l2gd_step,
    run_l2gd,
    run_states,
    sample_stochastic_gradients,
    stochastic_gradient,
)
from src.l2gd.engine.params import FedAvgParams, L2gdParams
from src.l2gd.engine.streams import StreamSet, estimator_stream
from src.l2gd.engine.trace import TRACE_SCHEMA, MetricsTrace, TraceRecord

__all__ = [
    'FedAvgParams',
    'GradientDraw',
    'L2gdParams',
    'L2gdState',
    'MasterAverage',
    'MetricsTrace',
    'StreamSet',
    'TRACE_SCHEMA',
    'TraceRecord',
    'aggregation_weight',
    'compressed_average',
    'compressed_average_rows',
    'estimator_stream',
    'init_state',
    'l2gd_step',
    'run_fedavg',
    'run_l2gd',
    'run_states',
    'sample_stochastic_gradients',
    'stochastic_gradient',
]
