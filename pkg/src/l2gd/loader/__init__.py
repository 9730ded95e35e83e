from src.l2gd.loader.dataset import ClientShard, LabeledExample, PartitionedDataset
from src.l2gd.loader.libsvm import ParsedLibsvm, parse_libsvm, serialize_libsvm
from src.l2gd.loader.partition import partition_sequential, partition_shuffled
from src.l2gd.loader.synth import synth_instance

__all__ = [
    'ClientShard',
    'LabeledExample',
    'ParsedLibsvm',
    'PartitionedDataset',
    'parse_libsvm',
    'partition_sequential',
    'partition_shuffled',
    'serialize_libsvm',
    'synth_instance',
]
