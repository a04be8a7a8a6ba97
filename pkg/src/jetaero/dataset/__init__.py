# dataset/__init__.py
from jetaero.dataset.samples import AeroDataset, AeroSample, wind_direction
from jetaero.dataset.augment import MirrorMap, mirror_augment, mirror_map, split
from jetaero.dataset.storage import parse_dataset, read_dataset, write_dataset
from jetaero.dataset.oracle import OracleConfig, load_oracle_config, oracle_generate

__all__ = [
    'AeroDataset', 'AeroSample', 'wind_direction',
    'MirrorMap', 'mirror_augment', 'mirror_map', 'split',
    'parse_dataset', 'read_dataset', 'write_dataset',
    'OracleConfig', 'load_oracle_config', 'oracle_generate',
]
