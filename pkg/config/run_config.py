# config/run_config.py
"""
Architecture variants and default run configurations.
Each variant is one row of the comparison table.
"""

import copy
from typing import Dict, Optional, Tuple

from core.errors import ConfigError
from models.configs import NetworkConfig, TrainConfig, Variant
from models.volume import SynthSpec
from utils.helpers import read_json

# Variant registry, in report order
# Set 'enabled' to False to leave a variant out of `get_enabled_variants()`
VARIANTS = {
    'baseline': {
        'variant': Variant.BASELINE,
        'display_name': 'Baseline',
        'description': 'Pure context blocks in every encoder level',
        'enabled': True
    },
    'nonlearnable': {
        'variant': Variant.NON_LEARNABLE,
        'display_name': 'non-Learnable',
        'description': 'Flat min/max morphological half, no identity mapping',
        'enabled': True
    },
    'nonlearnable-skip': {
        'variant': Variant.NON_LEARNABLE_SKIP,
        'display_name': 'non-Learnable + skip',
        'description': 'Flat min/max morphological half with identity mapping',
        'enabled': True
    },
    'chm': {
        'variant': Variant.CHM,
        'display_name': 'CHM Block',
        'description': 'Learnable counter-harmonic-mean half, no identity mapping',
        'enabled': True
    },
    'chm-skip': {
        'variant': Variant.CHM_SKIP,
        'display_name': 'CHM Block + skip',
        'description': 'Learnable counter-harmonic-mean half with identity mapping',
        'enabled': True
    },
}

# Default sections of a run config file
DEFAULT_NETWORK = {
    'depth': 3,
    'base_channels': 8,
    'num_classes': 4,
    'deep_supervision_levels': 2,
    'input_channels': 1,
    'window': [3, 3, 3],
    'leaky_slope': 0.01,
}

DEFAULT_TRAIN = {
    'learning_rate': 1e-3,
    'beta1': 0.9,
    'beta2': 0.999,
    'adam_epsilon': 1e-8,
    'max_epochs': 50,
    'patience': 5,
    'batch_size': 1,
    'folds': 5,
    'seed': 0,
    'split_seed': None,
    'evaluation': 'ensemble',
}

DEFAULT_DATA = SynthSpec().to_dict()


def get_enabled_variants() -> Dict[str, Dict]:
    """Return dictionary of enabled variants only"""
    return {
        name: entry
        for name, entry in VARIANTS.items()
        if entry.get('enabled', True)
    }


def variant_entry(variant: Variant) -> Dict:
    return VARIANTS[variant.value]


def display_name(variant: Variant) -> str:
    return variant_entry(variant)['display_name']


def deep_merge(base: Dict, override: Dict) -> Dict:
    """Recursively overlay `override` onto a copy of `base`"""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def resolve_run_config(overrides: Optional[Dict] = None, variant: Optional[str] = None,
                       seed: Optional[int] = None) -> Tuple[NetworkConfig, TrainConfig]:
    """Defaults, then `overrides` ({"network": {...}, "train": {...}}), then explicit arguments"""
    overrides = overrides or {}
    unknown = sorted(set(overrides) - {'network', 'train'})
    if unknown:
        raise ConfigError(f"run config: unknown sections {unknown}, expected 'network' and 'train'")
    merged = deep_merge({'network': DEFAULT_NETWORK, 'train': DEFAULT_TRAIN}, overrides)
    if variant is not None:
        merged['network']['variant'] = Variant.parse(variant).value
    if seed is not None:
        merged['train']['seed'] = seed
    return NetworkConfig.from_dict(merged['network']), TrainConfig.from_dict(merged['train'])


def load_run_config(path: Optional[str] = None, variant: Optional[str] = None,
                    seed: Optional[int] = None) -> Tuple[NetworkConfig, TrainConfig]:
    return resolve_run_config(read_json(path) if path else {}, variant, seed)


def load_data_spec(path: str) -> SynthSpec:
    return SynthSpec.from_dict(deep_merge(DEFAULT_DATA, read_json(path)))
