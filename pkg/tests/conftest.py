import numpy as np
import pytest

from models.configs import NetworkConfig, TrainConfig, Variant
from models.volume import VolumeSample


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def sphere_sample(index: int, extent: int = 8, num_classes: int = 2, seed: int = 0) -> VolumeSample:
    """Noisy two-level ball, small enough for a depth-2 network"""
    local = np.random.default_rng([seed, index])
    grid = np.stack(np.meshgrid(*(np.arange(extent),) * 3, indexing="ij"))
    center = local.uniform(extent / 2 - 1, extent / 2 + 1, size=3)
    radius = local.uniform(extent / 4, extent / 3)
    inside = ((grid - center[:, None, None, None]) ** 2).sum(axis=0) <= radius ** 2
    label = inside.astype(np.int64) % num_classes
    image = (label + 1.0)[None] + local.normal(0.0, 0.05, size=(1,) + label.shape)
    return VolumeSample(image=image, label=label, id=f"toy_{index:03d}", num_classes=num_classes)


@pytest.fixture
def toy_samples():
    return [sphere_sample(i) for i in range(4)]


@pytest.fixture
def tiny_network_config():
    def build(variant=Variant.BASELINE, num_classes=2, deep_supervision_levels=1):
        return NetworkConfig(variant=variant, depth=2, base_channels=8, num_classes=num_classes,
                             deep_supervision_levels=deep_supervision_levels)
    return build


@pytest.fixture
def tiny_train_config():
    return TrainConfig(max_epochs=2, patience=1, folds=2, seed=7)
