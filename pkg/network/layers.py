# network/layers.py
"""
Parameter store and the small layers the network is assembled from.
"""

import logging
from typing import Dict, Iterator, Tuple

import numpy as np

from core.conv import conv3d
from core.errors import ConfigError, ShapeError
from core.norm import instance_norm
from core.tensor import Tensor

logger = logging.getLogger(__name__)


class ParameterStore:
    """Learnable tensors keyed by unique hierarchical names, in registration order"""

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self._params: Dict[str, Tensor] = {}

    def register(self, name: str, tensor: Tensor) -> Tensor:
        if name in self._params:
            raise ConfigError(f"duplicate parameter name '{name}'")
        tensor.requires_grad = True
        tensor.name = name
        self._params[name] = tensor
        return tensor

    def add(self, name: str, values: np.ndarray) -> Tensor:
        return self.register(name, Tensor(values))

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __iter__(self) -> Iterator[str]:
        return iter(self._params)

    def __len__(self) -> int:
        return len(self._params)

    def items(self):
        return self._params.items()

    def names(self):
        return list(self._params)

    def count(self, prefix: str = "") -> int:
        """Number of scalar parameters whose name starts with `prefix`"""
        return sum(t.size for name, t in self._params.items() if name.startswith(prefix))

    def shapes(self) -> Dict[str, Tuple[int, ...]]:
        return {name: t.shape for name, t in self._params.items()}

    def snapshot(self) -> Dict[str, np.ndarray]:
        return {name: t.data.copy() for name, t in self._params.items()}

    def load_arrays(self, arrays: Dict[str, np.ndarray]):
        """Overwrite every parameter in place; names and shapes must match exactly"""
        missing = sorted(set(self._params) - set(arrays))
        extra = sorted(set(arrays) - set(self._params))
        if missing or extra:
            raise ConfigError(f"parameter sets differ: missing {missing}, unexpected {extra}")
        for name, tensor in self._params.items():
            values = np.asarray(arrays[name], dtype=np.float64)
            if values.shape != tensor.shape:
                raise ShapeError(f"load '{name}'", tensor.shape, values.shape)
            tensor.data[...] = values


class Conv3d:
    """Bias-free 3D convolution with He-normal initialization"""

    def __init__(self, store: ParameterStore, name: str, in_channels: int, out_channels: int,
                 kernel: int = 3, padding_mode: str = "zero", stride: int = 1):
        fan_in = in_channels * kernel ** 3
        values = store.rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(out_channels, in_channels) + (kernel,) * 3)
        self.weight = store.add(f"{name}.weight", values)
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.padding_mode = padding_mode
        self.stride = stride

    def __call__(self, x: Tensor) -> Tensor:
        return conv3d(x, self.weight, padding_mode=self.padding_mode, stride=self.stride)


class InstanceNorm:
    def __init__(self, store: ParameterStore, name: str, channels: int, epsilon: float = 1e-5):
        self.scale = store.add(f"{name}.scale", np.ones(channels))
        self.shift = store.add(f"{name}.shift", np.zeros(channels))
        self.epsilon = epsilon

    def __call__(self, x: Tensor) -> Tensor:
        return instance_norm(x, self.scale, self.shift, self.epsilon)
