# models/struct_element.py
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from core.conv import check_window
from core.errors import ConfigError, ShapeError
from core.tensor import Tensor


class SEKind(str, Enum):
    FLAT = "flat"
    CHM_KERNEL = "chm_kernel"


@dataclass
class StructElement:
    """Morphological window: flat (zero offsets) or a learnable depthwise CHM kernel"""
    window: Tuple[int, int, int]
    kind: SEKind = SEKind.FLAT
    weights: Optional[Tensor] = None  # [C, 1, kd, kh, kw] iff kind is CHM_KERNEL

    def __post_init__(self):
        self.window = check_window(self.window, "structuring element")
        self.kind = SEKind(self.kind)
        if self.kind is SEKind.FLAT:
            if self.weights is not None:
                raise ConfigError("flat structuring element carries no weights")
            return
        if self.weights is None:
            raise ConfigError("CHM structuring element needs a weight tensor")
        shape = self.weights.shape
        if len(shape) != 5 or shape[1] != 1 or shape[2:] != self.window:
            raise ShapeError("StructElement weights", ("C", 1) + self.window, shape)
        if not np.all(np.isfinite(self.weights.data)):
            raise ConfigError("CHM structuring element weights must be finite")

    @property
    def volume(self) -> int:
        return int(np.prod(self.window))

    @property
    def channels(self) -> Optional[int]:
        return None if self.weights is None else self.weights.shape[0]

    @classmethod
    def flat(cls, window=(3, 3, 3)) -> "StructElement":
        return cls(window=tuple(window))

    @classmethod
    def chm(cls, channels: int, window=(3, 3, 3), rng: Optional[np.random.Generator] = None,
            noise: float = 0.1, name: Optional[str] = None) -> "StructElement":
        """Learnable kernel: 1/|window| per entry plus uniform noise within +-noise of that value"""
        window = check_window(window, "structuring element")
        rng = rng if rng is not None else np.random.default_rng(0)
        base = 1.0 / np.prod(window)
        values = base * (1.0 + rng.uniform(-noise, noise, size=(channels, 1) + window))
        return cls(window, SEKind.CHM_KERNEL, Tensor(values, requires_grad=True, name=name))

    @classmethod
    def uniform(cls, channels: int, window=(3, 3, 3)) -> "StructElement":
        """Fixed CHM kernel with every entry 1/|window|"""
        window = check_window(window, "structuring element")
        values = np.full((channels, 1) + window, 1.0 / np.prod(window))
        return cls(window, SEKind.CHM_KERNEL, Tensor(values))
