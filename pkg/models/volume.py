# models/volume.py
from dataclasses import asdict, dataclass, fields
from typing import Dict, Tuple

import numpy as np

from core.errors import ConfigError, ShapeError


@dataclass
class VolumeSample:
    """An (image, label) training pair"""
    image: np.ndarray  # [C, D, H, W] float64
    label: np.ndarray  # [D, H, W] int64 class ids in [0, num_classes)
    id: str
    num_classes: int

    def __post_init__(self):
        self.image = np.asarray(self.image, dtype=np.float64)
        self.label = np.asarray(self.label, dtype=np.int64)
        if self.image.ndim != 4:
            raise ShapeError("VolumeSample.image", "[C,D,H,W]", self.image.shape)
        if self.label.shape != self.image.shape[1:]:
            raise ShapeError("VolumeSample.label", self.image.shape[1:], self.label.shape)
        if not np.all(np.isfinite(self.image)):
            raise ConfigError(f"sample {self.id}: image contains non-finite values")
        if self.label.size and (self.label.min() < 0 or self.label.max() >= self.num_classes):
            raise ConfigError(f"sample {self.id}: label values must lie in [0, {self.num_classes})")

    @property
    def extent(self) -> Tuple[int, int, int]:
        return tuple(self.label.shape)

    @property
    def channels(self) -> int:
        return self.image.shape[0]

    def batch(self) -> np.ndarray:
        """Image as a batch of one: [1, C, D, H, W]"""
        return self.image[None]

    def one_hot(self) -> np.ndarray:
        """Label as [1, K, D, H, W]"""
        return (np.arange(self.num_classes)[:, None, None, None] == self.label[None]).astype(np.float64)[None]


@dataclass
class SynthSpec:
    """Parameters of the nested-ellipsoid synthetic dataset"""
    extent: Tuple[int, int, int] = (32, 32, 32)
    num_classes: int = 4
    num_samples: int = 20
    channels: int = 1
    ellipsoid_count: Tuple[int, int] = (1, 3)
    radius_range: Tuple[float, float] = (9.0, 12.0)
    nesting_margins: Tuple[float, ...] = (2.5, 2.5)
    noise_sigma: float = 0.1
    seed: int = 0
    min_class_fraction: float = 0.01
    max_attempts: int = 200

    def __post_init__(self):
        self.extent = tuple(int(e) for e in self.extent)
        self.ellipsoid_count = tuple(int(c) for c in self.ellipsoid_count)
        self.radius_range = tuple(float(r) for r in self.radius_range)
        self.nesting_margins = tuple(float(m) for m in self.nesting_margins)
        if len(self.extent) != 3 or any(e < 2 for e in self.extent):
            raise ConfigError(f"extent must be three extents >= 2, got {self.extent}")
        if self.num_classes < 2:
            raise ConfigError(f"num_classes must be >= 2, got {self.num_classes}")
        if self.num_samples < 1 or self.channels < 1:
            raise ConfigError("num_samples and channels must be positive")
        low, high = self.ellipsoid_count
        if not 1 <= low <= high:
            raise ConfigError(f"ellipsoid_count must satisfy 1 <= lo <= hi, got {self.ellipsoid_count}")
        r_low, r_high = self.radius_range
        if not 0 < r_low <= r_high:
            raise ConfigError(f"radius_range must satisfy 0 < lo <= hi, got {self.radius_range}")
        needed = self.num_classes - 2
        if len(self.nesting_margins) < needed:
            raise ConfigError(f"{self.num_classes} classes need {needed} nesting margins, got {len(self.nesting_margins)}")
        if any(m <= 0 for m in self.nesting_margins[:needed]):
            raise ConfigError("nesting margins must be positive")
        if sum(self.nesting_margins[:needed]) >= r_low:
            raise ConfigError(
                f"infeasible nesting: margins {self.nesting_margins[:needed]} exceed the smallest radius {r_low}")
        if self.noise_sigma < 0:
            raise ConfigError(f"noise_sigma must be >= 0, got {self.noise_sigma}")

    def check_depth(self, depth: int):
        """Extents must halve cleanly depth-1 times"""
        divisor = 2 ** (depth - 1)
        if any(e % divisor for e in self.extent):
            raise ConfigError(f"extent {self.extent} is not divisible by 2^(depth-1)={divisor}")

    def to_dict(self) -> Dict:
        data = asdict(self)
        return {key: list(value) if isinstance(value, tuple) else value for key, value in data.items()}

    @classmethod
    def from_dict(cls, data: Dict) -> "SynthSpec":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"SynthSpec: unknown fields {unknown}")
        try:
            return cls(**data)
        except ConfigError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError(f"SynthSpec: {e}") from e
