# models/configs.py
"""
Declarative configs for morphological blocks, the segmentation network and training.
"""

from dataclasses import asdict, dataclass, field, fields
from enum import Enum
from typing import Dict, List, Optional, Tuple

from core.conv import check_window
from core.errors import ConfigError


class OpImpl(str, Enum):
    NON_LEARNABLE = "non_learnable"
    CHM = "chm"


class Pathway(str, Enum):
    EROSION = "erosion"
    DILATION = "dilation"
    OPENING = "opening"
    CLOSING = "closing"


class Variant(str, Enum):
    """The five architectures compared; declaration order is report order"""
    BASELINE = "baseline"
    NON_LEARNABLE = "nonlearnable"
    NON_LEARNABLE_SKIP = "nonlearnable-skip"
    CHM = "chm"
    CHM_SKIP = "chm-skip"

    @property
    def op_impl(self) -> Optional[OpImpl]:
        if self is Variant.BASELINE:
            return None
        return OpImpl.CHM if self in (Variant.CHM, Variant.CHM_SKIP) else OpImpl.NON_LEARNABLE

    @property
    def skip(self) -> bool:
        return self in (Variant.NON_LEARNABLE_SKIP, Variant.CHM_SKIP)

    @classmethod
    def parse(cls, name: str) -> "Variant":
        return _enum(cls, name, "variant")


ALL_PATHWAYS = (Pathway.EROSION, Pathway.DILATION, Pathway.OPENING, Pathway.CLOSING)


def _enum(enum_cls, value, what: str):
    try:
        return enum_cls(value)
    except ValueError:
        valid = ", ".join(member.value for member in enum_cls)
        raise ConfigError(f"unknown {what} '{value}', valid names: {valid}")


def _from_dict(cls, data: Dict):
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"{cls.__name__}: unknown fields {unknown}")
    try:
        return cls(**data)
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{cls.__name__}: {e}") from e


@dataclass
class MorphBlockConfig:
    """Parallel morphological pathways joined by channel concatenation"""
    in_channels: int
    out_channels: int
    op_impl: OpImpl = OpImpl.NON_LEARNABLE
    skip: bool = True
    pathways: Tuple[Pathway, ...] = ALL_PATHWAYS
    window: Tuple[int, int, int] = (3, 3, 3)
    reduce_channels: Optional[int] = None  # defaults to out_channels / len(pathways)
    leaky_slope: float = 0.01

    def __post_init__(self):
        self.op_impl = _enum(OpImpl, self.op_impl, "op_impl")
        self.pathways = tuple(_enum(Pathway, p, "pathway") for p in self.pathways)
        self.window = check_window(self.window, "morph block window")
        if self.in_channels < 1 or self.out_channels < 1:
            raise ConfigError(f"channels must be positive, got in={self.in_channels} out={self.out_channels}")
        if not self.pathways:
            raise ConfigError("morph block needs at least one pathway")
        if self.out_channels % len(self.pathways):
            raise ConfigError(
                f"out_channels={self.out_channels} is not divisible by {len(self.pathways)} pathways")
        if self.reduce_channels is None:
            self.reduce_channels = self.pathway_channels
        if self.reduce_channels < 1:
            raise ConfigError(f"reduce_channels must be positive, got {self.reduce_channels}")

    @property
    def pathway_channels(self) -> int:
        return self.out_channels // len(self.pathways)


@dataclass
class NetworkConfig:
    variant: Variant = Variant.BASELINE
    depth: int = 3
    base_channels: int = 8
    num_classes: int = 4
    deep_supervision_levels: int = 2
    input_channels: int = 1
    window: Tuple[int, int, int] = (3, 3, 3)
    leaky_slope: float = 0.01

    def __post_init__(self):
        self.variant = _enum(Variant, self.variant, "variant")
        self.window = check_window(self.window, "network morph window")
        if self.depth < 2:
            raise ConfigError(f"depth must be >= 2, got {self.depth}")
        if self.num_classes < 2:
            raise ConfigError(f"num_classes must be >= 2, got {self.num_classes}")
        if self.input_channels < 1:
            raise ConfigError(f"input_channels must be >= 1, got {self.input_channels}")
        if self.base_channels < 2 or self.base_channels % 2:
            raise ConfigError(f"base_channels must be even and >= 2, got {self.base_channels}")
        if self.variant is not Variant.BASELINE and (self.base_channels // 2) % len(ALL_PATHWAYS):
            raise ConfigError(
                f"morph half of base_channels={self.base_channels} must be divisible by {len(ALL_PATHWAYS)} pathways")
        if not 1 <= self.deep_supervision_levels <= self.depth - 1:
            raise ConfigError(
                f"deep_supervision_levels must be in [1, {self.depth - 1}], got {self.deep_supervision_levels}")

    def level_channels(self, level: int) -> int:
        return self.base_channels * 2 ** level

    @property
    def spatial_divisor(self) -> int:
        return 2 ** (self.depth - 1)

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["variant"] = self.variant.value
        data["window"] = list(self.window)
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "NetworkConfig":
        data = dict(data)
        if "variant" in data:
            data["variant"] = Variant.parse(data["variant"])
        if "window" in data:
            data["window"] = tuple(data["window"])
        return _from_dict(cls, data)


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_epsilon: float = 1e-8
    max_epochs: int = 50
    patience: int = 5
    batch_size: int = 1
    folds: int = 5
    seed: int = 0
    split_seed: Optional[int] = None  # defaults to seed
    evaluation: str = "ensemble"  # or "out_of_fold"

    def __post_init__(self):
        if self.batch_size != 1:
            raise ConfigError(f"batch_size is fixed at 1, got {self.batch_size}")
        if self.folds < 2:
            raise ConfigError(f"folds must be >= 2, got {self.folds}")
        if self.patience < 1:
            raise ConfigError(f"patience must be >= 1, got {self.patience}")
        if self.max_epochs < 1:
            raise ConfigError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.evaluation not in ("ensemble", "out_of_fold"):
            raise ConfigError(f"evaluation must be 'ensemble' or 'out_of_fold', got '{self.evaluation}'")
        if self.split_seed is None:
            self.split_seed = self.seed

    def to_dict(self) -> Dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict) -> "TrainConfig":
        return _from_dict(cls, dict(data))


@dataclass
class HistoryRow:
    fold: int
    epoch: int
    train_loss: float
    val_loss: float


@dataclass
class TrainHistory:
    rows: List[HistoryRow] = field(default_factory=list)
    best_epoch: int = 0
    best_val_loss: float = float("inf")
    stopped_early: bool = False
