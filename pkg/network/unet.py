# network/unet.py
"""
U-Net segmentation model with deep supervision.

Encoder levels of the non-baseline variants concatenate a context block and a
morphological block, each fed the full level input and each emitting half the
level's channels. Decoder, up-sampling and heads are identical across variants.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from core.conv import upsample_nearest
from core.errors import ShapeError
from core.ops import add, concat_channels, softmax
from core.tensor import Tensor, no_tape
from models.configs import MorphBlockConfig, NetworkConfig, Variant
from network.context_block import ContextBlock, LocalizationBlock
from network.layers import Conv3d, ParameterStore
from network.morph_block import MorphBlock

logger = logging.getLogger(__name__)


@dataclass
class ForwardOutput:
    logits: Tensor
    probs: Tensor
    aux: Dict[int, Tensor] = field(default_factory=dict)  # decoder level -> head map at that resolution


class EncoderLevel:
    def __init__(self, store: ParameterStore, level: int, cfg: NetworkConfig):
        channels = cfg.level_channels(level)
        name = f"encoder.{level}"
        if level == 0:
            self.entry = Conv3d(store, f"{name}.stem", cfg.input_channels, channels)
        else:
            self.entry = Conv3d(store, f"{name}.down", cfg.level_channels(level - 1), channels, stride=2)

        self.morph: Optional[MorphBlock] = None
        if cfg.variant is Variant.BASELINE:
            self.context = ContextBlock(store, f"{name}.context", channels, channels, cfg.leaky_slope)
            self.sources = {"context": channels, "morph": 0}
        else:
            half = channels // 2
            self.context = ContextBlock(store, f"{name}.context", channels, half, cfg.leaky_slope)
            block_cfg = MorphBlockConfig(
                in_channels=channels,
                out_channels=half,
                op_impl=cfg.variant.op_impl,
                skip=cfg.variant.skip,
                window=cfg.window,
                leaky_slope=cfg.leaky_slope,
            )
            self.morph = MorphBlock(store, f"{name}.morph", block_cfg)
            self.sources = {"context": self.context.out_channels, "morph": block_cfg.out_channels}

    def __call__(self, x: Tensor) -> Tensor:
        h = self.entry(x)
        if self.morph is None:
            return self.context(h)
        return concat_channels([self.context(h), self.morph(h)])


class DecoderLevel:
    def __init__(self, store: ParameterStore, level: int, cfg: NetworkConfig):
        channels = cfg.level_channels(level)
        name = f"decoder.{level}"
        self.up = Conv3d(store, f"{name}.up", cfg.level_channels(level + 1), channels)
        self.localization = LocalizationBlock(store, f"{name}.localization", 2 * channels, channels,
                                              cfg.leaky_slope)

    def __call__(self, deeper: Tensor, skip: Tensor) -> Tensor:
        up = self.up(upsample_nearest(deeper, 2))
        return self.localization(concat_channels([skip, up]))


class SegmentationModel:
    """Network structure plus its parameter store"""

    def __init__(self, cfg: NetworkConfig, seed: int = 0):
        self.config = cfg
        self.seed = seed
        self.store = ParameterStore(seed)
        self.metadata: Dict = {}
        self.encoder: List[EncoderLevel] = [EncoderLevel(self.store, level, cfg) for level in range(cfg.depth)]
        self.decoder: Dict[int, DecoderLevel] = {
            level: DecoderLevel(self.store, level, cfg) for level in range(cfg.depth - 2, -1, -1)
        }
        self.heads: Dict[int, Conv3d] = {
            level: Conv3d(self.store, f"head.{level}", cfg.level_channels(level), cfg.num_classes, kernel=1)
            for level in range(cfg.deep_supervision_levels)
        }
        # Channel bookkeeping per encoder level: {"context": n, "morph": m}
        self.channel_sources: Dict[int, Dict[str, int]] = {
            level: dict(enc.sources) for level, enc in enumerate(self.encoder)
        }

    @property
    def parameters(self) -> Dict[str, Tensor]:
        return dict(self.store.items())

    def parameter_count(self, prefix: str = "") -> int:
        return self.store.count(prefix)

    def check_input(self, x: Tensor):
        cfg = self.config
        if x.ndim != 5 or x.shape[1] != cfg.input_channels:
            raise ShapeError("forward", f"[N,{cfg.input_channels},D,H,W]", x.shape)
        if any(extent % cfg.spatial_divisor for extent in x.shape[2:]):
            raise ShapeError("forward", f"spatial extents divisible by {cfg.spatial_divisor}", x.shape[2:],
                             f"depth {cfg.depth} halves the volume {cfg.depth - 1} times")

    def forward(self, x: Tensor) -> ForwardOutput:
        self.check_input(x)
        skips = []
        h = x
        for level in self.encoder:
            h = level(h)
            skips.append(h)

        decoded = {}
        for level, block in self.decoder.items():
            h = block(h, skips[level])
            decoded[level] = h

        heads = {level: head(decoded[level]) for level, head in self.heads.items()}
        logits = heads[0]
        for level in range(1, len(heads)):
            logits = add(logits, upsample_nearest(heads[level], 2 ** level))
        aux = {level: heads[level] for level in range(1, len(heads))}
        return ForwardOutput(logits=logits, probs=softmax(logits, axis=1), aux=aux)

    def predict(self, image: np.ndarray) -> np.ndarray:
        """Class probabilities [N,K,D,H,W] without recording a tape"""
        with no_tape():
            return self.forward(Tensor(image)).probs.numpy()


def build_network(cfg: NetworkConfig, seed: int = 0) -> SegmentationModel:
    model = SegmentationModel(cfg, seed)
    logger.debug(f"🔧 Built {cfg.variant.value} network: {model.parameter_count()} parameters in "
                 f"{len(model.store)} tensors")
    return model


def forward(model: SegmentationModel, x: Tensor) -> ForwardOutput:
    return model.forward(x)
