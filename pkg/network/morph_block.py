# network/morph_block.py
"""
Morphological operation residual block.

Each pathway reduces the input with a 3^3 convolution (h), pre-activates it
with a sigmoid, applies one morphological operator (m), optionally adds h back
as an identity mapping, then maps through LeakyReLU and a second 3^3
convolution. Pathway outputs are concatenated along channels in config order.
"""

import logging
from typing import Callable, List, Optional

import numpy as np

from config import config
from core.ops import add, clamp_min, concat_channels, leaky_relu, sigmoid
from core.errors import ShapeError
from core.tensor import Tensor
from models.configs import MorphBlockConfig, OpImpl, Pathway
from models.struct_element import StructElement
from morphology.chm import chm_close, chm_dilate, chm_erode, chm_open
from morphology.flat import close_flat, dilate_flat, erode_flat, open_flat
from network.layers import Conv3d, ParameterStore

logger = logging.getLogger(__name__)

# Floor on CHM inputs after the sigmoid
CHM_INPUT_FLOOR = 1e-7

FLAT_OPS = {
    Pathway.EROSION: erode_flat,
    Pathway.DILATION: dilate_flat,
    Pathway.OPENING: open_flat,
    Pathway.CLOSING: close_flat,
}

CHM_OPS = {
    Pathway.EROSION: chm_erode,
    Pathway.DILATION: chm_dilate,
    Pathway.OPENING: chm_open,
    Pathway.CLOSING: chm_close,
}


class MorphPathway:
    """One conv -> sigmoid -> morph -> (+h) -> LeakyReLU -> conv pathway"""

    def __init__(self, store: ParameterStore, name: str, cfg: MorphBlockConfig, pathway: Pathway):
        self.name = name
        self.pathway = pathway
        self.op_impl = cfg.op_impl
        self.skip = cfg.skip
        self.leaky_slope = cfg.leaky_slope
        self.conv1 = Conv3d(store, f"{name}.conv1", cfg.in_channels, cfg.reduce_channels, padding_mode="replicate")
        self.conv2 = Conv3d(store, f"{name}.conv2", cfg.reduce_channels, cfg.pathway_channels,
                            padding_mode="replicate")
        if cfg.op_impl is OpImpl.CHM:
            self.se = StructElement.chm(cfg.reduce_channels, cfg.window, store.rng)
            store.register(f"{name}.se", self.se.weights)
        else:
            self.se = StructElement.flat(cfg.window)
        # Test hook: replaces the morphological operator when set
        self.morph_fn: Optional[Callable[[Tensor], Tensor]] = None

    def morph(self, activated: Tensor) -> Tensor:
        if self.morph_fn is not None:
            return self.morph_fn(activated)
        if self.op_impl is OpImpl.CHM:
            if config.MORPHGRAD_DEBUG:
                assert np.all(activated.data > 0), f"{self.name}: CHM input is not strictly positive"
            return CHM_OPS[self.pathway](activated, self.se)
        return FLAT_OPS[self.pathway](activated, self.se)

    def __call__(self, x: Tensor) -> Tensor:
        h = self.conv1(x)
        activated = sigmoid(h)
        if self.op_impl is OpImpl.CHM:
            activated = clamp_min(activated, CHM_INPUT_FLOOR)
        m = self.morph(activated)
        merged = add(m, h) if self.skip else m
        return self.conv2(leaky_relu(merged, self.leaky_slope))


class MorphBlock:
    """Parallel morphological pathways joined by channel concatenation"""

    def __init__(self, store: ParameterStore, name: str, cfg: MorphBlockConfig):
        self.name = name
        self.cfg = cfg
        self.store = store
        self.pathways: List[MorphPathway] = [
            MorphPathway(store, f"{name}.{pathway.value}", cfg, pathway) for pathway in cfg.pathways
        ]
        logger.debug(f"🔧 {name}: {len(self.pathways)} {cfg.op_impl.value} pathways, skip={cfg.skip}")

    def __call__(self, x: Tensor) -> Tensor:
        if x.ndim != 5 or x.shape[1] != self.cfg.in_channels:
            raise ShapeError(self.name, f"[N,{self.cfg.in_channels},D,H,W]", x.shape)
        # Recorded in fixed pathway order
        return concat_channels([pathway(x) for pathway in self.pathways])


def morph_pathway_forward(x: Tensor, pathway: MorphPathway) -> Tensor:
    return pathway(x)


def morph_block_forward(x: Tensor, block: MorphBlock) -> Tensor:
    return block(x)


def build_morph_block(cfg: MorphBlockConfig, seed: int = 0, name: str = "morph") -> MorphBlock:
    """Standalone block with its own parameter store (tests, gradient checks)"""
    return MorphBlock(ParameterStore(seed), name, cfg)
