# core/conv.py
"""
3D cross-correlation ("same" padding, optional stride and channel groups)
and nearest-neighbour upsampling.
"""

from typing import Sequence, Tuple

import numpy as np

from core.errors import ConfigError, ShapeError
from core.tensor import Tensor, record

PADDING_MODES = ("zero", "replicate")


def check_window(window: Sequence[int], op: str = "window") -> Tuple[int, int, int]:
    """Validate a 3-extent window of odd, positive sizes"""
    window = tuple(int(k) for k in window)
    if len(window) != 3:
        raise ConfigError(f"{op}: expected 3 extents, got {window}")
    if any(k < 1 or k % 2 == 0 for k in window):
        raise ConfigError(f"{op}: extents must be odd and positive, got {window}")
    return window


def pad_spatial(data: np.ndarray, pads: Sequence[int], mode: str) -> np.ndarray:
    widths = [(0, 0), (0, 0)] + [(p, p) for p in pads]
    if mode == "zero":
        return np.pad(data, widths, mode="constant")
    return np.pad(data, widths, mode="edge")


def unpad_spatial_grad(grad: np.ndarray, pads: Sequence[int], mode: str) -> np.ndarray:
    """Adjoint of pad_spatial: crop, folding replicated borders back onto the edges"""
    for axis, p in zip((2, 3, 4), pads):
        if p == 0:
            continue
        moved = np.moveaxis(grad, axis, 0)
        inner = moved[p:-p].copy()
        if mode == "replicate":
            inner[0] += moved[:p].sum(axis=0)
            inner[-1] += moved[-p:].sum(axis=0)
        grad = np.moveaxis(inner, 0, axis)
    return grad


def conv3d(input: Tensor, kernel: Tensor, padding_mode: str = "zero", stride: int = 1,
           groups: int = 1) -> Tensor:
    """
    Cross-correlate input [N,Cin,D,H,W] with kernel [Cout,Cin/groups,kd,kh,kw].

    Output keeps the spatial extents for stride 1; stride s samples every s-th
    output position starting at 0.
    """
    if input.ndim != 5 or kernel.ndim != 5:
        raise ShapeError("conv3d", "5-d input and kernel", (input.shape, kernel.shape))
    window = check_window(kernel.shape[2:], "conv3d kernel")
    if padding_mode not in PADDING_MODES:
        raise ConfigError(f"conv3d: padding_mode must be one of {PADDING_MODES}, got '{padding_mode}'")
    if stride < 1:
        raise ConfigError(f"conv3d: stride must be >= 1, got {stride}")

    n, c_in, *spatial = input.shape
    c_out, c_in_group = kernel.shape[:2]
    if groups < 1 or c_in % groups or c_out % groups or c_in // groups != c_in_group:
        raise ShapeError("conv3d", f"kernel [*, {c_in}/{groups}, ...]", kernel.shape,
                         "input channels must match kernel channels per group")

    pads = [k // 2 for k in window]
    out_spatial = [(extent - 1) // stride + 1 for extent in spatial]
    padded = pad_spatial(input.data, pads, padding_mode)
    padded_g = padded.reshape(n, groups, c_in_group, *padded.shape[2:])
    weights = kernel.data.reshape(groups, c_out // groups, c_in_group, *window)

    def window_slice(offset):
        return tuple(slice(o, o + stride * (size - 1) + 1, stride) for o, size in zip(offset, out_spatial))

    out = np.zeros((n, groups, c_out // groups, *out_spatial))
    for offset in np.ndindex(*window):
        patch = padded_g[(slice(None),) * 3 + window_slice(offset)]
        out += np.einsum("ngcdhw,goc->ngodhw", patch, weights[(Ellipsis,) + offset], optimize=True)

    def backward_fn(grad, saved):
        grad_g = grad.reshape(n, groups, c_out // groups, *out_spatial)
        grad_padded = np.zeros_like(padded_g)
        grad_weights = np.zeros_like(weights)
        for offset in np.ndindex(*window):
            index = (slice(None),) * 3 + window_slice(offset)
            grad_padded[index] += np.einsum("ngodhw,goc->ngcdhw", grad_g, weights[(Ellipsis,) + offset],
                                            optimize=True)
            grad_weights[(Ellipsis,) + offset] = np.einsum("ngodhw,ngcdhw->goc", grad_g, padded_g[index],
                                                           optimize=True)
        grad_input = unpad_spatial_grad(grad_padded.reshape(padded.shape), pads, padding_mode)
        return grad_input, grad_weights.reshape(kernel.shape)

    saved = {"padding_mode": padding_mode, "stride": stride, "groups": groups}
    return record("conv3d", (input, kernel), out.reshape(n, c_out, *out_spatial), backward_fn, saved)


def upsample_nearest(x: Tensor, factor: int = 2) -> Tensor:
    """Repeat every voxel `factor` times along each spatial axis"""
    if factor < 1:
        raise ConfigError(f"upsample_nearest: factor must be >= 1, got {factor}")
    out = x.data
    for axis in (2, 3, 4):
        out = np.repeat(out, factor, axis=axis)

    def backward_fn(grad, saved):
        n, c, d, h, w = x.shape
        blocks = grad.reshape(n, c, d, factor, h, factor, w, factor)
        return (blocks.sum(axis=(3, 5, 7)),)

    return record("upsample_nearest", (x,), out, backward_fn, {"factor": factor})
