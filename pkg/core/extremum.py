# core/extremum.py
"""
Sliding-window minimum / maximum over the spatial axes of [N,C,D,H,W] tensors.

The window is truncated at the volume border (equivalently the volume is padded
with +inf for min and -inf for max). Ties send the whole gradient to the first
window voxel in row-major scan order.
"""

import logging
from typing import Optional, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import ndimage

from core.conv import check_window
from core.errors import ConfigError, ShapeError
from core.tensor import Tensor, active_tape, record

logger = logging.getLogger(__name__)

METHODS = ("scan", "separable")


def _separable(kind: str, data: np.ndarray, window) -> np.ndarray:
    size = (1, 1) + tuple(window)
    if kind == "min":
        return ndimage.minimum_filter(data, size=size, mode="constant", cval=np.inf)
    return ndimage.maximum_filter(data, size=size, mode="constant", cval=-np.inf)


def sliding_extremum(kind: str, input: Tensor, window: Sequence[int],
                     offsets: Optional[Tensor] = None, method: str = "scan") -> Tensor:
    """
    kind="min": out(x) = min over v of I(v) - w(v - x)
    kind="max": out(x) = max over v of I(v) + w(v - x)

    `offsets` is the additive structuring function w with the window's shape;
    None means flat. method="separable" computes flat windows through
    scipy.ndimage and is only used when no gradient is being recorded.
    """
    if kind not in ("min", "max"):
        raise ConfigError(f"sliding_extremum: kind must be 'min' or 'max', got '{kind}'")
    if method not in METHODS:
        raise ConfigError(f"sliding_extremum: method must be one of {METHODS}, got '{method}'")
    window = check_window(window, "sliding_extremum window")
    if input.ndim != 5:
        raise ShapeError("sliding_extremum", "[N,C,D,H,W]", input.shape)
    if offsets is not None and offsets.shape != window:
        raise ShapeError("sliding_extremum offsets", window, offsets.shape)

    if method == "separable":
        if offsets is not None:
            raise ConfigError("sliding_extremum: the separable path supports flat windows only")
        if active_tape() is None or not input.requires_grad:
            return Tensor(_separable(kind, input.data, window))
        logger.debug("sliding_extremum: gradient requested, using the scan path")

    pads = [k // 2 for k in window]
    fill = np.inf if kind == "min" else -np.inf
    padded = np.pad(input.data, [(0, 0), (0, 0)] + [(p, p) for p in pads], constant_values=fill)
    candidates = sliding_window_view(padded, window, axis=(2, 3, 4)).reshape(*input.shape, -1)
    if offsets is not None:
        flat_offsets = offsets.data.reshape(-1)
        candidates = candidates - flat_offsets if kind == "min" else candidates + flat_offsets
    arg = candidates.argmin(axis=-1) if kind == "min" else candidates.argmax(axis=-1)
    out = np.take_along_axis(candidates, arg[..., None], axis=-1)[..., 0]

    parents = (input,) if offsets is None else (input, offsets)

    def backward_fn(grad, saved):
        a, b, c = np.unravel_index(arg, window)
        n, ch, d, h, w = np.ogrid[tuple(slice(0, extent) for extent in input.shape)]
        linear = np.ravel_multi_index((n + 0 * a, ch + 0 * a, d + a, h + b, w + c), padded.shape)
        grad_padded = np.bincount(linear.ravel(), weights=grad.ravel(), minlength=padded.size)
        grad_padded = grad_padded.reshape(padded.shape)
        inner = (slice(None), slice(None)) + tuple(slice(p, p + extent) for p, extent in zip(pads, input.shape[2:]))
        grads = [grad_padded[inner].copy()]
        if offsets is not None:
            sign = -1.0 if kind == "min" else 1.0
            grad_offsets = np.bincount(arg.ravel(), weights=grad.ravel(), minlength=int(np.prod(window)))
            grads.append(sign * grad_offsets.reshape(window))
        return tuple(grads)

    return record(f"sliding_{kind}", parents, out, backward_fn, {"window": window})
