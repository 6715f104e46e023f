# core/norm.py
"""Instance normalization with a learnable per-channel affine."""

import numpy as np

from core.errors import ShapeError, UsageError
from core.tensor import Tensor, record

SPATIAL_AXES = (2, 3, 4)


def instance_norm(x: Tensor, scale: Tensor, shift: Tensor, epsilon: float = 1e-5) -> Tensor:
    """Standardize every (batch, channel) slice over its voxels, then apply a per-channel affine"""
    if x.ndim != 5:
        raise ShapeError("instance_norm", "[N,C,D,H,W]", x.shape)
    channels = x.shape[1]
    if scale.shape != (channels,) or shift.shape != (channels,):
        raise ShapeError("instance_norm affine", (channels,), (scale.shape, shift.shape))
    count = int(np.prod(x.shape[2:]))
    if count < 2:
        raise UsageError(f"instance_norm: need at least 2 voxels per slice, got {count}")

    centered = x.data - x.data.mean(axis=SPATIAL_AXES, keepdims=True)
    variance = np.mean(centered * centered, axis=SPATIAL_AXES, keepdims=True)
    inv_std = 1.0 / np.sqrt(variance + epsilon)
    normalized = centered * inv_std
    gamma = scale.data.reshape(1, channels, 1, 1, 1)
    beta = shift.data.reshape(1, channels, 1, 1, 1)
    out = normalized * gamma + beta

    def backward_fn(grad, saved):
        grad_norm = grad * gamma
        total = grad_norm.sum(axis=SPATIAL_AXES, keepdims=True)
        projected = (grad_norm * normalized).sum(axis=SPATIAL_AXES, keepdims=True)
        grad_x = inv_std / count * (count * grad_norm - total - normalized * projected)
        grad_scale = (grad * normalized).sum(axis=(0,) + SPATIAL_AXES)
        grad_shift = grad.sum(axis=(0,) + SPATIAL_AXES)
        return grad_x, grad_scale, grad_shift

    return record("instance_norm", (x, scale, shift), out, backward_fn, {"epsilon": epsilon})
