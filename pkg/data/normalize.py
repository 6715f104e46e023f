# data/normalize.py
"""Input intensity normalization applied before training and evaluation."""

import numpy as np

from core.errors import ConfigError, ShapeError
from core.tensor import Tensor

CLIP_LIMIT = 5.0


def normalize_clip(image, clip: float = CLIP_LIMIT):
    """
    Per-channel z-score over the channel's nonzero voxels, clipped to [-clip, clip].

    Voxels outside the nonzero region become 0; a channel with zero variance
    (or no nonzero voxels) becomes all zeros. Accepts [C,D,H,W] arrays or
    Tensors and returns the same kind.
    """
    as_tensor = isinstance(image, Tensor)
    data = image.data if as_tensor else np.asarray(image, dtype=np.float64)
    if data.ndim != 4:
        raise ShapeError("normalize_clip", "[C,D,H,W]", data.shape)
    if not np.all(np.isfinite(data)):
        raise ConfigError("normalize_clip: image contains non-finite values")

    out = np.zeros_like(data)
    for c in range(data.shape[0]):
        channel = data[c]
        mask = channel != 0
        if not mask.any():
            continue
        values = channel[mask]
        std = values.std()
        if std == 0:
            continue
        out[c][mask] = (values - values.mean()) / std
    out = np.clip(out, -clip, clip)
    return Tensor(out) if as_tensor else out
