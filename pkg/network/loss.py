# network/loss.py
"""Soft Dice loss over softmax probabilities and one-hot targets."""

import numpy as np

from core.errors import ShapeError, UsageError
from core.ops import add, div, mul, mean, sum
from core.tensor import Tensor

DICE_EPSILON = 1e-5
# Everything except the class axis
_REDUCE_AXES = (0, 2, 3, 4)


def check_one_hot(target: np.ndarray):
    if not np.all((target == 0) | (target == 1)):
        raise UsageError("dice_loss: target must contain only 0 and 1")
    if not np.all(target.sum(axis=1) == 1):
        raise UsageError("dice_loss: target must have exactly one active class per voxel")


def dice_loss(probs: Tensor, target, epsilon: float = DICE_EPSILON) -> Tensor:
    """
    Multiclass soft Dice loss averaged over classes:

        L = 1 - mean_k (2 sum u_k v_k + eps) / (sum u_k + sum v_k + eps)
    """
    target = target.data if isinstance(target, Tensor) else np.asarray(target, dtype=np.float64)
    if probs.ndim != 5 or target.shape != probs.shape:
        raise ShapeError("dice_loss", probs.shape, target.shape, "probs and target must be [N,K,D,H,W]")
    check_one_hot(target)

    intersection = sum(mul(probs, Tensor(target)), axes=_REDUCE_AXES)
    numerator = add(mul(intersection, 2.0), epsilon)
    denominator = add(sum(probs, axes=_REDUCE_AXES), Tensor(target.sum(axis=_REDUCE_AXES) + epsilon))
    return 1.0 - mean(div(numerator, denominator))
