import numpy as np
import pytest

from core.errors import ShapeError, UsageError
from core.ops import softmax
from core.tensor import AutodiffTape, Tensor, backward
from network.loss import DICE_EPSILON, dice_loss


def _one_hot(labels, num_classes):
    return (np.arange(num_classes)[:, None, None, None] == labels[None]).astype(np.float64)[None]


def test_perfect_prediction_has_zero_loss(rng):
    target = _one_hot(rng.integers(0, 3, size=(4, 4, 4)), 3)
    assert abs(dice_loss(Tensor(target), target).item()) < 1e-5


def test_uniform_half_probabilities_give_half_loss():
    labels = np.zeros((2, 2, 2), dtype=np.int64)
    labels[1] = 1
    target = _one_hot(labels, 2)
    loss = dice_loss(Tensor(np.full(target.shape, 0.5)), target).item()
    assert abs(loss - 0.5) < 1e-5


def test_matches_direct_summation(rng):
    probs = softmax(Tensor(rng.normal(size=(1, 3, 4, 4, 4))), axis=1)
    target = _one_hot(rng.integers(0, 3, size=(4, 4, 4)), 3)
    u, v = probs.data, target
    per_class = [(2 * np.sum(u[:, k] * v[:, k]) + DICE_EPSILON) / (np.sum(u[:, k]) + np.sum(v[:, k]) + DICE_EPSILON)
                 for k in range(3)]
    assert np.isclose(dice_loss(probs, target).item(), 1.0 - np.mean(per_class), rtol=0, atol=1e-12)


def test_loss_is_in_unit_interval(rng):
    for _ in range(10):
        probs = softmax(Tensor(rng.normal(scale=3.0, size=(1, 4, 3, 3, 3))), axis=1)
        target = _one_hot(rng.integers(0, 4, size=(3, 3, 3)), 4)
        assert 0.0 <= dice_loss(probs, target).item() <= 1.0


def test_loss_is_differentiable(rng):
    logits = Tensor(rng.normal(size=(1, 2, 3, 3, 3)), requires_grad=True)
    target = _one_hot(rng.integers(0, 2, size=(3, 3, 3)), 2)
    with AutodiffTape() as tape:
        loss = dice_loss(softmax(logits, axis=1), target)
    grad = backward(tape, loss)[logits]
    assert grad.shape == logits.shape
    assert np.all(np.isfinite(grad))


def test_target_must_be_one_hot():
    probs = Tensor(np.full((1, 2, 2, 2, 2), 0.5))
    with pytest.raises(UsageError):
        dice_loss(probs, np.full((1, 2, 2, 2, 2), 0.5))
    with pytest.raises(UsageError):
        dice_loss(probs, np.ones((1, 2, 2, 2, 2)))


def test_shapes_must_match():
    with pytest.raises(ShapeError):
        dice_loss(Tensor(np.full((1, 2, 2, 2, 2), 0.5)), np.ones((1, 3, 2, 2, 2)))
