# training/metrics.py
"""
Per-class Dice and sensitivity on hard label volumes.

A class absent from both prediction and truth scores 1.0 on both metrics.
A class absent from the truth but predicted somewhere scores 0.0 on both.
"""

from typing import Dict, Tuple

import numpy as np

from core.errors import ShapeError, UsageError
from models.metrics import Metrics

# Nested-class regions reported alongside per-class values
REGIONS: Dict[str, Tuple[int, ...]] = {
    "whole": (1, 2, 3),
    "core": (2, 3),
    "enhancing": (3,),
}


def confusion_counts(pred: np.ndarray, truth: np.ndarray) -> Tuple[int, int, int]:
    """TP, FP, FN of two boolean masks"""
    tp = int(np.count_nonzero(pred & truth))
    fp = int(np.count_nonzero(pred & ~truth))
    fn = int(np.count_nonzero(~pred & truth))
    return tp, fp, fn


def dice_and_sensitivity(pred: np.ndarray, truth: np.ndarray) -> Tuple[float, float]:
    tp, fp, fn = confusion_counts(pred, truth)
    if tp + fp + fn == 0:
        return 1.0, 1.0
    dice = 2.0 * tp / (2.0 * tp + fp + fn)
    sensitivity = tp / (tp + fn) if tp + fn else 0.0
    return dice, sensitivity


def compute_metrics(pred_labels: np.ndarray, true_labels: np.ndarray, num_classes: int) -> Metrics:
    pred_labels = np.asarray(pred_labels)
    true_labels = np.asarray(true_labels)
    if pred_labels.shape != true_labels.shape:
        raise ShapeError("compute_metrics", true_labels.shape, pred_labels.shape)
    for name, labels in (("pred", pred_labels), ("truth", true_labels)):
        if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
            raise UsageError(f"compute_metrics: {name} labels must lie in [0, {num_classes})")

    dice, sensitivity = [], []
    for k in range(num_classes):
        d, s = dice_and_sensitivity(pred_labels == k, true_labels == k)
        dice.append(d)
        sensitivity.append(s)

    regions = {}
    for region, classes in REGIONS.items():
        present = tuple(c for c in classes if c < num_classes)
        if not present:
            continue
        d, s = dice_and_sensitivity(np.isin(pred_labels, present), np.isin(true_labels, present))
        regions[region] = {"dice": d, "sensitivity": s}
    return Metrics(dice=dice, sensitivity=sensitivity, regions=regions)
