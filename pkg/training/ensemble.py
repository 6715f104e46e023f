# training/ensemble.py
"""Fold-ensemble prediction and per-sample scoring."""

from typing import List, Sequence

import numpy as np

from core.errors import UsageError
from core.tensor import Tensor
from models.metrics import Metrics
from models.volume import VolumeSample
from network.unet import SegmentationModel
from training.metrics import compute_metrics


def ensemble_predict(models: Sequence[SegmentationModel], x) -> np.ndarray:
    """Arithmetic mean of the models' softmax probabilities, summed in list order"""
    if not models:
        raise UsageError("ensemble_predict: need at least one model")
    reference = models[0].config.to_dict()
    for index, model in enumerate(models[1:], start=1):
        if model.config.to_dict() != reference:
            raise UsageError(f"ensemble_predict: model {index} config differs from model 0")
    image = x.data if isinstance(x, Tensor) else np.asarray(x, dtype=np.float64)
    total = models[0].predict(image)
    for model in models[1:]:
        total = total + model.predict(image)
    return total / len(models)


def predict_labels(probs: np.ndarray) -> np.ndarray:
    """argmax over the class axis of [N,K,D,H,W]"""
    return np.argmax(probs, axis=1)


def evaluate_models(models: Sequence[SegmentationModel], samples: Sequence[VolumeSample]) -> List[Metrics]:
    """Per-sample metrics of the ensemble's hard predictions"""
    results = []
    for sample in samples:
        labels = predict_labels(ensemble_predict(models, sample.batch()))[0]
        results.append(compute_metrics(labels, sample.label, sample.num_classes))
    return results
