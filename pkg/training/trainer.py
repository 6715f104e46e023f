# training/trainer.py
"""
Single-fold optimization loop: Adam on the Dice loss, one sample per step,
early stopping on validation loss, best parameters restored at the end.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from core.errors import NumericalError, UsageError
from core.ops import first_nonfinite
from core.tensor import AutodiffTape, Tensor, backward, no_tape
from models.configs import HistoryRow, TrainConfig, TrainHistory
from models.volume import VolumeSample
from network.loss import dice_loss
from network.unet import SegmentationModel
from training.optimizer import Adam

logger = logging.getLogger(__name__)


@dataclass
class FoldResult:
    fold: int
    model: SegmentationModel
    history: TrainHistory
    train_ids: List[str]
    val_ids: List[str]


def sample_loss(model: SegmentationModel, sample: VolumeSample) -> Tensor:
    out = model.forward(Tensor(sample.batch()))
    return dice_loss(out.probs, sample.one_hot())


def evaluate_loss(model: SegmentationModel, samples: Sequence[VolumeSample]) -> float:
    """Mean Dice loss over samples, no tape recorded"""
    with no_tape():
        losses = [sample_loss(model, sample).item() for sample in samples]
    return float(np.mean(losses))


def train_step(model: SegmentationModel, optimizer: Adam, sample: VolumeSample) -> float:
    """One forward/backward/update on a single sample; returns the pre-update loss"""
    with AutodiffTape() as tape:
        loss = sample_loss(model, sample)
    grads = backward(tape, loss)
    named = {name: grads.get(tensor) for name, tensor in model.store.items()}
    bad = first_nonfinite([("loss", loss.data)] + [(f"grad[{n}]", g) for n, g in named.items() if g is not None])
    if bad is not None:
        name, index = bad
        raise NumericalError(f"non-finite value in {name} at index {index} (sample {sample.id})")
    optimizer.step(named)
    return loss.item()


def train_fold(model: SegmentationModel, train_set: Sequence[VolumeSample], val_set: Sequence[VolumeSample],
               cfg: TrainConfig, fold: int = 0) -> FoldResult:
    if not train_set or not val_set:
        raise UsageError("train_fold: train and validation sets must both be non-empty")
    train_ids = [s.id for s in train_set]
    val_ids = [s.id for s in val_set]
    overlap = sorted(set(train_ids) & set(val_ids))
    if overlap:
        raise UsageError(f"train_fold: samples {overlap} appear in both train and validation sets")

    optimizer = Adam(model.parameters, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.adam_epsilon)
    rng = np.random.default_rng([cfg.seed, fold])
    history = TrainHistory()
    best_state = model.store.snapshot()
    since_best = 0

    for epoch in range(1, cfg.max_epochs + 1):
        order = rng.permutation(len(train_set))
        train_loss = float(np.mean([train_step(model, optimizer, train_set[i]) for i in order]))
        val_loss = evaluate_loss(model, val_set)
        if not np.isfinite(val_loss):
            raise NumericalError(f"fold {fold}: non-finite validation loss at epoch {epoch}")
        history.rows.append(HistoryRow(fold=fold, epoch=epoch, train_loss=train_loss, val_loss=val_loss))
        logger.info(f"📉 Fold {fold} epoch {epoch}: train {train_loss:.6f}, val {val_loss:.6f}")

        if val_loss < history.best_val_loss:
            history.best_val_loss = val_loss
            history.best_epoch = epoch
            best_state = model.store.snapshot()
            since_best = 0
        else:
            since_best += 1
            if since_best >= cfg.patience:
                history.stopped_early = True
                logger.info(f"🛑 Fold {fold}: early stop after epoch {epoch}, best epoch {history.best_epoch}")
                break

    model.store.load_arrays(best_state)
    model.metadata = {
        "fold": fold,
        "best_epoch": history.best_epoch,
        "best_val_loss": history.best_val_loss,
        "val_ids": val_ids,
    }
    return FoldResult(fold=fold, model=model, history=history, train_ids=train_ids, val_ids=val_ids)
