# training/fold_manager.py
"""
Cross-validation manager: trains every fold on a worker thread and evaluates
the finished folds.
"""

import asyncio
import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

from config.config import thread_count
from core.errors import ConfigError, UsageError
from models.configs import NetworkConfig, TrainConfig, TrainHistory
from models.metrics import Metrics
from models.volume import VolumeSample
from network.unet import SegmentationModel, build_network
from training.ensemble import evaluate_models
from training.kfold import fold_partition, kfold_split
from training.trainer import FoldResult, train_fold

logger = logging.getLogger(__name__)


def fold_seed(seed: int, fold: int) -> int:
    """Initialization seed of one fold, derived from the run seed and the fold index"""
    return int(np.random.SeedSequence([seed, fold]).generate_state(1)[0])


class FoldManager:
    """Manage k independent folds of one variant"""

    def __init__(self, samples: Sequence[VolumeSample], network_config: NetworkConfig,
                 train_config: TrainConfig, max_workers: Optional[int] = None):
        self.samples = list(samples)
        self.network_config = network_config
        self.train_config = train_config
        self.max_workers = max_workers or thread_count()
        self.folds = kfold_split(len(self.samples), train_config.folds, train_config.split_seed)
        self.results: Dict[int, FoldResult] = {}

        logger.info(f"🤖 FoldManager initialized with {len(self.folds)} folds over {len(self.samples)} samples "
                    f"({self.max_workers} worker(s))")

    @property
    def seeds(self) -> Dict[str, int]:
        seeds = {"split_seed": self.train_config.split_seed, "train_seed": self.train_config.seed}
        seeds.update({f"fold_{fold}_init": fold_seed(self.train_config.seed, fold) for fold in range(len(self.folds))})
        return seeds

    def train_single_fold(self, fold: int) -> FoldResult:
        train_idx, val_idx = fold_partition(self.folds, fold)
        model = build_network(self.network_config, fold_seed(self.train_config.seed, fold))
        return train_fold(
            model,
            [self.samples[i] for i in train_idx],
            [self.samples[i] for i in val_idx],
            self.train_config,
            fold=fold,
        )

    async def run_fold(self, fold: int, semaphore: asyncio.Semaphore) -> FoldResult:
        async with semaphore:
            try:
                logger.info(f"🔧 Training fold {fold + 1}/{len(self.folds)}")
                result = await asyncio.to_thread(self.train_single_fold, fold)
                self.results[fold] = result
                logger.info(f"✅ Fold {fold} finished: best epoch {result.history.best_epoch}, "
                            f"val loss {result.history.best_val_loss:.6f}")
                return result
            except Exception as e:
                logger.error(f"❌ Fold {fold} failed: {e}", exc_info=True)
                raise

    async def run_all_folds(self) -> List[FoldResult]:
        """Train all folds concurrently, at most max_workers at a time"""
        logger.info(f"🚀 Starting {len(self.folds)} fold(s)...")
        semaphore = asyncio.Semaphore(self.max_workers)
        tasks = [self.run_fold(fold, semaphore) for fold in range(len(self.folds))]
        results = await asyncio.gather(*tasks)
        logger.info(f"✅ All {len(results)} fold(s) trained")
        return list(results)

    def run(self) -> List[FoldResult]:
        return asyncio.run(self.run_all_folds())

    def attach_models(self, models: Dict[int, SegmentationModel]):
        """Use already trained fold models (loaded checkpoints) instead of training"""
        for fold, model in models.items():
            train_idx, val_idx = fold_partition(self.folds, fold)
            self.results[fold] = FoldResult(
                fold=fold,
                model=model,
                history=TrainHistory(),
                train_ids=[self.samples[i].id for i in train_idx],
                val_ids=[self.samples[i].id for i in val_idx],
            )

    def evaluate(self, mode: Optional[str] = None) -> Dict:
        """
        Score every sample once, as a member of its validation fold.

        mode "ensemble" predicts with all fold models; "out_of_fold" with the
        sample's own fold model only. Returns per-fold and overall Metrics, the
        overall value being the mean over samples in index order.
        """
        mode = mode or self.train_config.evaluation
        if mode not in ("ensemble", "out_of_fold"):
            raise ConfigError(f"evaluate: mode must be 'ensemble' or 'out_of_fold', got '{mode}'")
        if len(self.results) != len(self.folds):
            raise UsageError(f"evaluate: {len(self.results)}/{len(self.folds)} folds trained")
        all_models = [self.results[fold].model for fold in range(len(self.folds))]

        per_fold: Dict[int, Metrics] = {}
        per_sample: Dict[int, Metrics] = {}
        for fold, indices in enumerate(self.folds):
            models = all_models if mode == "ensemble" else [all_models[fold]]
            scores = evaluate_models(models, [self.samples[i] for i in indices])
            per_fold[fold] = Metrics.mean(scores)
            per_sample.update(zip(indices, scores))

        overall = Metrics.mean([per_sample[i] for i in sorted(per_sample)])
        logger.info(f"📊 {mode} evaluation: whole-region Dice "
                    f"{overall.regions.get('whole', {}).get('dice', float('nan')):.4f}")
        return {"mode": mode, "per_fold": per_fold, "overall": overall}
