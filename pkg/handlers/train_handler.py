# handlers/train_handler.py
"""
train: k-fold training of one variant; writes checkpoints, history, metrics
and the run manifest into the output directory.
"""

import logging
import os
from typing import Dict, List, Sequence

from config.run_config import display_name, load_run_config
from core.errors import ConfigError
from data.normalize import normalize_clip
from handlers.data_handler import load_dataset
from models.configs import NetworkConfig
from models.metrics import Metrics
from models.run_manifest import RunManifest
from models.volume import VolumeSample
from network.checkpoint import save_checkpoint
from training.fold_manager import FoldManager
from training.trainer import FoldResult
from utils.constants import (CHECKPOINT_TEMPLATE, EXIT_OK, HISTORY_COLUMNS, HISTORY_FILE, METRICS_CSV_FILE,
                             METRICS_JSON_FILE, RUN_MANIFEST_FILE, TOOL_VERSION)
from utils.helpers import ensure_dir, format_table, write_csv, write_json

logger = logging.getLogger(__name__)


def prepare_samples(samples: Sequence[VolumeSample], cfg: NetworkConfig) -> List[VolumeSample]:
    """Normalize images and check them against the network config"""
    prepared = []
    for sample in samples:
        if sample.channels != cfg.input_channels:
            raise ConfigError(f"sample {sample.id} has {sample.channels} channels, network expects "
                              f"{cfg.input_channels}")
        if sample.num_classes != cfg.num_classes:
            raise ConfigError(f"sample {sample.id} has K={sample.num_classes}, network expects {cfg.num_classes}")
        if any(extent % cfg.spatial_divisor for extent in sample.extent):
            raise ConfigError(f"sample {sample.id} extent {sample.extent} is not divisible by "
                              f"2^(depth-1)={cfg.spatial_divisor}")
        prepared.append(VolumeSample(image=normalize_clip(sample.image), label=sample.label, id=sample.id,
                                     num_classes=sample.num_classes))
    return prepared


def metrics_rows(scope: str, metrics: Metrics) -> List[list]:
    rows = []
    for k, (dice, sensitivity) in enumerate(zip(metrics.dice, metrics.sensitivity)):
        rows.append([scope, f"class_{k}", "dice", dice])
        rows.append([scope, f"class_{k}", "sensitivity", sensitivity])
    for region, values in metrics.regions.items():
        for name, value in values.items():
            rows.append([scope, region, name, value])
    return rows


def write_metrics(out_dir: str, variant: str, evaluation: Dict) -> List[str]:
    """metrics.json (read by compare) and a long-format metrics.csv"""
    per_fold = evaluation["per_fold"]
    overall = evaluation["overall"]
    json_path = os.path.join(out_dir, METRICS_JSON_FILE)
    write_json(json_path, {
        "variant": variant,
        "mode": evaluation["mode"],
        "overall": overall.to_dict(),
        "per_fold": {str(fold): metrics.to_dict() for fold, metrics in per_fold.items()},
    })
    rows = [row for fold, metrics in sorted(per_fold.items()) for row in metrics_rows(f"fold_{fold}", metrics)]
    rows += metrics_rows("overall", overall)
    csv_path = os.path.join(out_dir, METRICS_CSV_FILE)
    write_csv(csv_path, ["scope", "target", "metric", "value"], rows)
    return [json_path, csv_path]


def write_history(out_dir: str, results: Sequence[FoldResult]) -> str:
    path = os.path.join(out_dir, HISTORY_FILE)
    rows = [[row.fold, row.epoch, row.train_loss, row.val_loss] for result in results for row in result.history.rows]
    write_csv(path, HISTORY_COLUMNS, rows)
    return path


def summary_table(overall: Metrics) -> str:
    rows = [[region, values["dice"], values["sensitivity"]] for region, values in overall.regions.items()]
    return format_table(["region", "dice", "sensitivity"], rows)


class TrainHandler:
    """k-fold training of one architecture variant"""

    def handle(self, args) -> int:
        network_cfg, train_cfg = load_run_config(args.config, args.variant, args.seed)
        samples = prepare_samples(load_dataset(args.data), network_cfg)
        out_dir = ensure_dir(args.out)

        manager = FoldManager(samples, network_cfg, train_cfg)
        manifest = RunManifest(
            command="train",
            tool_version=TOOL_VERSION,
            config={
                "network": network_cfg.to_dict(),
                "train": train_cfg.to_dict(),
                "data": {"directory": os.path.abspath(args.data), "ids": [s.id for s in samples]},
            },
            seeds=manager.seeds,
        )
        manifest_path = os.path.join(out_dir, RUN_MANIFEST_FILE)
        manifest.write(manifest_path)
        logger.info(f"🚀 Training {display_name(network_cfg.variant)} with {train_cfg.folds} folds")

        results = manager.run()
        for result in results:
            path = os.path.join(out_dir, CHECKPOINT_TEMPLATE.format(fold=result.fold))
            save_checkpoint(path, result.model)
            manifest.outputs.append(path)
        manifest.outputs.append(write_history(out_dir, results))

        evaluation = manager.evaluate()
        manifest.outputs.extend(write_metrics(out_dir, network_cfg.variant.value, evaluation))
        manifest.mark_finished()
        manifest.write(manifest_path)

        print(f"{display_name(network_cfg.variant)} ({evaluation['mode']} evaluation)")
        print(summary_table(evaluation["overall"]))
        return EXIT_OK
