# handlers/evaluate_handler.py
import logging
import os

from core.errors import VolumeFormatError
from handlers.data_handler import load_dataset
from handlers.train_handler import prepare_samples, summary_table, write_metrics
from models.configs import NetworkConfig, TrainConfig
from models.run_manifest import RunManifest
from network.checkpoint import load_checkpoint
from training.fold_manager import FoldManager
from utils.constants import CHECKPOINT_TEMPLATE, EXIT_OK, RUN_MANIFEST_FILE

logger = logging.getLogger(__name__)


class EvaluateHandler:
    """Re-score a finished training run from its checkpoints"""

    def handle(self, args) -> int:
        manifest_path = os.path.join(args.run, RUN_MANIFEST_FILE)
        if not os.path.exists(manifest_path):
            raise VolumeFormatError(f"{args.run}: no {RUN_MANIFEST_FILE}")
        manifest = RunManifest.load(manifest_path)
        network_cfg = NetworkConfig.from_dict(manifest.config["network"])
        train_cfg = TrainConfig.from_dict(manifest.config["train"])

        samples = prepare_samples(load_dataset(args.data), network_cfg)
        expected_ids = manifest.config.get("data", {}).get("ids")
        if expected_ids is not None and [s.id for s in samples] != expected_ids:
            raise VolumeFormatError(f"{args.data}: sample ids differ from the ones {args.run} was trained on")

        manager = FoldManager(samples, network_cfg, train_cfg)
        models = {}
        for fold in range(len(manager.folds)):
            model = load_checkpoint(os.path.join(args.run, CHECKPOINT_TEMPLATE.format(fold=fold)))
            if model.config.to_dict() != network_cfg.to_dict():
                raise VolumeFormatError(f"fold {fold} checkpoint config differs from the run manifest")
            models[fold] = model
        manager.attach_models(models)

        evaluation = manager.evaluate(args.mode)
        write_metrics(args.run, network_cfg.variant.value, evaluation)
        logger.info(f"✅ Re-evaluated {args.run} ({evaluation['mode']})")
        print(summary_table(evaluation["overall"]))
        return EXIT_OK
