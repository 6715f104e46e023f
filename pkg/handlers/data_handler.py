# handlers/data_handler.py
"""
gen-data: synthetic MORV1 volumes plus an index, and shared dataset loading.
"""

import logging
import os
from typing import List

from config.run_config import load_data_spec
from core.errors import VolumeFormatError
from data.synthetic import gen_synthetic
from data.volume_io import load_volume, save_volume, volume_path
from models.run_manifest import RunManifest
from models.volume import VolumeSample
from utils.constants import EXIT_OK, INDEX_FILE, RUN_MANIFEST_FILE, TOOL_VERSION
from utils.helpers import ensure_dir, read_json, write_json

logger = logging.getLogger(__name__)


def load_dataset(directory: str) -> List[VolumeSample]:
    """Volumes of a generated dataset, in index order"""
    index_path = os.path.join(directory, INDEX_FILE)
    if not os.path.exists(index_path):
        raise VolumeFormatError(f"{directory}: no {INDEX_FILE}; run gen-data first")
    index = read_json(index_path)
    ids = index.get("ids")
    if not isinstance(ids, list) or not ids:
        raise VolumeFormatError(f"{index_path}: expected a non-empty 'ids' list")
    samples = []
    for sample_id in ids:
        sample = load_volume(volume_path(directory, sample_id))
        if sample.id != sample_id:
            raise VolumeFormatError(f"{volume_path(directory, sample_id)}: holds id {sample.id!r}, index says {sample_id!r}")
        samples.append(sample)
    logger.info(f"📂 Loaded {len(samples)} volumes from {directory}")
    return samples


class DataHandler:
    """Generate a synthetic dataset from a JSON spec"""

    def handle(self, args) -> int:
        spec = load_data_spec(args.spec)
        manifest = RunManifest(command="gen-data", tool_version=TOOL_VERSION,
                               config={"data": spec.to_dict()}, seeds={"data_seed": spec.seed})
        out_dir = ensure_dir(args.out)
        manifest.write(os.path.join(out_dir, RUN_MANIFEST_FILE))

        samples = gen_synthetic(spec)
        for sample in samples:
            path = volume_path(out_dir, sample.id)
            save_volume(path, sample)
            manifest.outputs.append(path)

        index_path = os.path.join(out_dir, INDEX_FILE)
        write_json(index_path, {"ids": [s.id for s in samples], "spec": spec.to_dict()})
        manifest.outputs.append(index_path)
        manifest.mark_finished()
        manifest.write(os.path.join(out_dir, RUN_MANIFEST_FILE))

        logger.info(f"✅ Wrote {len(samples)} volumes to {out_dir}")
        print(f"wrote {len(samples)} volumes and {INDEX_FILE} to {out_dir}")
        return EXIT_OK
