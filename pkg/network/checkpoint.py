# network/checkpoint.py
"""
MORPHNET1 checkpoints: b"MORPHNET1", a JSON manifest line (config, seed,
metadata, parameter names, shapes and byte offsets), then every parameter as
little-endian float64 in manifest order.
"""

import logging

import numpy as np

from core.errors import ConfigError, VolumeFormatError
from data.volume_io import read_container, write_container
from models.configs import NetworkConfig
from network.unet import SegmentationModel, build_network

logger = logging.getLogger(__name__)

CHECKPOINT_MAGIC = b"MORPHNET1"
PARAM_DTYPE = np.dtype("<f8")


def save_checkpoint(path: str, model: SegmentationModel):
    entries = []
    chunks = []
    offset = 0
    for name, tensor in model.store.items():
        raw = np.ascontiguousarray(tensor.data, dtype=PARAM_DTYPE).tobytes()
        entries.append({"name": name, "shape": list(tensor.shape), "offset": offset, "nbytes": len(raw)})
        chunks.append(raw)
        offset += len(raw)
    manifest = {
        "format": CHECKPOINT_MAGIC.decode("ascii"),
        "config": model.config.to_dict(),
        "seed": model.seed,
        "metadata": model.metadata,
        "parameters": entries,
        "payload_bytes": offset,
    }
    write_container(path, CHECKPOINT_MAGIC, manifest, b"".join(chunks))
    logger.info(f"💾 Checkpoint written: {path} ({len(entries)} tensors, {offset} bytes)")


def load_checkpoint(path: str) -> SegmentationModel:
    manifest, payload = read_container(path, CHECKPOINT_MAGIC)
    try:
        cfg = NetworkConfig.from_dict(manifest["config"])
        model = build_network(cfg, int(manifest.get("seed", 0)))
        entries = manifest["parameters"]
    except (KeyError, TypeError, ConfigError) as e:
        raise VolumeFormatError(f"{path}: invalid MORPHNET1 manifest: {e}") from e

    expected_shapes = model.store.shapes()
    arrays = {}
    for entry in entries:
        name = entry["name"]
        shape = tuple(entry["shape"])
        if expected_shapes.get(name) != shape:
            raise VolumeFormatError(
                f"{path}: parameter '{name}' has shape {shape}, model expects {expected_shapes.get(name)}")
        count = int(np.prod(shape))
        start, nbytes = int(entry["offset"]), int(entry["nbytes"])
        if nbytes != count * PARAM_DTYPE.itemsize or start + nbytes > len(payload):
            raise VolumeFormatError(f"{path}: parameter '{name}' lies outside the payload")
        arrays[name] = np.frombuffer(payload, dtype=PARAM_DTYPE, count=count, offset=start).reshape(shape)

    if set(arrays) != set(expected_shapes):
        missing = sorted(set(expected_shapes) - set(arrays))
        raise VolumeFormatError(f"{path}: checkpoint is missing parameters {missing}")
    model.store.load_arrays(arrays)
    model.metadata = dict(manifest.get("metadata", {}))
    return model
