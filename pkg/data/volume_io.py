# data/volume_io.py
"""
MORV1 volume container.

    b"MORV1" | one JSON manifest line ending in b"\\n" | payload

The payload is the image as little-endian float64 ([C,D,H,W], C order)
followed by the label as little-endian int64 ([D,H,W]). The manifest records
dims, channels, num_classes, dtype, label_dtype, id and payload_bytes.
"""

import json
import logging
import os
from typing import Dict, Tuple

import numpy as np

from core.errors import ConfigError, VolumeFormatError, VolumeIOError, VolumeTruncatedError
from models.volume import VolumeSample
from utils.constants import VOLUME_SUFFIX

logger = logging.getLogger(__name__)

VOLUME_MAGIC = b"MORV1"
IMAGE_DTYPE = np.dtype("<f8")
LABEL_DTYPE = np.dtype("<i8")


def write_container(path: str, magic: bytes, manifest: Dict, payload: bytes):
    """Magic, sorted-key JSON manifest line, raw payload"""
    header = json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode("utf-8")
    try:
        with open(path, "wb") as handle:
            handle.write(magic)
            handle.write(header + b"\n")
            handle.write(payload)
    except OSError as e:
        raise VolumeIOError(f"cannot write {path}: {e}") from e


def read_container(path: str, magic: bytes) -> Tuple[Dict, bytes]:
    """Return (manifest, payload); the payload length must equal manifest['payload_bytes']"""
    try:
        with open(path, "rb") as handle:
            raw = handle.read()
    except OSError as e:
        raise VolumeIOError(f"cannot read {path}: {e}") from e

    expected = magic.decode("ascii")
    if not raw.startswith(magic):
        found = raw[:len(magic)].decode("ascii", errors="replace")
        raise VolumeFormatError(f"{path}: bad magic, expected {expected!r}, found {found!r}")
    end = raw.find(b"\n", len(magic))
    if end < 0:
        raise VolumeTruncatedError(f"{path}: manifest line is not terminated")
    try:
        manifest = json.loads(raw[len(magic):end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise VolumeFormatError(f"{path}: unreadable {expected} manifest: {e}") from e
    if not isinstance(manifest, dict) or "payload_bytes" not in manifest:
        raise VolumeFormatError(f"{path}: {expected} manifest lacks payload_bytes")

    payload = raw[end + 1:]
    if len(payload) != manifest["payload_bytes"]:
        raise VolumeTruncatedError(
            f"{path}: manifest declares {manifest['payload_bytes']} payload bytes, found {len(payload)}")
    return manifest, payload


def save_volume(path: str, sample: VolumeSample):
    image = np.ascontiguousarray(sample.image, dtype=IMAGE_DTYPE)
    label = np.ascontiguousarray(sample.label, dtype=LABEL_DTYPE)
    payload = image.tobytes() + label.tobytes()
    manifest = {
        "dims": list(label.shape),
        "channels": int(image.shape[0]),
        "num_classes": int(sample.num_classes),
        "dtype": "f64",
        "label_dtype": "i64",
        "id": sample.id,
        "payload_bytes": len(payload),
    }
    write_container(path, VOLUME_MAGIC, manifest, payload)
    logger.debug(f"💾 Saved volume {sample.id} to {path}")


def load_volume(path: str) -> VolumeSample:
    manifest, payload = read_container(path, VOLUME_MAGIC)
    try:
        dims = tuple(int(d) for d in manifest["dims"])
        channels = int(manifest["channels"])
        num_classes = int(manifest["num_classes"])
        sample_id = str(manifest["id"])
    except (KeyError, TypeError, ValueError) as e:
        raise VolumeFormatError(f"{path}: incomplete MORV1 manifest: {e}") from e
    if manifest.get("dtype") != "f64":
        raise VolumeFormatError(f"{path}: unsupported dtype {manifest.get('dtype')!r}, expected 'f64'")
    if len(dims) != 3 or channels < 1 or any(d < 1 for d in dims):
        raise VolumeFormatError(f"{path}: invalid dims {dims} / channels {channels}")

    voxels = int(np.prod(dims))
    image_bytes = channels * voxels * IMAGE_DTYPE.itemsize
    if len(payload) != image_bytes + voxels * LABEL_DTYPE.itemsize:
        raise VolumeFormatError(
            f"{path}: payload of {len(payload)} bytes does not match dims {dims} x {channels} channels")
    image = np.frombuffer(payload[:image_bytes], dtype=IMAGE_DTYPE).reshape((channels,) + dims)
    label = np.frombuffer(payload[image_bytes:], dtype=LABEL_DTYPE).reshape(dims)
    try:
        return VolumeSample(image=image.astype(np.float64), label=label.astype(np.int64), id=sample_id,
                            num_classes=num_classes)
    except ConfigError as e:
        raise VolumeFormatError(f"{path}: {e}") from e


def volume_path(directory: str, sample_id: str) -> str:
    return os.path.join(directory, f"{sample_id}{VOLUME_SUFFIX}")
