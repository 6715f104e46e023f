# data/pgm.py
"""8-bit binary PGM (P5) cross-sections for eyeballing volumes."""

import os
from typing import Dict, List

import numpy as np

from core.errors import ShapeError, VolumeIOError


def to_gray(slice2d: np.ndarray) -> np.ndarray:
    """Linear rescale of one slice to 0..255; constant slices map to 0"""
    low, high = float(slice2d.min()), float(slice2d.max())
    if high == low:
        return np.zeros(slice2d.shape, dtype=np.uint8)
    return np.round((slice2d - low) / (high - low) * 255.0).astype(np.uint8)


def write_pgm(path: str, slice2d: np.ndarray):
    slice2d = np.asarray(slice2d, dtype=np.float64)
    if slice2d.ndim != 2:
        raise ShapeError("write_pgm", "2-d slice", slice2d.shape)
    gray = to_gray(slice2d)
    height, width = gray.shape
    try:
        with open(path, "wb") as handle:
            handle.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
            handle.write(gray.tobytes())
    except OSError as e:
        raise VolumeIOError(f"cannot write {path}: {e}") from e


def mid_slices(volume: np.ndarray) -> Dict[str, np.ndarray]:
    """Central cross-sections of a [D,H,W] volume along each axis"""
    d, h, w = volume.shape
    return {"axial": volume[d // 2], "coronal": volume[:, h // 2], "sagittal": volume[:, :, w // 2]}


def write_mid_slices(directory: str, stem: str, image: np.ndarray) -> List[str]:
    """Write the three mid-axis sections of every channel of a [C,D,H,W] image"""
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as e:
        raise VolumeIOError(f"cannot create {directory}: {e}") from e
    written = []
    for c in range(image.shape[0]):
        for axis, section in mid_slices(image[c]).items():
            path = os.path.join(directory, f"{stem}_c{c}_{axis}.pgm")
            write_pgm(path, section)
            written.append(path)
    return written
