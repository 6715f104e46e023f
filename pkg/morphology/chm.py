# morphology/chm.py
"""
Counter-harmonic-mean (CHM) morphology.

    chm(I, w, P) = (I^(P+1) * w) / (I^P * w)

with * a depthwise cross-correlation using replicate padding. P = -1 behaves
like an erosion, P = +1 like a dilation; |P| -> inf approaches flat min / max.
"""

import logging

import numpy as np

from core.conv import conv3d
from core.errors import DomainError, NumericalError, ShapeError, UsageError
from core.ops import div, pow
from core.tensor import Tensor
from models.struct_element import SEKind, StructElement

logger = logging.getLogger(__name__)

DENOMINATOR_FLOOR = 1e-12
EROSION_P = -1.0
DILATION_P = 1.0


def _require_chm(se: StructElement, image: Tensor, op: str):
    if se.kind is not SEKind.CHM_KERNEL:
        raise UsageError(f"{op}: needs a CHM structuring element, got {se.kind.value}")
    if image.ndim != 5:
        raise ShapeError(op, "[N,C,D,H,W]", image.shape)
    if se.channels != image.shape[1]:
        raise ShapeError(op, f"{se.channels} channels", image.shape[1], "one kernel per channel")


def _depthwise(values: Tensor, se: StructElement) -> Tensor:
    return conv3d(values, se.weights, padding_mode="replicate", groups=values.shape[1])


def chm_general(image: Tensor, se: StructElement, p: float) -> Tensor:
    """Generalized CHM filter of order p"""
    _require_chm(se, image, "chm_general")
    bad = np.argwhere(image.data <= 0)
    if bad.size:
        index = tuple(bad[0])
        raise DomainError("chm_general", index, image.data[index], "CHM input must be strictly positive")

    numerator = _depthwise(pow(image, p + 1.0), se)
    denominator = _depthwise(pow(image, p), se)
    tiny = np.argwhere(np.abs(denominator.data) < DENOMINATOR_FLOOR)
    if tiny.size:
        index = tuple(int(i) for i in tiny[0])
        raise NumericalError(
            f"chm_general: |denominator| < {DENOMINATOR_FLOOR} at voxel {index} "
            f"(value={denominator.data[index]!r}, p={p})")
    return div(numerator, denominator)


def chm_erode(image: Tensor, se: StructElement) -> Tensor:
    return chm_general(image, se, EROSION_P)


def chm_dilate(image: Tensor, se: StructElement) -> Tensor:
    return chm_general(image, se, DILATION_P)


def _require_positive_intermediate(values: Tensor, op: str):
    bad = np.argwhere(values.data <= 0)
    if bad.size:
        index = tuple(int(i) for i in bad[0])
        raise NumericalError(f"{op}: intermediate value {values.data[index]!r} <= 0 at voxel {index}")


def chm_open(image: Tensor, se: StructElement) -> Tensor:
    """chm_dilate(chm_erode(I)) with the same kernel"""
    eroded = chm_erode(image, se)
    _require_positive_intermediate(eroded, "chm_open")
    return chm_dilate(eroded, se)


def chm_close(image: Tensor, se: StructElement) -> Tensor:
    """chm_erode(chm_dilate(I)) with the same kernel"""
    dilated = chm_dilate(image, se)
    _require_positive_intermediate(dilated, "chm_close")
    return chm_erode(dilated, se)
