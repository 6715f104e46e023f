# morphology/flat.py
"""
Flat grayscale morphology: erosion and dilation are sliding min / max over the
structuring element's window (offsets identically zero); opening and closing
compose them.
"""

from core.errors import UsageError
from core.extremum import sliding_extremum
from core.tensor import Tensor
from models.struct_element import SEKind, StructElement


def _require_flat(se: StructElement, op: str):
    if se.kind is not SEKind.FLAT:
        raise UsageError(f"{op}: needs a flat structuring element, got {se.kind.value}")


def erode_flat(image: Tensor, se: StructElement, method: str = "scan") -> Tensor:
    _require_flat(se, "erode_flat")
    return sliding_extremum("min", image, se.window, method=method)


def dilate_flat(image: Tensor, se: StructElement, method: str = "scan") -> Tensor:
    _require_flat(se, "dilate_flat")
    return sliding_extremum("max", image, se.window, method=method)


def open_flat(image: Tensor, se: StructElement, method: str = "scan") -> Tensor:
    """Dilation of the erosion; removes bright features smaller than the window"""
    return dilate_flat(erode_flat(image, se, method), se, method)


def close_flat(image: Tensor, se: StructElement, method: str = "scan") -> Tensor:
    """Erosion of the dilation; fills dark features smaller than the window"""
    return erode_flat(dilate_flat(image, se, method), se, method)
