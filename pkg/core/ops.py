# core/ops.py
"""
Elementwise arithmetic, activations, reductions and channel plumbing.
"""

from numbers import Real
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import expit

from core.errors import ConfigError, DomainError, ShapeError, UsageError
from core.tensor import Tensor, record

Operand = Union[Tensor, int, float]

_SIGMOID_HIGH = np.nextafter(1.0, 0.0)
_SIGMOID_LOW = np.finfo(np.float64).tiny


def as_tensor(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _operand(op: str, a: Tensor, b: Operand) -> Tuple[Optional[Tensor], np.ndarray]:
    """Split `b` into (tensor or None, raw values) after the shape contract check"""
    if isinstance(b, Tensor):
        if b.shape != a.shape and b.ndim != 0:
            raise ShapeError(op, a.shape, b.shape, "operands must match or b must be a scalar")
        return b, b.data
    if isinstance(b, Real):
        return None, np.float64(b)
    raise UsageError(f"{op}: unsupported operand type {type(b).__name__}")


def _reduce_to(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    return grad if grad.shape == shape else np.asarray(grad.sum()).reshape(shape)


def add(a: Tensor, b: Operand) -> Tensor:
    b_tensor, b_data = _operand("add", a, b)
    parents = (a,) if b_tensor is None else (a, b_tensor)

    def backward_fn(grad, saved):
        if b_tensor is None:
            return (grad,)
        return grad, _reduce_to(grad, b_tensor.shape)

    return record("add", parents, a.data + b_data, backward_fn)


def sub(a: Tensor, b: Operand) -> Tensor:
    b_tensor, b_data = _operand("sub", a, b)
    parents = (a,) if b_tensor is None else (a, b_tensor)

    def backward_fn(grad, saved):
        if b_tensor is None:
            return (grad,)
        return grad, _reduce_to(-grad, b_tensor.shape)

    return record("sub", parents, a.data - b_data, backward_fn)


def mul(a: Tensor, b: Operand) -> Tensor:
    b_tensor, b_data = _operand("mul", a, b)
    parents = (a,) if b_tensor is None else (a, b_tensor)

    def backward_fn(grad, saved):
        grad_a = grad * b_data
        if b_tensor is None:
            return (grad_a,)
        return grad_a, _reduce_to(grad * a.data, b_tensor.shape)

    return record("mul", parents, a.data * b_data, backward_fn)


def div(a: Tensor, b: Operand) -> Tensor:
    b_tensor, b_data = _operand("div", a, b)
    zeros = np.argwhere(np.atleast_1d(b_data) == 0)
    if zeros.size:
        index = tuple(zeros[0]) if np.ndim(b_data) else ()
        raise DomainError("div", index, 0.0, "division by zero")
    parents = (a,) if b_tensor is None else (a, b_tensor)
    out = a.data / b_data

    def backward_fn(grad, saved):
        grad_a = grad / b_data
        if b_tensor is None:
            return (grad_a,)
        return grad_a, _reduce_to(-grad * out / b_data, b_tensor.shape)

    return record("div", parents, out, backward_fn)


def pow(a: Tensor, exponent: Real) -> Tensor:
    """Voxelwise power with a real scalar exponent"""
    if not isinstance(exponent, Real):
        raise UsageError(f"pow: exponent must be a real scalar, got {type(exponent).__name__}")
    exponent = float(exponent)
    if not exponent.is_integer():
        bad = np.argwhere(a.data <= 0)
        if bad.size:
            index = tuple(bad[0])
            raise DomainError("pow", index, a.data[index], "non-integer power of nonpositive base")
    elif exponent < 0:
        bad = np.argwhere(a.data == 0)
        if bad.size:
            index = tuple(bad[0])
            raise DomainError("pow", index, 0.0, "negative power of zero base")

    if exponent == 0.0:
        out = np.ones_like(a.data)
    else:
        out = np.power(a.data, exponent)

    def backward_fn(grad, saved):
        if exponent == 0.0:
            return (np.zeros_like(grad),)
        return (grad * exponent * np.power(a.data, exponent - 1.0),)

    return record("pow", (a,), out, backward_fn, {"exponent": exponent})


_ELEMENTWISE = {"add": add, "sub": sub, "mul": mul, "div": div, "pow": pow}


def elementwise(op_kind: str, a: Tensor, b: Operand) -> Tensor:
    """Dispatch one of add, sub, mul, div, pow"""
    try:
        fn = _ELEMENTWISE[op_kind]
    except KeyError:
        raise ConfigError(f"unknown elementwise op '{op_kind}', expected one of {sorted(_ELEMENTWISE)}")
    return fn(a, b)


def neg(a: Tensor) -> Tensor:
    return record("neg", (a,), -a.data, lambda grad, saved: (-grad,))


def sigmoid(x: Tensor) -> Tensor:
    """Logistic function; output kept inside the open interval (0, 1)"""
    out = np.clip(expit(x.data), _SIGMOID_LOW, _SIGMOID_HIGH)

    def backward_fn(grad, saved):
        return (grad * out * (1.0 - out),)

    return record("sigmoid", (x,), out, backward_fn)


def leaky_relu(x: Tensor, slope: float = 0.01) -> Tensor:
    positive = x.data >= 0
    out = np.where(positive, x.data, slope * x.data)

    def backward_fn(grad, saved):
        return (np.where(positive, grad, slope * grad),)

    return record("leaky_relu", (x,), out, backward_fn, {"slope": slope})


def activation(kind: str, x: Tensor, param: float = 0.01) -> Tensor:
    """sigmoid, or leaky_relu with negative slope `param`"""
    if kind == "sigmoid":
        return sigmoid(x)
    if kind == "leaky_relu":
        return leaky_relu(x, param)
    raise ConfigError(f"unknown activation '{kind}', expected 'sigmoid' or 'leaky_relu'")


def clamp_min(x: Tensor, floor: float) -> Tensor:
    passed = x.data >= floor
    out = np.maximum(x.data, floor)
    return record("clamp_min", (x,), out, lambda grad, saved: (grad * passed,), {"floor": floor})


def _normalize_axes(axes, ndim: int) -> Optional[Tuple[int, ...]]:
    if axes is None:
        return None
    if isinstance(axes, int):
        axes = (axes,)
    return tuple(sorted(axis % ndim for axis in axes))


def sum(x: Tensor, axes=None, keepdims: bool = False) -> Tensor:
    axes = _normalize_axes(axes, x.ndim)
    out = np.sum(x.data, axis=axes, keepdims=keepdims)

    def backward_fn(grad, saved):
        if axes is not None and not keepdims:
            grad = np.expand_dims(grad, axes)
        return (np.broadcast_to(grad, x.shape).copy(),)

    return record("sum", (x,), np.asarray(out), backward_fn, {"axes": axes})


def mean(x: Tensor, axes=None, keepdims: bool = False) -> Tensor:
    axes = _normalize_axes(axes, x.ndim)
    count = x.size if axes is None else int(np.prod([x.shape[axis] for axis in axes]))
    return mul(sum(x, axes, keepdims), 1.0 / count)


def softmax(x: Tensor, axis: int = 1) -> Tensor:
    shifted = x.data - np.max(x.data, axis=axis, keepdims=True)
    exps = np.exp(shifted)
    out = exps / np.sum(exps, axis=axis, keepdims=True)

    def backward_fn(grad, saved):
        inner = np.sum(grad * out, axis=axis, keepdims=True)
        return (out * (grad - inner),)

    return record("softmax", (x,), out, backward_fn, {"axis": axis})


def concat_channels(parts: Sequence[Tensor]) -> Tensor:
    """Concatenate along axis 1"""
    if not parts:
        raise UsageError("concat_channels: need at least one part")
    reference = parts[0].shape
    for part in parts[1:]:
        if part.ndim != len(reference) or part.shape[:1] + part.shape[2:] != reference[:1] + reference[2:]:
            raise ShapeError("concat_channels", reference[:1] + ("*",) + reference[2:], part.shape,
                             "non-channel extents must agree")
    bounds = np.cumsum([0] + [part.shape[1] for part in parts])
    out = np.concatenate([part.data for part in parts], axis=1)

    def backward_fn(grad, saved):
        return tuple(grad[:, bounds[i]:bounds[i + 1]] for i in range(len(parts)))

    return record("concat_channels", tuple(parts), out, backward_fn, {"bounds": bounds})


def slice_channels(x: Tensor, channels: range) -> Tensor:
    """Select a contiguous channel range (step 1)"""
    if channels.step != 1 or not 0 <= channels.start < channels.stop <= x.shape[1]:
        raise ShapeError("slice_channels", f"range within [0, {x.shape[1]})", channels)
    start, stop = channels.start, channels.stop
    out = x.data[:, start:stop].copy()

    def backward_fn(grad, saved):
        full = np.zeros(x.shape)
        full[:, start:stop] = grad
        return (full,)

    return record("slice_channels", (x,), out, backward_fn, {"range": (start, stop)})


def first_nonfinite(tensors: Sequence[Tuple[str, np.ndarray]]) -> Optional[Tuple[str, tuple]]:
    """Name and index of the first non-finite entry among named arrays"""
    for name, array in tensors:
        bad = np.argwhere(~np.isfinite(array))
        if bad.size:
            return name, tuple(int(i) for i in bad[0])
    return None
