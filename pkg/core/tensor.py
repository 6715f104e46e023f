# core/tensor.py
"""
Dense float64 tensor with a reverse-mode autodiff tape.

Operations record onto the innermost active AutodiffTape of the current thread
when at least one input requires a gradient. Independent tapes may live in
different threads; a single tape is never shared across concurrent passes.
"""

import logging
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import ShapeError, UsageError

logger = logging.getLogger(__name__)

Scalar = Union[int, float]
BackwardFn = Callable[[np.ndarray, Dict[str, Any]], Sequence[Optional[np.ndarray]]]

_state = threading.local()


def _tape_stack() -> List[Optional["AutodiffTape"]]:
    if not hasattr(_state, "stack"):
        _state.stack = []
    return _state.stack


def active_tape() -> Optional["AutodiffTape"]:
    """Return the innermost tape recording on this thread, if any"""
    stack = _tape_stack()
    return stack[-1] if stack else None


class no_tape:
    """Context manager that suspends recording (inference, finite differences)"""

    def __enter__(self):
        _tape_stack().append(None)
        return self

    def __exit__(self, exc_type, exc, tb):
        _tape_stack().pop()
        return False


@dataclass(eq=False)
class Node:
    """One recorded operation"""
    index: int
    op: str
    parents: Tuple["Tensor", ...]
    saved: Dict[str, Any]
    backward_fn: BackwardFn
    shape: Tuple[int, ...]
    tape: "AutodiffTape" = field(repr=False)


class Tensor:
    """Dense N-dimensional float64 array, optionally attached to a tape node"""

    __array_priority__ = 1000

    def __init__(self, data, requires_grad: bool = False, name: Optional[str] = None,
                 _node: Optional[Node] = None):
        array = np.asarray(data, dtype=np.float64)
        if any(extent < 1 for extent in array.shape):
            raise ShapeError("Tensor", "all extents >= 1", array.shape)
        self.data = array
        self.requires_grad = requires_grad or _node is not None
        self.node = _node
        self.name = name
        self.grad: Optional[np.ndarray] = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    def numpy(self) -> np.ndarray:
        return self.data.copy()

    def item(self) -> float:
        if self.size != 1:
            raise UsageError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy())

    def __add__(self, other):
        from core.ops import add
        return add(self, other)

    def __radd__(self, other):
        from core.ops import add
        return add(self, other)

    def __sub__(self, other):
        from core.ops import sub
        return sub(self, other)

    def __rsub__(self, other):
        from core.ops import add, neg
        return add(neg(self), other)

    def __mul__(self, other):
        from core.ops import mul
        return mul(self, other)

    def __rmul__(self, other):
        from core.ops import mul
        return mul(self, other)

    def __truediv__(self, other):
        from core.ops import div
        return div(self, other)

    def __rtruediv__(self, other):
        from core.ops import mul, pow
        return mul(pow(self, -1), other)

    def __pow__(self, exponent):
        from core.ops import pow
        return pow(self, exponent)

    def __neg__(self):
        from core.ops import neg
        return neg(self)

    def __repr__(self) -> str:
        label = f", name={self.name!r}" if self.name else ""
        tracked = ", tracked" if self.node is not None else ""
        return f"Tensor(shape={self.shape}{label}{tracked})"


class AutodiffTape:
    """Append-only record of operations; parents always precede children"""

    def __init__(self):
        self.nodes: List[Node] = []

    def __enter__(self) -> "AutodiffTape":
        _tape_stack().append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        _tape_stack().pop()
        return False

    def __len__(self) -> int:
        return len(self.nodes)

    def record(self, op: str, parents: Sequence[Tensor], out: np.ndarray,
               backward_fn: BackwardFn, saved: Optional[Dict[str, Any]] = None) -> Tensor:
        node = Node(
            index=len(self.nodes),
            op=op,
            parents=tuple(parents),
            saved=saved or {},
            backward_fn=backward_fn,
            shape=out.shape,
            tape=self,
        )
        self.nodes.append(node)
        return Tensor(out, _node=node)


def record(op: str, parents: Sequence[Tensor], out: np.ndarray, backward_fn: BackwardFn,
           saved: Optional[Dict[str, Any]] = None) -> Tensor:
    """Wrap an op result, recording it when a tape is active and an input is tracked"""
    tape = active_tape()
    if tape is None or not any(parent.requires_grad for parent in parents):
        return Tensor(out)
    return tape.record(op, parents, out, backward_fn, saved)


def _key(tensor: Tensor):
    return tensor.node if tensor.node is not None else tensor


class GradientMap:
    """Gradient buffers keyed by tensor identity"""

    def __init__(self, buffers: Dict[Any, np.ndarray]):
        self._buffers = buffers

    def __getitem__(self, tensor: Tensor) -> np.ndarray:
        return self._buffers[_key(tensor)]

    def __contains__(self, tensor: Tensor) -> bool:
        return _key(tensor) in self._buffers

    def __len__(self) -> int:
        return len(self._buffers)

    def get(self, tensor: Tensor, default=None):
        return self._buffers.get(_key(tensor), default)


def backward(tape: AutodiffTape, loss: Tensor) -> GradientMap:
    """Reverse sweep from a scalar loss; leaf tensors also get `.grad` set"""
    if loss.size != 1:
        raise UsageError(f"backward: loss must be a scalar tensor, got shape {loss.shape}")
    if loss.node is None or loss.node.tape is not tape:
        raise UsageError("backward: loss was not recorded on this tape")

    buffers: Dict[Any, np.ndarray] = {loss.node: np.ones(loss.shape)}
    for node in reversed(tape.nodes[: loss.node.index + 1]):
        upstream = buffers.get(node)
        if upstream is None:
            continue
        parent_grads = node.backward_fn(upstream, node.saved)
        for parent, grad in zip(node.parents, parent_grads):
            if grad is None or not parent.requires_grad:
                continue
            if grad.shape != parent.shape:
                raise ShapeError(f"backward[{node.op}]", parent.shape, grad.shape)
            key = _key(parent)
            buffers[key] = buffers[key] + grad if key in buffers else grad

    for key, grad in buffers.items():
        if isinstance(key, Tensor):
            key.grad = np.array(grad)

    logger.debug(f"backward: {len(tape.nodes)} nodes, {len(buffers)} gradient buffers")
    return GradientMap(buffers)
