# core/gradcheck.py
"""
Central finite-difference verification of tape gradients.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from core.ops import mul, sum
from core.tensor import AutodiffTape, Tensor, backward, no_tape

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-6


@dataclass
class GradcheckResult:
    """Outcome of one finite-difference comparison"""
    name: str
    max_rel_error: float
    entries_checked: int
    threshold: float

    @property
    def passed(self) -> bool:
        return self.max_rel_error < self.threshold


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """max |a - n| scaled by the largest gradient magnitude involved"""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    if analytic.size == 0:
        return 0.0
    scale = max(np.max(np.abs(analytic)), np.max(np.abs(numeric)), 1e-8)
    return float(np.max(np.abs(analytic - numeric)) / scale)


def numerical_gradient(loss_fn: Callable[[], Tensor], tensor: Tensor, indices: Sequence[tuple],
                       step: float = DEFAULT_STEP) -> np.ndarray:
    """Central differences of loss_fn w.r.t. selected entries of `tensor` (restored afterwards)"""
    values = np.empty(len(indices))
    with no_tape():
        for i, index in enumerate(indices):
            original = tensor.data[index]
            tensor.data[index] = original + step
            plus = loss_fn().item()
            tensor.data[index] = original - step
            minus = loss_fn().item()
            tensor.data[index] = original
            values[i] = (plus - minus) / (2.0 * step)
    return values


def check_gradients(loss_fn: Callable[[], Tensor], tensors: Dict[str, Tensor], threshold: float = 1e-4,
                    step: float = DEFAULT_STEP, max_entries: Optional[int] = None,
                    rng: Optional[np.random.Generator] = None) -> Dict[str, GradcheckResult]:
    """
    Compare tape gradients of a scalar `loss_fn()` against central differences.

    `max_entries` caps the number of checked entries per tensor; they are drawn
    from `rng` without replacement.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    with AutodiffTape() as tape:
        loss = loss_fn()
    grads = backward(tape, loss)

    results = {}
    for name, tensor in tensors.items():
        all_indices = list(np.ndindex(*tensor.shape))
        if max_entries is not None and len(all_indices) > max_entries:
            chosen = rng.choice(len(all_indices), size=max_entries, replace=False)
            all_indices = [all_indices[i] for i in sorted(chosen)]
        analytic_full = grads.get(tensor)
        if analytic_full is None:
            analytic_full = np.zeros(tensor.shape)
        analytic = np.array([analytic_full[index] for index in all_indices])
        numeric = numerical_gradient(loss_fn, tensor, all_indices, step)
        results[name] = GradcheckResult(name, relative_error(analytic, numeric), len(all_indices), threshold)
        logger.debug(f"gradcheck {name}: rel error {results[name].max_rel_error:.3e}")
    return results


def projection_loss(output: Tensor, weights: np.ndarray) -> Tensor:
    """Scalar sum(output * weights), a generic probe for tensor-valued functions"""
    return sum(mul(output, Tensor(weights)))


def spot_check(loss_fn: Callable[[], Tensor], tensors: Dict[str, Tensor], count: int, name: str,
               threshold: float = 1e-3, step: float = DEFAULT_STEP,
               rng: Optional[np.random.Generator] = None) -> GradcheckResult:
    """Check `count` entries drawn uniformly from all tensors together, reported as one result"""
    rng = rng if rng is not None else np.random.default_rng(0)
    with AutodiffTape() as tape:
        loss = loss_fn()
    grads = backward(tape, loss)

    population = [(key, index) for key, tensor in tensors.items() for index in np.ndindex(*tensor.shape)]
    chosen = sorted(rng.choice(len(population), size=min(count, len(population)), replace=False))
    analytic, numeric = [], []
    for i in chosen:
        key, index = population[i]
        tensor = tensors[key]
        full = grads.get(tensor)
        analytic.append(0.0 if full is None else full[index])
        numeric.append(numerical_gradient(loss_fn, tensor, [index], step)[0])
    result = GradcheckResult(name, relative_error(np.array(analytic), np.array(numeric)), len(chosen), threshold)
    logger.debug(f"spot check {name}: rel error {result.max_rel_error:.3e} over {len(chosen)} entries")
    return result
