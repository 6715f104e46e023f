# handlers/gradcheck_handler.py
"""
gradcheck: central finite-difference suites over every differentiable piece.

Each check reduces a tensor-valued function to a scalar through a fixed random
projection and compares tape gradients of all its inputs with numerical ones.
One report line per checked function; the worst input decides.
"""

import logging
from typing import Callable, Dict, List

import numpy as np

from core.conv import conv3d, upsample_nearest
from core.errors import VerificationError
from core.extremum import sliding_extremum
from core.gradcheck import GradcheckResult, check_gradients, projection_loss, spot_check
from core.norm import instance_norm
from core import ops
from core.ops import add, clamp_min, concat_channels, div, leaky_relu, mul, pow, sigmoid, slice_channels, softmax, sub
from core.tensor import Tensor, no_tape
from models.configs import MorphBlockConfig, NetworkConfig, OpImpl, Variant
from models.struct_element import StructElement
from morphology.chm import chm_close, chm_dilate, chm_erode, chm_general, chm_open
from morphology.flat import close_flat, dilate_flat, erode_flat, open_flat
from network.loss import dice_loss
from network.morph_block import build_morph_block
from network.unet import build_network
from utils.constants import (EXIT_OK, GRADCHECK_THRESHOLD, NETWORK_GRADCHECK_ENTRIES,
                             NETWORK_GRADCHECK_THRESHOLD)

logger = logging.getLogger(__name__)

SHAPE = (1, 2, 4, 4, 4)
BLOCK_INPUT = (1, 4, 5, 5, 5)
BLOCK_ENTRIES = 25


def _leaf(values: np.ndarray) -> Tensor:
    return Tensor(values, requires_grad=True)


def check_function(name: str, fn: Callable[[], Tensor], inputs: Dict[str, Tensor], rng: np.random.Generator,
                   threshold: float = GRADCHECK_THRESHOLD, max_entries=None) -> GradcheckResult:
    with no_tape():
        shape = fn().shape
    weights = rng.normal(size=shape)
    results = check_gradients(lambda: projection_loss(fn(), weights), inputs, threshold,
                              max_entries=max_entries, rng=rng)
    worst = max(results.values(), key=lambda r: r.max_rel_error)
    return GradcheckResult(name, worst.max_rel_error, sum(r.entries_checked for r in results.values()), threshold)


def tensor_suite(rng: np.random.Generator) -> List[GradcheckResult]:
    a = _leaf(rng.uniform(-1.0, 1.0, SHAPE))
    b = _leaf(rng.uniform(-1.0, 1.0, SHAPE))
    positive = _leaf(rng.uniform(0.5, 1.5, SHAPE))
    kernel = _leaf(rng.normal(size=(3, 2, 3, 3, 3)))
    depthwise = _leaf(rng.normal(size=(2, 1, 3, 3, 3)))
    offsets = _leaf(rng.uniform(-0.1, 0.1, (3, 3, 3)))
    scale = _leaf(rng.uniform(0.5, 1.5, (2,)))
    shift = _leaf(rng.uniform(-0.5, 0.5, (2,)))

    cases = [
        ("add", lambda: add(a, b), {"a": a, "b": b}),
        ("sub", lambda: sub(a, b), {"a": a, "b": b}),
        ("mul", lambda: mul(a, b), {"a": a, "b": b}),
        ("div", lambda: div(a, positive), {"a": a, "b": positive}),
        ("pow_real", lambda: pow(positive, 2.5), {"x": positive}),
        ("pow_int", lambda: pow(a, 3), {"x": a}),
        ("sigmoid", lambda: sigmoid(a), {"x": a}),
        ("leaky_relu", lambda: leaky_relu(a, 0.01), {"x": a}),
        ("clamp_min", lambda: clamp_min(a, 0.1), {"x": a}),
        ("sum", lambda: ops.sum(a, axes=(2, 3, 4)), {"x": a}),
        ("mean", lambda: ops.mean(a), {"x": a}),
        ("softmax", lambda: softmax(a, axis=1), {"x": a}),
        ("conv3d_zero", lambda: conv3d(a, kernel, "zero"), {"input": a, "kernel": kernel}),
        ("conv3d_replicate", lambda: conv3d(a, kernel, "replicate"), {"input": a, "kernel": kernel}),
        ("conv3d_stride2", lambda: conv3d(a, kernel, "zero", stride=2), {"input": a, "kernel": kernel}),
        ("conv3d_depthwise", lambda: conv3d(a, depthwise, "replicate", groups=2), {"input": a, "kernel": depthwise}),
        ("upsample_nearest", lambda: upsample_nearest(a, 2), {"x": a}),
        ("sliding_min", lambda: sliding_extremum("min", a, (3, 3, 3), offsets), {"input": a, "offsets": offsets}),
        ("sliding_max", lambda: sliding_extremum("max", a, (3, 3, 3), offsets), {"input": a, "offsets": offsets}),
        ("concat_channels", lambda: concat_channels([a, b]), {"a": a, "b": b}),
        ("slice_channels", lambda: slice_channels(a, range(1, 2)), {"x": a}),
        ("instance_norm", lambda: instance_norm(a, scale, shift), {"x": a, "scale": scale, "shift": shift}),
    ]
    return [check_function(name, fn, inputs, rng) for name, fn, inputs in cases]


def morph_suite(rng: np.random.Generator) -> List[GradcheckResult]:
    image = _leaf(rng.uniform(-1.0, 1.0, SHAPE))
    positive = _leaf(rng.uniform(0.5, 1.5, SHAPE))
    flat = StructElement.flat((3, 3, 3))
    chm = StructElement.chm(SHAPE[1], (3, 3, 3), rng)
    flat_inputs = {"image": image}
    chm_inputs = {"image": positive, "kernel": chm.weights}
    cases = [
        ("erode_flat", lambda: erode_flat(image, flat), flat_inputs),
        ("dilate_flat", lambda: dilate_flat(image, flat), flat_inputs),
        ("open_flat", lambda: open_flat(image, flat), flat_inputs),
        ("close_flat", lambda: close_flat(image, flat), flat_inputs),
        ("chm_erode", lambda: chm_erode(positive, chm), chm_inputs),
        ("chm_dilate", lambda: chm_dilate(positive, chm), chm_inputs),
        ("chm_open", lambda: chm_open(positive, chm), chm_inputs),
        ("chm_close", lambda: chm_close(positive, chm), chm_inputs),
        ("chm_general_p2", lambda: chm_general(positive, chm, 2.0), chm_inputs),
    ]
    return [check_function(name, fn, inputs, rng) for name, fn, inputs in cases]


def block_suite(rng: np.random.Generator) -> List[GradcheckResult]:
    results = []
    x = _leaf(rng.normal(size=BLOCK_INPUT))
    for op_impl in (OpImpl.NON_LEARNABLE, OpImpl.CHM):
        for skip in (False, True):
            cfg = MorphBlockConfig(in_channels=BLOCK_INPUT[1], out_channels=4, op_impl=op_impl, skip=skip)
            block = build_morph_block(cfg, seed=int(rng.integers(2 ** 31)))
            inputs = {"input": x, **dict(block.store.items())}
            name = f"block_{op_impl.value}{'_skip' if skip else ''}"
            results.append(check_function(name, lambda: block(x), inputs, rng, max_entries=BLOCK_ENTRIES))
    return results


def network_suite(rng: np.random.Generator) -> List[GradcheckResult]:
    results = []
    extent = (16, 16, 16)
    labels = rng.integers(0, 3, size=extent)
    target = (np.arange(3)[:, None, None, None] == labels[None]).astype(np.float64)[None]
    x = Tensor(rng.normal(size=(1, 1) + extent))
    for variant in Variant:
        cfg = NetworkConfig(variant=variant, depth=2, base_channels=8, num_classes=3, deep_supervision_levels=1)
        model = build_network(cfg, seed=int(rng.integers(2 ** 31)))
        result = spot_check(lambda: dice_loss(model.forward(x).probs, target), model.parameters,
                            NETWORK_GRADCHECK_ENTRIES, f"network_{variant.value}",
                            threshold=NETWORK_GRADCHECK_THRESHOLD, rng=rng)
        results.append(result)
    return results


SUITES = {
    "tensor": tensor_suite,
    "morph": morph_suite,
    "block": block_suite,
    "network": network_suite,
}


def run_scope(scope: str, seed: int = 0) -> List[GradcheckResult]:
    return SUITES[scope](np.random.default_rng(seed))


def format_report(scope: str, results: List[GradcheckResult]) -> str:
    lines = [f"gradcheck scope={scope}"]
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        lines.append(f"  {result.name:<24} max_rel_error={result.max_rel_error:.3e} "
                     f"entries={result.entries_checked:<5d} threshold={result.threshold:.0e} {status}")
    return "\n".join(lines)


class GradcheckHandler:
    """Run one finite-difference scope and fail loudly on any miss"""

    def handle(self, args) -> int:
        results = run_scope(args.scope, args.seed)
        print(format_report(args.scope, results))
        failed = [r.name for r in results if not r.passed]
        if failed:
            raise VerificationError(f"gradient check over threshold for: {', '.join(failed)}")
        logger.info(f"✅ All {len(results)} {args.scope} checks passed")
        return EXIT_OK
