# handlers/bench_handler.py
import logging
import time
from typing import Callable, List

import numpy as np

from core.conv import conv3d
from core.extremum import sliding_extremum
from core.tensor import Tensor, no_tape
from utils.constants import EXIT_OK
from utils.helpers import format_table

logger = logging.getLogger(__name__)


def best_time(fn: Callable[[], object], repeat: int) -> float:
    """Fastest of `repeat` wall-clock runs, in seconds"""
    timings = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        timings.append(time.perf_counter() - start)
    return min(timings)


class BenchHandler:
    """Time the extremum paths and conv3d on a random volume"""

    def handle(self, args) -> int:
        rng = np.random.default_rng(args.seed)
        x = Tensor(rng.normal(size=(1, 1) + (args.extent,) * 3))
        kernel = Tensor(rng.normal(size=(1, 1) + (args.window,) * 3))
        window = (args.window,) * 3

        with no_tape():
            cases = [
                ("sliding_min scan", lambda: sliding_extremum("min", x, window, method="scan")),
                ("sliding_min separable", lambda: sliding_extremum("min", x, window, method="separable")),
                ("sliding_max scan", lambda: sliding_extremum("max", x, window, method="scan")),
                ("sliding_max separable", lambda: sliding_extremum("max", x, window, method="separable")),
                ("conv3d zero", lambda: conv3d(x, kernel, "zero")),
                ("conv3d replicate", lambda: conv3d(x, kernel, "replicate")),
            ]
            rows: List[list] = [[name, best_time(fn, args.repeat) * 1e3] for name, fn in cases]

        logger.info(f"⏱️ Benchmarked {len(rows)} kernels on {args.extent}^3 with window {args.window}^3")
        print(format_table(["kernel", "best_ms"], rows))
        return EXIT_OK
