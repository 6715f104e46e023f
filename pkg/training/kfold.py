# training/kfold.py
from typing import List, Sequence, Tuple

import numpy as np

from core.errors import ConfigError


def kfold_split(n_items: int, k: int, seed: int = 0) -> List[List[int]]:
    """
    Shuffle 0..n-1 with `seed` and deal it into k disjoint folds.

    The first n % k folds get one extra item, so sizes are floor(n/k) or ceil(n/k)
    in non-increasing order.
    """
    if k < 2:
        raise ConfigError(f"kfold_split: k must be >= 2, got {k}")
    if n_items < k:
        raise ConfigError(f"kfold_split: need at least k={k} items, got {n_items}")
    order = np.random.default_rng(seed).permutation(n_items)
    base, extra = divmod(n_items, k)
    folds = []
    start = 0
    for fold in range(k):
        size = base + (1 if fold < extra else 0)
        folds.append(sorted(int(i) for i in order[start:start + size]))
        start += size
    return folds


def fold_partition(folds: Sequence[Sequence[int]], fold: int) -> Tuple[List[int], List[int]]:
    """(train indices, validation indices) with fold `fold` held out"""
    val = list(folds[fold])
    train = sorted(i for other, items in enumerate(folds) if other != fold for i in items)
    return train, val
