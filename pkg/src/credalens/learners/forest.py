"""Random forest (DRF) and extremely randomized trees (XRT).

DRF grows each tree on a bootstrap resample and picks the best exhaustive
threshold among mtry random candidate features; XRT uses the full sample
and draws one uniform random threshold per candidate between its observed
min and max.  Probability prediction is the mean leaf class-1 fraction over
trees.  Per-tree seeds derive from the master seed, so the fitted model is
identical for any worker count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..parallel import thread_map
from ..seeding import derive_seed
from ._tree_kernels import grow_tree
from .tree import DecisionTree, PackedTrees, gain_by_column, pack_trees

DRF = "DRF"
XRT = "XRT"


@dataclass
class ForestModel:
    trees: list[DecisionTree]
    mode: str
    mtry: int
    bootstrap: bool
    per_tree_seeds: list[int]
    width: int
    _packed: PackedTrees | None = field(default=None, repr=False, compare=False)

    def _pack(self) -> PackedTrees:
        if self._packed is None:
            self._packed = pack_trees(self.trees)
        return self._packed

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self._pack().leaf_value_sum(X) / len(self.trees)

    def column_importance(self) -> np.ndarray:
        return gain_by_column(self.trees, self.width)


def default_mtry(width: int) -> int:
    return int(np.ceil(np.sqrt(width)))


def fit_forest(
    X,
    y: np.ndarray,
    mode: str,
    n_trees: int = 200,
    max_depth: int = 20,
    mtry: int | None = None,
    min_leaf: int = 1,
    seed: int = 0,
    threads: int | None = None,
) -> ForestModel:
    if mode not in (DRF, XRT):
        raise ValueError(f"mode must be DRF or XRT, got {mode!r}")
    values = X.values if hasattr(X, "values") else np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, width = values.shape
    if mtry is None:
        mtry = default_mtry(width)
    mtry = max(1, min(mtry, width))
    XT = np.ascontiguousarray(values.T)
    bootstrap = mode == DRF
    tree_seeds = [derive_seed(seed, t) for t in range(n_trees)]

    def build(t: int) -> DecisionTree:
        if bootstrap:
            rng = np.random.default_rng(derive_seed(seed, t, 0))
            rows = np.sort(rng.integers(0, n, size=n)).astype(np.int64)
        else:
            rows = np.arange(n, dtype=np.int64)
        arrays = grow_tree(
            XT, y, rows, max_depth, min_leaf, mtry, mode == XRT, derive_seed(seed, t, 1)
        )
        return DecisionTree(*arrays, max_depth=max_depth)

    trees = thread_map(build, range(n_trees), threads)
    return ForestModel(trees, mode, mtry, bootstrap, tree_seeds, width)
