"""Decision tree value type and packed-ensemble prediction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._tree_kernels import leaf_assignment, predict_sum


@dataclass
class DecisionTree:
    """Flat binary tree; node 0 is the root, split_col == -1 marks leaves."""

    split_col: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf_value: np.ndarray
    gain: np.ndarray
    n_samples: np.ndarray
    max_depth: int

    @property
    def n_nodes(self) -> int:
        return len(self.split_col)

    def leaf_of(self, X: np.ndarray) -> np.ndarray:
        return leaf_assignment(X, self.split_col, self.threshold, self.left, self.right)

    def predict_value(self, X: np.ndarray) -> np.ndarray:
        return self.leaf_value[self.leaf_of(X)]


@dataclass
class PackedTrees:
    """All trees of an ensemble concatenated for one-call prediction."""

    offsets: np.ndarray
    split_col: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf_value: np.ndarray

    def leaf_value_sum(self, X: np.ndarray) -> np.ndarray:
        return predict_sum(
            np.ascontiguousarray(X, dtype=np.float64),
            self.offsets,
            self.split_col,
            self.threshold,
            self.left,
            self.right,
            self.leaf_value,
        )


def pack_trees(trees: list[DecisionTree]) -> PackedTrees:
    """Concatenate trees, rebasing child pointers to absolute indices."""
    sizes = np.array([t.n_nodes for t in trees], dtype=np.int64)
    offsets = np.zeros(len(trees) + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    split_col = np.concatenate([t.split_col for t in trees])
    threshold = np.concatenate([t.threshold for t in trees])
    leaf_value = np.concatenate([t.leaf_value for t in trees])
    left = np.concatenate([np.where(t.left >= 0, t.left + off, -1) for t, off in zip(trees, offsets)])
    right = np.concatenate([np.where(t.right >= 0, t.right + off, -1) for t, off in zip(trees, offsets)])
    return PackedTrees(
        offsets,
        np.ascontiguousarray(split_col, dtype=np.int32),
        np.ascontiguousarray(threshold, dtype=np.float64),
        np.ascontiguousarray(left, dtype=np.int32),
        np.ascontiguousarray(right, dtype=np.int32),
        np.ascontiguousarray(leaf_value, dtype=np.float64),
    )


def gain_by_column(trees: list[DecisionTree], width: int) -> np.ndarray:
    """Total split gain per encoded column, summed over all trees."""
    total = np.zeros(width, dtype=np.float64)
    for tree in trees:
        internal = tree.split_col >= 0
        if internal.any():
            np.add.at(total, tree.split_col[internal], tree.gain[internal])
    return total
