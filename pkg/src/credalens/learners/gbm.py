"""Gradient boosting machine for binomial deviance.

Stage-wise functional gradient descent: each round fits a regression tree
with variance-reduction splits to the residual y - p, then assigns leaves
the one-step Newton estimate sum(residual) / sum(p(1-p)) over their
in-sample rows.  The raw score starts at the log-odds of the training
prior and accumulates learning_rate * tree output; probabilities come from
the sigmoid of the raw score.

Columns are argsorted once per fit and the presorted order reused by every
round's level-wise tree growth.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..seeding import rng_from
from ._tree_kernels import grow_tree_levelwise
from .glm import sigmoid
from .tree import DecisionTree, PackedTrees, gain_by_column, pack_trees

PRIOR_CLIP = 1e-6
MAX_LEAF_VALUE = 15.0


@dataclass
class GbmModel:
    base_score: float
    trees: list[DecisionTree]
    learning_rate: float
    n_rounds: int
    width: int
    degenerate_prior: bool = False
    train_logloss: list[float] = field(default_factory=list)
    _packed: PackedTrees | None = field(default=None, repr=False, compare=False)

    def _pack(self) -> PackedTrees:
        if self._packed is None:
            self._packed = pack_trees(self.trees)
        return self._packed

    def raw_score(self, X: np.ndarray) -> np.ndarray:
        raw = np.full(X.shape[0], self.base_score)
        if self.trees:
            raw += self.learning_rate * self._pack().leaf_value_sum(X)
        return raw

    def predict(self, X: np.ndarray) -> np.ndarray:
        return sigmoid(self.raw_score(X))

    def column_importance(self) -> np.ndarray:
        return gain_by_column(self.trees, self.width)


def _mean_logloss(y: np.ndarray, p: np.ndarray, eps: float = 1e-15) -> float:
    q = np.clip(p, eps, 1.0 - eps)
    return float(-np.mean(y * np.log(q) + (1.0 - y) * np.log1p(-q)))


def fit_gbm(
    X,
    y: np.ndarray,
    n_rounds: int = 300,
    learning_rate: float = 0.1,
    max_depth: int = 5,
    min_leaf: int = 10,
    subsample_rows: float = 0.8,
    subsample_cols: float = 0.8,
    seed: int = 0,
) -> GbmModel:
    if n_rounds < 0:
        raise ValueError("n_rounds must be >= 0")
    if not 0.0 < learning_rate <= 1.0:
        raise ValueError("learning_rate must be in (0, 1]")
    if not (0.0 < subsample_rows <= 1.0 and 0.0 < subsample_cols <= 1.0):
        raise ValueError("subsample fractions must be in (0, 1]")
    values = X.values if hasattr(X, "values") else np.asarray(X, dtype=np.float64)
    values = np.ascontiguousarray(values, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, width = values.shape

    prior = float(y.mean())
    degenerate = not PRIOR_CLIP < prior < 1.0 - PRIOR_CLIP
    prior = float(np.clip(prior, PRIOR_CLIP, 1.0 - PRIOR_CLIP))
    base_score = float(np.log(prior / (1.0 - prior)))

    trees: list[DecisionTree] = []
    losses: list[float] = []
    if n_rounds == 0:
        return GbmModel(base_score, trees, learning_rate, 0, width, degenerate, losses)

    XT = np.ascontiguousarray(values.T)
    order = np.empty((width, n), dtype=np.int32)
    for c in range(width):
        order[c] = np.argsort(XT[c], kind="stable")

    n_rows_sub = max(1, int(np.floor(subsample_rows * n + 0.5)))
    n_cols_sub = max(1, int(np.floor(subsample_cols * width + 0.5)))
    raw = np.full(n, base_score)
    for t in range(n_rounds):
        rng = rng_from(seed, t)
        if n_rows_sub < n:
            in_sample = np.zeros(n, dtype=np.uint8)
            in_sample[rng.choice(n, size=n_rows_sub, replace=False)] = 1
        else:
            in_sample = np.ones(n, dtype=np.uint8)
        if n_cols_sub < width:
            cols = np.sort(rng.choice(width, size=n_cols_sub, replace=False)).astype(np.int64)
        else:
            cols = np.arange(width, dtype=np.int64)

        p = sigmoid(raw)
        grad = y - p
        hess = p * (1.0 - p)
        col, thr, left, right, val, gain, cnt, node_of = grow_tree_levelwise(
            XT, order, cols, grad, in_sample, max_depth, min_leaf
        )
        n_nodes = len(col)
        mask = node_of >= 0
        leaf_ids = node_of[mask]
        num = np.bincount(leaf_ids, weights=grad[mask], minlength=n_nodes)
        den = np.bincount(leaf_ids, weights=hess[mask], minlength=n_nodes)
        newton = np.clip(num / np.maximum(den, 1e-12), -MAX_LEAF_VALUE, MAX_LEAF_VALUE)
        is_leaf = col < 0
        val = np.where(is_leaf, newton, val)
        tree = DecisionTree(col, thr, left, right, val, gain, cnt, max_depth=max_depth)
        trees.append(tree)
        raw += learning_rate * tree.predict_value(values)
        losses.append(_mean_logloss(y, sigmoid(raw)))

    return GbmModel(base_score, trees, learning_rate, n_rounds, width, degenerate, losses)
