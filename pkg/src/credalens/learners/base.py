"""Model family enumeration, the fitted-model container, and dispatch."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np

from ..errors import WidthMismatch
from .forest import ForestModel, fit_forest
from .gbm import GbmModel, fit_gbm
from .glm import GlmModel, fit_glm
from .mlp import MlpModel, fit_mlp


class ModelFamily(Enum):
    GLM = "GLM"
    DRF = "DRF"
    XRT = "XRT"
    GBM = "GBM"
    DL = "DL"


FAMILIES = [ModelFamily.GLM, ModelFamily.DRF, ModelFamily.XRT, ModelFamily.GBM, ModelFamily.DL]

Payload = Union[GlmModel, ForestModel, GbmModel, MlpModel]


@dataclass
class FittedModel:
    """A trained base learner plus the encoded feature space it was fit on."""

    family: ModelFamily
    payload: Payload
    id: str
    hyperparams: dict
    train_seed: int
    col_names: list[str] = field(default_factory=list)
    source_of: dict[int, str] = field(default_factory=dict)

    @property
    def width(self) -> int:
        return self.payload.width

    def predict_proba(self, X) -> np.ndarray:
        values = X.values if hasattr(X, "values") else np.asarray(X, dtype=np.float64)
        if values.ndim != 2 or values.shape[1] != self.width:
            raise WidthMismatch(
                f"model {self.id} expects width {self.width}, got {values.shape}"
            )
        return self.payload.predict(values)


def predict_proba(model, X) -> np.ndarray:
    """Class-1 probabilities for a fitted model on encoded rows."""
    return model.predict_proba(X)


def fit_family(
    family: ModelFamily,
    X,
    y: np.ndarray,
    hyperparams: dict | None = None,
    seed: int = 0,
    threads: int | None = None,
) -> Payload:
    """Fit one learner of the given family with the given hyperparameters."""
    hp = dict(hyperparams or {})
    if family == ModelFamily.GLM:
        return fit_glm(
            X,
            y,
            l2=hp.get("l2", 1e-4),
            non_negative=hp.get("non_negative", False),
            max_iter=hp.get("max_iter", 100),
            tol=hp.get("tol", 1e-7),
        )
    if family in (ModelFamily.DRF, ModelFamily.XRT):
        return fit_forest(
            X,
            y,
            mode=family.value,
            n_trees=hp.get("n_trees", 200),
            max_depth=hp.get("max_depth", 20),
            mtry=hp.get("mtry"),
            min_leaf=hp.get("min_leaf", 1 if family == ModelFamily.DRF else 5),
            seed=seed,
            threads=threads,
        )
    if family == ModelFamily.GBM:
        return fit_gbm(
            X,
            y,
            n_rounds=hp.get("n_rounds", 300),
            learning_rate=hp.get("learning_rate", 0.1),
            max_depth=hp.get("max_depth", 5),
            min_leaf=hp.get("min_leaf", 10),
            subsample_rows=hp.get("subsample_rows", 0.8),
            subsample_cols=hp.get("subsample_cols", 0.8),
            seed=seed,
        )
    if family == ModelFamily.DL:
        return fit_mlp(
            X,
            y,
            hidden_sizes=hp.get("hidden_sizes", (32, 32)),
            epochs=hp.get("epochs", 50),
            batch_size=hp.get("batch_size", 64),
            learning_rate=hp.get("learning_rate", 0.01),
            l2=hp.get("l2", 1e-4),
            seed=seed,
        )
    raise ValueError(f"unknown family {family}")


def native_importance(model: FittedModel) -> dict[str, float]:
    """Per-source-feature importance from the model's own structure.

    GLM: absolute standardized coefficients; tree ensembles: total split
    gain; DL: unavailable (empty map, callers fall back to permutation
    importance).  Encoded-column scores are summed into source features.
    """
    payload = model.payload
    if isinstance(payload, GlmModel):
        per_column = np.abs(payload.coefficients)
    elif isinstance(payload, (ForestModel, GbmModel)):
        per_column = payload.column_importance()
    else:
        return {}
    scores: dict[str, float] = {}
    for idx in range(len(per_column)):
        feature = model.source_of.get(idx, model.col_names[idx] if model.col_names else str(idx))
        scores[feature] = scores.get(feature, 0.0) + float(per_column[idx])
    return scores
