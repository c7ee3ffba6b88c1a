"""Model persistence: one JSON document per fitted model.

Real arrays carry 17 significant digits, so a reloaded model reproduces
predictions bit-exactly.
"""

from __future__ import annotations

import json

import numpy as np

from .. import jsonio
from ..errors import BadCell, MissingFile
from .base import FittedModel, ModelFamily
from .forest import ForestModel
from .gbm import GbmModel
from .glm import GlmModel
from .mlp import MlpModel
from .tree import DecisionTree

FORMAT = "credalens-model"
VERSION = 1


def _tree_to_dict(tree: DecisionTree) -> dict:
    return {
        "split_col": tree.split_col,
        "threshold": tree.threshold,
        "left": tree.left,
        "right": tree.right,
        "leaf_value": tree.leaf_value,
        "gain": tree.gain,
        "n_samples": tree.n_samples,
        "max_depth": tree.max_depth,
    }


def _tree_from_dict(d: dict) -> DecisionTree:
    return DecisionTree(
        split_col=np.asarray(d["split_col"], dtype=np.int32),
        threshold=np.asarray(d["threshold"], dtype=np.float64),
        left=np.asarray(d["left"], dtype=np.int32),
        right=np.asarray(d["right"], dtype=np.int32),
        leaf_value=np.asarray(d["leaf_value"], dtype=np.float64),
        gain=np.asarray(d["gain"], dtype=np.float64),
        n_samples=np.asarray(d["n_samples"], dtype=np.int32),
        max_depth=int(d["max_depth"]),
    )


def _payload_to_dict(payload) -> dict:
    if isinstance(payload, GlmModel):
        return {
            "kind": "glm",
            "coefficients": payload.coefficients,
            "intercept": payload.intercept,
            "l2": payload.l2,
            "non_negative": payload.non_negative,
            "mean": payload.mean,
            "scale": payload.scale,
        }
    if isinstance(payload, ForestModel):
        return {
            "kind": "forest",
            "mode": payload.mode,
            "mtry": payload.mtry,
            "bootstrap": payload.bootstrap,
            "per_tree_seeds": list(payload.per_tree_seeds),
            "width": payload.width,
            "trees": [_tree_to_dict(t) for t in payload.trees],
        }
    if isinstance(payload, GbmModel):
        return {
            "kind": "gbm",
            "base_score": payload.base_score,
            "learning_rate": payload.learning_rate,
            "n_rounds": payload.n_rounds,
            "width": payload.width,
            "degenerate_prior": payload.degenerate_prior,
            "train_logloss": list(payload.train_logloss),
            "trees": [_tree_to_dict(t) for t in payload.trees],
        }
    if isinstance(payload, MlpModel):
        return {
            "kind": "mlp",
            "weights": [W for W in payload.weights],
            "biases": [b for b in payload.biases],
            "hidden_sizes": list(payload.hidden_sizes),
            "input_mean": payload.input_mean,
            "input_scale": payload.input_scale,
            "epochs": payload.epochs,
            "batch_size": payload.batch_size,
            "learning_rate": payload.learning_rate,
            "l2": payload.l2,
            "seed": payload.seed,
        }
    raise TypeError(f"unknown payload type {type(payload).__name__}")


def _payload_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "glm":
        return GlmModel(
            coefficients=np.asarray(d["coefficients"], dtype=np.float64),
            intercept=float(d["intercept"]),
            l2=float(d["l2"]),
            non_negative=bool(d["non_negative"]),
            mean=np.asarray(d["mean"], dtype=np.float64),
            scale=np.asarray(d["scale"], dtype=np.float64),
        )
    if kind == "forest":
        return ForestModel(
            trees=[_tree_from_dict(t) for t in d["trees"]],
            mode=d["mode"],
            mtry=int(d["mtry"]),
            bootstrap=bool(d["bootstrap"]),
            per_tree_seeds=[int(s) for s in d["per_tree_seeds"]],
            width=int(d["width"]),
        )
    if kind == "gbm":
        return GbmModel(
            base_score=float(d["base_score"]),
            trees=[_tree_from_dict(t) for t in d["trees"]],
            learning_rate=float(d["learning_rate"]),
            n_rounds=int(d["n_rounds"]),
            width=int(d["width"]),
            degenerate_prior=bool(d["degenerate_prior"]),
            train_logloss=[float(v) for v in d["train_logloss"]],
        )
    if kind == "mlp":
        return MlpModel(
            weights=[np.asarray(W, dtype=np.float64) for W in d["weights"]],
            biases=[np.asarray(b, dtype=np.float64) for b in d["biases"]],
            hidden_sizes=[int(h) for h in d["hidden_sizes"]],
            input_mean=np.asarray(d["input_mean"], dtype=np.float64),
            input_scale=np.asarray(d["input_scale"], dtype=np.float64),
            epochs=int(d["epochs"]),
            batch_size=int(d["batch_size"]),
            learning_rate=float(d["learning_rate"]),
            l2=float(d["l2"]),
            seed=int(d["seed"]),
        )
    raise BadCell(f"unknown model payload kind {kind!r}")


def model_to_dict(model: FittedModel) -> dict:
    return {
        "format": FORMAT,
        "version": VERSION,
        "id": model.id,
        "family": model.family.value,
        "train_seed": model.train_seed,
        "hyperparams": model.hyperparams,
        "col_names": model.col_names,
        "sources": [model.source_of.get(i, "") for i in range(len(model.col_names))],
        "payload": _payload_to_dict(model.payload),
    }


def model_from_dict(d: dict) -> FittedModel:
    if d.get("format") != FORMAT:
        raise BadCell("not a credalens model file")
    col_names = [str(c) for c in d.get("col_names", [])]
    sources = d.get("sources", [])
    return FittedModel(
        family=ModelFamily(d["family"]),
        payload=_payload_from_dict(d["payload"]),
        id=str(d["id"]),
        hyperparams=dict(d.get("hyperparams", {})),
        train_seed=int(d.get("train_seed", 0)),
        col_names=col_names,
        source_of={i: str(s) for i, s in enumerate(sources)},
    )


def save_model(model: FittedModel, path: str) -> None:
    jsonio.dump_file(model_to_dict(model), path)


def load_model(path: str) -> FittedModel:
    import os

    if not os.path.isfile(path):
        raise MissingFile(f"model file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
