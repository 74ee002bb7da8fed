"""Model serialization: a JSON header line plus parameter records.

All floats go through JSON's shortest-round-trip encoding, so save followed
by load reproduces parameters exactly and identical models produce
byte-identical files.
"""

from __future__ import annotations

import json

import numpy as np

from ..errors import CorpusParseError
from .forest import RfConfig, RfModel
from .logistic import LogisticConfig, LogisticModel
from .svm import SvmModel


def _dump(record) -> str:
    return json.dumps(record, ensure_ascii=False, sort_keys=True)


def save_model(model, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if isinstance(model, LogisticModel):
            cfg = model.config
            header = {
                "kind": "logistic",
                "dim": model.dim,
                "hyperparameters": {
                    "epochs": cfg.epochs,
                    "batch_size": cfg.batch_size,
                    "lr": cfg.lr,
                },
                "seed": cfg.seed,
            }
            fh.write(_dump(header) + "\n")
            fh.write(
                _dump(
                    {
                        "weights": list(map(float, model.weights)),
                        "bias": float(model.bias),
                        "class_weights": list(map(float, model.class_weights)),
                    }
                )
                + "\n"
            )
        elif isinstance(model, SvmModel):
            header = {
                "kind": "svm",
                "dim": model.dim,
                "hyperparameters": {"C": model.C, "gamma": model.gamma},
                "seed": None,
            }
            fh.write(_dump(header) + "\n")
            fh.write(
                _dump(
                    {
                        "bias": float(model.bias),
                        "kkt_violation": float(model.kkt_violation),
                        "dual_objective": float(model.dual_objective),
                    }
                )
                + "\n"
            )
            for coef, x in zip(model.dual_coef, model.support_x):
                fh.write(_dump({"coef": float(coef), "x": list(map(float, x))}) + "\n")
        elif isinstance(model, RfModel):
            cfg = model.config
            header = {
                "kind": "rf",
                "dim": model.dim,
                "hyperparameters": {
                    "n_trees": cfg.n_trees,
                    "max_depth": cfg.max_depth,
                    "feature_subset_size": cfg.feature_subset_size,
                    "min_leaf": cfg.min_leaf,
                },
                "seed": cfg.seed,
            }
            fh.write(_dump(header) + "\n")
            for tree in model.trees:
                fh.write(_dump(tree) + "\n")
        else:
            raise TypeError(f"cannot serialize model of type {type(model).__name__}")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        lines = [line for line in fh if line.strip()]
    if not lines:
        raise CorpusParseError("empty model file")
    header = json.loads(lines[0])
    kind = header.get("kind")
    dim = int(header["dim"])
    hp = header.get("hyperparameters", {})
    if kind == "logistic":
        params = json.loads(lines[1])
        return LogisticModel(
            weights=np.array(params["weights"], dtype=np.float64),
            bias=float(params["bias"]),
            config=LogisticConfig(
                epochs=int(hp["epochs"]),
                batch_size=int(hp["batch_size"]),
                lr=float(hp["lr"]),
                seed=int(header["seed"]),
            ),
            class_weights=tuple(params["class_weights"]),
        )
    if kind == "svm":
        meta = json.loads(lines[1])
        coefs, xs = [], []
        for line in lines[2:]:
            record = json.loads(line)
            coefs.append(record["coef"])
            xs.append(record["x"])
        support = np.array(xs, dtype=np.float64).reshape(len(xs), dim)
        return SvmModel(
            support_x=support,
            dual_coef=np.array(coefs, dtype=np.float64),
            bias=float(meta["bias"]),
            C=float(hp["C"]),
            gamma=float(hp["gamma"]),
            kkt_violation=float(meta.get("kkt_violation", 0.0)),
            dual_objective=float(meta.get("dual_objective", 0.0)),
        )
    if kind == "rf":
        trees = [json.loads(line) for line in lines[1:]]
        return RfModel(
            trees=trees,
            dim=dim,
            config=RfConfig(
                n_trees=int(hp["n_trees"]),
                max_depth=int(hp["max_depth"]),
                feature_subset_size=hp.get("feature_subset_size"),
                min_leaf=int(hp.get("min_leaf", 1)),
                seed=int(header["seed"]),
            ),
        )
    raise CorpusParseError(f"unknown model kind {kind!r}")
