"""Thin model wrappers sharing one predict/save/load interface.

Every model exposes predict(coords, covariates) where covariates are
raw values in the model's own column order, and serializes to a JSON
document tagged with "model_type" so files can be loaded without
knowing what they contain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .ensemble import BoostedEnsemble
from .errors import DimensionError, ParameterError
from .local import MODEL_FORMAT, MODEL_FORMAT_VERSION, FittedCwr
from .wls import design_matrix, predict as linear_predict


@dataclass
class OlsModel:
    """Global linear baseline: one coefficient vector for everyone."""

    coefficients: np.ndarray
    covariate_names: list[str]
    name: str = "ols"

    def predict(self, coords, covariates) -> np.ndarray:
        X = design_matrix(np.atleast_2d(np.asarray(covariates, dtype=float)))
        if X.shape[1] != self.coefficients.shape[0]:
            raise DimensionError(
                f"expected {self.coefficients.shape[0] - 1} covariates, "
                f"got {X.shape[1] - 1}"
            )
        return linear_predict(X, self.coefficients)

    def predict_table(self, table) -> np.ndarray:
        return self.predict(table.coords,
                            table.covariate_matrix(self.covariate_names))

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_FORMAT_VERSION,
            "model_type": "ols",
            "coefficients": self.coefficients.tolist(),
            "covariate_names": list(self.covariate_names),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "OlsModel":
        return cls(coefficients=np.asarray(doc["coefficients"], dtype=float),
                   covariate_names=list(doc["covariate_names"]))


@dataclass
class LsboostModel:
    """Boosted-tree model plus the covariate order it was trained on."""

    ensemble: BoostedEnsemble
    covariate_names: list[str]
    name: str = "lsboost"

    def predict(self, coords, covariates) -> np.ndarray:
        return self.ensemble.predict(
            np.atleast_2d(np.asarray(covariates, dtype=float)))

    def predict_table(self, table) -> np.ndarray:
        return self.predict(table.coords,
                            table.covariate_matrix(self.covariate_names))

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_FORMAT_VERSION,
            "model_type": "lsboost",
            "covariate_names": list(self.covariate_names),
            "ensemble": self.ensemble.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "LsboostModel":
        return cls(ensemble=BoostedEnsemble.from_dict(doc["ensemble"]),
                   covariate_names=list(doc["covariate_names"]))


def save_model(model, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model.to_dict(), fh, indent=2)
        fh.write("\n")


def load_model(path):
    """Load any saved model; dispatches on its model_type tag."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ParameterError(f"{path}: not a {MODEL_FORMAT} document")
    kind = doc.get("model_type")
    if kind in ("cwr", "gwr"):
        return FittedCwr.from_dict(doc)
    if kind == "ols":
        return OlsModel.from_dict(doc)
    if kind == "lsboost":
        return LsboostModel.from_dict(doc)
    raise ParameterError(f"{path}: unknown model_type {kind!r}")
