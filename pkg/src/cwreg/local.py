"""Local weighted regression with blended geographic/attribute kernels.

A local model fits one weighted least-squares system per training
location; the weights decay with the blended distance

    d = r * d_geographic + (1 - r) * d_attribute

through a Gaussian kernel of bandwidth h. With r = 1 this is classic
geographically weighted regression (GWR). Both hyperparameters are
chosen by grid search: h against a leave-one-out cross-validation RMSE
(each observation's own weight is zeroed for its fit), and r over an
ascending grid with the bandwidth re-selected per candidate. Ties go
to the first bandwidth candidate and to the larger r.

Prediction at a query point either averages the stored coefficient
vectors of the K nearest training points under the blended distance
("knn-coef", the default with K = 3) or solves a fresh weighted fit
centered on the query ("local-fit").
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .data import ObservationTable, StandardizationTransform, standardize
from .distances import (
    DistanceSpec,
    attribute_distances,
    blend_distances,
    gaussian_weights,
    geographic_distances,
    training_scale,
)
from .errors import (
    DegenerateWeightsError,
    DimensionError,
    ParameterError,
    SearchFailureError,
    SingularFitError,
)
from .wls import RIDGE_SCALE, design_matrix, solve_wls, solve_wls_batched

MODEL_FORMAT = "cwreg-model"
MODEL_FORMAT_VERSION = 1

#: Default blend-ratio grid: 0 to 1 in steps of 0.01, ascending.
DEFAULT_R_GRID = tuple(round(i / 100, 2) for i in range(101))

BANDWIDTH_GRID_SIZE = 20

SCORING_MODES = ("loo", "insample")

PREDICT_MODES = ("knn-coef", "local-fit")

_CRITERION = {"loo": "loo_rmse", "insample": "training_rmse"}


@dataclass
class HyperSearchTrace:
    """Grid-search record: every candidate, every score, the winner.

    Scores are RMSE values under the named criterion; candidates whose
    fits failed everywhere carry an infinite score. For blend-ratio
    searches `bandwidths` lists the bandwidth chosen for each r.
    """

    parameter: str
    criterion: str
    candidates: list[float]
    scores: list[float]
    selected: float
    selected_score: float
    bandwidths: list[float] | None = None
    selected_bandwidth: float | None = None

    def to_dict(self) -> dict:
        def _clean(x):
            return None if not np.isfinite(x) else float(x)

        return {
            "parameter": self.parameter,
            "criterion": self.criterion,
            "candidates": [float(c) for c in self.candidates],
            "scores": [_clean(s) for s in self.scores],
            "selected": float(self.selected),
            "selected_score": _clean(self.selected_score),
            "bandwidths": (None if self.bandwidths is None
                           else [float(h) for h in self.bandwidths]),
            "selected_bandwidth": (None if self.selected_bandwidth is None
                                   else float(self.selected_bandwidth)),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "HyperSearchTrace":
        def _restore(x):
            return np.inf if x is None else float(x)

        return cls(
            parameter=doc["parameter"],
            criterion=doc["criterion"],
            candidates=[float(c) for c in doc["candidates"]],
            scores=[_restore(s) for s in doc["scores"]],
            selected=float(doc["selected"]),
            selected_score=_restore(doc["selected_score"]),
            bandwidths=(None if doc.get("bandwidths") is None
                        else [float(h) for h in doc["bandwidths"]]),
            selected_bandwidth=(None if doc.get("selected_bandwidth") is None
                                else float(doc["selected_bandwidth"])),
        )


@dataclass
class QueryPoint:
    """One prediction target: a coordinate plus raw covariate values
    in the training table's column order."""

    coord: np.ndarray
    covariates: np.ndarray

    def __post_init__(self):
        self.coord = np.asarray(self.coord, dtype=float).ravel()
        self.covariates = np.asarray(self.covariates, dtype=float).ravel()
        if self.coord.shape[0] != 2:
            raise DimensionError("query coordinate must have two components")


@dataclass
class LocalFit:
    """Per-location coefficients plus everything distances need.

    `geo_scale` and `attr_scale` are the training maxima used for
    max-scale normalization (1.0 under "none"); `transform` is the
    attribute standardization fitted on the training table, or None
    when r = 1 leaves attribute distances out entirely. `regularized`
    flags locations whose fit needed the ridge fallback.
    """

    coefficients: np.ndarray
    bandwidth: float
    spec: DistanceSpec
    geo_scale: float
    attr_scale: float
    transform: StandardizationTransform | None
    regularized: np.ndarray


def _training_distances(table: ObservationTable, spec: DistanceSpec):
    """Normalized training geo/attr matrices plus scales and transform."""
    geo = geographic_distances(table.coords, table.coords)
    if spec.r < 1.0:
        transform, _ = standardize(table, list(spec.attribute_columns))
        attr = attribute_distances(transform.apply_table(table),
                                   transform.apply_table(table))
    else:
        transform = None
        attr = np.zeros_like(geo)
    if spec.normalization == "max-scale":
        geo_scale = training_scale(geo)
        attr_scale = training_scale(attr)
    else:
        geo_scale = attr_scale = 1.0
    return geo / geo_scale, attr / attr_scale, geo_scale, attr_scale, transform


def _solve_location(X, y, w, location):
    """Stable solve with the documented ridge fallback for one location."""
    try:
        return solve_wls(X, y, w), False
    except DegenerateWeightsError as err:
        raise DegenerateWeightsError(
            f"local fit at training location {location}: {err}"
        ) from err
    except SingularFitError:
        pass
    trace = float(np.einsum("i,ij,ij->", w, X, X))
    ridge = RIDGE_SCALE * trace / X.shape[1]
    if ridge <= 0:
        raise SingularFitError(
            f"local fit at training location {location} is singular and has "
            "no weight mass to regularize"
        )
    try:
        return solve_wls(X, y, w, ridge), True
    except (SingularFitError, DegenerateWeightsError) as err:
        raise SingularFitError(
            f"local fit at training location {location}: {err}"
        ) from err


def fit_local(table: ObservationTable, spec: DistanceSpec, bandwidth: float
              ) -> LocalFit:
    """Fit one weighted least-squares system per training location.

    Near-singular locations (condition estimate of X'WX above 1e12)
    are retried with ridge = 1e-8 * trace(X'WX) / p and flagged in the
    returned `regularized` array.
    """
    if not np.isfinite(bandwidth) or bandwidth <= 0:
        raise ParameterError(f"bandwidth must be positive, got {bandwidth}")
    X = design_matrix(table.covariates)
    y = table.y
    n, p = X.shape
    if n < p + 1:
        raise ParameterError(
            f"need at least {p + 1} records to fit {p} coefficients locally"
        )
    geo_n, attr_n, geo_scale, attr_scale, transform = _training_distances(
        table, spec)
    D = blend_distances(geo_n, attr_n, spec)
    W = gaussian_weights(D, bandwidth)
    coefficients = np.empty((n, p))
    regularized = np.zeros(n, dtype=bool)
    for i in range(n):
        coefficients[i], regularized[i] = _solve_location(X, y, W[i], i)
    return LocalFit(
        coefficients=coefficients,
        bandwidth=float(bandwidth),
        spec=spec,
        geo_scale=geo_scale,
        attr_scale=attr_scale,
        transform=transform,
        regularized=regularized,
    )


def bandwidth_grid(D, size: int = BANDWIDTH_GRID_SIZE) -> list[float]:
    """Log-spaced bandwidth candidates for a blended distance matrix.

    Spans the 1st percentile to the maximum of the off-diagonal
    entries. Degenerates gracefully: all-zero distances yield a single
    bandwidth of 1.0 (every weight is 1 regardless).
    """
    if size < 1:
        raise ParameterError(f"grid size must be >= 1, got {size}")
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    off = D[~np.eye(n, dtype=bool)]
    positive = off[off > 0]
    if positive.size == 0:
        return [1.0]
    hi = float(positive.max())
    lo = float(np.percentile(off, 1.0))
    if lo <= 0:
        lo = float(positive.min())
    if lo >= hi:
        return [hi]
    return [float(h) for h in np.geomspace(lo, hi, size)]


def _grid_scores(X, y, D, grid, scoring) -> list[float]:
    """RMSE per bandwidth candidate over blended training distances.

    "loo" zeroes each observation's own weight before its fit;
    "insample" keeps it (self weight is exactly 1 at zero distance).
    Candidates where any location fails to fit score infinity.
    """
    scores = []
    for h in grid:
        W = gaussian_weights(D, h)
        if scoring == "loo":
            np.fill_diagonal(W, 0.0)
        betas, _, failed = solve_wls_batched(X, y, W)
        if np.any(failed):
            scores.append(np.inf)
            continue
        pred = np.einsum("ij,ij->i", X, betas)
        scores.append(float(np.sqrt(np.mean((y - pred) ** 2))))
    return scores


def _check_scoring(scoring):
    if scoring not in SCORING_MODES:
        raise ParameterError(
            f"unknown scoring {scoring!r}, expected one of {SCORING_MODES}"
        )


def _validate_grid(grid, name):
    values = [float(g) for g in grid]
    if not values:
        raise ParameterError(f"{name} must be non-empty")
    if any(not np.isfinite(g) or g <= 0 for g in values):
        raise ParameterError(f"{name} candidates must be positive")
    return values


def select_bandwidth(table: ObservationTable, spec: DistanceSpec,
                     grid=None, scoring: str = "loo",
                     size: int = BANDWIDTH_GRID_SIZE):
    """Grid-search the kernel bandwidth for a fixed distance spec.

    Returns (bandwidth, HyperSearchTrace). The default grid comes from
    bandwidth_grid on the blended training distances. Among equal
    scores the first candidate wins.
    """
    _check_scoring(scoring)
    X = design_matrix(table.covariates)
    geo_n, attr_n, _, _, _ = _training_distances(table, spec)
    D = blend_distances(geo_n, attr_n, spec)
    if grid is None:
        grid = bandwidth_grid(D, size=size)
    else:
        grid = _validate_grid(grid, "bandwidth grid")
    scores = _grid_scores(X, table.y, D, grid, scoring)
    best = None
    for i, s in enumerate(scores):
        if np.isfinite(s) and (best is None or s < scores[best]):
            best = i
    if best is None:
        raise SearchFailureError("no bandwidth candidate produced a valid fit")
    trace = HyperSearchTrace(
        parameter="bandwidth",
        criterion=_CRITERION[scoring],
        candidates=list(grid),
        scores=scores,
        selected=grid[best],
        selected_score=scores[best],
    )
    return grid[best], trace


def select_rate(table: ObservationTable, attribute_columns,
                h_strategy="joint", r_grid=None, scoring: str = "loo",
                normalization: str = "max-scale",
                bandwidth_grid_size: int = BANDWIDTH_GRID_SIZE):
    """Grid-search the blend ratio r, re-selecting h per candidate.

    `h_strategy` is "joint" (bandwidth grid rebuilt and searched for
    every r, leave-one-out criterion) or a fixed positive bandwidth
    used everywhere. Under scoring="insample" the bandwidth is still
    chosen by leave-one-out but each r is judged by its raw training
    RMSE at the selected bandwidth. Candidates are evaluated in
    ascending order and exact score ties go to the larger r.

    Returns (DistanceSpec with the winning r, HyperSearchTrace).
    """
    _check_scoring(scoring)
    if r_grid is None:
        r_grid = DEFAULT_R_GRID
    candidates = sorted(float(r) for r in r_grid)
    if not candidates:
        raise ParameterError("r grid must be non-empty")
    if candidates[0] < 0 or candidates[-1] > 1:
        raise ParameterError("r candidates must lie in [0, 1]")
    if h_strategy != "joint":
        h_fixed = float(h_strategy)
        if not np.isfinite(h_fixed) or h_fixed <= 0:
            raise ParameterError(f"fixed bandwidth must be positive, got {h_strategy}")
    X = design_matrix(table.covariates)
    y = table.y

    # Distance pieces are shared across the whole grid; only the blend
    # changes with r.
    geo = geographic_distances(table.coords, table.coords)
    need_attr = candidates[0] < 1.0
    if need_attr:
        probe = DistanceSpec(r=0.0, attribute_columns=tuple(attribute_columns),
                             normalization=normalization)
        transform, _ = standardize(table, list(probe.attribute_columns))
        attr = attribute_distances(transform.apply_table(table),
                                   transform.apply_table(table))
    else:
        attr = np.zeros_like(geo)
    if normalization == "max-scale":
        geo_n = geo / training_scale(geo)
        attr_n = attr / training_scale(attr)
    else:
        geo_n, attr_n = geo, attr

    scores: list[float] = []
    bandwidths: list[float] = []
    best = None
    for i, r in enumerate(candidates):
        spec_r = DistanceSpec(r=r, attribute_columns=tuple(attribute_columns),
                              normalization=normalization)
        D = blend_distances(geo_n, attr_n, spec_r)
        grid = (bandwidth_grid(D, size=bandwidth_grid_size)
                if h_strategy == "joint" else [h_fixed])
        h_scores = _grid_scores(X, y, D, grid, "loo")
        h_best = None
        for k, s in enumerate(h_scores):
            if np.isfinite(s) and (h_best is None or s < h_scores[h_best]):
                h_best = k
        if h_best is None:
            scores.append(np.inf)
            bandwidths.append(np.nan)
            continue
        if scoring == "loo":
            r_score = h_scores[h_best]
        else:
            r_score = _grid_scores(X, y, D, [grid[h_best]], "insample")[0]
        scores.append(r_score)
        bandwidths.append(grid[h_best])
        if np.isfinite(r_score) and (best is None or r_score <= scores[best]):
            best = i
    if best is None:
        raise SearchFailureError("no blend-ratio candidate produced a valid fit")
    trace = HyperSearchTrace(
        parameter="rate",
        criterion=_CRITERION[scoring],
        candidates=candidates,
        scores=scores,
        selected=candidates[best],
        selected_score=scores[best],
        bandwidths=bandwidths,
        selected_bandwidth=bandwidths[best],
    )
    spec = DistanceSpec(r=candidates[best],
                        attribute_columns=tuple(attribute_columns),
                        normalization=normalization)
    return spec, trace


def _query_blended(fit: LocalFit, table: ObservationTable, coords, covariates):
    """Blended query-to-training distances under the stored scales."""
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    covariates = np.atleast_2d(np.asarray(covariates, dtype=float))
    if covariates.shape[1] != len(table.covariate_names):
        raise DimensionError(
            f"queries need {len(table.covariate_names)} covariates, "
            f"got {covariates.shape[1]}"
        )
    if coords.shape[0] != covariates.shape[0]:
        raise DimensionError("coords and covariates disagree on query count")
    if not (np.all(np.isfinite(coords)) and np.all(np.isfinite(covariates))):
        raise ParameterError("query coordinates and covariates must be finite")
    geo = geographic_distances(coords, table.coords) / fit.geo_scale
    if fit.spec.r < 1.0 and fit.transform is not None:
        col_idx = [table.column_index(c) for c in fit.transform.columns]
        q_std = fit.transform.apply(covariates[:, col_idx])
        t_std = fit.transform.apply_table(table)
        attr = attribute_distances(q_std, t_std) / fit.attr_scale
    else:
        attr = np.zeros_like(geo)
    return blend_distances(geo, attr, fit.spec)


def predict_at(fit: LocalFit, table: ObservationTable, coords, covariates,
               mode: str = "knn-coef", k: int = 3) -> np.ndarray:
    """Predict the response at query locations (batch form).

    "knn-coef" averages the coefficient vectors of the k nearest
    training points under the blended distance (distance ties broken
    by ascending training-row index) and applies the average to the
    query covariates. "local-fit" solves a fresh weighted fit centered
    on each query at the stored bandwidth.
    """
    if mode not in PREDICT_MODES:
        raise ParameterError(
            f"unknown prediction mode {mode!r}, expected one of {PREDICT_MODES}"
        )
    D = _query_blended(fit, table, coords, covariates)
    Xq = design_matrix(np.atleast_2d(np.asarray(covariates, dtype=float)))
    if mode == "knn-coef":
        if not 1 <= k <= table.n:
            raise ParameterError(
                f"k must be in [1, {table.n}] for this training table, got {k}"
            )
        order = np.argsort(D, axis=1, kind="stable")[:, :k]
        beta_bar = fit.coefficients[order].mean(axis=1)
        return np.einsum("ij,ij->i", Xq, beta_bar)
    X = design_matrix(table.covariates)
    W = gaussian_weights(D, fit.bandwidth)
    betas = np.empty((D.shape[0], X.shape[1]))
    for i in range(D.shape[0]):
        betas[i], _ = _solve_location(X, table.y, W[i], f"query {i}")
    return np.einsum("ij,ij->i", Xq, betas)


def predict_query(fit: LocalFit, table: ObservationTable, query: QueryPoint,
                  mode: str = "knn-coef", k: int = 3) -> float:
    """Predict the response at a single query point."""
    return float(predict_at(fit, table, query.coord[None, :],
                            query.covariates[None, :], mode=mode, k=k)[0])


@dataclass
class FittedCwr:
    """A fitted local model bundled with its training table.

    The training table rides along because both prediction modes need
    it: coefficient averaging needs training distances, local fits
    need the full design. `name` distinguishes the pure-geographic
    special case ("gwr") from the blended model ("cwr") in reports.
    """

    fit: LocalFit
    table: ObservationTable
    k: int = 3
    mode: str = "knn-coef"
    traces: dict[str, HyperSearchTrace] = field(default_factory=dict)
    name: str = "cwr"

    @property
    def covariate_names(self) -> list[str]:
        return list(self.table.covariate_names)

    def predict(self, coords, covariates) -> np.ndarray:
        return predict_at(self.fit, self.table, coords, covariates,
                          mode=self.mode, k=self.k)

    def predict_table(self, table: ObservationTable) -> np.ndarray:
        return self.predict(table.coords,
                            table.covariate_matrix(self.table.covariate_names))

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_FORMAT_VERSION,
            "model_type": self.name,
            "k": self.k,
            "mode": self.mode,
            "bandwidth": self.fit.bandwidth,
            "spec": {
                "r": self.fit.spec.r,
                "attribute_columns": list(self.fit.spec.attribute_columns),
                "normalization": self.fit.spec.normalization,
            },
            "geo_scale": self.fit.geo_scale,
            "attr_scale": self.fit.attr_scale,
            "standardization": (None if self.fit.transform is None
                                else self.fit.transform.to_dict()),
            "coefficients": self.fit.coefficients.tolist(),
            "regularized": self.fit.regularized.astype(int).tolist(),
            "traces": {k: t.to_dict() for k, t in self.traces.items()},
            "training": self.table.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FittedCwr":
        if doc.get("format") != MODEL_FORMAT:
            raise ParameterError(f"not a {MODEL_FORMAT} document")
        if doc.get("version") != MODEL_FORMAT_VERSION:
            raise ParameterError(
                f"unsupported model version {doc.get('version')!r}"
            )
        spec = DistanceSpec(
            r=doc["spec"]["r"],
            attribute_columns=tuple(doc["spec"]["attribute_columns"]),
            normalization=doc["spec"]["normalization"],
        )
        fit = LocalFit(
            coefficients=np.asarray(doc["coefficients"], dtype=float),
            bandwidth=float(doc["bandwidth"]),
            spec=spec,
            geo_scale=float(doc["geo_scale"]),
            attr_scale=float(doc["attr_scale"]),
            transform=(None if doc["standardization"] is None
                       else StandardizationTransform.from_dict(
                           doc["standardization"])),
            regularized=np.asarray(doc["regularized"], dtype=bool),
        )
        return cls(
            fit=fit,
            table=ObservationTable.from_dict(doc["training"]),
            k=int(doc["k"]),
            mode=doc["mode"],
            traces={k: HyperSearchTrace.from_dict(t)
                    for k, t in doc.get("traces", {}).items()},
            name=doc.get("model_type", "cwr"),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "FittedCwr":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def fit_cwr(train: ObservationTable, attribute_columns=None, r="search",
            bandwidth="cv", k: int = 3, mode: str = "knn-coef",
            scoring: str = "loo", normalization: str = "max-scale",
            r_grid=None, bw_grid=None,
            bandwidth_grid_size: int = BANDWIDTH_GRID_SIZE,
            name: str = "cwr") -> FittedCwr:
    """Search hyperparameters as configured, then fit the local model.

    `r` is "search" or a fixed ratio in [0, 1]; `bandwidth` is "cv" or
    a fixed positive value. Pass r=1.0 for a pure GWR.
    """
    if mode not in PREDICT_MODES:
        raise ParameterError(
            f"unknown prediction mode {mode!r}, expected one of {PREDICT_MODES}"
        )
    if not 1 <= k <= train.n:
        raise ParameterError(f"k must be in [1, {train.n}], got {k}")
    if attribute_columns is None:
        attribute_columns = train.default_attribute_columns()
    attribute_columns = tuple(attribute_columns)
    traces: dict[str, HyperSearchTrace] = {}
    if isinstance(r, str):
        if r != "search":
            raise ParameterError(f'r must be a number or "search", got {r!r}')
        h_strategy = "joint" if isinstance(bandwidth, str) else float(bandwidth)
        if isinstance(bandwidth, str) and bandwidth != "cv":
            raise ParameterError(
                f'bandwidth must be a number or "cv", got {bandwidth!r}'
            )
        spec, trace = select_rate(
            train, attribute_columns, h_strategy=h_strategy, r_grid=r_grid,
            scoring=scoring, normalization=normalization,
            bandwidth_grid_size=bandwidth_grid_size)
        traces["rate"] = trace
        h = float(trace.selected_bandwidth)
    else:
        spec = DistanceSpec(r=float(r), attribute_columns=attribute_columns,
                            normalization=normalization)
        if isinstance(bandwidth, str):
            if bandwidth != "cv":
                raise ParameterError(
                    f'bandwidth must be a number or "cv", got {bandwidth!r}'
                )
            # Bandwidth search stays leave-one-out even under insample
            # scoring: judged in-sample, smaller h always looks better.
            _check_scoring(scoring)
            h, trace = select_bandwidth(train, spec, grid=bw_grid,
                                        scoring="loo",
                                        size=bandwidth_grid_size)
            traces["bandwidth"] = trace
        else:
            h = float(bandwidth)
    local = fit_local(train, spec, h)
    return FittedCwr(fit=local, table=train, k=k, mode=mode, traces=traces,
                     name=name)
