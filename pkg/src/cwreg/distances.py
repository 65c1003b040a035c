"""Distance matrices and Gaussian kernel weights for local regression.

Geographic distance is the Euclidean distance between projected
coordinates in meters. Attribute distance is the Euclidean distance
between standardized attribute vectors. Local models weight their
observations through a Gaussian kernel applied to the convex blend

    d = r * d_geographic + (1 - r) * d_attribute

so r = 1 weights purely by geography and r = 0 purely by attribute
similarity. The two raw distances live on incommensurate scales, so by
default each matrix is rescaled by its maximum over training pairs
("max-scale") before blending; the stored maxima are reused to rescale
query-to-training distances at prediction time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DimensionError, ParameterError

NORMALIZATION_MODES = ("max-scale", "none")


@dataclass(frozen=True)
class DistanceSpec:
    """Blend ratio, attribute columns, and distance normalization mode.

    Parameters
    ----------
    r : float
        Weight of the geographic distance in the blend, in [0, 1].
    attribute_columns : sequence of str
        Covariate columns entering the attribute distance. Must be
        non-empty whenever r < 1.
    normalization : str
        "max-scale" divides each distance matrix by its training
        maximum before blending; "none" blends raw distances.
    """

    r: float = 1.0
    attribute_columns: tuple[str, ...] = ()
    normalization: str = "max-scale"

    def __post_init__(self):
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "attribute_columns", tuple(self.attribute_columns))
        if not 0.0 <= self.r <= 1.0:
            raise ParameterError(f"blend ratio r must be in [0, 1], got {self.r}")
        if self.normalization not in NORMALIZATION_MODES:
            raise ParameterError(
                f"unknown normalization {self.normalization!r}, "
                f"expected one of {NORMALIZATION_MODES}"
            )
        if self.r < 1.0 and not self.attribute_columns:
            raise ParameterError("attribute_columns must be non-empty when r < 1")


def _check_matrix(a, name, n_cols=None):
    arr = np.atleast_2d(np.asarray(a, dtype=float))
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be a 2-d array, got ndim={arr.ndim}")
    if n_cols is not None and arr.shape[1] != n_cols:
        raise DimensionError(f"{name} must have {n_cols} columns, got {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} contains non-finite values")
    return arr


def geographic_distances(coords_a, coords_b) -> np.ndarray:
    """Pairwise Euclidean distances between two coordinate sets.

    Both arguments are (n, 2) arrays of projected easting/northing in
    meters. Returns an (n_a, n_b) matrix.
    """
    a = _check_matrix(coords_a, "coords_a", n_cols=2)
    b = _check_matrix(coords_b, "coords_b", n_cols=2)
    return cdist(a, b)


def attribute_distances(attrs_a, attrs_b) -> np.ndarray:
    """Pairwise Euclidean distances between standardized attribute vectors.

    Standardization is the caller's job (see data.standardize); this
    function only checks that the two sides agree on dimensionality.
    """
    a = _check_matrix(attrs_a, "attrs_a")
    b = _check_matrix(attrs_b, "attrs_b")
    if a.shape[1] != b.shape[1]:
        raise DimensionError(
            f"attribute dimensionality mismatch: {a.shape[1]} vs {b.shape[1]}"
        )
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[0]))
    return cdist(a, b)


def blend_distances(geographic, attribute, spec: DistanceSpec) -> np.ndarray:
    """Convex blend r * geographic + (1 - r) * attribute.

    The endpoints are exact: r = 1 returns the geographic matrix and
    r = 0 the attribute matrix, bit for bit.
    """
    geo = np.asarray(geographic, dtype=float)
    attr = np.asarray(attribute, dtype=float)
    if geo.shape != attr.shape:
        raise DimensionError(
            f"distance matrices differ in shape: {geo.shape} vs {attr.shape}"
        )
    if spec.r == 1.0:
        return geo.copy()
    if spec.r == 0.0:
        return attr.copy()
    return spec.r * geo + (1.0 - spec.r) * attr


def gaussian_weights(distances, bandwidth: float) -> np.ndarray:
    """Gaussian kernel weights exp(-(d / h)^2).

    A point at distance h gets weight exp(-1); at 2h, exp(-4); at zero
    distance, exactly 1.
    """
    if not np.isfinite(bandwidth) or bandwidth <= 0:
        raise ParameterError(f"bandwidth must be positive, got {bandwidth}")
    d = np.asarray(distances, dtype=float)
    if np.any(d < 0):
        raise ParameterError("distances must be nonnegative")
    # d/h can overflow for extreme candidate bandwidths; the weight is
    # then a legitimate 0, so silence the spurious warning.
    with np.errstate(over="ignore"):
        return np.exp(-((d / bandwidth) ** 2))


def training_scale(distances) -> float:
    """Rescaling constant for max-scale normalization.

    Returns the maximum entry of a training distance matrix, or 1.0
    when the matrix is empty or all-zero so that division is a no-op.
    """
    d = np.asarray(distances, dtype=float)
    if d.size == 0:
        return 1.0
    m = float(d.max())
    return m if m > 0 else 1.0
