"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's own linear-algebra
paths: weighted least squares is re-derived from explicit summation
normal equations, and distances from coordinate loops, so that library
bugs cannot hide behind themselves.
"""

import math

import numpy as np
import pytest

from cwreg.data import ObservationTable


def brute_force_wls(X, y, w):
    """Solve argmin sum_i w_i (y_i - x_i beta)^2 by explicit summation.

    Builds X'WX and X'Wy element by element with Python loops and
    inverts with np.linalg.inv. Independent of cwreg.wls internals.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    n, p = X.shape
    A = np.zeros((p, p))
    b = np.zeros(p)
    for i in range(n):
        for j in range(p):
            b[j] += w[i] * X[i, j] * y[i]
            for k in range(p):
                A[j, k] += w[i] * X[i, j] * X[i, k]
    return np.linalg.inv(A) @ b


def brute_force_distance(a, b):
    """Plain Euclidean distance between two coordinate rows."""
    return math.sqrt(sum((float(x) - float(z)) ** 2 for x, z in zip(a, b)))


def brute_force_distance_matrix(A, B):
    A = np.atleast_2d(A)
    B = np.atleast_2d(B)
    out = np.zeros((A.shape[0], B.shape[0]))
    for i in range(A.shape[0]):
        for j in range(B.shape[0]):
            out[i, j] = brute_force_distance(A[i], B[j])
    return out


def random_table(n=30, p=2, seed=0, spread=10.0):
    """Small random ObservationTable for property-style loops."""
    rng = np.random.default_rng(seed)
    coords = rng.uniform(0, spread, size=(n, 2))
    covs = rng.normal(size=(n, p))
    beta = rng.normal(size=p + 1)
    y = beta[0] + covs @ beta[1:] + rng.normal(scale=0.1, size=n)
    return ObservationTable(
        ids=[f"r{i:04d}" for i in range(n)],
        coords=coords,
        y=y,
        covariates=covs,
        covariate_names=[f"x{j + 1}" for j in range(p)],
    )


@pytest.fixture
def small_table():
    return random_table(n=30, p=2, seed=11)
