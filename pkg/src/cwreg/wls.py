"""Dense weighted least squares and the global linear baseline.

Single fits go through a rank-revealing decomposition of the
square-root-weighted design rather than the normal equations; an
optional ridge term stabilizes near-singular local systems. The
batched solver trades that robustness for throughput and is only used
inside hyperparameter scoring loops, where thousands of small systems
are solved per candidate; a test pins it to the stable path.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DegenerateWeightsError,
    DimensionError,
    ParameterError,
    SingularFitError,
)

# Condition estimate of X'WX above which an unregularized solve is refused.
CONDITION_LIMIT = 1e12

# Fallback ridge used by local fits: RIDGE_SCALE * trace(X'WX) / n_coefficients.
RIDGE_SCALE = 1e-8


def design_matrix(covariates) -> np.ndarray:
    """Covariate matrix with an intercept column of ones prepended."""
    X = np.atleast_2d(np.asarray(covariates, dtype=float))
    if X.ndim != 2:
        raise DimensionError("covariates must form a 2-d matrix")
    return np.hstack([np.ones((X.shape[0], 1)), X])


def _validate_system(X, y, w):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    w = np.asarray(w, dtype=float).ravel()
    if X.shape[0] != y.shape[0]:
        raise DimensionError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
    if w.shape[0] != y.shape[0]:
        raise DimensionError(f"y has {y.shape[0]} entries but w has {w.shape[0]}")
    if X.shape[0] == 0:
        raise DimensionError("empty system")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y)) and np.all(np.isfinite(w))):
        raise ParameterError("X, y and w must be finite")
    if np.any(w < 0):
        raise ParameterError("weights must be nonnegative")
    if not np.any(w > 0):
        raise DegenerateWeightsError("all observation weights are zero")
    return X, y, w


def solve_wls(X, y, w, ridge: float = 0.0) -> np.ndarray:
    """Solve argmin_b sum_i w_i (y_i - x_i'b)^2 + ridge * ||b||^2.

    Parameters
    ----------
    X : (n, p) design matrix, intercept column included by the caller.
    y : (n,) responses.
    w : (n,) nonnegative weights, at least one positive.
    ridge : float
        Optional Tikhonov term. With ridge = 0 the solve refuses
        numerically singular systems (condition estimate of X'WX above
        CONDITION_LIMIT) by raising SingularFitError.
    """
    X, y, w = _validate_system(X, y, w)
    if ridge < 0 or not np.isfinite(ridge):
        raise ParameterError(f"ridge must be finite and nonnegative, got {ridge}")
    sw = np.sqrt(w)
    A = X * sw[:, None]
    b = y * sw
    p = X.shape[1]
    if ridge > 0:
        A = np.vstack([A, np.sqrt(ridge) * np.eye(p)])
        b = np.concatenate([b, np.zeros(p)])
    beta, _, rank, sv = np.linalg.lstsq(A, b, rcond=None)
    if ridge == 0:
        # cond(X'WX) equals the squared singular-value ratio of A.
        if rank < p or sv[-1] == 0:
            raise SingularFitError(
                f"weighted design is rank deficient (rank {rank} of {p})"
            )
        cond = (sv[0] / sv[-1]) ** 2
        if not np.isfinite(cond) or cond > CONDITION_LIMIT:
            raise SingularFitError(
                f"weighted normal matrix is numerically singular "
                f"(condition estimate {cond:.3e})"
            )
    return beta


def fit_ols(X, y) -> np.ndarray:
    """Ordinary least squares: unit weights, no ridge."""
    y_arr = np.asarray(y, dtype=float).ravel()
    return solve_wls(X, y_arr, np.ones(y_arr.shape[0]))


def predict(X, beta) -> np.ndarray:
    """Linear predictions X @ beta with a dimension check."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    beta = np.asarray(beta, dtype=float).ravel()
    if X.shape[1] != beta.shape[0]:
        raise DimensionError(
            f"design has {X.shape[1]} columns but beta has {beta.shape[0]} entries"
        )
    return X @ beta


def solve_wls_batched(X, y, W, cond_limit: float = CONDITION_LIMIT,
                      ridge_scale: float = RIDGE_SCALE):
    """Solve one weighted system per row of W through the normal equations.

    Builds the stacked normal systems with einsum and solves them in a
    single batched call. Rows whose condition estimate exceeds
    cond_limit are re-solved with ridge = ridge_scale * trace / p and
    flagged in `regularized`; rows that remain unsolvable are flagged
    in `failed` and their coefficients zeroed.

    Returns (betas (m, p), regularized (m,) bool, failed (m,) bool).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    W = np.atleast_2d(np.asarray(W, dtype=float))
    if W.shape[1] != X.shape[0] or X.shape[0] != y.shape[0]:
        raise DimensionError(
            f"shape mismatch: X {X.shape}, y {y.shape}, W {W.shape}"
        )
    m = W.shape[0]
    p = X.shape[1]
    N = np.einsum("ij,jk,jl->ikl", W, X, X)
    c = np.einsum("ij,jk,j->ik", W, X, y)
    with np.errstate(all="ignore"):
        conds = np.linalg.cond(N)
    bad = ~np.isfinite(conds) | (conds > cond_limit)
    failed = np.zeros(m, dtype=bool)
    if np.any(bad):
        traces = np.einsum("ikk->i", N)
        ridges = np.where(bad, ridge_scale * np.maximum(traces, 0.0) / p, 0.0)
        failed |= bad & (ridges <= 0)
        N = N + ridges[:, None, None] * np.eye(p)
    eye = np.eye(p)
    N_solve = np.where(failed[:, None, None], eye, N)
    c_solve = np.where(failed[:, None], 0.0, c)
    try:
        betas = np.linalg.solve(N_solve, c_solve[:, :, None])[:, :, 0]
    except np.linalg.LinAlgError:
        betas = np.zeros((m, p))
        for i in range(m):
            if failed[i]:
                continue
            try:
                betas[i] = np.linalg.solve(N_solve[i], c_solve[i])
            except np.linalg.LinAlgError:
                failed[i] = True
    bad_rows = ~np.all(np.isfinite(betas), axis=1)
    if np.any(bad_rows):
        failed |= bad_rows
        betas[bad_rows] = 0.0
    return betas, bad & ~failed, failed
