"""Input validation helpers shared by every module."""

import math
import os

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import (
    DegenerateGrid,
    EmptySubset,
    InvalidAlpha,
    InvalidDelta,
    InvalidInput,
    NegativeEntry,
    NonSymmetric,
    TooFewPoints,
    ZeroOffDiagonal,
)

DEFAULT_DP_LIMIT = 16
DP_HARD_CAP = 20
REL_TOL = 1e-9


def dp_limit(limit=None):
    """Resolve the DP atom limit: explicit value, then ``HLAB_DP_LIMIT``, then default.

    The result is always capped at ``DP_HARD_CAP``.
    """
    if limit is None:
        env = os.environ.get("HLAB_DP_LIMIT")
        if env:
            try:
                limit = int(env)
            except ValueError as exc:
                raise InvalidInput(f"HLAB_DP_LIMIT is not an integer: {env!r}") from exc
        else:
            limit = DEFAULT_DP_LIMIT
    limit = int(limit)
    if limit < 1:
        raise InvalidInput(f"DP limit must be positive, got {limit}")
    return min(limit, DP_HARD_CAP)


def check_alpha(alpha):
    alpha = float(alpha)
    if not alpha >= 0 or math.isinf(alpha):
        raise InvalidAlpha(f"alpha must be a finite number >= 0, got {alpha}")
    return alpha


def check_delta(delta, allow_inf=True):
    delta = float(delta)
    if math.isnan(delta) or delta <= 0:
        raise InvalidDelta(f"delta must be > 0, got {delta}")
    if math.isinf(delta) and not allow_inf:
        raise InvalidDelta("delta must be finite here")
    return delta


def check_decreasing_grid(grid, name="grid", min_len=1, allow_inf=False):
    """Return ``grid`` as a float array after checking it is positive and strictly decreasing."""
    arr = np.asarray(list(grid), dtype=float)
    if arr.ndim != 1 or arr.size < min_len:
        raise DegenerateGrid(f"{name} needs at least {min_len} values")
    if np.any(np.isnan(arr)) or np.any(arr <= 0):
        raise DegenerateGrid(f"{name} values must be positive")
    if not allow_inf and np.any(np.isinf(arr)):
        raise DegenerateGrid(f"{name} values must be finite")
    if np.any(np.diff(arr) >= 0):
        raise DegenerateGrid(f"{name} must be strictly decreasing")
    return arr


def check_distance_table(dist, sym_tol=REL_TOL):
    """Validate a square distance table and return it as a symmetric float array.

    Only the pointwise axioms are enforced here; the triangle inequality is
    checked by :func:`hlab.metric_core.validate_metric`.
    """
    d = np.array(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InvalidInput(f"distance table must be square, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise InvalidInput("distance table must be finite")
    if np.any(d < 0):
        i, j = np.argwhere(d < 0)[0]
        raise NegativeEntry(f"negative distance at ({i}, {j}): {d[i, j]}")
    scale = np.maximum(np.abs(d), np.abs(d.T))
    bad = np.abs(d - d.T) > sym_tol * np.maximum(scale, 1.0)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise NonSymmetric(f"d[{i},{j}]={d[i, j]} but d[{j},{i}]={d[j, i]}")
    d = 0.5 * (d + d.T)
    if np.any(np.diag(d) != 0):
        raise InvalidInput("distance table must have a zero diagonal")
    off = d + np.eye(len(d))
    if np.any(off == 0):
        i, j = np.argwhere(off == 0)[0]
        raise ZeroOffDiagonal(f"distinct points {i} and {j} are at distance 0")
    return d


def check_subset(indices, size, allow_empty=False):
    """Return ``indices`` as a tuple of unique in-range ints (order preserved)."""
    idx = tuple(int(i) for i in indices)
    if not allow_empty and not idx:
        raise EmptySubset("subset must be nonempty")
    if len(set(idx)) != len(idx):
        raise InvalidInput(f"subset has repeated indices: {idx}")
    for i in idx:
        if not 0 <= i < size:
            raise InvalidInput(f"index {i} out of range for size {size}")
    return idx


def check_point_cloud(X, min_points=1):
    """Coerce ``X`` into a 2-d float array of points (one row per point)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    X = check_array(X, ensure_min_samples=1, dtype=float)
    if len(X) < min_points:
        raise TooFewPoints(f"need at least {min_points} points, got {len(X)}")
    return X
