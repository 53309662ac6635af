"""scikit-learn compatible wrappers around the covering computations.

Both estimators take a point cloud ``X`` of shape ``(n_points, n_features)``
(a 1-d array is read as points on a line) and store their results in
trailing-underscore attributes, so they work with ``clone``,
``get_params`` / ``set_params`` and pipelines.
"""

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_point_cloud
from .atomic_covering import (
    AtomicSpace,
    dimension_estimate,
    exact_content,
    greedy_content,
    mass_lower_bound,
)
from .exceptions import InvalidInput
from .metric_core import PointSpace


class NetDimensionEstimator(BaseEstimator):
    """Scaling exponent of a point cloud from farthest-point net counts.

    Parameters
    ----------
    scales : sequence of float, optional
        Strictly decreasing scales. Defaults to ``n_scales`` geometric
        scales from a quarter of the cloud diameter down by ``ratio``.
    n_scales : int, default=6
    ratio : float, default=0.5
    bracket : (float, float), optional
        Plausible range for the exponent; only reported in ``diagnostics_``.

    Attributes
    ----------
    dimension_ : float
    counts_ : ndarray of int
    scales_ : ndarray
    diagnostics_ : dict
    """

    def __init__(self, scales=None, n_scales=6, ratio=0.5, bracket=None):
        self.scales = scales
        self.n_scales = n_scales
        self.ratio = ratio
        self.bracket = bracket

    def _default_scales(self, X):
        span = float(np.max(np.ptp(X, axis=0)))
        if span == 0:
            raise InvalidInput("all points coincide")
        return span / 4.0 * self.ratio ** np.arange(self.n_scales)

    def fit(self, X, y=None):
        X = check_point_cloud(X, min_points=2)
        scales = self._default_scales(X) if self.scales is None else self.scales
        alpha_hat, diag = dimension_estimate(X, scales, self.bracket)
        self.dimension_ = alpha_hat
        self.scales_ = np.asarray(diag["scales"])
        self.counts_ = np.asarray(diag["counts"])
        self.diagnostics_ = diag
        self.n_features_in_ = X.shape[1]
        return self


class HausdorffContentEstimator(BaseEstimator):
    """``H^alpha_delta`` of a point cloud presented as atoms.

    Parameters
    ----------
    alpha : float, default=1.0
    delta : float, default=inf
    mode : {"exact", "greedy", "lower"}, default="exact"
        ``"lower"`` uses uniform weights on the atoms.
    dp_limit : int, optional
        Overrides the DP atom limit.

    ``fit`` accepts ``groups``: a list of index tuples, one per atom.
    Without it every point is its own atom (so the value is 0 whenever
    ``alpha > 0``).

    Attributes
    ----------
    estimate_ : ContentEstimate
    content_ : float
    space_ : AtomicSpace
    """

    def __init__(self, alpha=1.0, delta=math.inf, mode="exact", dp_limit=None):
        self.alpha = alpha
        self.delta = delta
        self.mode = mode
        self.dp_limit = dp_limit

    def fit(self, X, y=None, groups=None):
        X = check_point_cloud(X)
        space = AtomicSpace.from_point_space(PointSpace.from_points(X), groups)
        if self.mode == "exact":
            est = exact_content(space, None, self.alpha, self.delta, self.dp_limit)
        elif self.mode == "greedy":
            est = greedy_content(space, None, self.alpha, self.delta)
        elif self.mode == "lower":
            est = mass_lower_bound(space, None, self.alpha, self.delta, None, self.dp_limit)
        else:
            raise InvalidInput(f"mode must be exact, greedy or lower, got {self.mode!r}")
        self.space_ = space
        self.estimate_ = est
        self.content_ = est.value
        self.n_features_in_ = X.shape[1]
        return self

    def score(self, X=None, y=None):
        """The fitted content (``X`` is ignored)."""
        check_is_fitted(self, "estimate_")
        return self.content_
