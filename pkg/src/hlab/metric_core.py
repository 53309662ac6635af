"""Finite metric spaces: axiom checks, balls, distance to sets, separation.

Every space here is a finite, fully materialized distance table. Finite
spaces are closed in themselves, so closures and boundaries are trivial and
``dist(x, A) == 0`` exactly when ``x`` is in ``A``.
"""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from ._validation import REL_TOL, check_distance_table, check_point_cloud, check_subset
from .exceptions import InvalidInput, OverlappingSets


@dataclass(frozen=True, eq=False)
class PointSpace:
    """A finite space given by a symmetric table of pairwise distances.

    The pointwise axioms (zero diagonal, positivity off the diagonal,
    symmetry) are enforced on construction; the triangle inequality is not
    assumed and can be checked with :func:`validate_metric`.
    """

    dist: np.ndarray
    coords: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        d = check_distance_table(self.dist)
        d.setflags(write=False)
        object.__setattr__(self, "dist", d)
        if self.coords is not None:
            c = np.array(self.coords, dtype=float)
            c.setflags(write=False)
            object.__setattr__(self, "coords", c)

    @classmethod
    def from_points(cls, points):
        """Euclidean space on the rows of ``points`` (a 1-d array is a line cloud)."""
        X = check_point_cloud(points)
        return cls(cdist(X, X), coords=X)

    @classmethod
    def from_dict(cls, data):
        if "dist" in data:
            return cls(data["dist"])
        if "points" in data:
            return cls.from_points(data["points"])
        raise InvalidInput("space JSON needs a 'points' or 'dist' key")

    def to_dict(self):
        if self.coords is not None:
            return {"points": self.coords.tolist()}
        return {"dist": self.dist.tolist()}

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def __len__(self):
        return self.dist.shape[0]

    @property
    def size(self):
        return self.dist.shape[0]


@dataclass(frozen=True)
class MetricReport:
    is_metric: bool
    is_ultrametric: bool
    quasimetric_constant: float
    worst_triple: tuple

    def to_dict(self):
        return {
            "is_metric": self.is_metric,
            "is_ultrametric": self.is_ultrametric,
            "quasimetric_constant": self.quasimetric_constant,
            "worst_triple": list(self.worst_triple),
        }


def _as_table(space_or_table):
    if isinstance(space_or_table, PointSpace):
        return space_or_table.dist
    return check_distance_table(space_or_table)


def validate_metric(dist_table, tol=REL_TOL):
    """Check the triangle and ultrametric inequalities over all triples.

    ``quasimetric_constant`` is the exact smallest ``C >= 1`` with
    ``d(x, z) <= C * (d(x, y) + d(y, z))``; the boolean flags allow a
    relative slack of ``tol``.
    """
    d = _as_table(dist_table)
    n = len(d)
    if n < 2:
        return MetricReport(True, True, 1.0, ())
    worst, triple = -1.0, ()
    is_ultra = True
    for x in range(n):
        # ratio[y, z] = d(x, z) / (d(x, y) + d(y, z))
        denom = d[x][:, None] + d
        num = np.broadcast_to(d[x][None, :], denom.shape)
        ratio = np.divide(num, denom, out=np.zeros_like(denom), where=denom > 0)
        k = int(np.argmax(ratio))
        if ratio.flat[k] > worst:
            y, z = divmod(k, n)
            worst, triple = float(ratio.flat[k]), (x, y, z)
        if is_ultra:
            mx = np.maximum(d[x][:, None], d)
            is_ultra = not np.any(num > mx * (1.0 + tol))
    is_metric = worst <= 1.0 + tol
    return MetricReport(
        bool(is_metric), bool(is_metric and is_ultra), max(1.0, worst), triple
    )


def diameter(space, subset):
    d = _as_table(space)
    idx = check_subset(subset, len(d))
    if len(idx) == 1:
        return 0.0
    sub = d[np.ix_(idx, idx)]
    return float(sub.max())


def dist_to_set(space, x, A):
    """Distance from point ``x`` to the nonempty subset ``A``."""
    d = _as_table(space)
    idx = check_subset(A, len(d))
    if not 0 <= int(x) < len(d):
        raise InvalidInput(f"point {x} out of range")
    return float(d[int(x), list(idx)].min())


def _dist_to_all(d, idx):
    return d[:, list(idx)].min(axis=1)


def separation_function(space, A, B):
    """Per-point values of ``dist(x, A) / (dist(x, A) + dist(x, B))``."""
    d = _as_table(space)
    a = check_subset(A, len(d))
    b = check_subset(B, len(d))
    if set(a) & set(b):
        raise OverlappingSets(f"A and B share points {sorted(set(a) & set(b))}")
    da = _dist_to_all(d, a)
    db = _dist_to_all(d, b)
    total = da + db
    if np.any(total == 0):
        raise OverlappingSets("a point lies at distance 0 from both A and B")
    phi = da / total
    phi[list(a)] = 0.0
    phi[list(b)] = 1.0
    return phi


def clopen_separation(space, A, B):
    """Threshold the separation function at a level no point attains.

    Returns ``(U, r)`` with ``U = {x : phi(x) < r}``. ``r`` is the midpoint of
    the widest gap between consecutive attained values of ``phi`` in
    ``[0, 1]``; ties go to the smaller ``r``.
    """
    phi = separation_function(space, A, B)
    levels = np.unique(phi)
    gaps = np.diff(levels)
    # first (near-)maximum wins, which is the smallest r among ties
    k = int(np.flatnonzero(gaps >= gaps.max() * (1.0 - 1e-12))[0])
    r = float(0.5 * (levels[k] + levels[k + 1]))
    U = tuple(int(i) for i in np.flatnonzero(phi < r))
    return U, r


def ball(space, center, radius, kind="closed"):
    d = _as_table(space)
    row = d[int(center)]
    if kind == "open":
        if radius <= 0:
            raise InvalidInput("open balls need radius > 0")
        mask = row < radius
    elif kind == "closed":
        if radius < 0:
            raise InvalidInput("closed balls need radius >= 0")
        mask = row <= radius
    else:
        raise InvalidInput(f"kind must be 'open' or 'closed', got {kind!r}")
    return tuple(int(i) for i in np.flatnonzero(mask))
