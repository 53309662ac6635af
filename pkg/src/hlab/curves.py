"""Sampled paths: partition sums, length, arc-length reparameterization.

A sampled path *is* the polyline through its samples, so its length is the
partition sum over the full sample partition (refining never decreases a
partition sum). How well that approximates a continuous curve is up to the
sampling.
"""

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from ._validation import dp_limit
from .atomic_covering import AtomicSpace, exact_content
from .exceptions import BadPartition, DomainMismatch, InvalidInput, NotASample, TooManySegments
from .metric_core import PointSpace
from .transforms import MetricMap

EQUALITY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SampledPath:
    """Samples ``(params[j], points[j])`` of a path.

    With ``space=None`` the points are Euclidean coordinates (one row per
    sample). Otherwise they are indices into ``space``.
    """

    params: np.ndarray
    points: np.ndarray
    space: PointSpace = None

    def __post_init__(self):
        t = np.asarray(self.params, dtype=float).reshape(-1)
        if t.size == 0:
            raise InvalidInput("a path needs at least one sample")
        if np.any(np.diff(t) <= 0):
            raise InvalidInput("params must be strictly increasing")
        if self.space is None:
            p = np.asarray(self.points, dtype=float)
            if p.ndim == 1:
                p = p.reshape(-1, 1)
        else:
            p = np.asarray(self.points, dtype=np.int64).reshape(-1)
            if p.size and (p.min() < 0 or p.max() >= len(self.space)):
                raise InvalidInput("path refers to points outside its space")
        if len(p) != t.size:
            raise InvalidInput(f"{t.size} params but {len(p)} points")
        t.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "params", t)
        object.__setattr__(self, "points", p)

    def __len__(self):
        return self.params.size

    def distance(self, i, j):
        if self.space is None:
            return float(np.linalg.norm(self.points[i] - self.points[j]))
        return float(self.space.dist[self.points[i], self.points[j]])

    def steps(self):
        """Distances between consecutive samples."""
        if self.space is None:
            return np.linalg.norm(np.diff(self.points, axis=0), axis=1)
        p = self.points
        return self.space.dist[p[:-1], p[1:]]

    def pairwise(self):
        if self.space is None:
            diff = self.points[:, None, :] - self.points[None, :, :]
            return np.linalg.norm(diff, axis=2)
        return self.space.dist[np.ix_(self.points, self.points)]

    def to_csv(self):
        if self.space is not None:
            raise InvalidInput("only Euclidean paths have a CSV form")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        dim = self.points.shape[1]
        writer.writerow(["t"] + [f"x{i + 1}" for i in range(dim)])
        for t, row in zip(self.params, self.points):
            writer.writerow([repr(float(t))] + [repr(float(v)) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.reader(io.StringIO(text)))
        if rows and rows[0] and not _is_number(rows[0][0]):
            rows = rows[1:]
        rows = [r for r in rows if r]
        if not rows:
            raise InvalidInput("empty path CSV")
        data = np.array([[float(v) for v in r] for r in rows])
        return cls(data[:, 0], data[:, 1:])


def _is_number(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def partition_sum(path, partition):
    """Sum of distances between consecutive samples of ``partition`` (sample indices)."""
    idx = [int(i) for i in partition]
    n = len(path)
    if not idx or idx[0] != 0 or idx[-1] != n - 1:
        raise BadPartition("partition must start at the first and end at the last sample")
    if any(b <= a for a, b in zip(idx, idx[1:])) and n > 1:
        raise BadPartition("partition indices must be strictly increasing")
    return math.fsum(path.distance(a, b) for a, b in zip(idx, idx[1:]))


def length(path):
    return math.fsum(path.steps())


def split_length(path, x):
    """Lengths of the parts before and after the sample with parameter ``x``."""
    hits = np.flatnonzero(path.params == x)
    if hits.size == 0:
        raise NotASample(f"{x} is not a sample parameter")
    k = int(hits[0])
    steps = path.steps()
    return math.fsum(steps[:k]), math.fsum(steps[k:])


def cumulative_length(path):
    steps = path.steps()
    return np.concatenate([[0.0], np.cumsum(steps)])


def arclength_reparameterize(path):
    """Re-index by cumulative length; zero-length steps are collapsed."""
    s = cumulative_length(path)
    keep = np.concatenate([[True], np.diff(s) > 0])
    return SampledPath(s[keep], path.points[keep], path.space)


@dataclass(frozen=True)
class MappedPath:
    path: SampledPath
    length: float
    source_length: float
    k: float
    bound: float
    applicable: bool
    holds: bool


def map_path(fmap, path, scale=None):
    """Compose a path with a map and compare lengths.

    With ``scale=None`` the bound is ``lipschitz_constant(fmap) * length``.
    With a scale ``delta`` the local constant ``k(delta)`` is used, which only
    applies when every step of the path is shorter than ``delta``; otherwise
    the result is marked not applicable, since a sampled path cannot be
    refined.
    """
    from .transforms import lipschitz_constant, local_lipschitz_profile

    if not isinstance(fmap, MetricMap):
        raise InvalidInput("map_path needs a MetricMap")
    if path.space is not fmap.domain and not (
        path.space is not None
        and path.space.dist.shape == fmap.domain.dist.shape
        and np.array_equal(path.space.dist, fmap.domain.dist)
    ):
        raise DomainMismatch("path does not live in the map's domain")
    image = SampledPath(path.params, fmap.assignment[path.points], fmap.codomain)
    src = length(path)
    out = length(image)
    if scale is None:
        k = lipschitz_constant(fmap)
        applicable = True
    else:
        k = local_lipschitz_profile(fmap, [scale]).k[0]
        applicable = bool(np.all(path.steps() < scale))
    bound = k * src
    holds = out <= bound * (1 + 1e-12) + 1e-15 if applicable else True
    return MappedPath(image, out, src, k, bound, applicable, bool(holds))


def _segment_distance(p0, p1, q0, q1):
    """Smallest distance between segments ``[p0, p1]`` and ``[q0, q1]``."""

    def point_seg(x, a, b):
        ab = b - a
        denom = ab @ ab
        t = 0.0 if denom == 0 else min(1.0, max(0.0, (x - a) @ ab / denom))
        return np.linalg.norm(x - (a + t * ab))

    best = min(point_seg(p0, q0, q1), point_seg(p1, q0, q1), point_seg(q0, p0, p1), point_seg(q1, p0, p1))
    u, v, w = p1 - p0, q1 - q0, p0 - q0
    a, b, c, d, e = u @ u, u @ v, v @ v, u @ w, v @ w
    denom = a * c - b * b
    if denom > 1e-14 * max(a * c, 1e-300):
        s = (b * e - c * d) / denom
        t = (a * e - b * d) / denom
        if 0 <= s <= 1 and 0 <= t <= 1:
            best = min(best, np.linalg.norm(w + s * u - t * v))
    return float(best)


def segment_atoms(path):
    """Atomic presentation of a Euclidean polyline: one atom per chord."""
    if path.space is not None:
        raise InvalidInput("segment presentations need Euclidean samples")
    P = path.points
    m = len(P) - 1
    diam = np.linalg.norm(np.diff(P, axis=0), axis=1)
    sup = np.zeros((m, m))
    inf = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            ends = [P[i], P[i + 1]]
            others = [P[j], P[j + 1]]
            sup[i, j] = sup[j, i] = max(np.linalg.norm(a - b) for a in ends for b in others)
            inf[i, j] = inf[j, i] = _segment_distance(P[i], P[i + 1], P[j], P[j + 1])
    return AtomicSpace(diam, sup, inf, provenance="custom", labels=[(i, i + 1) for i in range(m)])


def is_simple_polyline(path, tol=1e-12):
    """True when samples are distinct and chords meet only at shared endpoints."""
    atoms = segment_atoms(path)
    m = atoms.n_atoms
    if np.any(atoms.atom_diam <= tol):
        return False
    for i in range(m):
        for j in range(i + 2, m):
            if atoms.inf_dist[i, j] <= tol:
                return False
    P = path.points
    for i in range(m - 1):
        # adjacent chords must not fold back onto each other
        u = P[i] - P[i + 1]
        v = P[i + 2] - P[i + 1]
        cross = np.linalg.norm(u) * np.linalg.norm(v)
        if cross > 0 and u @ v >= cross * (1 - 1e-12):
            return False
    return True


@dataclass(frozen=True)
class H1Comparison:
    content: float
    length: float
    delta: float
    injective: bool
    content_le_length: bool
    equal: bool
    diameter: float

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def image_h1_check(path, delta=None, limit=None):
    """Compare the 1-dimensional content of a polyline's image with its length.

    Each chord is an atom. ``delta`` defaults to just above the longest
    chord, the finest scale at which every chord is still an admissible
    block, so the value is the presentation's best approximation of ``H^1``.
    """
    m = len(path) - 1
    if m > dp_limit(limit):
        raise TooManySegments(f"{m} segments exceed the DP limit of {dp_limit(limit)}")
    total = length(path)
    diam = float(path.pairwise().max()) if len(path) > 1 else 0.0
    if m == 0:
        return H1Comparison(0.0, 0.0, math.inf, True, True, True, 0.0)
    atoms = segment_atoms(path)
    if delta is None:
        longest = float(atoms.atom_diam.max())
        delta = longest * (1 + 1e-9) if longest > 0 else math.inf
    content = exact_content(atoms, None, 1.0, delta, limit).value
    injective = is_simple_polyline(path)
    scale = max(1.0, total)
    return H1Comparison(
        content=content,
        length=total,
        delta=delta,
        injective=injective,
        content_le_length=content <= total + EQUALITY_TOL * scale,
        equal=abs(content - total) <= EQUALITY_TOL * scale,
        diameter=diam,
    )


def circle_path(samples, radius=1.0, closed=True):
    """``samples`` equal-angle chords around a circle (closed: first point repeated)."""
    count = samples + 1 if closed else samples
    theta = 2 * np.pi * np.arange(count) / samples
    pts = radius * np.column_stack([np.cos(theta), np.sin(theta)])
    return SampledPath(theta, pts)
