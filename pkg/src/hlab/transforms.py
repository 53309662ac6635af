"""Snowflake metrics and Lipschitz-type constants of maps between finite spaces.

All constants are maxima over the finitely many sampled pairs: exact for the
presented spaces and lower bounds for any continuum they were sampled from.
"""

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._validation import check_decreasing_grid
from .atomic_covering import AtomicSpace
from .exceptions import DegenerateProfile, InvalidExponent, InvalidInput, NotInjective
from .metric_core import PointSpace, validate_metric


@dataclass(frozen=True, eq=False)
class MetricMap:
    """A map between finite spaces: ``assignment[i]`` is the image of domain point ``i``."""

    domain: PointSpace
    codomain: PointSpace
    assignment: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=np.int64).reshape(-1)
        if a.size != len(self.domain):
            raise InvalidInput(
                f"assignment has {a.size} entries for {len(self.domain)} domain points"
            )
        if a.size and (a.min() < 0 or a.max() >= len(self.codomain)):
            raise InvalidInput("assignment refers to a point outside the codomain")
        a.setflags(write=False)
        object.__setattr__(self, "assignment", a)

    def image_distances(self):
        a = self.assignment
        return self.codomain.dist[np.ix_(a, a)]

    def image_groups(self, groups):
        """Images of groups of domain points, as codomain index tuples."""
        return [tuple(sorted({int(self.assignment[i]) for i in g})) for g in groups]


def _pair_ratios(fmap, a=1.0):
    d1 = fmap.domain.dist
    d2 = fmap.image_distances()
    iu = np.triu_indices(len(d1), k=1)
    x, y = d1[iu], d2[iu]
    return x, y / x**a


def pushforward_atoms(fmap, groups=None):
    """Domain and image atomic presentations for groups of domain points.

    Image atom ``i`` is ``f(groups[i])`` with diameter data induced from the
    codomain, so block diameters satisfy ``diam f(B) <= k * diam B``.
    """
    if groups is None:
        groups = [(i,) for i in range(len(fmap.domain))]
    domain = AtomicSpace.from_point_space(fmap.domain, groups)
    image = AtomicSpace.from_point_space(fmap.codomain, fmap.image_groups(groups))
    return domain, image


def _atomic_is_ultrametric(space):
    off = ~np.eye(space.n_atoms, dtype=bool)
    if not np.allclose(space.sup_dist[off], space.inf_dist[off], rtol=1e-12, atol=0):
        return False
    if space.n_atoms > 1:
        nearest = np.where(off, space.sup_dist, np.inf).min(axis=1)
        if np.any(space.atom_diam > nearest * (1 + 1e-12)):
            return False
    table = np.where(off, space.sup_dist, 0.0)
    if space.n_atoms and np.any(table[off] == 0):
        return False
    return validate_metric(table).is_ultrametric if space.n_atoms else True


def snowflake(space, t):
    """Raise every distance and diameter to the power ``t``.

    ``t`` must lie in ``(0, 1]`` unless the input is ultrametric, in which
    case any ``t > 0`` keeps it an ultrametric.
    """
    t = float(t)
    if not t > 0 or math.isinf(t):
        raise InvalidExponent(f"snowflake exponent must be a positive number, got {t}")
    if isinstance(space, PointSpace):
        if t > 1 and not validate_metric(space).is_ultrametric:
            raise InvalidExponent(f"t={t} > 1 needs an ultrametric input")
        return PointSpace(space.dist**t)
    if isinstance(space, AtomicSpace):
        if t > 1 and not _atomic_is_ultrametric(space):
            raise InvalidExponent(f"t={t} > 1 needs an ultrametric input")
        return AtomicSpace(
            space.atom_diam**t,
            space.sup_dist**t,
            space.inf_dist**t,
            provenance=space.provenance,
            labels=space.labels,
        )
    raise InvalidInput(f"cannot snowflake a {type(space).__name__}")


def lipschitz_constant(fmap):
    return holder_constant(fmap, 1.0)


def holder_constant(fmap, a):
    """Smallest ``k`` with ``d2(f(x), f(y)) <= k * d1(x, y) ** a`` on all pairs."""
    if not a > 0:
        raise InvalidExponent(f"Hoelder order must be > 0, got {a}")
    if len(fmap.domain) < 2:
        return 0.0
    _, ratios = _pair_ratios(fmap, a)
    return float(ratios.max())


def bilipschitz_constant(fmap):
    """Smallest ``k >= 1`` with ``d1 / k <= d2(f, f) <= k * d1`` on all pairs."""
    if len(fmap.domain) < 2:
        return 1.0
    _, ratios = _pair_ratios(fmap)
    lo = ratios.min()
    if lo == 0:
        raise NotInjective("the map sends two distinct points to the same image")
    return float(max(ratios.max(), 1.0 / lo, 1.0))


@dataclass(frozen=True)
class LipschitzProfile:
    """Scale-local Lipschitz constants ``k(delta)`` along a decreasing grid.

    ``has_pairs[i]`` is False when no pair of domain points is closer than
    ``deltas[i]``; ``k[i]`` is reported as 0 there.
    """

    deltas: tuple
    k: tuple
    has_pairs: tuple

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["delta", "k", "has_pairs"])
        for d, k, h in zip(self.deltas, self.k, self.has_pairs):
            writer.writerow([repr(d), repr(k), int(h)])
        return buf.getvalue()

    def k_at(self, delta):
        for d, k in zip(self.deltas, self.k):
            if d == delta:
                return k
        raise InvalidInput(f"delta={delta} is not on the profile grid")


def local_lipschitz_profile(fmap, delta_grid):
    grid = check_decreasing_grid(delta_grid, "delta_grid", allow_inf=True)
    if len(fmap.domain) < 2:
        return LipschitzProfile(tuple(grid.tolist()), (0.0,) * len(grid), (False,) * len(grid))
    dists, ratios = _pair_ratios(fmap)
    ks, flags = [], []
    for delta in grid:
        near = dists < delta
        flags.append(bool(near.any()))
        ks.append(float(ratios[near].max()) if near.any() else 0.0)
    return LipschitzProfile(tuple(grid.tolist()), tuple(ks), tuple(flags))


class Flatness(str, Enum):
    UNIFORMLY_LOCALLY_FLAT = "uniformly_locally_flat"
    NOT_FLAT = "not_flat"
    INCONCLUSIVE = "inconclusive"


def classify_flatness(profile, threshold=0.1, tail=3, stable_tol=0.1):
    """Heuristic reading of a scale-local Lipschitz profile.

    ``uniformly_locally_flat`` when ``k`` over the last ``tail`` scales that
    carry pairs is nonincreasing and ends below ``threshold * k(delta_max)``;
    ``not_flat`` when the tail stays above the threshold and varies by less
    than ``stable_tol`` relatively; otherwise ``inconclusive``. This reads
    finite samples and proves nothing about the limit.
    """
    if not profile.k or len(profile.k) != len(profile.deltas) or len(profile.k) != len(
        profile.has_pairs
    ):
        raise DegenerateProfile("profile is empty or its columns disagree in length")
    ks = np.array([k for k, h in zip(profile.k, profile.has_pairs) if h])
    if np.any(ks < 0):
        raise DegenerateProfile("negative Lipschitz constants")
    if ks.size < max(3, tail):
        return Flatness.INCONCLUSIVE
    top = ks[0]
    if top == 0:
        return Flatness.UNIFORMLY_LOCALLY_FLAT
    last = ks[-tail:]
    monotone = bool(np.all(np.diff(last) <= 0))
    if monotone and last[-1] <= threshold * top and last[-1] < last[0]:
        return Flatness.UNIFORMLY_LOCALLY_FLAT
    spread = (last.max() - last.min()) / last.max()
    if last.min() > threshold * top and spread <= stable_tol:
        return Flatness.NOT_FLAT
    return Flatness.INCONCLUSIVE


def projection_map(points, axes=(0,)):
    """Coordinate projection of a Euclidean cloud onto the chosen axes."""
    domain = PointSpace.from_points(points)
    image = np.asarray(domain.coords)[:, list(axes)]
    uniq, assignment = np.unique(image, axis=0, return_inverse=True)
    return MetricMap(domain, PointSpace.from_points(uniq), assignment.reshape(-1))
