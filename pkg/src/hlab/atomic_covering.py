"""Hausdorff content and localized pre-measures over atomic presentations.

A set is presented as finitely many closed *atoms*. Coverings group atoms
into blocks; the diameter of a block is determined by the per-atom
diameters and the pairwise sup-distances. The minimum of
``sum(diam(block) ** alpha)`` over all partitions of the target atoms is
computed exactly by a subset DP, so values are exact *for the presentation*
and upper bounds for the underlying continuum set (with equality for
ultrametric cell presentations and for intervals at ``alpha = 1``).
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from ._validation import (
    check_alpha,
    check_decreasing_grid,
    check_delta,
    check_point_cloud,
    check_subset,
    dp_limit,
)
from .exceptions import (
    DegenerateGrid,
    InadmissibleAtom,
    InvalidInput,
    NegativeWeight,
    TooFewPoints,
    TooManyAtoms,
)

EXACT, UPPER, LOWER = "exact", "upper", "lower"
GREEDY_SAFETY = 2.0 / 3.0

_PRESENTATION_NOTE = (
    "exact for the atomic presentation; an upper bound for the underlying set"
)


def _encode_float(x):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True, eq=False)
class AtomicSpace:
    """Finitely many closed atoms with diameter data.

    ``sup_dist[i, j]`` / ``inf_dist[i, j]`` are the largest / smallest
    distance between a point of atom ``i`` and a point of atom ``j``. The
    diagonal of ``sup_dist`` is the atom diameter and the diagonal of
    ``inf_dist`` is zero.
    """

    atom_diam: np.ndarray
    sup_dist: np.ndarray
    inf_dist: np.ndarray
    provenance: str = "custom"
    labels: tuple = field(default=None, repr=False)

    def __post_init__(self):
        diam = np.array(self.atom_diam, dtype=float).reshape(-1)
        n = diam.size
        sup = np.array(self.sup_dist, dtype=float).reshape(n, n) if n else np.zeros((0, 0))
        inf = np.array(self.inf_dist, dtype=float).reshape(n, n) if n else np.zeros((0, 0))
        for name, a in (("atom_diam", diam), ("sup_dist", sup), ("inf_dist", inf)):
            if np.any(np.isnan(a)) or np.any(a < 0):
                raise InvalidInput(f"{name} must be nonnegative")
        if not np.allclose(sup, sup.T, rtol=1e-9, atol=0) or not np.allclose(
            inf, inf.T, rtol=1e-9, atol=0
        ):
            raise InvalidInput("sup_dist and inf_dist must be symmetric")
        sup = 0.5 * (sup + sup.T)
        inf = 0.5 * (inf + inf.T)
        np.fill_diagonal(sup, diam)
        np.fill_diagonal(inf, 0.0)
        if np.any(inf > sup * (1 + 1e-12)):
            raise InvalidInput("inf_dist must not exceed sup_dist")
        for a in (diam, sup, inf):
            a.setflags(write=False)
        object.__setattr__(self, "atom_diam", diam)
        object.__setattr__(self, "sup_dist", sup)
        object.__setattr__(self, "inf_dist", inf)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    def __len__(self):
        return self.atom_diam.size

    @property
    def n_atoms(self):
        return self.atom_diam.size

    @classmethod
    def from_point_space(cls, space, groups=None, provenance="point-cloud"):
        """Atoms from a :class:`~hlab.metric_core.PointSpace`.

        Each atom is a group of point indices (default: one point per atom).
        """
        d = space.dist
        if groups is None:
            groups = [(i,) for i in range(len(d))]
        groups = [check_subset(g, len(d)) for g in groups]
        m = len(groups)
        diam = np.zeros(m)
        sup = np.zeros((m, m))
        inf = np.zeros((m, m))
        for i, gi in enumerate(groups):
            diam[i] = d[np.ix_(gi, gi)].max()
            for j in range(i + 1, m):
                block = d[np.ix_(gi, groups[j])]
                sup[i, j] = sup[j, i] = block.max()
                inf[i, j] = inf[j, i] = block.min()
        return cls(diam, sup, inf, provenance=provenance, labels=tuple(groups))

    @classmethod
    def from_points(cls, points, groups=None):
        from .metric_core import PointSpace

        return cls.from_point_space(PointSpace.from_points(points), groups)

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(
                data["atom_diam"],
                data["sup_dist"],
                data["inf_dist"],
                provenance=data.get("provenance", "custom"),
                labels=data.get("labels"),
            )
        except KeyError as exc:
            raise InvalidInput(f"atomic space JSON missing key {exc}") from exc

    def to_dict(self):
        out = {
            "atom_diam": self.atom_diam.tolist(),
            "sup_dist": self.sup_dist.tolist(),
            "inf_dist": self.inf_dist.tolist(),
            "provenance": self.provenance,
        }
        if self.labels is not None:
            out["labels"] = [list(x) if isinstance(x, tuple) else x for x in self.labels]
        return out

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def block_diameter(self, block):
        """``max`` of atom diameters and pairwise sup-distances inside ``block``."""
        idx = list(check_subset(block, self.n_atoms))
        return float(self.sup_dist[np.ix_(idx, idx)].max())

    def subspace(self, atoms):
        idx = list(check_subset(atoms, self.n_atoms, allow_empty=True))
        labels = None if self.labels is None else [self.labels[i] for i in idx]
        return AtomicSpace(
            self.atom_diam[idx],
            self.sup_dist[np.ix_(idx, idx)],
            self.inf_dist[np.ix_(idx, idx)],
            provenance=self.provenance,
            labels=labels,
        )


@dataclass(frozen=True)
class Covering:
    """A partition of target atoms into blocks, with per-block diameter and cost."""

    blocks: tuple
    diameters: tuple
    costs: tuple

    @property
    def cost(self):
        return math.fsum(self.costs)

    def to_dict(self):
        return {
            "blocks": [list(b) for b in self.blocks],
            "diameters": list(self.diameters),
            "costs": list(self.costs),
        }

    @classmethod
    def from_blocks(cls, space, blocks, alpha):
        blocks = tuple(tuple(int(i) for i in b) for b in blocks)
        diams = tuple(space.block_diameter(b) for b in blocks)
        return cls(blocks, diams, tuple(_power(d, alpha) for d in diams))


@dataclass(frozen=True)
class WeightAssignment:
    """Nonnegative weights on atoms; ``total`` is their sum."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(-1)
        if np.any(np.isnan(w)) or np.any(w < 0):
            raise NegativeWeight("weights must be nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def total(self):
        return math.fsum(self.weights)

    @classmethod
    def uniform(cls, n_atoms, atoms=None, mass=1.0):
        w = np.zeros(n_atoms)
        atoms = range(n_atoms) if atoms is None else list(atoms)
        atoms = list(atoms)
        if atoms:
            w[atoms] = mass / len(atoms)
        return cls(w)


@dataclass(frozen=True)
class ContentEstimate:
    """A content value with its bound kind and a witness.

    ``bound`` is ``"exact"`` (relative to the atomic presentation),
    ``"upper"`` or ``"lower"``. Exact and upper values carry a
    :class:`Covering`; lower values carry a weight witness dict.
    """

    value: float
    bound: str
    alpha: float
    delta: float
    witness: object = None
    note: str = ""

    @property
    def is_infinite(self):
        return math.isinf(self.value)

    def to_dict(self):
        if isinstance(self.witness, Covering):
            witness = {"covering": self.witness.to_dict()}
        elif isinstance(self.witness, dict):
            witness = {k: _jsonable(v) for k, v in self.witness.items()}
        else:
            witness = None
        return {
            "value": _encode_float(self.value),
            "bound": self.bound,
            "alpha": self.alpha,
            "delta": _encode_float(self.delta),
            "witness": witness,
            "note": self.note,
        }


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, float):
        return _encode_float(v)
    if isinstance(v, tuple):
        return list(v)
    return v


@dataclass(frozen=True)
class IntervalSet:
    """Finite union of closed intervals ``[a, b]`` on the real line."""

    intervals: tuple

    def __post_init__(self):
        ivs = []
        for iv in self.intervals:
            a, b = (float(x) for x in iv)
            if not (math.isfinite(a) and math.isfinite(b)) or a > b:
                raise InvalidInput(f"bad interval {iv}")
            ivs.append((a, b))
        object.__setattr__(self, "intervals", tuple(ivs))

    def normalized(self):
        """Sorted, disjoint, merged form (touching intervals are merged)."""
        merged = []
        for a, b in sorted(self.intervals):
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        return IntervalSet(tuple(merged))

    @property
    def length(self):
        return math.fsum(b - a for a, b in self.normalized().intervals)

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(tuple(iv) for iv in data["intervals"]))

    def to_dict(self):
        return {"intervals": [list(iv) for iv in self.intervals]}

    def to_atomic(self, pieces=1):
        """Atomic presentation: each interval cut into ``pieces`` equal sub-intervals."""
        atoms = []
        for a, b in self.intervals:
            edges = np.linspace(a, b, pieces + 1) if b > a else np.array([a, a])
            atoms.extend(zip(edges[:-1], edges[1:]))
        lo = np.array([a for a, _ in atoms])
        hi = np.array([b for _, b in atoms])
        sup = np.maximum(hi[:, None], hi[None, :]) - np.minimum(lo[:, None], lo[None, :])
        gap = np.maximum(lo[:, None] - hi[None, :], lo[None, :] - hi[:, None])
        inf = np.maximum(gap, 0.0)
        return AtomicSpace(hi - lo, sup, inf, provenance="interval-line", labels=atoms)


# ---------------------------------------------------------------------------
# block tables


def _power(d, alpha):
    """``d ** alpha`` with the conventions ``0 ** 0 == 1`` and ``inf ** 0 == inf``."""
    if alpha == 0:
        return math.inf if math.isinf(d) else 1.0
    return d**alpha


def _block_diameters(space, idx):
    """Diameter of every subset of ``idx``, indexed by bitmask."""
    m = len(idx)
    diam = np.zeros(1 << m)
    sup = space.sup_dist[np.ix_(idx, idx)]
    adiam = space.atom_diam[idx]
    for h in range(m):
        lo = 1 << h
        # rowmax[B] = max_{j in B} sup[h, j] for B a subset of atoms 0..h-1
        rowmax = np.zeros(lo)
        for j in range(h):
            w = 1 << j
            rowmax[w : 2 * w] = np.maximum(rowmax[:w], sup[h, j])
        diam[lo : 2 * lo] = np.maximum(np.maximum(diam[:lo], adiam[h]), rowmax)
    return diam


def _block_sums(values):
    """Sum of ``values`` over every subset, indexed by bitmask."""
    m = len(values)
    out = np.zeros(1 << m)
    for h in range(m):
        lo = 1 << h
        out[lo : 2 * lo] = out[:lo] + values[h]
    return out


def _block_costs(diam, alpha, delta):
    if alpha == 0:
        cost = np.ones_like(diam)
    else:
        cost = diam**alpha
    cost[0] = 0.0
    if math.isfinite(delta):
        cost[diam >= delta] = np.inf
    return cost


def _submask_table(k):
    """Rows of bits for 0..2**k-1, used to scatter submasks of a mask."""
    ar = np.arange(1 << k)
    return [(ar >> i) & 1 for i in range(k)]


def _min_partition(cost, m):
    """Minimum-cost partition of the full mask via the lowest-atom DP."""
    full = (1 << m) - 1
    best = np.full(1 << m, np.inf)
    best[0] = 0.0
    choice = np.zeros(1 << m, dtype=np.int64)
    bit_rows = _submask_table(max(m - 1, 0))
    for S in range(1, full + 1):
        low = S & -S
        rest = S ^ low
        bits = [b for b in range(m) if rest >> b & 1]
        k = len(bits)
        if k == 0:
            best[S] = cost[S]
            choice[S] = S
            continue
        size = 1 << k
        subs = np.zeros(size, dtype=np.int64)
        for i, b in enumerate(bits):
            subs |= bit_rows[i][:size] << b
        cand = cost[subs | low] + best[rest ^ subs]
        lowest = cand.min()
        # among (near-)ties prefer the latest candidate, i.e. the larger block
        j = int(np.flatnonzero(cand <= lowest * (1.0 + 1e-12))[-1])
        best[S] = cand[j]
        choice[S] = subs[j] | low
    return best, choice


def _decode_blocks(choice, full, idx):
    blocks = []
    S = full
    while S:
        B = int(choice[S])
        blocks.append(tuple(idx[b] for b in range(len(idx)) if B >> b & 1))
        S ^= B
    return blocks


def _target(space, target):
    if target is None:
        return tuple(range(space.n_atoms))
    return check_subset(target, space.n_atoms, allow_empty=True)


# ---------------------------------------------------------------------------
# operations


def exact_content(space, target=None, alpha=1.0, delta=math.inf, limit=None):
    """Exact ``H^alpha_delta`` of ``target`` over the atomic presentation.

    Minimizes ``sum(diam(B) ** alpha)`` over partitions of the target atoms
    into blocks with ``diam(B) < delta``. Returns ``inf`` when some atom is
    too large for any admissible block.
    """
    alpha = check_alpha(alpha)
    delta = check_delta(delta)
    idx = _target(space, target)
    m = len(idx)
    cap = dp_limit(limit)
    if m > cap:
        raise TooManyAtoms(f"{m} target atoms exceed the DP limit of {cap}")
    if m == 0:
        return ContentEstimate(0.0, EXACT, alpha, delta, Covering((), (), ()), _PRESENTATION_NOTE)
    if np.any(space.atom_diam[list(idx)] >= delta):
        return ContentEstimate(math.inf, EXACT, alpha, delta, None, "no admissible covering")
    diam = _block_diameters(space, list(idx))
    cost = _block_costs(diam, alpha, delta)
    best, choice = _min_partition(cost, m)
    full = (1 << m) - 1
    blocks = _decode_blocks(choice, full, idx)
    covering = Covering.from_blocks(space, blocks, alpha)
    return ContentEstimate(covering.cost, EXACT, alpha, delta, covering, _PRESENTATION_NOTE)


def greedy_content(space, target=None, alpha=1.0, delta=1.0):
    """Upper bound for ``H^alpha_delta`` from greedily grown blocks.

    Seeds each block with the largest unassigned atom and absorbs the
    nearest atoms while the block diameter stays below ``2/3 * delta``.
    """
    alpha = check_alpha(alpha)
    delta = check_delta(delta, allow_inf=False)
    idx = list(_target(space, target))
    if idx and np.any(space.atom_diam[idx] >= delta):
        bad = [i for i in idx if space.atom_diam[i] >= delta]
        raise InadmissibleAtom(f"atoms {bad} have diameter >= delta={delta}")
    limit = GREEDY_SAFETY * delta
    unassigned = set(idx)
    blocks = []
    # largest diameter first, lowest index on ties
    order = sorted(idx, key=lambda i: (-space.atom_diam[i], i))
    for seed in order:
        if seed not in unassigned:
            continue
        unassigned.discard(seed)
        members = [seed]
        current = float(space.atom_diam[seed])
        for c in sorted(unassigned, key=lambda i: (space.sup_dist[seed, i], i)):
            grown = max(current, space.atom_diam[c], space.sup_dist[c, members].max())
            if grown < limit:
                members.append(c)
                current = float(grown)
        unassigned.difference_update(members)
        blocks.append(tuple(sorted(members)))
    covering = Covering.from_blocks(space, blocks, alpha)
    return ContentEstimate(covering.cost, UPPER, alpha, delta, covering, "greedy covering")


def measure_profile(space, target=None, alpha=1.0, delta_grid=(math.inf,), limit=None):
    """``H^alpha_delta`` along a strictly decreasing grid of scales.

    Uses the exact DP within the atom limit and greedy upper bounds beyond.
    """
    grid = check_decreasing_grid(delta_grid, "delta_grid", allow_inf=True)
    idx = _target(space, target)
    exact = len(idx) <= dp_limit(limit)
    out = []
    for delta in grid:
        if exact:
            out.append(exact_content(space, idx, alpha, delta, limit))
        elif math.isinf(delta):
            cov = Covering.from_blocks(space, [idx], alpha) if idx else Covering((), (), ())
            out.append(ContentEstimate(cov.cost, UPPER, alpha, delta, cov, "single block"))
        else:
            out.append(greedy_content(space, idx, alpha, delta))
    return out


def interval_content(intervals, alpha=1.0, delta=math.inf, limit=None):
    """Content of a finite union of closed intervals.

    At ``alpha = 1`` the value is the total merged length (independent of
    ``delta``). Otherwise the intervals are cut into equal pieces and the
    atomic DP gives an upper bound.
    """
    alpha = check_alpha(alpha)
    delta = check_delta(delta)
    if not isinstance(intervals, IntervalSet):
        intervals = IntervalSet(tuple(intervals))
    norm = intervals.normalized()
    if not norm.intervals:
        return ContentEstimate(0.0, EXACT, alpha, delta, Covering((), (), ()), "empty set")
    if alpha == 1.0:
        finest = max(b - a for a, b in norm.intervals)
        # cut pieces below delta so the witness covering stays admissible
        pieces = 1 if math.isinf(delta) else max(1, math.floor(finest / delta) + 1)
        note = "H^1 on the line equals total length"
        cov = None
        if pieces * len(norm.intervals) <= 4096:
            atoms = norm.to_atomic(pieces)
            cov = Covering.from_blocks(atoms, [(i,) for i in range(atoms.n_atoms)], 1.0)
        return ContentEstimate(norm.length, EXACT, alpha, delta, cov, note)
    cap = dp_limit(limit)
    if len(norm.intervals) > cap:
        raise TooManyAtoms(f"{len(norm.intervals)} intervals exceed the DP limit of {cap}")
    pieces = max(1, cap // len(norm.intervals))
    atoms = norm.to_atomic(pieces)
    est = exact_content(atoms, None, alpha, delta, limit)
    return ContentEstimate(
        est.value, UPPER, alpha, delta, est.witness, f"atomic presentation, {pieces} pieces per interval"
    )


def mass_lower_bound(space, target=None, alpha=1.0, delta=math.inf, weights=None, limit=None):
    """Mass-distribution lower bound ``weight(target) / C`` for ``H^alpha_delta``.

    ``C`` is the largest ``weight(S) / diam(S) ** alpha`` over admissible
    blocks ``S`` of target atoms. Any positive weight on a block of
    diameter 0 forces ``C = inf`` (for ``alpha > 0``) and a bound of 0.
    """
    alpha = check_alpha(alpha)
    delta = check_delta(delta)
    idx = list(_target(space, target))
    m = len(idx)
    cap = dp_limit(limit)
    if m > cap:
        raise TooManyAtoms(f"{m} target atoms exceed the DP limit of {cap}")
    if weights is None:
        weights = WeightAssignment.uniform(space.n_atoms, idx)
    elif not isinstance(weights, WeightAssignment):
        weights = WeightAssignment(weights)
    if weights.weights.size != space.n_atoms:
        raise InvalidInput("weights must have one entry per atom")
    w = weights.weights[idx]
    mass = math.fsum(w)
    if m == 0 or mass == 0:
        witness = {"weights": weights.weights, "C": 0.0, "block": []}
        return ContentEstimate(0.0, LOWER, alpha, delta, witness, "no mass on target")
    diam = _block_diameters(space, idx)
    wsum = _block_sums(w)
    admissible = diam < delta
    admissible[0] = False
    if alpha == 0:
        ratio = np.where(admissible, wsum, -np.inf)
    else:
        if np.any(admissible & (diam == 0) & (wsum > 0)):
            S = int(np.flatnonzero(admissible & (diam == 0) & (wsum > 0))[0])
            block = [idx[b] for b in range(m) if S >> b & 1]
            witness = {"weights": weights.weights, "C": math.inf, "block": block}
            return ContentEstimate(0.0, LOWER, alpha, delta, witness, "mass on a point")
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(admissible, wsum / np.where(diam > 0, diam, 1.0) ** alpha, -np.inf)
    S = int(np.argmax(ratio))
    C = float(ratio[S])
    if C <= 0:
        witness = {"weights": weights.weights, "C": 0.0, "block": []}
        return ContentEstimate(0.0, LOWER, alpha, delta, witness, "no admissible block carries mass")
    block = [idx[b] for b in range(m) if S >> b & 1]
    witness = {"weights": weights.weights, "C": C, "block": block}
    return ContentEstimate(mass / C, LOWER, alpha, delta, witness, "mass distribution bound")


# ---------------------------------------------------------------------------
# dimension estimate


def farthest_point_net(X, radius, dist=None):
    """Greedy farthest-point net: every point ends within ``radius`` of a center.

    Returns ``(centers, assignment)`` where ``assignment[i]`` is the position
    in ``centers`` of the nearest center to point ``i``.
    """
    n = len(X) if dist is None else len(dist)

    def row(i):
        if dist is not None:
            return dist[i]
        return cdist(X[i : i + 1], X)[0]

    centers = [0]
    mind = row(0).copy()
    owner = np.zeros(n, dtype=np.int64)
    while True:
        far = int(np.argmax(mind))
        if mind[far] <= radius:
            break
        centers.append(far)
        r = row(far)
        closer = r < mind
        owner[closer] = len(centers) - 1
        mind = np.minimum(mind, r)
    return centers, owner


def dimension_estimate(points, scale_grid, alpha_bracket=None):
    """Net-counting estimate of the scaling exponent of a point cloud.

    At each scale ``delta`` a farthest-point net with radius ``delta / 3``
    gives blocks of diameter below ``delta``; the slope of ``log N(delta)``
    against ``log(1 / delta)`` is returned with per-scale diagnostics. This
    is a box-counting style estimate, which in general bounds the Hausdorff
    dimension from above.
    """
    from .metric_core import PointSpace

    dist = None
    if isinstance(points, PointSpace):
        dist = points.dist
        X = None
        n = len(points)
    else:
        X = check_point_cloud(points)
        n = len(X)
    if n < 2:
        raise TooFewPoints(f"need at least 2 points, got {n}")
    grid = check_decreasing_grid(scale_grid, "scale_grid", min_len=3)
    counts = []
    for delta in grid:
        centers, _ = farthest_point_net(X, delta / 3.0, dist)
        counts.append(len(centers))
    counts = np.array(counts)
    x = np.log(1.0 / grid)
    y = np.log(counts)
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    warnings = []
    if np.all(counts == counts[0]):
        warnings.append("net count is constant across scales (saturated)")
    if np.any(counts == n):
        warnings.append("every point is its own block at some scale")
    if np.any(counts == 1):
        warnings.append("a single block covers the cloud at some scale")
    diagnostics = {
        "scales": grid.tolist(),
        "counts": counts.tolist(),
        "residuals": residuals.tolist(),
        "intercept": float(intercept),
        "n_points": n,
        "warnings": warnings,
    }
    if alpha_bracket is not None:
        lo, hi = (float(v) for v in alpha_bracket)
        if lo > hi:
            raise DegenerateGrid(f"bracket ({lo}, {hi}) is reversed")
        diagnostics["bracket"] = [lo, hi]
        diagnostics["in_bracket"] = bool(lo <= slope <= hi)
    alpha_hat = float(slope) if abs(slope) > 1e-12 else 0.0
    return alpha_hat, diagnostics
