"""Randomized invariant suites over small instances, checked against the exact DP.

Each ``check_*`` function draws one instance from ``rng``, evaluates one law
and returns ``None`` on success or a JSON-able failure record that contains
the instance for replay.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .atomic_covering import AtomicSpace, exact_content, greedy_content, mass_lower_bound
from .curves import (
    SampledPath,
    arclength_reparameterize,
    image_h1_check,
    length,
    partition_sum,
    split_length,
)
from .metric_core import (
    PointSpace,
    ball,
    clopen_separation,
    dist_to_set,
    separation_function,
    validate_metric,
)
from .sequence_space import SequenceSpaceSpec, materialize
from .slicing import build_slice_profile, slice_content_bound
from .transforms import (
    MetricMap,
    bilipschitz_constant,
    holder_constant,
    lipschitz_constant,
    pushforward_atoms,
    snowflake,
)

TOL = 1e-9


def _le(a, b, tol=TOL):
    if math.isinf(b):
        return True
    if math.isinf(a):
        return False
    return a <= b + tol * max(1.0, abs(b))


def _eq(a, b, tol=TOL):
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def _num(x):
    return "inf" if isinstance(x, float) and math.isinf(x) else x


# ---------------------------------------------------------------------------
# instance generators


def random_atomic_instance(rng, min_atoms=3, max_atoms=8, dim=2, clusters=1):
    """A small Euclidean cloud grouped into atoms of 1 to 3 points."""
    m = int(rng.integers(min_atoms, max_atoms + 1))
    sizes = rng.integers(1, 4, size=m)
    centers = rng.uniform(0, 1, size=(m, dim))
    if clusters > 1:
        which = rng.integers(0, clusters, size=m)
        which[:clusters] = np.arange(clusters)
        centers = centers + 10.0 * which[:, None]
    else:
        which = np.zeros(m, dtype=int)
    pts, groups = [], []
    for c, s in zip(centers, sizes):
        start = len(pts)
        spread = rng.uniform(0, 0.2)
        for _ in range(s):
            pts.append(c + rng.uniform(-spread, spread, size=dim))
        groups.append(tuple(range(start, start + s)))
    pts = np.array(pts)
    # distinct points keep the distance table a valid space
    pts = pts + 1e-9 * np.arange(len(pts))[:, None]
    return {"points": pts.tolist(), "groups": [list(g) for g in groups], "cluster": which.tolist()}


def _space(inst):
    return AtomicSpace.from_points(np.array(inst["points"]), [tuple(g) for g in inst["groups"]])


def _random_alpha(rng):
    return 0.0 if rng.random() < 0.15 else float(rng.uniform(0.1, 2.5))


def _random_delta(rng, space, allow_inf=True):
    if allow_inf and rng.random() < 0.25:
        return math.inf
    vals = np.unique(np.concatenate([space.sup_dist.ravel(), space.atom_diam]))
    vals = vals[vals > 0]
    if vals.size == 0:
        return 1.0
    pick = float(rng.choice(vals))
    # land on, just above or just below a realized diameter
    return pick * float(rng.choice([1.0, 1.0 + 1e-6, 0.999, 1.5]))


def _random_subset(rng, n, nonempty=True):
    while True:
        mask = rng.random(n) < 0.5
        if mask.any() or not nonempty:
            return [int(i) for i in np.flatnonzero(mask)]


# ---------------------------------------------------------------------------
# content laws


def check_monotonicity(rng):
    inst = random_atomic_instance(rng)
    space = _space(inst)
    alpha, delta = _random_alpha(rng), _random_delta(rng, space)
    big = _random_subset(rng, space.n_atoms)
    small = [i for i in big if rng.random() < 0.6]
    a = exact_content(space, small, alpha, delta).value
    b = exact_content(space, big, alpha, delta).value
    if not _le(a, b):
        return {"law": "monotonicity", "instance": inst, "alpha": alpha, "delta": _num(delta),
                "small": small, "big": big, "values": [_num(a), _num(b)]}
    return None


def check_subadditivity(rng):
    inst = random_atomic_instance(rng)
    space = _space(inst)
    alpha, delta = _random_alpha(rng), _random_delta(rng, space)
    A = _random_subset(rng, space.n_atoms)
    B = _random_subset(rng, space.n_atoms)
    union = sorted(set(A) | set(B))
    u = exact_content(space, union, alpha, delta).value
    a = exact_content(space, A, alpha, delta).value
    b = exact_content(space, B, alpha, delta).value
    if not _le(u, a + b):
        return {"law": "subadditivity", "instance": inst, "alpha": alpha, "delta": _num(delta),
                "A": A, "B": B, "values": [_num(u), _num(a), _num(b)]}
    return None


def check_separated_additivity(rng):
    inst = random_atomic_instance(rng, min_atoms=4, clusters=2)
    space = _space(inst)
    alpha = _random_alpha(rng)
    A = [i for i, c in enumerate(inst["cluster"]) if c == 0]
    B = [i for i, c in enumerate(inst["cluster"]) if c == 1]
    gap = float(space.inf_dist[np.ix_(A, B)].min())
    delta = gap * float(rng.uniform(0.05, 1.0))
    u = exact_content(space, A + B, alpha, delta).value
    a = exact_content(space, A, alpha, delta).value
    b = exact_content(space, B, alpha, delta).value
    if not _eq(u, a + b):
        return {"law": "separated_additivity", "instance": inst, "alpha": alpha, "delta": delta,
                "A": A, "B": B, "values": [_num(u), _num(a), _num(b)]}
    return None


def check_delta_monotonicity(rng):
    inst = random_atomic_instance(rng)
    space = _space(inst)
    alpha = _random_alpha(rng)
    d1, d2 = _random_delta(rng, space), _random_delta(rng, space)
    small, large = min(d1, d2), max(d1, d2)
    fine = exact_content(space, None, alpha, small).value
    coarse = exact_content(space, None, alpha, large).value
    if not _le(coarse, fine):
        return {"law": "delta_monotonicity", "instance": inst, "alpha": alpha,
                "deltas": [_num(small), _num(large)], "values": [_num(fine), _num(coarse)]}
    return None


def check_exponent_comparison(rng):
    inst = random_atomic_instance(rng)
    space = _space(inst)
    alpha = _random_alpha(rng)
    beta = alpha + float(rng.uniform(0.05, 1.5))
    delta = _random_delta(rng, space, allow_inf=False)
    ha = exact_content(space, None, alpha, delta).value
    hb = exact_content(space, None, beta, delta).value
    if math.isinf(ha):
        ok = math.isinf(hb)
    else:
        ok = _le(hb, delta ** (beta - alpha) * ha)
    if not ok:
        return {"law": "exponent_comparison", "instance": inst, "alpha": alpha, "beta": beta,
                "delta": delta, "values": [_num(hb), _num(ha)]}
    return None


def check_oracle_agreement(rng):
    inst = random_atomic_instance(rng)
    space = _space(inst)
    alpha = _random_alpha(rng)
    delta = _random_delta(rng, space, allow_inf=False)
    exact = exact_content(space, None, alpha, delta).value
    lower = mass_lower_bound(space, None, alpha, delta).value
    ok = _le(lower, exact)
    if not np.any(space.atom_diam >= delta):
        greedy = greedy_content(space, None, alpha, delta).value
        ok = ok and _le(exact, greedy)
    else:
        greedy = None
    if not ok:
        return {"law": "oracle_agreement", "instance": inst, "alpha": alpha, "delta": delta,
                "values": [_num(lower), _num(exact), _num(greedy)]}
    return None


CONTENT_LAWS = (
    check_monotonicity,
    check_subadditivity,
    check_separated_additivity,
    check_delta_monotonicity,
    check_exponent_comparison,
    check_oracle_agreement,
)


# ---------------------------------------------------------------------------
# transforms


def check_snowflake_reindexing(rng):
    inst = random_atomic_instance(rng)
    space = _space(inst)
    alpha, delta = _random_alpha(rng), _random_delta(rng, space)
    t = float(rng.uniform(0.1, 1.0))
    flake = snowflake(space, t)
    lhs = exact_content(flake, None, alpha / t, delta**t).value
    rhs = exact_content(space, None, alpha, delta).value
    if not _eq(lhs, rhs):
        return {"law": "snowflake_reindexing", "instance": inst, "alpha": alpha,
                "delta": _num(delta), "t": t, "values": [_num(lhs), _num(rhs)]}
    return None


def random_map(rng):
    inst = random_atomic_instance(rng)
    domain = PointSpace.from_points(np.array(inst["points"]))
    n_img = int(rng.integers(2, 8))
    img_pts = rng.uniform(0, 1, size=(n_img, 2)) * float(rng.uniform(0.2, 3.0))
    img_pts = img_pts + 1e-9 * np.arange(n_img)[:, None]
    codomain = PointSpace.from_points(img_pts)
    assignment = rng.integers(0, n_img, size=len(domain))
    if np.all(assignment == assignment[0]):
        assignment[-1] = (assignment[0] + 1) % n_img
    inst["image_points"] = img_pts.tolist()
    inst["assignment"] = assignment.tolist()
    return inst, MetricMap(domain, codomain, assignment)


def check_lipschitz_pushforward(rng):
    inst, fmap = random_map(rng)
    groups = [tuple(g) for g in inst["groups"]]
    dom, img = pushforward_atoms(fmap, groups)
    alpha, delta = _random_alpha(rng), _random_delta(rng, dom)
    k = lipschitz_constant(fmap)
    lhs = exact_content(img, None, alpha, k * delta).value
    rhs = exact_content(dom, None, alpha, delta).value
    bound = rhs if alpha == 0 else k**alpha * rhs
    if not _le(lhs, bound):
        return {"law": "lipschitz_pushforward", "instance": inst, "alpha": alpha,
                "delta": _num(delta), "k": k, "values": [_num(lhs), _num(bound)]}
    return None


def check_holder_pushforward(rng):
    inst, fmap = random_map(rng)
    groups = [tuple(g) for g in inst["groups"]]
    dom, img = pushforward_atoms(fmap, groups)
    a = float(rng.uniform(0.3, 2.0))
    alpha = float(rng.uniform(0.1, 2.0))
    k = holder_constant(fmap, a)
    lhs = exact_content(img, None, alpha).value
    bound = k**alpha * exact_content(dom, None, a * alpha).value
    if not _le(lhs, bound):
        return {"law": "holder_pushforward", "instance": inst, "a": a, "alpha": alpha,
                "k": k, "values": [_num(lhs), _num(bound)]}
    return None


def check_bilipschitz_sandwich(rng):
    inst = random_atomic_instance(rng)
    pts = np.array(inst["points"])
    n = len(pts)
    # a random linear distortion is injective and bilipschitz
    A = rng.normal(size=(2, 2)) + 2.0 * np.eye(2)
    img = pts @ A.T
    fmap = MetricMap(PointSpace.from_points(pts), PointSpace.from_points(img), np.arange(n))
    groups = [tuple(g) for g in inst["groups"]]
    dom, im = pushforward_atoms(fmap, groups)
    alpha = _random_alpha(rng)
    k = bilipschitz_constant(fmap)
    h = exact_content(dom, None, alpha).value
    hi = exact_content(im, None, alpha).value
    if not (_le(k ** (-alpha) * h, hi) and _le(hi, k**alpha * h)):
        return {"law": "bilipschitz_sandwich", "instance": inst, "matrix": A.tolist(),
                "alpha": alpha, "k": k, "values": [_num(h), _num(hi)]}
    return None


TRANSFORM_LAWS = (
    check_snowflake_reindexing,
    check_lipschitz_pushforward,
    check_holder_pushforward,
    check_bilipschitz_sandwich,
)


# ---------------------------------------------------------------------------
# curves


def random_path(rng, dim=2, min_samples=2, max_samples=12):
    n = int(rng.integers(min_samples, max_samples + 1))
    steps = rng.normal(size=(n, dim))
    steps[rng.random(n) < 0.1] = 0.0
    pts = np.cumsum(steps, axis=0)
    params = np.cumsum(rng.uniform(0.1, 1.0, size=n))
    return SampledPath(params, pts)


def _path_record(path):
    return {"params": path.params.tolist(), "points": path.points.tolist()}


def check_curve_laws(rng):
    path = random_path(rng)
    n = len(path)
    total = length(path)
    coarse = [0] + sorted(i for i in range(1, n - 1) if rng.random() < 0.3) + [n - 1]
    fine = sorted(set(coarse) | {i for i in range(1, n - 1) if rng.random() < 0.5})
    if n == 1:
        coarse = fine = [0]
    problems = []
    if not _le(partition_sum(path, coarse), partition_sum(path, fine)):
        problems.append("refinement")
    if not _le(partition_sum(path, fine), total):
        problems.append("partition_le_length")
    x = float(path.params[int(rng.integers(0, n))])
    left, right = split_length(path, x)
    if not _eq(left + right, total, 1e-12):
        problems.append("split_additivity")
    q = arclength_reparameterize(path)
    if not _eq(length(q), total, 1e-12):
        problems.append("reparam_length")
    dq = q.pairwise()
    ds = np.abs(q.params[:, None] - q.params[None, :])
    if np.any(dq > ds + 1e-12 * max(1.0, total)):
        problems.append("reparam_1_lipschitz")
    if not _le(float(path.pairwise().max()), total):
        problems.append("diameter_le_length")
    if n <= 17:
        cmp = image_h1_check(path)
        if not cmp.content_le_length:
            problems.append("content_le_length")
        if cmp.injective and not _le(cmp.diameter, cmp.content):
            problems.append("diameter_le_content")
    if problems:
        return {"law": problems, "path": _path_record(path), "coarse": coarse, "fine": fine}
    return None


CURVE_LAWS = (check_curve_laws,)


# ---------------------------------------------------------------------------
# slicing


def check_slicing_laws(rng):
    inst = random_atomic_instance(rng)
    pts = np.array(inst["points"])
    groups = [tuple(g) for g in inst["groups"]]
    space = AtomicSpace.from_points(pts, groups)
    # f = first coordinate: 1-Lipschitz, image of an atom is [min, max]
    f_iv = np.array([[pts[list(g), 0].min(), pts[list(g), 0].max()] for g in groups])
    alpha = 1.0 + float(rng.uniform(0, 1.5))
    delta = _random_delta(rng, space)
    est = exact_content(space, None, alpha, delta)
    if est.is_infinite:
        delta = math.inf
        est = exact_content(space, None, alpha, delta)
    k = 1.0 * float(rng.choice([1.0, 2.0]))
    prof = build_slice_profile(space, f_iv, est.witness, alpha, k)
    problems = []
    if not _le(prof.integral, prof.bound):
        problems.append("integral_bound")
    if not _eq(prof.integral, prof.piecewise_integral):
        problems.append("integral_closed_form")
    lo, hi = f_iv[:, 0].min(), f_iv[:, 1].max()
    for r in list(rng.uniform(lo - 0.1, hi + 0.1, size=3)) + [float(rng.choice(f_iv.ravel()))]:
        chk = slice_content_bound(space, f_iv, est.witness, prof, float(r), delta)
        if not chk.holds:
            problems.append(f"slice_bound@{float(r)}")
    if problems:
        return {"law": problems, "instance": inst, "alpha": alpha, "delta": _num(delta), "k": k}
    return None


SLICING_LAWS = (check_slicing_laws,)


# ---------------------------------------------------------------------------
# separation


def _separation_space(rng):
    if rng.random() < 0.3:
        spec = SequenceSpaceSpec(int(rng.integers(2, 4)), float(rng.uniform(0.2, 0.7)),
                                 int(rng.integers(1, 4)))
        _, ps = materialize(spec)
        return ps, spec.to_dict()
    n = int(rng.integers(2, 12))
    pts = rng.uniform(0, 1, size=(n, int(rng.integers(1, 4))))
    pts = pts + 1e-9 * np.arange(n)[:, None]
    return PointSpace.from_points(pts), {"points": pts.tolist()}


def check_separation(rng):
    space, record = _separation_space(rng)
    n = len(space)
    perm = rng.permutation(n)
    na = int(rng.integers(1, n))
    nb = int(rng.integers(1, n - na + 1))
    A = sorted(int(i) for i in perm[:na])
    B = sorted(int(i) for i in perm[na : na + nb])
    U, r = clopen_separation(space, A, B)
    phi = separation_function(space, A, B)
    problems = []
    if not set(A) <= set(U):
        problems.append("A_in_U")
    if set(U) & set(B):
        problems.append("U_misses_B")
    if np.any(phi == r) or not 0 < r < 1:
        problems.append("empty_level_set")
    d = np.array([dist_to_set(space, x, A) for x in range(n)])
    if np.any(np.abs(d[:, None] - d[None, :]) > space.dist + 1e-12):
        problems.append("dist_to_set_not_1_lipschitz")
    if validate_metric(space).is_ultrametric:
        # phi is locally constant off A and B, so U is a union of balls
        for x in set(U) - set(A):
            rad = min(dist_to_set(space, x, A), dist_to_set(space, x, B))
            if not set(ball(space, x, rad, "open")) <= set(U):
                problems.append(f"not_clopen_at_{x}")
    if problems:
        return {"law": problems, "space": record, "A": A, "B": B, "U": list(U), "r": r}
    return None


SEPARATION_LAWS = (check_separation,)


SUITES = {
    "content-laws": CONTENT_LAWS,
    "transforms": TRANSFORM_LAWS,
    "curves": CURVE_LAWS,
    "slicing": SLICING_LAWS,
    "separation": SEPARATION_LAWS,
}


@dataclass
class SuiteResult:
    suite: str
    seed: int
    cases: int
    checks: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def to_dict(self):
        return {
            "suite": self.suite,
            "seed": self.seed,
            "cases": self.cases,
            "checks": self.checks,
            "violations": len(self.failures),
            "passed": self.passed,
            "failures": self.failures,
        }


def run_law(law, cases, seed):
    """Run one law ``cases`` times from a seeded generator; return the failures."""
    rng = np.random.default_rng(seed)
    failures = []
    for case in range(cases):
        fail = law(rng)
        if fail is not None:
            fail["case"] = case
            failures.append(fail)
    return failures


def run_suite(name, cases=200, seed=0):
    laws = SUITES[name]
    result = SuiteResult(name, seed, cases)
    for i, law in enumerate(laws):
        fails = run_law(law, cases, seed + i)
        result.checks[law.__name__] = cases
        for f in fails:
            f["check"] = law.__name__
        result.failures.extend(fails)
    return result
