import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from hlab import (
    AtomicSpace,
    IntervalSet,
    PointSpace,
    SampledPath,
    arclength_reparameterize,
    dist_to_set,
    exact_content,
    greedy_content,
    interval_content,
    length,
    mass_lower_bound,
    snowflake,
    validate_metric,
)

coords = st.floats(-10, 10, allow_nan=False)


def distinct_cloud(draw, lo=2, hi=7, dim=2):
    n = draw(st.integers(lo, hi))
    pts = np.array(draw(st.lists(st.tuples(*[coords] * dim), min_size=n, max_size=n)))
    pts = pts + 1e-6 * np.arange(n)[:, None]
    return pts


@st.composite
def clouds(draw):
    return distinct_cloud(draw)


@settings(max_examples=40, deadline=None)
@given(clouds(), st.floats(0.05, 1.0))
def test_snowflake_stays_metric(pts, t):
    assert validate_metric(snowflake(PointSpace.from_points(pts), t)).is_metric


@settings(max_examples=40, deadline=None)
@given(clouds())
def test_dist_to_set_is_1_lipschitz(pts):
    sp = PointSpace.from_points(pts)
    A = [0]
    d = np.array([dist_to_set(sp, x, A) for x in range(len(sp))])
    assert np.all(np.abs(d[:, None] - d[None, :]) <= sp.dist + 1e-9)


@settings(max_examples=40, deadline=None)
@given(clouds(), st.floats(0.0, 2.5), st.floats(0.5, 30.0))
def test_lower_exact_greedy_order(pts, alpha, delta):
    space = AtomicSpace.from_points(pts)
    exact = exact_content(space, None, alpha, delta).value
    assert mass_lower_bound(space, None, alpha, delta).value <= exact * (1 + 1e-9) + 1e-12
    assert exact <= greedy_content(space, None, alpha, delta).value * (1 + 1e-9) + 1e-12


@settings(max_examples=40, deadline=None)
@given(clouds(), st.floats(0.0, 2.0))
def test_atom_refinement_never_increases(pts, alpha):
    n = len(pts)
    merged = AtomicSpace.from_points(pts, [tuple(range(n))])
    split = AtomicSpace.from_points(pts)
    assert exact_content(split, None, alpha).value <= exact_content(merged, None, alpha).value + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(0, 3)), min_size=0, max_size=6))
def test_interval_h1_is_merged_length(raw):
    ivs = IntervalSet(tuple((a, a + w) for a, w in raw))
    merged = ivs.normalized().intervals
    assert all(b1 < a2 for (_, b1), (a2, _) in zip(merged, merged[1:]))
    assert interval_content(ivs).value == math.fsum(b - a for a, b in merged)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(coords, coords), min_size=1, max_size=15))
def test_reparameterization(pts):
    p = SampledPath(np.arange(len(pts), dtype=float), np.array(pts))
    q = arclength_reparameterize(p)
    assert abs(length(q) - length(p)) <= 1e-12 * max(1.0, length(p))
    gap = np.abs(q.params[:, None] - q.params[None, :])
    assert np.all(q.pairwise() <= gap + 1e-9)
    assert p.pairwise().max() <= length(p) + 1e-9
