import math

import numpy as np
import pytest

from hlab import (
    MetricMap,
    PointSpace,
    SampledPath,
    arclength_reparameterize,
    circle_path,
    image_h1_check,
    length,
    map_path,
    partition_sum,
    split_length,
)
from hlab.curves import cumulative_length, is_simple_polyline, segment_atoms
from hlab.exceptions import BadPartition, DomainMismatch, InvalidInput, NotASample, TooManySegments


def path2d(points, params=None):
    points = np.asarray(points, dtype=float)
    params = np.arange(len(points), dtype=float) if params is None else params
    return SampledPath(params, points)


def test_partition_sums():
    p = path2d([[0.0], [0.5], [1.0]])
    assert partition_sum(p, [0, 2]) == 1.0
    assert partition_sum(p, [0, 1, 2]) == 1.0
    q = path2d([[0, 0], [1, 1], [2, 0]])
    assert partition_sum(q, [0, 1, 2]) >= partition_sum(q, [0, 2])
    with pytest.raises(BadPartition):
        partition_sum(q, [1, 2])
    with pytest.raises(BadPartition):
        partition_sum(q, [0, 0, 2])


def test_length_examples():
    assert length(path2d([[1, 2]] * 4)) == 0.0
    c = circle_path(1000)
    assert length(c) == pytest.approx(2000 * math.sin(math.pi / 1000), rel=1e-12)
    assert abs(length(c) - 2 * math.pi) < 1.1e-5


def test_lipschitz_parameterization_bound():
    t = np.linspace(0, 2, 50)
    pts = np.column_stack([np.cos(3 * t), np.sin(3 * t)])
    # |p'(t)| = 3
    assert length(SampledPath(t, pts)) <= 3 * (t[-1] - t[0])


def test_split_length():
    c = circle_path(100)
    total = length(c)
    assert split_length(c, c.params[0]) == (0.0, total)
    left, right = split_length(c, c.params[-1])
    assert right == 0.0 and left == pytest.approx(total, rel=1e-15)
    left, right = split_length(c, c.params[50])
    assert left == pytest.approx(right) and left + right == pytest.approx(total, rel=1e-15)
    with pytest.raises(NotASample):
        split_length(c, 0.123)


def test_reparameterize():
    p = path2d([[0, 0], [3, 4], [3, 4], [6, 8]], [0.0, 0.1, 0.2, 5.0])
    q = arclength_reparameterize(p)
    assert q.params.tolist() == [0.0, 5.0, 10.0]
    assert length(q) == length(p)
    assert np.array_equal(arclength_reparameterize(q).params, q.params)
    c = arclength_reparameterize(circle_path(64))
    assert np.allclose(np.diff(c.params), 2 * math.sin(math.pi / 64))


def test_reparameterize_constant_path():
    q = arclength_reparameterize(path2d([[1.0, 1.0]] * 3))
    assert len(q) == 1


def test_reparameterize_is_1_lipschitz():
    rng = np.random.default_rng(0)
    p = path2d(np.cumsum(rng.normal(size=(40, 3)), axis=0))
    q = arclength_reparameterize(p)
    gap = np.abs(q.params[:, None] - q.params[None, :])
    assert np.all(q.pairwise() <= gap + 1e-12)


def test_monotone_relabeling_keeps_length():
    rng = np.random.default_rng(1)
    pts = rng.normal(size=(20, 2))
    a = path2d(pts)
    b = path2d(pts, np.exp(np.arange(20.0)))
    assert length(a) == length(b)


def test_map_path():
    sp = PointSpace.from_points(np.random.default_rng(0).normal(size=(10, 2)))
    p = SampledPath(np.arange(10.0), np.arange(10), sp)
    ident = MetricMap(sp, sp, np.arange(10))
    assert map_path(ident, p).length == pytest.approx(length(p))
    doubled = MetricMap(sp, PointSpace.from_points(2 * sp.coords), np.arange(10))
    res = map_path(doubled, p)
    assert res.length == pytest.approx(2 * length(p)) and res.holds
    const = MetricMap(sp, PointSpace.from_points([[0.0, 0.0]]), np.zeros(10, dtype=int))
    assert map_path(const, p).length == 0.0
    local = map_path(ident, p, scale=1e-6)
    assert not local.applicable
    other = PointSpace.from_points(np.zeros((3, 1)) + np.arange(3)[:, None])
    with pytest.raises(DomainMismatch):
        map_path(ident, SampledPath([0.0, 1.0], [0, 1], other))


def test_h1_examples():
    seg = path2d(np.column_stack([np.linspace(0, 2, 5), np.linspace(0, 1, 5)]))
    res = image_h1_check(seg)
    assert res.injective and res.equal
    assert res.content == pytest.approx(math.sqrt(5), abs=1e-9)
    back = path2d([[0, 0], [1, 0], [0, 0]])
    res = image_h1_check(back)
    assert res.content == pytest.approx(1.0) and res.length == 2.0
    assert not res.injective
    chord = path2d([[0, 0], [3, 4]])
    res = image_h1_check(chord)
    assert res.content == res.length == 5.0


def test_h1_l_shape_and_arcs():
    res = image_h1_check(path2d([[0, 0], [1, 0], [1, 1]]))
    assert res.injective and res.equal
    arc = circle_path(12, closed=False)
    res = image_h1_check(SampledPath(arc.params[:6], arc.points[:6]))
    assert res.injective and res.equal
    assert res.diameter <= res.content


def test_h1_too_many_segments():
    with pytest.raises(TooManySegments):
        image_h1_check(circle_path(40))


def test_segment_atoms_distances():
    atoms = segment_atoms(path2d([[0, 0], [1, 0], [1, 1], [0, 1]]))
    assert atoms.inf_dist[0, 2] == pytest.approx(1.0)
    assert atoms.sup_dist[0, 2] == pytest.approx(math.sqrt(2))
    assert is_simple_polyline(path2d([[0, 0], [1, 0], [1, 1], [0, 1]]))
    assert not is_simple_polyline(path2d([[0, 0], [2, 0], [1, 1], [1, -1]]))


def test_cumulative_and_csv():
    c = circle_path(8)
    s = cumulative_length(c)
    assert s[0] == 0 and np.all(np.diff(s) > 0)
    again = SampledPath.from_csv(c.to_csv())
    assert np.array_equal(again.points, c.points)
    assert c.to_csv().splitlines()[0] == "t,x1,x2"


def test_bad_paths():
    with pytest.raises(InvalidInput):
        SampledPath([0.0, 0.0], [[0.0], [1.0]])
    with pytest.raises(InvalidInput):
        SampledPath([0.0, 1.0], [[0.0]])
