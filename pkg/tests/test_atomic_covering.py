import math
import time

import numpy as np
import pytest

from hlab import (
    AtomicSpace,
    IntervalSet,
    SequenceSpaceSpec,
    WeightAssignment,
    exact_content,
    greedy_content,
    interval_content,
    mass_lower_bound,
    materialize,
    measure_profile,
)
from hlab._validation import dp_limit
from hlab.exceptions import (
    InadmissibleAtom,
    InvalidAlpha,
    InvalidDelta,
    NegativeWeight,
    TooManyAtoms,
)

from conftest import CANTOR_ALPHA


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


def brute_content(space, alpha, delta):
    best = math.inf
    for part in set_partitions(list(range(space.n_atoms))):
        diams = [space.block_diameter(b) for b in part]
        if all(d < delta for d in diams):
            best = min(best, sum(1.0 if alpha == 0 else d**alpha for d in diams))
    return best


def test_cantor_depth3(cantor3):
    atoms, _ = cantor3
    est = exact_content(atoms, None, CANTOR_ALPHA)
    assert abs(est.value - 1.0) < 1e-9
    assert est.bound == "exact"
    assert est.witness.blocks == (tuple(range(8)),)
    assert est.witness.cost == est.value


def test_singletons_are_free():
    space = AtomicSpace.from_points(np.random.default_rng(0).uniform(size=(6, 2)))
    assert exact_content(space, None, 0.7).value == 0.0


def test_alpha_zero_single_block():
    space = AtomicSpace.from_points(np.random.default_rng(0).uniform(size=(6, 2)))
    assert exact_content(space, None, 0.0).value == 1.0


def test_separated_groups_add():
    pts = np.array([[0.0], [0.1], [0.3], [5.0], [5.2]])
    space = AtomicSpace.from_points(pts)
    for alpha in (0.0, 0.5, 1.0, 2.0):
        whole = exact_content(space, None, alpha, 1.0).value
        parts = exact_content(space, [0, 1, 2], alpha, 1.0).value + exact_content(
            space, [3, 4], alpha, 1.0
        ).value
        assert whole == pytest.approx(parts, rel=1e-12)


@pytest.mark.parametrize("seed", range(12))
def test_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 7))
    groups, pts = [], []
    for _ in range(m):
        k = int(rng.integers(1, 3))
        groups.append(tuple(range(len(pts), len(pts) + k)))
        c = rng.uniform(size=2)
        pts.extend(c + rng.uniform(-0.1, 0.1, size=(k, 2)))
    space = AtomicSpace.from_points(np.array(pts), groups)
    alpha = float(rng.choice([0.0, 0.5, 1.0, 1.7]))
    delta = float(rng.choice([math.inf, 0.3, 0.6, 1.0]))
    got = exact_content(space, None, alpha, delta).value
    want = brute_content(space, alpha, delta)
    if math.isinf(want):
        assert math.isinf(got)
    else:
        assert got == pytest.approx(want, rel=1e-9, abs=1e-12)


def test_strict_delta():
    space = AtomicSpace.from_points(np.array([[0.0], [1.0]]))
    # a block of diameter exactly delta is not admissible
    assert exact_content(space, None, 1.0, 1.0).value == 0.0
    assert exact_content(space, None, 0.0, 1.0).value == 2.0
    assert exact_content(space, None, 0.0, 1.0 + 1e-9).value == 1.0


def test_oversized_atom_gives_inf():
    space = AtomicSpace([0.5, 0.1], [[0.5, 1.0], [1.0, 0.1]], [[0, 0.2], [0.2, 0]])
    assert exact_content(space, None, 1.0, 0.5).value == math.inf
    assert exact_content(space, None, 1.0, 0.5).to_dict()["value"] == "inf"


def test_empty_target():
    space = AtomicSpace.from_points(np.zeros((1, 1)))
    assert exact_content(space, [], 1.0).value == 0.0


def test_argument_errors(cantor3):
    atoms, _ = cantor3
    with pytest.raises(InvalidAlpha):
        exact_content(atoms, None, -1.0)
    with pytest.raises(InvalidDelta):
        exact_content(atoms, None, 1.0, 0.0)


def test_limit(monkeypatch):
    atoms, _ = materialize(SequenceSpaceSpec(2, 1.0 / 3.0, 5))
    with pytest.raises(TooManyAtoms):
        exact_content(atoms, None, CANTOR_ALPHA)
    monkeypatch.setenv("HLAB_DP_LIMIT", "4")
    small, _ = materialize(SequenceSpaceSpec(2, 1.0 / 3.0, 3))
    with pytest.raises(TooManyAtoms):
        exact_content(small, None, CANTOR_ALPHA)
    monkeypatch.setenv("HLAB_DP_LIMIT", "99")
    assert dp_limit() == 20
    assert dp_limit(25) == 20
    monkeypatch.delenv("HLAB_DP_LIMIT")
    assert dp_limit() == 16


def test_greedy_on_depth4_cantor():
    atoms, _ = materialize(SequenceSpaceSpec(2, 1.0 / 3.0, 4))
    est = greedy_content(atoms, None, CANTOR_ALPHA, 1.0 / 3.0)
    assert est.bound == "upper"
    assert est.value == pytest.approx(1.0, abs=1e-9)
    assert len(est.witness.blocks) == 4


def test_greedy_errors_and_singletons():
    space = AtomicSpace.from_points(np.arange(5.0))
    assert greedy_content(space, None, 1.0, 0.5).value == 0.0
    fat = AtomicSpace([1.0], [[1.0]], [[0.0]])
    with pytest.raises(InadmissibleAtom):
        greedy_content(fat, None, 1.0, 0.5)
    with pytest.raises(InvalidDelta):
        greedy_content(space, None, 1.0, math.inf)


def test_measure_profile_cantor(cantor3):
    atoms, _ = cantor3
    # strict delta: at 1/3 the level-2 cells are used, at 1/9 the level-3 ones
    vals = [e.value for e in measure_profile(atoms, None, CANTOR_ALPHA, [math.inf, 1 / 3, 1 / 9])]
    assert vals == pytest.approx([1.0, 1.0, 1.0], abs=1e-9)


def test_exponent_comparison_on_profile(cantor3):
    atoms, _ = cantor3
    grid = [1.0, 1 / 3, 1 / 9]
    beta = 1.0
    for a, b in zip(measure_profile(atoms, None, CANTOR_ALPHA, grid), measure_profile(atoms, None, beta, grid)):
        assert b.value <= a.delta ** (beta - CANTOR_ALPHA) * a.value + 1e-12


def test_measure_profile_nondecreasing():
    space = AtomicSpace.from_points(np.random.default_rng(3).uniform(size=(9, 2)))
    grid = [math.inf, 1.0, 0.5, 0.25, 0.1]
    vals = [e.value for e in measure_profile(space, None, 0.8, grid)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_counting_measure():
    space = AtomicSpace.from_points(np.array([[0.0], [1.0], [3.0], [3.5], [7.0]]))
    vals = [e.value for e in measure_profile(space, None, 0.0, [10.0, 0.5, 0.1])]
    assert vals[1:] == [5.0, 5.0]


def test_interval_content():
    assert interval_content(IntervalSet(((0.0, 1.0),))).value == 1.0
    assert interval_content(IntervalSet(((2.0, 5.5),)), 1.0, 0.1).value == 3.5
    assert interval_content(IntervalSet(((0.0, 1.0), (2.0, 3.0)))).value == 2.0
    assert interval_content(IntervalSet(())).value == 0.0
    est = interval_content(IntervalSet(((0.0, 1.0), (0.5, 2.0))), 1.0, 0.3)
    assert est.value == 2.0
    assert est.witness.cost == pytest.approx(2.0)
    assert max(est.witness.diameters) < 0.3


def test_interval_content_other_alpha():
    est = interval_content(IntervalSet(((0.0, 1.0),)), 0.5)
    assert est.bound == "upper"
    # one block of diameter 1 is already optimal at alpha < 1
    assert est.value == pytest.approx(1.0)


def test_mass_lower_bound_cantor(cantor3):
    atoms, _ = cantor3
    est = mass_lower_bound(atoms, None, CANTOR_ALPHA)
    assert est.bound == "lower"
    assert est.witness["C"] == pytest.approx(1.0)
    assert est.value == pytest.approx(1.0, abs=1e-9)
    half = mass_lower_bound(atoms, None, CANTOR_ALPHA, math.inf, np.full(8, 1 / 16))
    # mass and C both halve, so the bound itself does not move
    assert half.witness["C"] == pytest.approx(est.witness["C"] / 2)
    assert half.value == pytest.approx(est.value)


def test_mass_on_a_point():
    space = AtomicSpace.from_points(np.array([[0.0], [1.0]]))
    est = mass_lower_bound(space, None, 1.0, math.inf, [1.0, 0.0])
    assert est.value == 0.0
    with pytest.raises(NegativeWeight):
        WeightAssignment([-1.0, 1.0])


def test_cantor_depth4_runtime():
    atoms, _ = materialize(SequenceSpaceSpec(2, 1.0 / 3.0, 4))
    t0 = time.perf_counter()
    est = exact_content(atoms, None, CANTOR_ALPHA)
    assert time.perf_counter() - t0 < 60
    assert abs(est.value - 1.0) < 1e-9


def test_atomic_json_roundtrip(cantor3):
    atoms, _ = cantor3
    again = AtomicSpace.from_dict(atoms.to_dict())
    assert np.array_equal(again.sup_dist, atoms.sup_dist)
    assert again.provenance == "cell-space"
