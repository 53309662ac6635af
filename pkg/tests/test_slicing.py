import math

import numpy as np
import pytest

from hlab import (
    AtomicSpace,
    Covering,
    IntervalSet,
    SequenceSpaceSpec,
    build_slice_profile,
    exact_content,
    materialize,
    slice_content_bound,
    slice_profile_sweep,
)
from hlab.exceptions import InvalidAlpha, LipschitzViolation
from hlab.slicing import singleton_covering


@pytest.fixture
def eight():
    atoms = IntervalSet(((0.0, 1.0),)).to_atomic(8)
    iv = np.array(atoms.labels)
    return atoms, iv


def test_eight_intervals(eight):
    atoms, iv = eight
    cov = singleton_covering(atoms, 1.0)
    prof = build_slice_profile(atoms, iv, cov, 1.0, 1.0)
    assert prof.integral == 1.0
    assert prof.covering_cost == 1.0
    assert prof.piecewise_integral == 1.0
    assert all(v == 1.0 for v in prof.values)
    assert prof.h(0.5) == 2.0 and prof.h(0.3) == 1.0 and prof.h(2.0) == 0.0


def test_alpha_one_counts_blocks(eight):
    atoms, iv = eight
    cov = Covering.from_blocks(atoms, [(0, 1, 2), (3,), (4, 5, 6, 7)], 1.0)
    prof = build_slice_profile(atoms, iv, cov, 1.0, 1.0)
    assert prof.h(0.375) == 2.0
    assert prof.h(0.2) == 1.0


def test_constant_function_block():
    atoms = IntervalSet(((0.0, 1.0),)).to_atomic(4)
    iv = np.full((4, 2), 0.3)
    cov = Covering.from_blocks(atoms, [(0, 1, 2, 3)], 2.0)
    prof = build_slice_profile(atoms, iv, cov, 2.0, 1.0)
    assert prof.integral == 0.0
    assert prof.h(0.3) == 1.0


def test_slice_bounds(eight):
    atoms, iv = eight
    cov = singleton_covering(atoms, 1.0)
    prof = build_slice_profile(atoms, iv, cov, 1.0, 1.0)
    out = slice_content_bound(atoms, iv, cov, prof, 5.0, math.inf)
    assert out.slice_atoms == () and out.content == 0.0 and out.h == 0.0 and out.holds
    mid = slice_content_bound(atoms, iv, cov, prof, 0.5, 0.2)
    assert mid.slice_atoms == (3, 4) and mid.content == 2.0 and mid.h == 2.0 and mid.holds
    inner = slice_content_bound(atoms, iv, cov, prof, 0.3, 0.2)
    assert inner.content == 1.0 and inner.h == 1.0


def test_cantor_distance_function():
    spec = SequenceSpaceSpec(2, 1.0 / 3.0, 3)
    atoms, _ = materialize(spec)
    words = spec.words()

    def f_range(w):
        l = next((k for k in range(3) if w[k] != "0"), 3)
        return (0.0, spec.rho**3) if l == 3 else (spec.rho**l, spec.rho**l)

    iv = np.array([f_range(w) for w in words])
    alpha = 1.0
    for delta in (math.inf, 0.5, 0.2):
        cov = exact_content(atoms, None, alpha, delta).witness
        prof = build_slice_profile(atoms, iv, cov, alpha, 1.0)
        assert prof.integral <= prof.bound + 1e-12
        for r in np.linspace(-0.1, 1.1, 37).tolist() + [1.0, 1 / 3, 1 / 9, 1 / 27, 0.0]:
            assert slice_content_bound(atoms, iv, cov, prof, r, delta).holds


def test_lipschitz_violation(eight):
    atoms, iv = eight
    cov = singleton_covering(atoms, 1.0)
    with pytest.raises(LipschitzViolation):
        build_slice_profile(atoms, 3 * iv, cov, 1.0, 1.0)
    with pytest.raises(InvalidAlpha):
        build_slice_profile(atoms, iv, cov, 0.5, 1.0)


def test_sweep(eight):
    atoms, iv = eight
    rows = slice_profile_sweep(atoms, iv, 1.0, 1.0, [1.0, 0.5, 0.25, 0.2, 0.13])
    assert [r.delta for r in rows] == [1.0, 0.5, 0.25, 0.2, 0.13]
    assert all(r.holds and r.exact for r in rows)
    assert all(r.integral == pytest.approx(1.0) for r in rows)
    # atoms of length 1/8 are too large at delta = 1/8
    assert slice_profile_sweep(atoms, iv, 1.0, 1.0, [0.125]) == []
    doubled = slice_profile_sweep(atoms, iv, 1.0, 2.0, [0.5])
    assert doubled[0].bound == 2 * rows[1].bound and doubled[0].holds


def test_sweep_singleton_points():
    pts = np.linspace(0, 1, 6)
    atoms = AtomicSpace.from_points(pts)
    iv = np.column_stack([pts, pts])
    rows = slice_profile_sweep(atoms, iv, 1.5, 1.0, [1.0, 0.1, 0.01])
    assert all(r.integral == 0.0 and r.cost == 0.0 for r in rows)


def test_profile_csv(eight):
    atoms, iv = eight
    prof = build_slice_profile(atoms, iv, singleton_covering(atoms, 1.0), 1.0, 1.0)
    lines = prof.to_csv().splitlines()
    assert lines[0] == "breakpoint,value"
    assert len(lines) == 10
