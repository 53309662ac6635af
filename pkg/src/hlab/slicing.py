"""Level-set bounds from a covering and a Lipschitz function.

The function is given per atom as a closed image interval ``[lo, hi]``
(degenerate for point atoms). For a covering with blocks ``E_i`` the
profile is ``h(r) = sum(diam(E_i) ** (alpha - 1))`` over blocks whose image
interval contains ``r``; its integral is at most ``k * sum(diam(E_i) ** alpha)``
and ``h(r)`` bounds the ``(alpha - 1)``-content of the slice at ``r``.
"""

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_decreasing_grid, check_delta, dp_limit
from .atomic_covering import Covering, _power, exact_content, greedy_content
from .exceptions import InvalidAlpha, InvalidInput, LipschitzViolation, TooManyAtoms

LIPSCHITZ_TOL = 1e-9


def _check_intervals(space, f_intervals):
    iv = np.asarray(f_intervals, dtype=float)
    if iv.shape != (space.n_atoms, 2):
        raise InvalidInput(f"need one [lo, hi] interval per atom, got shape {iv.shape}")
    if np.any(iv[:, 0] > iv[:, 1]):
        raise InvalidInput("image intervals must have lo <= hi")
    return iv


@dataclass(frozen=True)
class SliceProfile:
    """Piecewise-constant ``h`` built from a covering.

    ``values[i]`` is ``h`` on the open interval between ``breakpoints[i]``
    and ``breakpoints[i + 1]``. Point values (where closed image intervals
    overlap at an endpoint) come from :meth:`h`.
    """

    breakpoints: tuple
    values: tuple
    alpha: float
    k: float
    covering_cost: float
    block_intervals: tuple
    block_weights: tuple

    def h(self, r):
        return math.fsum(
            w for (lo, hi), w in zip(self.block_intervals, self.block_weights) if lo <= r <= hi
        )

    @property
    def integral(self):
        """``sum(weight * |interval|)``, exact for a piecewise-constant function."""
        return math.fsum(w * (hi - lo) for (lo, hi), w in zip(self.block_intervals, self.block_weights))

    @property
    def piecewise_integral(self):
        bp = self.breakpoints
        return math.fsum(v * (b - a) for v, a, b in zip(self.values, bp, bp[1:]))

    @property
    def bound(self):
        return self.k * self.covering_cost

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["breakpoint", "value"])
        for b, v in zip(self.breakpoints, list(self.values) + [0.0]):
            writer.writerow([repr(float(b)), repr(float(v))])
        return buf.getvalue()


def build_slice_profile(space, f_intervals, covering, alpha, k):
    """Build ``h`` for ``covering`` and check ``|f(E)| <= k * diam(E)`` per block."""
    if not alpha >= 1:
        raise InvalidAlpha(f"slicing needs alpha >= 1, got {alpha}")
    iv = _check_intervals(space, f_intervals)
    intervals, weights, costs = [], [], []
    for block in covering.blocks:
        block = list(block)
        lo, hi = float(iv[block, 0].min()), float(iv[block, 1].max())
        diam = space.block_diameter(block)
        if hi - lo > k * diam + LIPSCHITZ_TOL * max(1.0, k * diam):
            raise LipschitzViolation(
                f"block {block}: image length {hi - lo} exceeds k * diam = {k * diam}"
            )
        intervals.append((lo, hi))
        weights.append(_power(diam, alpha - 1))
        costs.append(_power(diam, alpha))
    bp = sorted({x for pair in intervals for x in pair})
    values = []
    for a, b in zip(bp, bp[1:]):
        mid = 0.5 * (a + b)
        values.append(math.fsum(w for (lo, hi), w in zip(intervals, weights) if lo <= mid <= hi))
    return SliceProfile(
        breakpoints=tuple(bp),
        values=tuple(values),
        alpha=float(alpha),
        k=float(k),
        covering_cost=math.fsum(costs),
        block_intervals=tuple(intervals),
        block_weights=tuple(weights),
    )


@dataclass(frozen=True)
class SliceCheck:
    r: float
    slice_atoms: tuple
    content: float
    h: float
    holds: bool

    def to_dict(self):
        return {
            "r": self.r,
            "slice_atoms": list(self.slice_atoms),
            "content": self.content,
            "h": self.h,
            "pass": self.holds,
        }


def slice_content_bound(space, f_intervals, covering, profile, r, delta, limit=None):
    """Check ``H^(alpha-1)_delta(slice at r) <= h(r)`` with the exact DP."""
    delta = check_delta(delta)
    iv = _check_intervals(space, f_intervals)
    for d in covering.diameters:
        if not d < delta:
            raise InvalidInput(f"covering block of diameter {d} is not below delta={delta}")
    atoms = tuple(int(i) for i in np.flatnonzero((iv[:, 0] <= r) & (r <= iv[:, 1])))
    if len(atoms) > dp_limit(limit):
        raise TooManyAtoms(f"{len(atoms)} slice atoms exceed the DP limit")
    content = exact_content(space, atoms, profile.alpha - 1.0, delta, limit).value
    h = profile.h(r)
    holds = content <= h * (1 + 1e-12) + 1e-15
    return SliceCheck(float(r), atoms, content, h, bool(holds))


@dataclass(frozen=True)
class SweepRow:
    delta: float
    cost: float
    integral: float
    bound: float
    holds: bool
    exact: bool

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def slice_profile_sweep(space, f_intervals, alpha, k, delta_grid, limit=None):
    """Per-scale ``(integral of h, k * cost)`` for near-optimal coverings.

    Each scale uses the exact DP witness when the space fits the atom limit
    (cost equals the presentation's ``H^alpha_delta``) and a greedy covering
    otherwise. Scales at which some atom is too large are skipped.
    """
    grid = check_decreasing_grid(delta_grid, "delta_grid", allow_inf=True)
    exact = space.n_atoms <= dp_limit(limit)
    rows = []
    for delta in grid:
        if np.any(space.atom_diam >= delta):
            continue
        if exact:
            cov = exact_content(space, None, alpha, delta, limit).witness
        else:
            cov = greedy_content(space, None, alpha, delta).witness
        prof = build_slice_profile(space, f_intervals, cov, alpha, k)
        integral = prof.integral
        holds = integral <= prof.bound * (1 + 1e-12) + 1e-15
        rows.append(SweepRow(float(delta), prof.covering_cost, integral, prof.bound, bool(holds), exact))
    return rows


def singleton_covering(space, alpha):
    return Covering.from_blocks(space, [(i,) for i in range(space.n_atoms)], alpha)
