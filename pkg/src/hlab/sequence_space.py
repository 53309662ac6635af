"""Ultrametric sequence spaces over a finite alphabet.

Points are infinite words over ``n`` symbols with ``d(x, y) = rho ** l``,
``l`` the length of the longest common prefix. A finite word stands for the
cell (cylinder) of all its extensions; a cell of level ``l`` has diameter
``rho ** l``.
"""

import itertools
import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .atomic_covering import AtomicSpace
from .exceptions import BadSymbol, InvalidAlpha, InvalidInput, NotACovering, TooLarge

SYMBOLS = "0123456789abcdefghijklmnopqrstuvwxyz"
EXPONENT_TOL = 1e-12
DEFAULT_SIZE_LIMIT = 4096


@dataclass(frozen=True)
class SequenceSpaceSpec:
    n: int
    rho: float
    depth: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2 or self.n > len(SYMBOLS):
            raise InvalidInput(f"alphabet size must be an integer in [2, {len(SYMBOLS)}]")
        if not 0 < self.rho < 1:
            raise InvalidInput(f"rho must lie in (0, 1), got {self.rho}")
        if int(self.depth) != self.depth or self.depth < 1:
            raise InvalidInput(f"depth must be a positive integer, got {self.depth}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "depth", int(self.depth))

    @property
    def alphabet(self):
        return SYMBOLS[: self.n]

    @property
    def alpha_star(self):
        """Critical exponent solving ``n * rho ** alpha == 1``."""
        return math.log(self.n) / math.log(1.0 / self.rho)

    def words(self, level=None):
        level = self.depth if level is None else level
        return ["".join(w) for w in itertools.product(self.alphabet, repeat=level)]

    def check_word(self, word):
        bad = set(word) - set(self.alphabet)
        if bad:
            raise BadSymbol(f"symbols {sorted(bad)} are not in alphabet {self.alphabet!r}")
        return word

    @classmethod
    def from_dict(cls, data):
        return cls(data["n"], data["rho"], data.get("depth", 1))

    def to_dict(self):
        return {"n": self.n, "rho": self.rho, "depth": self.depth}


@dataclass(frozen=True)
class Cell:
    word: str = ""

    @property
    def level(self):
        return len(self.word)

    def diameter(self, spec):
        return spec.rho**self.level


class CellRelation(str, Enum):
    NESTED_1_IN_2 = "nested_1_in_2"
    NESTED_2_IN_1 = "nested_2_in_1"
    EQUAL = "equal"
    DISJOINT = "disjoint"


def _common_prefix(w1, w2):
    l = 0
    for a, b in zip(w1, w2):
        if a != b:
            break
        l += 1
    return l


def cell_distance(spec, w1, w2):
    """``rho ** l`` with ``l`` the common-prefix length; 0 for equal words.

    For disjoint cells this is both the largest and the smallest distance
    between their points. For nested cells it is the diameter of the larger
    one.
    """
    spec.check_word(w1)
    spec.check_word(w2)
    if w1 == w2:
        return 0.0
    return spec.rho ** _common_prefix(w1, w2)


def cell_relation(c1, c2):
    w1, w2 = c1.word, c2.word
    if w1 == w2:
        return CellRelation.EQUAL
    if w2.startswith(w1):
        return CellRelation.NESTED_2_IN_1
    if w1.startswith(w2):
        return CellRelation.NESTED_1_IN_2
    return CellRelation.DISJOINT


def _covers(words, level, spec):
    prefixes = set(words)
    for w in spec.words(level):
        if not any(w[:j] in prefixes for j in range(level + 1)):
            return False
    return True


def normalize_covering(spec, cells, alpha):
    """Refine a covering by cells to a single common level.

    Every cell of level ``j`` is replaced by its ``n ** (L - j)`` descendants
    at the deepest level ``L`` present. At ``alpha == alpha_star`` the cost
    is unchanged. Returns ``(level_cells, cost_before, cost_after)``.
    """
    if alpha < 0:
        raise InvalidAlpha(f"alpha must be >= 0, got {alpha}")
    words = [spec.check_word(c.word if isinstance(c, Cell) else c) for c in cells]
    if not words:
        raise NotACovering("empty family of cells")
    level = max(len(w) for w in words)
    if not _covers(words, level, spec):
        raise NotACovering("cells do not cover the sequence space")
    cost_before = math.fsum(spec.rho ** (alpha * len(w)) for w in words)
    out = []
    for w in words:
        for tail in itertools.product(spec.alphabet, repeat=level - len(w)):
            out.append(Cell(w + "".join(tail)))
    cost_after = math.fsum(spec.rho ** (alpha * c.level) for c in out)
    return out, cost_before, cost_after


def exact_measure(spec, alpha):
    """``H^alpha`` of the whole sequence space: ``inf``, ``1`` or ``0``.

    The full level-``l`` covering costs ``(n * rho ** alpha) ** l``; its
    limit decides the case, and at the critical exponent the value is 1.
    """
    alpha = float(alpha)
    if not alpha >= 0:
        raise InvalidAlpha(f"alpha must be >= 0, got {alpha}")
    star = spec.alpha_star
    if abs(alpha - star) <= EXPONENT_TOL:
        return 1.0
    return math.inf if alpha < star else 0.0


def materialize(spec, size_limit=DEFAULT_SIZE_LIMIT):
    """Depth-level cells as an :class:`AtomicSpace` plus one point per cell.

    Returns ``(atomic_space, point_space)``; the point space carries the
    ultrametric ``cell_distance`` between full-depth words.
    """
    from .metric_core import PointSpace

    count = spec.n**spec.depth
    if count > size_limit:
        raise TooLarge(f"{count} cells exceed the size limit of {size_limit}")
    words = spec.words()
    codes = np.array([[SYMBOLS.index(ch) for ch in w] for w in words], dtype=np.int64)
    prefix = np.zeros((count, count), dtype=np.int64)
    alive = np.ones((count, count), dtype=bool)
    for k in range(spec.depth):
        alive &= codes[:, k][:, None] == codes[:, k][None, :]
        prefix += alive
    # same float powers as cell_distance
    powers = np.array([spec.rho**k for k in range(spec.depth)] + [0.0])
    dist = powers[prefix]
    atoms = AtomicSpace(
        np.full(count, spec.rho**spec.depth),
        dist,
        dist,
        provenance="cell-space",
        labels=words,
    )
    return atoms, PointSpace(dist)


def load_spec(path):
    with open(path) as fh:
        return SequenceSpaceSpec.from_dict(json.load(fh))
