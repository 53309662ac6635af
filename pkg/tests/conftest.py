import math

import numpy as np
import pytest

from hlab import SequenceSpaceSpec, materialize

CANTOR_ALPHA = math.log(2) / math.log(3)


@pytest.fixture
def cantor3():
    atoms, points = materialize(SequenceSpaceSpec(2, 1.0 / 3.0, 3))
    return atoms, points


@pytest.fixture
def line3():
    from hlab import PointSpace

    return PointSpace.from_points(np.array([0.0, 1.0, 2.0]))
