"""Hausdorff content, dimension estimates and Lipschitz tools on finite metric presentations."""

from .atomic_covering import (
    AtomicSpace,
    ContentEstimate,
    Covering,
    IntervalSet,
    WeightAssignment,
    dimension_estimate,
    exact_content,
    farthest_point_net,
    greedy_content,
    interval_content,
    mass_lower_bound,
    measure_profile,
)
from .curves import (
    SampledPath,
    arclength_reparameterize,
    circle_path,
    image_h1_check,
    length,
    map_path,
    partition_sum,
    split_length,
)
from .estimators import HausdorffContentEstimator, NetDimensionEstimator
from .metric_core import (
    PointSpace,
    ball,
    clopen_separation,
    diameter,
    dist_to_set,
    separation_function,
    validate_metric,
)
from .sequence_space import (
    Cell,
    CellRelation,
    SequenceSpaceSpec,
    cell_distance,
    cell_relation,
    exact_measure,
    materialize,
    normalize_covering,
)
from .slicing import build_slice_profile, slice_content_bound, slice_profile_sweep
from .transforms import (
    Flatness,
    LipschitzProfile,
    MetricMap,
    bilipschitz_constant,
    classify_flatness,
    holder_constant,
    lipschitz_constant,
    local_lipschitz_profile,
    pushforward_atoms,
    snowflake,
)

__version__ = "0.1.0"
