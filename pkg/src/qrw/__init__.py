"""Exact multiphoton quantum walks on a pyramid of 50/50 beam splitters.

Everything is computed in exact arithmetic (Gaussian integers over half
powers of two, and rationals); destructive-interference zeros are exact.
"""

from .correlation import (
    CorrelationValue,
    DetectorTuple,
    gk,
    joint_number_distribution,
    onefold_distribution,
    threefold_cube,
    twofold_matrix,
    zero_set,
)
from .errors import (
    InternalDefectError,
    InvalidArgumentError,
    OracleMismatchError,
    QrwError,
    ResourceBoundError,
)
from .feynman import (
    DiagramSet,
    PathRecord,
    dense_simulate,
    diagrams_for,
    endpoint_amplitude,
    enumerate_paths,
    pair_path_count,
    simplified_feynman,
    total_path_count,
)
from .lattice import (
    HalfPowerAmplitude,
    Network,
    TransferMatrix,
    build_network,
    propagate_single,
    transfer_matrix,
    validate_network,
)
from .state import FockVector, StateExpansion, expand, mirror

__version__ = "0.1.0"

__all__ = [
    "CorrelationValue",
    "DetectorTuple",
    "DiagramSet",
    "FockVector",
    "HalfPowerAmplitude",
    "InternalDefectError",
    "InvalidArgumentError",
    "Network",
    "OracleMismatchError",
    "PathRecord",
    "QrwError",
    "ResourceBoundError",
    "StateExpansion",
    "TransferMatrix",
    "build_network",
    "dense_simulate",
    "diagrams_for",
    "endpoint_amplitude",
    "enumerate_paths",
    "expand",
    "gk",
    "joint_number_distribution",
    "mirror",
    "onefold_distribution",
    "pair_path_count",
    "propagate_single",
    "simplified_feynman",
    "threefold_cube",
    "total_path_count",
    "transfer_matrix",
    "twofold_matrix",
    "validate_network",
    "zero_set",
]
