"""Deterministic vs. stochastic fixed-rate encoders on the circular uniform source."""

from .analytics import (
    RdPoint,
    arc_mse,
    d_uq_closed,
    d_vq_closed,
    d_vq_conditional,
    optimize_partition,
    partition_avg_mse,
    rate_sweep,
    snr_db,
    snr_gap_db,
)
from .codec import (
    CODECS,
    RandomnessModel,
    Rate,
    roundtrip,
    uq_decode,
    uq_encode,
    vq_decode_condmean,
    vq_decode_stochastic,
    vq_encode,
)
from .errors import (
    CircleRDError,
    ConfigurationError,
    DomainError,
    InvalidCodeError,
    InvalidInputError,
    ModelMismatchError,
)
from .geometry import canonicalize, distortion, distortion_mse_equiv, from_cartesian, to_cartesian
from .verification import (
    McEstimate,
    TradeoffProblem,
    derandomize,
    doubling_check,
    integrate_conditional_distortion,
    mc_distortion,
    uniformity_test,
)

__version__ = "0.1.0"
