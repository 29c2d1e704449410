"""Gaussian pseudorandom samples from pseudonoise sequences, plus verification tools."""

__version__ = "0.1.0"

from .galois import BinaryPolynomial, parse_polynomial
from .lfsr import LfsrState, default_state
from .sequences import BipolarSequence, gold_code, gold_code_trace_oracle, m_sequence
from .grng import (
    BlockSumConfig,
    GaussianSampleBlock,
    TauswortheConfig,
    block_sum_gaussian,
    tausworthe_gaussian,
    tausworthe_uniform,
)
from .analysis import (
    CorrelationMeasureResult,
    Histogram,
    MomentReport,
    TripleMomentGrid,
    correlation_measure_exact,
    correlation_measure_restricted,
    find_full_peak,
    histogram,
    product_moment,
    raw_moments,
    triple_moment_grid,
)
from .bounds import (
    BoundReport,
    block_moment_bound,
    check_bound,
    gold_theta_bound,
    product_moment_bound,
)

__all__ = [
    "BinaryPolynomial",
    "BipolarSequence",
    "BlockSumConfig",
    "BoundReport",
    "CorrelationMeasureResult",
    "GaussianSampleBlock",
    "Histogram",
    "LfsrState",
    "MomentReport",
    "TauswortheConfig",
    "TripleMomentGrid",
    "block_moment_bound",
    "block_sum_gaussian",
    "check_bound",
    "correlation_measure_exact",
    "correlation_measure_restricted",
    "find_full_peak",
    "default_state",
    "gold_code",
    "gold_code_trace_oracle",
    "gold_theta_bound",
    "histogram",
    "m_sequence",
    "parse_polynomial",
    "product_moment",
    "product_moment_bound",
    "raw_moments",
    "tausworthe_gaussian",
    "tausworthe_uniform",
    "triple_moment_grid",
]
