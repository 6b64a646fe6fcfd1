"""Power spectrum estimation from multi-coset (sub-Nyquist) samples."""

from .core import (
    MeasurementSystem,
    PairOrdering,
    PsdEstimate,
    SamplingPattern,
    TradeoffReport,
    build_measurement_system,
    build_partial_dft_a,
    subband_bounds,
    subband_indices,
    tradeoff,
)
from .errors import (
    InsufficientSignal,
    MaxIterationsExceeded,
    McpsdError,
    MissingDifference,
    PatternError,
    RankDeficient,
)
from .estimator import (
    CorrelationVector,
    SolverReport,
    assemble_u,
    predict_bias,
    predict_u_covariance,
    predict_variance,
    solve_ls,
    solve_nnls,
)
from .patterns import (
    GolombRuler,
    PatternDiagnostics,
    covers_consecutive_differences,
    diagnose,
    golomb_ruler,
    random_pattern,
    threshold_sweep,
)
from .reference import ErrorMetrics, metrics, welch_subbands
from .sampler import CosetSampleSet, DelayedSampleSet, coset_sample, fractional_delay
from .synth import NyquistSignal, ProcessSpec, generate, true_psd

__version__ = "0.1.0"
