"""Fast shape, amplitude and magnitude outlier detection for functional data.

The univariate pipeline compares every curve against a pointwise reference
curve, producing three interpretable outlyingness indices (shape, amplitude,
magnitude) that boxplot-style cutoffs turn into per-type outlier flags.
Multivariate curves are handled marginally, by stringing components together,
or by letting random one-dimensional projections vote.
"""
from ._version import __version__
from .benchmark import (
    DEFAULT_N_DIRECTIONS,
    METHODS,
    SCOPES,
    BenchmarkResult,
    MethodConfig,
    SweepPoint,
    estimate_null_baselines,
    f1_score,
    format_result_table,
    run_benchmark,
    run_method,
    score_flags,
    scoped_flags,
    threshold_sweep,
    worker_count,
)
from .cutoffs import CutoffSpec, FlagSet, boxplot_cutoff, classify_outliers
from .datasets import FunctionalDataset, Grid, MultivariateFunctionalDataset
from .errors import (
    DegenerateReference,
    FmuodError,
    InsufficientData,
    InvalidConfig,
    InvalidCurve,
    InvalidDirection,
    ParseError,
)
from .indices import (
    IndexTable,
    IndexTriple,
    ReferenceCurve,
    center_curve,
    compute_index_table,
    compute_indices,
    reference_from_sample,
)
from .multivariate import (
    ANY_VOTE_SHARE,
    ANY_VOTE_THRESHOLDS,
    DEFAULT_ETA,
    DEFAULT_GAMMA,
    DEFAULT_VOTE_SHARES,
    REFERENCE_BASELINES,
    TYPE_ORDER,
    Baselines,
    DirectionSet,
    OutlierReport,
    ThresholdSelection,
    ThresholdTriple,
    VoteMatrix,
    collect_votes,
    detect_marginal,
    detect_projection,
    detect_projection_adaptive,
    detect_stringed,
    estimate_baselines,
    generate_directions,
    marginal_tables,
    project,
    projection_tables,
    select_thresholds,
    string_dimensions,
    stringed_table,
)
from .simulation import (
    MODEL_IDS,
    LabeledDataset,
    SimulationSpec,
    generate,
    multivariate_eigenfunctions,
    score_variances,
)

__all__ = [
    "__version__",
    "ANY_VOTE_SHARE",
    "ANY_VOTE_THRESHOLDS",
    "Baselines",
    "BenchmarkResult",
    "CutoffSpec",
    "DEFAULT_ETA",
    "DEFAULT_GAMMA",
    "DEFAULT_N_DIRECTIONS",
    "DEFAULT_VOTE_SHARES",
    "DegenerateReference",
    "DirectionSet",
    "FlagSet",
    "FmuodError",
    "FunctionalDataset",
    "Grid",
    "IndexTable",
    "IndexTriple",
    "InsufficientData",
    "InvalidConfig",
    "InvalidCurve",
    "InvalidDirection",
    "LabeledDataset",
    "METHODS",
    "MODEL_IDS",
    "MethodConfig",
    "MultivariateFunctionalDataset",
    "OutlierReport",
    "ParseError",
    "REFERENCE_BASELINES",
    "ReferenceCurve",
    "SCOPES",
    "SimulationSpec",
    "SweepPoint",
    "TYPE_ORDER",
    "ThresholdSelection",
    "ThresholdTriple",
    "VoteMatrix",
    "boxplot_cutoff",
    "center_curve",
    "classify_outliers",
    "collect_votes",
    "compute_index_table",
    "compute_indices",
    "detect_marginal",
    "detect_projection",
    "detect_projection_adaptive",
    "detect_stringed",
    "estimate_baselines",
    "estimate_null_baselines",
    "f1_score",
    "format_result_table",
    "generate",
    "generate_directions",
    "marginal_tables",
    "multivariate_eigenfunctions",
    "project",
    "projection_tables",
    "reference_from_sample",
    "run_benchmark",
    "run_method",
    "score_flags",
    "score_variances",
    "scoped_flags",
    "select_thresholds",
    "string_dimensions",
    "stringed_table",
    "threshold_sweep",
    "worker_count",
]
