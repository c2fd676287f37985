"""Semi-supervised two-community detection on the partially labeled SBM via
quasi-stationary distributions of absorbing random walks."""

from ._backend import BACKEND
from .errors import (
    BenchError,
    ConvergenceError,
    DegenerateGapError,
    DisconnectedError,
    GraphFormatError,
    MethodError,
    MissingGroundTruthError,
    ParameterError,
    QSDError,
)
from .estimators import (
    Method,
    Prediction,
    ScoreVector,
    classify,
    evaluate,
    mixed_score,
    qsd_score,
    simple_vote_score,
    spectral_baseline,
)
from .harness import BenchConfig, BenchResult, run_bench, run_single
from .model import (
    ComponentView,
    LabeledGraph,
    Regime,
    SbmParams,
    generate_plsbm,
    giant_component,
    load_edge_list,
    read_graph,
    write_graph,
)
from .spectral import (
    EigenPair,
    TransitionView,
    build_transition_view,
    principal_left_eigenvector,
    principal_right_eigenpair,
    second_adjacency_eigenvector,
)
from .theory import MeanFieldConstants, RateReport, mean_field_constants, mean_field_eigenvector, rate_function, rate_report

__version__ = "0.1.0"
