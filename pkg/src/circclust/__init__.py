"""Fuzzy clustering of circular time series by circular quantile autocorrelation."""

__version__ = "0.1.0"

from .circular import Arc, arc_contains, arc_from_center, arc_from_quantile, circular_median, circular_quantile
from .clustering import (
    ClusterConfig,
    FuzzyCMedoids,
    FuzzyPartition,
    HyperGrid,
    run_fcmedoids,
    run_multistart,
    select_hyperparameters,
    select_lags,
    xie_beni,
)
from .dependence import CQAFeatureExtractor, cqa, cqa_features, qa, rho_fl, rho_js
from .dissimilarity import DissimilarityMatrix, cqa_matrices, d_cqa, d_fl, d_js, d_qa, pairwise_matrix
from .embedding import TwoDimensionalScaling, mds_2d, stress
from .evaluation import FuzzinessCurve, arif, aufc, cutoff_success, jif
from .simulation import GeneratorSpec, ScenarioSpec, build_scenario, scenario, wrap

__all__ = [
    "Arc",
    "arc_contains",
    "arc_from_center",
    "arc_from_quantile",
    "circular_median",
    "circular_quantile",
    "ClusterConfig",
    "FuzzyCMedoids",
    "FuzzyPartition",
    "HyperGrid",
    "run_fcmedoids",
    "run_multistart",
    "select_hyperparameters",
    "select_lags",
    "xie_beni",
    "CQAFeatureExtractor",
    "cqa",
    "cqa_features",
    "qa",
    "rho_fl",
    "rho_js",
    "DissimilarityMatrix",
    "cqa_matrices",
    "d_cqa",
    "d_fl",
    "d_js",
    "d_qa",
    "pairwise_matrix",
    "TwoDimensionalScaling",
    "mds_2d",
    "stress",
    "FuzzinessCurve",
    "arif",
    "aufc",
    "cutoff_success",
    "jif",
    "GeneratorSpec",
    "ScenarioSpec",
    "build_scenario",
    "scenario",
    "wrap",
]
