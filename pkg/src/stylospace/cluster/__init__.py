"""Density clustering over style vectors plus the validity battery."""

from ._kernels import BACKEND
from .hdbscan import (
    ClusterModel,
    ClusterParams,
    fit_hdbscan,
    predict,
    single_linkage_merges,
)
from .validity import (
    PairReport,
    SweepRow,
    ValidityReport,
    all_pair_reports,
    authorship_pair_report,
    baseline_dbi,
    davies_bouldin,
    purity,
    random_baseline,
    sweep,
    validity_report,
)

__all__ = [
    "BACKEND",
    "ClusterModel",
    "ClusterParams",
    "fit_hdbscan",
    "predict",
    "single_linkage_merges",
    "PairReport",
    "SweepRow",
    "ValidityReport",
    "all_pair_reports",
    "authorship_pair_report",
    "baseline_dbi",
    "davies_bouldin",
    "purity",
    "random_baseline",
    "sweep",
    "validity_report",
]
