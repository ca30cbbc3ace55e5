"""Var- and R^2-sortability for multivariate time series, SVAR benchmark
generation, sort-and-regress baselines and a DYNOTEARS-style learner."""
from .baselines import EstimatedTsGraph, OrderStrategy, binarize, sortnregress_ts
from .dynotears import DynoConfig, h_dagness
from .dynotears import fit as fit_dynotears
from .graphs import (
    GraphGenConfig,
    SummaryGraph,
    WeightedTsGraph,
    admissible_pairs,
    all_connected_pairs,
    generate_er_tsgraph,
    strongly_connected_components,
    summary_of,
)
from .metrics import EvalReport, evaluate
from .regression import lasso_bic, ols
from .sortability import (
    CriterionVector,
    SortabilityReport,
    increasing,
    marginal_variance,
    r2_scores,
    r2_sortability,
    sortability_score,
    varsortability,
)
from .svar import Panel, SimConfig, is_stable, simulate, standardize

__version__ = "0.1.0"
