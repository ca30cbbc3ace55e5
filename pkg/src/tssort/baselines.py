"""Sort-and-regress baselines for time-series graphs.

Nodes are ordered by a criterion; each node is then LASSO-regressed on its
order-predecessors at lag 0 and on every node at lags 1..tau_max.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientSamples, InvalidConfig
from .graphs import WeightedTsGraph
from .regression import lasso_bic
from .sortability import lagged_design, marginal_variance, r2_scores
from .svar import Panel

ORDER_KINDS = ("variance", "r2", "random", "variance_reversed")


@dataclass(frozen=True)
class OrderStrategy:
    kind: str = "variance"
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ORDER_KINDS:
            raise InvalidConfig(f"unknown order kind {self.kind!r}; expected one of {ORDER_KINDS}")


@dataclass(frozen=True, eq=False)
class EstimatedTsGraph:
    """Estimated weights. ``w_l[k-1, i, j]`` is the lag-k effect of i on j."""

    w_c: np.ndarray
    w_l: np.ndarray

    @property
    def d(self) -> int:
        return self.w_c.shape[0]

    @property
    def tau_max(self) -> int:
        return self.w_l.shape[0]

    def stack(self) -> np.ndarray:
        return np.concatenate([self.w_c[None], self.w_l], axis=0)

    def to_ts_graph(self, check_acyclic=True) -> WeightedTsGraph:
        return WeightedTsGraph(self.stack(), check_acyclic=check_acyclic)

    @classmethod
    def from_stack(cls, w) -> "EstimatedTsGraph":
        w = np.asarray(w, dtype=float)
        return cls(w[0], w[1:])


def node_order(p: Panel, tau_max: int, strategy: OrderStrategy) -> np.ndarray:
    if strategy.kind == "variance":
        return np.argsort(marginal_variance(p).values, kind="stable")
    if strategy.kind == "variance_reversed":
        return np.argsort(-marginal_variance(p).values, kind="stable")
    if strategy.kind == "r2":
        return np.argsort(r2_scores(p, tau_max).values, kind="stable")
    rng = np.random.default_rng(strategy.seed)
    return rng.permutation(p.d)


def sortnregress_ts(p: Panel, tau_max: int, strategy: OrderStrategy | None = None, **lasso_kw) -> EstimatedTsGraph:
    strategy = strategy or OrderStrategy()
    T, d = p.data.shape
    if tau_max < 0:
        raise InvalidConfig("tau_max must be >= 0")
    if T <= d * (tau_max + 1) + 1:
        raise InsufficientSamples(f"T={T} too small for d={d}, tau_max={tau_max}")
    order = node_order(p, tau_max, strategy)
    cur, lags = lagged_design(p.data, tau_max)
    w_c = np.zeros((d, d))
    w_l = np.zeros((tau_max, d, d))
    for q, node in enumerate(order):
        preds = order[:q]
        design = np.hstack([cur[:, preds], lags])
        fit = lasso_bic(design, cur[:, node], **lasso_kw)
        w_c[preds, node] = fit.coefficients[: len(preds)]
        w_l[:, :, node] = fit.coefficients[len(preds):].reshape(tau_max, d)
    return EstimatedTsGraph(w_c, w_l)


def binarize(est, threshold: float = 0.1) -> np.ndarray:
    """Boolean stack ``|w| > threshold`` of shape (tau_max+1, d, d)."""
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    if isinstance(est, EstimatedTsGraph):
        w = est.stack()
    elif isinstance(est, WeightedTsGraph):
        w = est.weights
    else:
        w = np.asarray(est, dtype=float)
    return np.abs(w) > threshold
