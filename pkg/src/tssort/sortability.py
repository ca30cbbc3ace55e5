"""Sortability criteria and scores.

Three scoring modes are supported:

``admissible``
    average of :func:`increasing` over pairs (i, j) with i => j and not
    j => i. Pairs inside a cycle carry no ordering information and are
    skipped. This is the score used throughout the experiments.
``all_connected``
    same average over every connected pair, cyclic ones included.
``path_weighted``
    the acyclic-graph score: one term per (i, j, k) such that a path of
    length k leads from i to j, k = 1..d-1.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .errors import InsufficientSamples, InvalidGraph, NoAdmissiblePairs, NonFinite, ShapeMismatch
from .graphs import SummaryGraph, admissible_matrix, all_connected_matrix, is_acyclic
from .regression import ols
from .svar import Panel

TIE_RTOL = 1e-9
MODES = ("admissible", "all_connected", "path_weighted")
CRITERIA = ("variance", "r2")


def increasing(a: float, b: float, rtol: float = TIE_RTOL) -> float:
    if not (math.isfinite(a) and math.isfinite(b)):
        raise NonFinite(f"non-finite criterion values ({a}, {b})")
    if abs(a - b) <= rtol * max(1.0, abs(a), abs(b)):
        return 0.5
    return 1.0 if a < b else 0.0


@dataclass(frozen=True)
class CriterionVector:
    kind: str
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in CRITERIA:
            raise ValueError(f"unknown criterion {self.kind!r}")
        v = np.array(self.values, dtype=float)
        if not np.all(np.isfinite(v)):
            raise NonFinite("criterion values must be finite")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class SortabilityReport:
    score: float
    pairs_total: int
    pairs_increasing: int
    pairs_tied: int
    mode: str
    criterion: str | None = None

    @property
    def fraction(self) -> Fraction:
        """The score as an exact rational."""
        return Fraction(2 * self.pairs_increasing + self.pairs_tied, 2 * self.pairs_total)

    def to_dict(self) -> dict:
        return asdict(self)


def marginal_variance(p: Panel) -> CriterionVector:
    return CriterionVector("variance", p.data.var(axis=0, ddof=1))


def lagged_design(x: np.ndarray, tau_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Aligned ``(current, lags)`` for rows t = tau_max..T-1.

    ``lags`` is lag-major: columns ``(k-1)*d .. k*d-1`` hold ``X_{t-k}``.
    """
    T, d = x.shape
    cur = x[tau_max:]
    if tau_max == 0:
        return cur, np.zeros((T, 0))
    lags = np.hstack([x[tau_max - k : T - k] for k in range(1, tau_max + 1)])
    return cur, lags


def r2_scores(p: Panel, tau_max: int) -> CriterionVector:
    """R^2 of each X^i_t regressed (with intercept) on the other current
    values and all nodes' values at lags 1..tau_max."""
    T, d = p.data.shape
    if T <= d * (tau_max + 1) + 1:
        raise InsufficientSamples(f"T={T} too small for d={d}, tau_max={tau_max}")
    cur, lags = lagged_design(p.data, tau_max)
    cur = cur - cur.mean(axis=0)
    lags = lags - lags.mean(axis=0)
    vals = np.empty(d)
    for i in range(d):
        design = np.hstack([np.delete(cur, i, axis=1), lags])
        y = cur[:, i]
        tss = float(y @ y)
        if tss == 0.0:
            vals[i] = 0.0
            continue
        _, rss = ols(design, y)
        vals[i] = 1.0 - rss / tss
    return CriterionVector("r2", np.clip(vals, 0.0, 1.0))


def criterion(p: Panel, kind: str, tau_max: int = 0) -> CriterionVector:
    if kind in ("variance", "var"):
        return marginal_variance(p)
    if kind == "r2":
        return r2_scores(p, tau_max)
    raise ValueError(f"unknown criterion {kind!r}")


def path_counts(g: SummaryGraph) -> np.ndarray:
    """Number of lengths k in 1..d-1 for which some i -> j path of length k
    exists. Requires an acyclic graph."""
    if not is_acyclic(g.adj):
        raise InvalidGraph("path_weighted mode needs an acyclic summary graph")
    a = g.adj.astype(np.int64)
    counts = np.zeros_like(a)
    walk = a.copy()
    for _ in range(1, g.d):
        if not walk.any():
            break
        counts += walk
        walk = ((walk @ a) > 0).astype(np.int64)
    return counts


def _pair_weights(g: SummaryGraph, mode: str) -> np.ndarray:
    if mode == "admissible":
        return admissible_matrix(g).astype(np.int64)
    if mode == "all_connected":
        return all_connected_matrix(g).astype(np.int64)
    if mode == "path_weighted":
        return path_counts(g)
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def sortability_score(cri, g: SummaryGraph, mode: str = "admissible") -> SortabilityReport:
    if isinstance(cri, CriterionVector):
        values, kind = cri.values, cri.kind
    else:
        values, kind = np.asarray(cri, dtype=float), None
    if values.shape != (g.d,):
        raise ShapeMismatch(f"criterion length {values.size} != d={g.d}")
    weights = _pair_weights(g, mode)
    total = inc = tied = 0
    for i, j in zip(*np.nonzero(weights)):
        w = int(weights[i, j])
        s = increasing(values[i], values[j])
        total += w
        if s == 1.0:
            inc += w
        elif s == 0.5:
            tied += w
    if total == 0:
        raise NoAdmissiblePairs(f"no pairs to score in mode {mode!r}")
    return SortabilityReport(
        score=(inc + 0.5 * tied) / total,
        pairs_total=total,
        pairs_increasing=inc,
        pairs_tied=tied,
        mode=mode,
        criterion=kind,
    )


def varsortability(p: Panel, g: SummaryGraph, mode: str = "admissible") -> SortabilityReport:
    return sortability_score(marginal_variance(p), g, mode)


def r2_sortability(p: Panel, g: SummaryGraph, tau_max: int, mode: str = "admissible") -> SortabilityReport:
    return sortability_score(r2_scores(p, tau_max), g, mode)
