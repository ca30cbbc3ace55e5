"""Time-series graphs, summary graphs and the reachability machinery used by
the sortability scores.

Weights are stored as a stack ``weights[lag, src, dst]``: entry
``weights[k, i, j]`` is the coefficient of ``X^i_{t-k}`` in the equation
for ``X^j_t``. Slice 0 is the contemporaneous matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfig, InvalidGraph


def topological_order(adj) -> list[int] | None:
    """Kahn's algorithm on the nonzero pattern; ``None`` if there is a cycle.

    Ties are broken by node index so the order is deterministic.
    """
    adj = np.asarray(adj) != 0
    d = adj.shape[0]
    indeg = adj.sum(axis=0).astype(int)
    ready = [j for j in range(d) if indeg[j] == 0]
    order = []
    while ready:
        i = ready.pop(0)
        order.append(i)
        for j in np.flatnonzero(adj[i]):
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(int(j))
        ready.sort()
    if len(order) < d:
        return None
    return order


def is_acyclic(adj) -> bool:
    return topological_order(adj) is not None


@dataclass(frozen=True, eq=False)
class WeightedTsGraph:
    weights: np.ndarray
    check_acyclic: bool = field(default=True, repr=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim == 2:
            w = w[None]
        if w.ndim != 3 or w.shape[1] != w.shape[2] or w.shape[1] < 1:
            raise InvalidGraph(f"weights must have shape (tau_max+1, d, d), got {w.shape}")
        if not np.all(np.isfinite(w)):
            raise InvalidGraph("weights contain non-finite entries")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.check_acyclic and not is_acyclic(w[0]):
            raise InvalidGraph("contemporaneous matrix is cyclic")

    @property
    def d(self) -> int:
        return self.weights.shape[1]

    @property
    def tau_max(self) -> int:
        return self.weights.shape[0] - 1

    @property
    def contemporaneous(self) -> np.ndarray:
        return self.weights[0]

    @property
    def lagged(self) -> np.ndarray:
        return self.weights[1:]

    def pattern(self) -> np.ndarray:
        return self.weights != 0

    def __eq__(self, other):
        if not isinstance(other, WeightedTsGraph):
            return NotImplemented
        return self.weights.shape == other.weights.shape and bool(
            np.array_equal(self.weights, other.weights)
        )

    def to_dict(self) -> dict:
        return {"d": self.d, "tau_max": self.tau_max, "weights": self.weights.tolist()}


@dataclass(frozen=True, eq=False)
class SummaryGraph:
    adj: np.ndarray

    def __post_init__(self):
        a = np.array(self.adj, dtype=bool)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidGraph(f"adjacency must be square, got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "adj", a)

    @property
    def d(self) -> int:
        return self.adj.shape[0]

    def edges(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self.adj))]

    def transpose(self) -> "SummaryGraph":
        return SummaryGraph(self.adj.T)

    def __eq__(self, other):
        if not isinstance(other, SummaryGraph):
            return NotImplemented
        return bool(np.array_equal(self.adj, other.adj))

    @classmethod
    def from_edges(cls, d: int, edges) -> "SummaryGraph":
        adj = np.zeros((d, d), dtype=bool)
        for i, j in edges:
            adj[i, j] = True
        return cls(adj)


def summary_of(g: WeightedTsGraph, lags=None) -> SummaryGraph:
    """Collapse the lag axis. ``lags`` restricts which slices contribute."""
    w = g.weights if lags is None else g.weights[list(lags)]
    if w.shape[0] == 0:
        return SummaryGraph(np.zeros((g.d, g.d), dtype=bool))
    return SummaryGraph(np.any(w != 0, axis=0))


def strongly_connected_components(g: SummaryGraph) -> list[list[int]]:
    """Tarjan's lowlink algorithm, iterative.

    Components come out in reverse topological order of the condensation
    (sinks first); nodes inside a component are sorted.
    """
    adj = g.adj
    d = g.d
    succ = [np.flatnonzero(adj[v]).tolist() for v in range(d)]
    index = [-1] * d
    low = [0] * d
    on_stack = [False] * d
    stack = []
    comps = []
    counter = 0
    for root in range(d):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pos = work.pop()
            if pos == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            descended = False
            nbrs = succ[v]
            while pos < len(nbrs):
                w = nbrs[pos]
                pos += 1
                if index[w] == -1:
                    work.append((v, pos))
                    work.append((w, 0))
                    descended = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if descended:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comps


def reachability(g: SummaryGraph) -> np.ndarray:
    """``reach[i, j]`` is True iff a directed path of length >= 1 leads i -> j.

    Computed on the condensation DAG: components are visited sinks first, so
    every successor component's closure is final when it is needed.
    """
    d = g.d
    comps = strongly_connected_components(g)
    comp_of = np.empty(d, dtype=int)
    for c, members in enumerate(comps):
        comp_of[members] = c
    n_comp = len(comps)
    # creach[c] : nodes reachable from any member of component c via >= 1 edge
    creach = np.zeros((n_comp, d), dtype=bool)
    for c, members in enumerate(comps):
        row = creach[c]
        cyclic = len(members) > 1 or g.adj[members[0], members[0]]
        if cyclic:
            row[members] = True
        for v in members:
            for w in np.flatnonzero(g.adj[v]):
                cw = comp_of[w]
                row[w] = True
                if cw != c:
                    row |= creach[cw]
    return creach[comp_of]


def admissible_matrix(g: SummaryGraph) -> np.ndarray:
    reach = reachability(g)
    return reach & ~reach.T


def all_connected_matrix(g: SummaryGraph) -> np.ndarray:
    reach = reachability(g)
    np.fill_diagonal(reach, False)
    return reach


def admissible_pairs(g: SummaryGraph) -> set[tuple[int, int]]:
    """Ordered pairs (i, j) with a path i => j and no path j => i."""
    return {(int(i), int(j)) for i, j in zip(*np.nonzero(admissible_matrix(g)))}


def all_connected_pairs(g: SummaryGraph) -> set[tuple[int, int]]:
    """Ordered pairs (i, j), i != j, with a path i => j (cyclic pairs kept)."""
    return {(int(i), int(j)) for i, j in zip(*np.nonzero(all_connected_matrix(g)))}


@dataclass(frozen=True)
class GraphGenConfig:
    d: int
    d_c: float = 4.0
    d_l: float = 1.0
    tau_max: int = 3
    delta: float = 1.1
    contemp_range: tuple[float, float] = (0.5, 2.0)
    lag_base_range: tuple[float, float] = (0.3, 0.5)
    seed: int | None = None

    def __post_init__(self):
        if self.d < 2:
            raise InvalidConfig(f"d must be >= 2, got {self.d}")
        if self.tau_max < 0:
            raise InvalidConfig(f"tau_max must be >= 0, got {self.tau_max}")
        if not self.delta > 1:
            raise InvalidConfig(f"delta must be > 1, got {self.delta}")
        if self.d_c < 0 or self.d_l < 0:
            raise InvalidConfig("degrees must be non-negative")
        if self.d_c > self.d - 1:
            raise InvalidConfig(f"d_c={self.d_c} exceeds d-1={self.d - 1}")
        if self.d_l > self.d:
            raise InvalidConfig(f"d_l={self.d_l} exceeds d={self.d}")
        for name in ("contemp_range", "lag_base_range"):
            lo, hi = getattr(self, name)
            if not 0 < lo < hi:
                raise InvalidConfig(f"{name} needs 0 < low < high, got {(lo, hi)}")


def _signed_uniform(rng, mask, lo, hi):
    n = int(mask.sum())
    mag = rng.uniform(lo, hi, size=n)
    sign = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    out = np.zeros(mask.shape)
    out[mask] = sign * mag
    return out


def generate_er_tsgraph(cfg: GraphGenConfig, rng=None) -> WeightedTsGraph:
    """Random ER-style ts-graph.

    The contemporaneous slice is drawn on the strict lower triangle with
    edge probability ``d_c/(d-1)`` and then node-permuted. Each lagged slice
    draws every entry (self-lags included) with probability ``d_l/d``; the
    magnitude range for lag ``k`` is the base range scaled by
    ``delta**-(k-1)``.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    d = cfg.d
    w = np.zeros((cfg.tau_max + 1, d, d))

    mask = np.tril(rng.random((d, d)) < cfg.d_c / (d - 1), k=-1)
    wc = _signed_uniform(rng, mask, *cfg.contemp_range)
    perm = rng.permutation(d)
    w[0] = wc[np.ix_(perm, perm)]

    lo, hi = cfg.lag_base_range
    for k in range(1, cfg.tau_max + 1):
        alpha = 1.0 / cfg.delta ** (k - 1)
        mask = rng.random((d, d)) < cfg.d_l / d
        w[k] = _signed_uniform(rng, mask, lo * alpha, hi * alpha)
    return WeightedTsGraph(w)
