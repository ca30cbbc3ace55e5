"""Stationary SVAR simulation on top of a :class:`WeightedTsGraph`."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (
    DegenerateColumn,
    InvalidConfig,
    NumericalOverflow,
    SingularContemporaneous,
    Unstable,
)
from .graphs import WeightedTsGraph, topological_order

OVERFLOW_LIMIT = 1e12
STABILITY_MARGIN = 1e-6


@dataclass(frozen=True, eq=False)
class Panel:
    """T x d observations, rows are consecutive time steps."""

    data: np.ndarray
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        x = np.array(self.data, dtype=float)
        if x.ndim != 2:
            raise InvalidConfig(f"panel data must be 2-D, got shape {x.shape}")
        if x.shape[0] < 2:
            raise InvalidConfig("panel needs at least 2 rows")
        x.setflags(write=False)
        object.__setattr__(self, "data", x)
        names = tuple(self.names) if self.names else tuple(f"X{i}" for i in range(x.shape[1]))
        if len(names) != x.shape[1]:
            raise InvalidConfig(f"{len(names)} names for {x.shape[1]} columns")
        object.__setattr__(self, "names", names)

    @property
    def T(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    def with_data(self, data) -> "Panel":
        return Panel(data, self.names)


@dataclass(frozen=True)
class SimConfig:
    n: int = 500
    burn_in: int = 1000
    noise_std: tuple[float, ...] | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.n < 2:
            raise InvalidConfig(f"n must be >= 2, got {self.n}")
        if self.burn_in < 0:
            raise InvalidConfig(f"burn_in must be >= 0, got {self.burn_in}")
        if self.noise_std is not None and not all(s > 0 for s in self.noise_std):
            raise InvalidConfig("noise_std entries must be positive")


def reduced_form(g: WeightedTsGraph) -> np.ndarray:
    """Lag matrices ``B_k`` of x_t = sum_k B_k x_{t-k} + (I - Wc')^-1 eta_t."""
    d = g.d
    a = np.eye(d) - g.contemporaneous.T
    if np.linalg.cond(a) > 1e12:
        raise SingularContemporaneous("I - Wc' is numerically singular")
    return np.stack([np.linalg.solve(a, wk.T) for wk in g.lagged]) if g.tau_max else np.zeros((0, d, d))


def companion(g: WeightedTsGraph) -> np.ndarray:
    b = reduced_form(g)
    d, tau = g.d, g.tau_max
    c = np.zeros((d * tau, d * tau))
    if tau == 0:
        return c
    c[:d, :] = np.hstack(list(b))
    c[d:, :-d] = np.eye(d * (tau - 1))
    return c


def spectral_radius(g: WeightedTsGraph) -> float:
    if g.tau_max == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(companion(g)))))


def is_stable(g: WeightedTsGraph, margin: float = STABILITY_MARGIN) -> bool:
    return spectral_radius(g) < 1.0 - margin


def simulate(g: WeightedTsGraph, cfg: SimConfig, rng=None, names=None) -> Panel:
    """Run the evolution rule for ``burn_in + n`` steps and keep the last ``n``.

    Contemporaneous effects are resolved in topological order of Wc, and
    pre-sample values are zero.
    """
    if not is_stable(g):
        raise Unstable(f"spectral radius {spectral_radius(g):.6g} >= 1")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    std = np.ones(g.d) if cfg.noise_std is None else np.asarray(cfg.noise_std, dtype=float)
    if std.shape != (g.d,):
        raise InvalidConfig(f"noise_std has {std.size} entries for d={g.d}")
    n_steps = cfg.burn_in + cfg.n
    noise = rng.standard_normal((n_steps, g.d)) * std
    order = np.asarray(topological_order(g.contemporaneous), dtype=np.int64)
    wl = np.ascontiguousarray(g.lagged) if g.tau_max else np.zeros((0, g.d, g.d))
    x, t_bad = kernels.simulate_svar(
        np.ascontiguousarray(g.contemporaneous), wl, order, noise, OVERFLOW_LIMIT
    )
    if t_bad >= 0:
        raise NumericalOverflow(f"|X| exceeded {OVERFLOW_LIMIT:g} at step {t_bad}")
    return Panel(x[cfg.burn_in:], names or ())


def standardize(p: Panel) -> Panel:
    """Zero mean, unit sample variance (divisor T-1) per column."""
    x = p.data
    flat = np.flatnonzero(np.ptp(x, axis=0) == 0)
    if flat.size:
        raise DegenerateColumn(f"constant column(s): {[p.names[i] for i in flat]}")
    z = (x - x.mean(axis=0)) / x.std(axis=0, ddof=1)
    return p.with_data(z)
