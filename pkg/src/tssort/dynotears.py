"""Continuous structure learning for SVAR graphs.

Minimises

    1/(2n) |X - X Wc - Xl Wl|_F^2 + lambda1 |Wc|_1 + lambda2 |Wl|_1

subject to h(Wc) = tr exp(Wc o Wc) - d = 0, using an augmented Lagrangian
outer loop and L-BFGS-B on the positive/negative split of the weights.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.optimize as sopt

from .baselines import EstimatedTsGraph
from .errors import InsufficientSamples, InvalidConfig, NotConverged
from .graphs import SummaryGraph, is_acyclic, strongly_connected_components
from .sortability import lagged_design
from .svar import Panel


@dataclass(frozen=True)
class DynoConfig:
    lambda1: float = 0.05
    lambda2: float = 0.05
    threshold: float = 0.1
    max_outer: int = 100
    h_tol: float = 1e-8
    rho_max: float = 1e16
    rho_init: float = 1.0
    max_inner: int = 1000

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise InvalidConfig("lambda1 and lambda2 must be >= 0")
        if self.threshold < 0:
            raise InvalidConfig("threshold must be >= 0")
        if not self.h_tol > 0:
            raise InvalidConfig("h_tol must be > 0")
        if self.max_outer < 1:
            raise InvalidConfig("max_outer must be >= 1")


def h_dagness(w):
    """``(tr exp(W o W) - d, grad)``; zero exactly on acyclic patterns."""
    w = np.asarray(w, dtype=float)
    e = sla.expm(w * w)
    return float(np.trace(e) - w.shape[0]), e.T * 2.0 * w


def smooth_objective(wc, wl, xtx, ztx, ztz, n, rho, alpha):
    """Least-squares loss plus the augmented-Lagrangian terms.

    Works from Gram blocks of Z = [X, Xl]: ``xtx = X'X``, ``ztx = Z'X``,
    ``ztz = Z'Z``. Returns ``(value, grad_wc, grad_wl)``.
    """
    d = wc.shape[0]
    w = np.vstack([wc, wl])
    zzw = ztz @ w
    loss = 0.5 / n * (np.trace(xtx) - 2.0 * np.sum(w * ztx) + np.sum(w * zzw))
    g = (zzw - ztx) / n
    h, gh = h_dagness(wc)
    value = loss + 0.5 * rho * h * h + alpha * h
    g_c = g[:d] + (rho * h + alpha) * gh
    return value, g_c, g[d:]


@dataclass
class DynoResult:
    estimate: EstimatedTsGraph
    raw: EstimatedTsGraph
    converged: bool
    h: float
    n_outer: int
    rho: float
    removed_edges: list = field(default_factory=list)
    trace: list = field(default_factory=list, repr=False)

    def meta(self) -> dict:
        return {
            "converged": self.converged,
            "h": self.h,
            "outer_iterations": self.n_outer,
            "rho": self.rho,
            "removed_edges": [list(e) for e in self.removed_edges],
        }


def repair_acyclic(wc):
    """Drop the weakest edge lying on a cycle until Wc is acyclic.

    Returns the repaired copy and the removed ``(i, j)`` edges.
    """
    wc = np.array(wc, dtype=float)
    removed = []
    while not is_acyclic(wc):
        best = None
        for comp in strongly_connected_components(SummaryGraph(wc != 0)):
            if len(comp) == 1 and wc[comp[0], comp[0]] == 0:
                continue
            sub = np.abs(wc[np.ix_(comp, comp)])
            sub[sub == 0] = np.inf
            a, b = np.unravel_index(np.argmin(sub), sub.shape)
            cand = (sub[a, b], comp[a], comp[b])
            if best is None or cand < best:
                best = cand
        _, i, j = best
        wc[i, j] = 0.0
        removed.append((int(i), int(j)))
    return wc, removed


def fit(p: Panel | np.ndarray, tau_max: int, cfg: DynoConfig | None = None) -> DynoResult:
    cfg = cfg or DynoConfig()
    x_all = p.data if isinstance(p, Panel) else np.asarray(p, dtype=float)
    T, d = x_all.shape
    if T <= d * (tau_max + 1) + 1:
        raise InsufficientSamples(f"T={T} too small for d={d}, tau_max={tau_max}")
    x, xl = lagged_design(x_all - x_all.mean(axis=0), tau_max)
    n = x.shape[0]
    z = np.hstack([x, xl])
    xtx, ztx, ztz = x.T @ x, z.T @ x, z.T @ z
    nc, nl = d * d, d * tau_max * d

    def unpack(v):
        wc = (v[:nc] - v[nc : 2 * nc]).reshape(d, d)
        off = 2 * nc
        wl = (v[off : off + nl] - v[off + nl :]).reshape(d * tau_max, d)
        return wc, wl

    def objective(v, rho, alpha):
        wc, wl = unpack(v)
        val, g_c, g_l = smooth_objective(wc, wl, xtx, ztx, ztz, n, rho, alpha)
        l1 = cfg.lambda1 * v[: 2 * nc].sum() + cfg.lambda2 * v[2 * nc :].sum()
        g_c = g_c.ravel()
        g_l = g_l.ravel()
        grad = np.concatenate(
            [g_c + cfg.lambda1, -g_c + cfg.lambda1, g_l + cfg.lambda2, -g_l + cfg.lambda2]
        )
        return val + l1, grad

    diag = np.eye(d, dtype=bool).ravel()
    bnd_c = [(0.0, 0.0) if on_diag else (0.0, None) for on_diag in diag]
    bounds = bnd_c + bnd_c + [(0.0, None)] * (2 * nl)

    v = np.zeros(2 * nc + 2 * nl)
    rho, alpha, h = cfg.rho_init, 0.0, np.inf
    trace = []
    n_outer = 0
    for n_outer in range(1, cfg.max_outer + 1):
        while True:
            solve_trace = []
            res = sopt.minimize(
                objective,
                v,
                args=(rho, alpha),
                jac=True,
                method="L-BFGS-B",
                bounds=bounds,
                options={"maxiter": cfg.max_inner},
                callback=lambda intermediate_result: solve_trace.append(intermediate_result.fun),
            )
            trace.append(np.array(solve_trace))
            v_new = res.x
            h_new, _ = h_dagness(unpack(v_new)[0])
            if h_new > 0.25 * h and rho < cfg.rho_max:
                rho *= 10.0
            else:
                break
        v, h = v_new, h_new
        alpha += rho * h
        if h <= cfg.h_tol or rho >= cfg.rho_max:
            break

    converged = bool(h <= cfg.h_tol)
    wc, wl = unpack(v)
    wl = wl.reshape(tau_max, d, d)
    raw = EstimatedTsGraph(wc.copy(), wl.copy())
    wc = np.where(np.abs(wc) > cfg.threshold, wc, 0.0)
    wl = np.where(np.abs(wl) > cfg.threshold, wl, 0.0)
    wc, removed = repair_acyclic(wc)
    if not converged:
        warnings.warn(
            f"acyclicity not reached: h={h:.3g} after {n_outer} outer iterations (rho={rho:.3g})",
            NotConverged,
            stacklevel=2,
        )
    return DynoResult(
        estimate=EstimatedTsGraph(wc, wl),
        raw=raw,
        converged=converged,
        h=float(h),
        n_outer=n_outer,
        rho=float(rho),
        removed_edges=removed,
        trace=trace,
    )
