"""Least squares and BIC-selected LASSO."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NonFinite


def ols(design, target):
    """Minimum-norm least squares. Returns ``(coef, rss)``."""
    x = np.asarray(design, dtype=float)
    y = np.asarray(target, dtype=float)
    coef, *_ = np.linalg.lstsq(x, y, rcond=None)
    resid = y - x @ coef
    return coef, float(resid @ resid)


def soft_threshold(rho, lam):
    return np.sign(rho) * np.maximum(np.abs(rho) - lam, 0.0)


def bic(rss: float, n: int, k: int) -> float:
    rss = max(rss, np.finfo(float).tiny)
    return n * np.log(rss / n) + k * np.log(n)


@dataclass
class LassoFit:
    coefficients: np.ndarray
    intercept: float
    lam: float
    bic: float
    rss: float
    path_lambdas: np.ndarray
    path_bic: np.ndarray

    @property
    def n_nonzero(self) -> int:
        return int(np.count_nonzero(self.coefficients))


def lasso_path(design, target, path_size=30, eps=1e-3, tol=1e-7, max_sweeps=100_000):
    """Coordinate-descent LASSO path on a standardised copy of the design.

    Objective per penalty: ``1/(2T) |y - Xb|^2 + lam |b|_1`` with X centred
    and scaled to unit (population) variance and y centred. Returns
    ``(lambdas, coef_std, x_mean, x_scale, y_mean)``; columns with zero
    variance get scale 0 and always a zero coefficient.
    """
    x = np.asarray(design, dtype=float)
    y = np.asarray(target, dtype=float)
    if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.shape[0]:
        raise ValueError(f"shape mismatch: design {x.shape}, target {y.shape}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise NonFinite("design or target contains non-finite values")
    if path_size < 2:
        raise ValueError("path_size must be >= 2")
    n = x.shape[0]
    x_mean = x.mean(axis=0)
    y_mean = y.mean()
    xc = x - x_mean
    yc = y - y_mean
    scale = xc.std(axis=0)
    live = scale > 1e-12 * np.maximum(1.0, np.abs(x_mean))
    scale = np.where(live, scale, 0.0)
    xs = np.zeros_like(xc)
    xs[:, live] = xc[:, live] / scale[live]

    gram = xs.T @ xs / n
    xty = xs.T @ yc / n
    lam_max = float(np.max(np.abs(xty))) if xty.size else 0.0
    if lam_max > 0:
        lambdas = np.geomspace(lam_max, lam_max * eps, path_size)
    else:
        lambdas = np.zeros(path_size)
    coefs, _ = kernels.cd_lasso_path(
        np.ascontiguousarray(gram), xty, lambdas, float(tol), int(max_sweeps)
    )
    return lambdas, coefs, x_mean, scale, y_mean


def lasso_bic(design, target, path_size=30, eps=1e-3, tol=1e-7, max_sweeps=100_000) -> LassoFit:
    """Fit the LASSO path and return the point minimising
    ``T ln(rss/T) + k ln T`` (k = nonzero coefficients, intercept unpenalised
    and not counted)."""
    x = np.asarray(design, dtype=float)
    y = np.asarray(target, dtype=float)
    lambdas, coefs_std, x_mean, scale, y_mean = lasso_path(
        x, y, path_size=path_size, eps=eps, tol=tol, max_sweeps=max_sweeps
    )
    n = x.shape[0]
    inv = np.divide(1.0, scale, out=np.zeros_like(scale), where=scale > 0)
    coefs = coefs_std * inv
    intercepts = y_mean - coefs @ x_mean
    resid = y[None, :] - coefs @ x.T - intercepts[:, None]
    rss = np.einsum("ij,ij->i", resid, resid)
    k = np.count_nonzero(coefs, axis=1)
    bics = np.array([bic(r, n, kk) for r, kk in zip(rss, k)])
    best = int(np.argmin(bics))
    return LassoFit(
        coefficients=coefs[best],
        intercept=float(intercepts[best]),
        lam=float(lambdas[best]),
        bic=float(bics[best]),
        rss=float(rss[best]),
        path_lambdas=lambdas,
        path_bic=bics,
    )
