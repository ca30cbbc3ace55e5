"""Hot inner loops: LASSO coordinate descent and SVAR recursion.

Each kernel exists as a jitted loop (``*_jit``) and a numpy twin
(``*_numpy``). The public names dispatch according to
:data:`tssort._accel.USE_NUMBA`.
"""
import numpy as np

from ._accel import USE_NUMBA, njit


@njit
def cd_lasso_path_jit(gram, xty, lambdas, tol, max_sweeps):
    # Covariance-update coordinate descent for
    #   1/2 b'Gb - c'b + lam * |b|_1
    # with warm starts along ``lambdas``.
    p = gram.shape[0]
    n_lam = lambdas.shape[0]
    coefs = np.zeros((n_lam, p))
    sweeps = np.zeros(n_lam, dtype=np.int64)
    beta = np.zeros(p)
    grad = xty.copy()  # c - G b
    for li in range(n_lam):
        lam = lambdas[li]
        for sweep in range(max_sweeps):
            max_delta = 0.0
            for j in range(p):
                gjj = gram[j, j]
                if gjj <= 0.0:
                    continue
                old = beta[j]
                rho = grad[j] + gjj * old
                if rho > lam:
                    new = (rho - lam) / gjj
                elif rho < -lam:
                    new = (rho + lam) / gjj
                else:
                    new = 0.0
                if new != old:
                    delta = new - old
                    for k in range(p):
                        grad[k] -= gram[k, j] * delta
                    beta[j] = new
                    if abs(delta) > max_delta:
                        max_delta = abs(delta)
            sweeps[li] = sweep + 1
            if max_delta < tol:
                break
        coefs[li, :] = beta
    return coefs, sweeps


def cd_lasso_path_numpy(gram, xty, lambdas, tol, max_sweeps):
    p = gram.shape[0]
    coefs = np.zeros((lambdas.shape[0], p))
    sweeps = np.zeros(lambdas.shape[0], dtype=np.int64)
    beta = np.zeros(p)
    grad = xty.copy()
    diag = np.diag(gram)
    for li, lam in enumerate(lambdas):
        for sweep in range(max_sweeps):
            max_delta = 0.0
            for j in range(p):
                gjj = diag[j]
                if gjj <= 0.0:
                    continue
                old = beta[j]
                rho = grad[j] + gjj * old
                new = np.sign(rho) * max(abs(rho) - lam, 0.0) / gjj
                if new != old:
                    delta = new - old
                    grad -= gram[:, j] * delta
                    beta[j] = new
                    max_delta = max(max_delta, abs(delta))
            sweeps[li] = sweep + 1
            if max_delta < tol:
                break
        coefs[li] = beta
    return coefs, sweeps


@njit
def simulate_svar_jit(wc, wl, order, noise, limit):
    # Returns (x, t_overflow); t_overflow == -1 when every value stayed
    # below ``limit`` in magnitude.
    n_steps, d = noise.shape
    tau = wl.shape[0]
    x = np.zeros((n_steps, d))
    for t in range(n_steps):
        for jj in range(d):
            j = order[jj]
            acc = noise[t, j]
            for k in range(1, tau + 1):
                if t - k < 0:
                    break
                for i in range(d):
                    w = wl[k - 1, i, j]
                    if w != 0.0:
                        acc += w * x[t - k, i]
            for i in range(d):
                w = wc[i, j]
                if w != 0.0:
                    acc += w * x[t, i]
            if not abs(acc) <= limit:
                return x, t
            x[t, j] = acc
    return x, -1


def simulate_svar_numpy(wc, wl, order, noise, limit):
    n_steps, d = noise.shape
    tau = wl.shape[0]
    x = np.zeros((n_steps, d))
    for t in range(n_steps):
        acc = noise[t].copy()
        for k in range(1, min(tau, t) + 1):
            acc += x[t - k] @ wl[k - 1]
        row = x[t]
        for j in order:
            row[j] = acc[j] + row @ wc[:, j]
        if not np.all(np.abs(row) <= limit):
            return x, t
    return x, -1


if USE_NUMBA:
    cd_lasso_path = cd_lasso_path_jit
    simulate_svar = simulate_svar_jit
else:
    cd_lasso_path = cd_lasso_path_numpy
    simulate_svar = simulate_svar_numpy
