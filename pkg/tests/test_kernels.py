"""The jitted kernels and their numpy twins must agree."""
import numpy as np
import pytest

from tssort import kernels
from tssort._accel import HAVE_NUMBA
from tssort.graphs import GraphGenConfig, generate_er_tsgraph, topological_order
from tssort.svar import is_stable


def test_lasso_kernels_agree():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(300, 12))
    y = x[:, :3] @ [1.0, -2.0, 0.5] + rng.normal(size=300)
    x = (x - x.mean(0)) / x.std(0)
    gram, xty = x.T @ x / 300, x.T @ (y - y.mean()) / 300
    lams = np.geomspace(np.abs(xty).max(), np.abs(xty).max() * 1e-3, 20)
    a, sa = kernels.cd_lasso_path_jit(gram, xty, lams, 1e-9, 10_000)
    b, sb = kernels.cd_lasso_path_numpy(gram, xty, lams, 1e-9, 10_000)
    np.testing.assert_allclose(a, b, atol=1e-12)
    assert np.array_equal(sa, sb)


def test_simulation_kernels_agree():
    rng = np.random.default_rng(1)
    for _ in range(20):
        g = generate_er_tsgraph(GraphGenConfig(d=6, d_c=1, d_l=1, tau_max=3), rng)
        if not is_stable(g):
            continue
        noise = rng.normal(size=(400, 6))
        order = np.array(topological_order(g.contemporaneous), dtype=np.int64)
        args = (np.ascontiguousarray(g.contemporaneous), np.ascontiguousarray(g.lagged), order, noise, 1e12)
        xa, ta = kernels.simulate_svar_jit(*args)
        xb, tb = kernels.simulate_svar_numpy(*args)
        assert ta == tb == -1
        np.testing.assert_allclose(xa, xb, rtol=1e-10, atol=1e-10)


def test_overflow_flag_agrees():
    wc = np.zeros((1, 1))
    wl = np.full((1, 1, 1), 3.0)
    noise = np.ones((100, 1))
    order = np.zeros(1, dtype=np.int64)
    _, ta = kernels.simulate_svar_jit(wc, wl, order, noise, 1e12)
    _, tb = kernels.simulate_svar_numpy(wc, wl, order, noise, 1e12)
    assert ta == tb > 0


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
def test_numba_dispatch_default():
    import os

    if os.environ.get("TSSORT_DISABLE_NUMBA"):
        assert kernels.cd_lasso_path is kernels.cd_lasso_path_numpy
    else:
        assert kernels.cd_lasso_path is kernels.cd_lasso_path_jit
