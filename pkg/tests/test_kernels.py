import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sparserls import kernels
from sparserls.invariants import random_instance

needs_cython = pytest.mark.skipif(not kernels.cython_available(), reason="compiled kernels not built")


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.cd_lasso(np.eye(2), np.ones(2), np.zeros(2), np.zeros(2), 1e-12, 10, backend="fortran")


@pytest.mark.parametrize("backend", ["python", pytest.param("cython", marks=needs_cython)])
def test_cd_lasso_diagonal(backend):
    G = np.diag([2.0, 1.0])
    x, sweeps, conv, obj = kernels.cd_lasso(G, np.array([1.0, 0.05]), np.full(2, 0.1),
                                            np.zeros(2), 1e-12, 100, backend=backend)
    assert conv and x == pytest.approx([0.45, 0.0])


@needs_cython
@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_backends_agree(seed):
    s, x, xh, mu = random_instance(np.random.default_rng(seed))
    mu_v = np.full(s.K, mu)
    a = kernels.cd_lasso(s.G, s.b, mu_v, x, 1e-12, 10_000, backend="python")
    c = kernels.cd_lasso(s.G, s.b, mu_v, x, 1e-12, 10_000, backend="cython")
    assert a[3] == pytest.approx(c[3], rel=1e-9, abs=1e-12)
    d = xh - x
    args = (d @ s.G @ d, (s.G @ x - s.b) @ d, x, d, mu_v)
    assert kernels.exact_linesearch(*args, backend="python") == pytest.approx(
        kernels.exact_linesearch(*args, backend="cython"), abs=1e-12)
