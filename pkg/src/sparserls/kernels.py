"""Backend selection for the hot inner loops.

The compiled extension ``_ckernels`` is preferred. Setting the environment
variable ``SPARSERLS_PURE_PYTHON=1`` before import forces the pure-Python
implementation, which is also used when the extension is not built.
"""

import os

import numpy as np

from . import _pykernels

if os.environ.get("SPARSERLS_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"


def _as_f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def cd_lasso(G, b, mu, x0, tol, max_sweeps, backend=None):
    """Cyclic coordinate minimization of ``0.5 x'Gx - b'x + sum(mu*|x|)``.

    Returns ``(x, sweeps, converged, objective)``. Stops once a full sweep
    decreases the objective by at most ``tol * (1 + |objective|)``.
    """
    impl = _pick(backend)
    x, sweeps, converged, obj = impl.cd_lasso(
        _as_f64(G), _as_f64(b), _as_f64(mu), _as_f64(x0), float(tol), int(max_sweeps))
    return np.asarray(x), int(sweeps), bool(converged), float(obj)


def exact_linesearch(quad, lin, x, d, mu, backend=None):
    """Minimize ``0.5*quad*g**2 + lin*g + sum(mu*(|x+g*d| - |x|))`` on [0, 1].

    ``quad`` must be nonnegative. Ties resolve to the smallest minimizer.
    """
    impl = _pick(backend)
    return float(impl.exact_linesearch(float(quad), float(lin), _as_f64(x), _as_f64(d), _as_f64(mu)))


def _pick(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _pykernels
    if backend == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown backend {backend!r}")


def cython_available():
    try:
        from . import _ckernels  # noqa: F401
    except ImportError:
        return False
    return True
