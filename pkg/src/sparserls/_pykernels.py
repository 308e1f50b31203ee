"""Pure-Python versions of the compiled kernels.

Used when the extension is not built, or when ``SPARSERLS_PURE_PYTHON=1``.
Same signatures and return values as ``_ckernels``.
"""

import numpy as np


def _objective(G, b, mu, x):
    Gx = G @ x
    return 0.5 * x @ Gx - b @ x + mu @ np.abs(x), Gx


def cd_lasso(G, b, mu, x0, tol, max_sweeps):
    K = G.shape[0]
    x = np.array(x0, dtype=np.float64, copy=True)
    cur, Gx = _objective(G, b, mu, x)
    diag = np.diag(G)
    converged = False
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        for k in range(K):
            gkk = diag[k]
            if gkk <= 0.0:
                new = 0.0
            else:
                r = b[k] - Gx[k] + gkk * x[k]
                if r > mu[k]:
                    new = (r - mu[k]) / gkk
                elif r < -mu[k]:
                    new = (r + mu[k]) / gkk
                else:
                    new = 0.0
            delta = new - x[k]
            if delta != 0.0:
                x[k] = new
                Gx += delta * G[k]
        prev = cur
        cur, Gx = _objective(G, b, mu, x)
        if prev - cur <= tol * (1.0 + abs(cur)):
            converged = True
            break
    return x, sweeps, converged, float(cur)


def exact_linesearch(quad, lin, x, d, mu):
    moving = d != 0.0
    xm, dm, mm = x[moving], d[moving], mu[moving]

    # right-derivative of the l1 part at gamma = 0+
    at_zero = xm == 0.0
    slope = float(np.sum(mm[at_zero] * np.abs(dm[at_zero]))
                  + np.sum(mm[~at_zero] * dm[~at_zero] * np.sign(xm[~at_zero])))

    crossing = (~at_zero) & (np.sign(xm) != np.sign(dm))
    bps = -xm[crossing] / dm[crossing]
    jumps = 2.0 * mm[crossing] * np.abs(dm[crossing])
    keep = bps < 1.0
    bps, jumps = bps[keep], jumps[keep]
    order = np.argsort(bps, kind="stable")
    bps, jumps = bps[order], jumps[order]

    lo = 0.0
    m = len(bps)
    for i in range(m + 1):
        hi = bps[i] if i < m else 1.0
        if quad * lo + lin + slope >= 0.0:
            return lo
        if quad * hi + lin + slope >= 0.0:
            return min(max(-(lin + slope) / quad, lo), hi)
        if i < m:
            slope += jumps[i]
            lo = hi
    return 1.0
