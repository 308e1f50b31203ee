"""Running sample averages G and b of the regression data.

After instance t the statistics hold

    G = (1/t) * sum_tau beta**(t-tau) * sum_n g g'
    b = (1/t) * sum_tau beta**(t-tau) * sum_n y g

maintained by the recursion ``G <- ((t-1)*beta*G + sum_n g g') / t``. With
``beta = 1`` this is the plain running average.
"""

import numpy as np


class SufficientStats:
    """Normalized (G, b) pair, updated in place one instance at a time."""

    def __init__(self, K, beta=1.0):
        if K < 1:
            raise ValueError("K must be >= 1")
        if not 0.0 <= beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {beta}")
        self.K = int(K)
        self.beta = float(beta)
        self.t = 0
        self.G = np.zeros((self.K, self.K))
        self.b = np.zeros(self.K)

    def copy(self):
        new = object.__new__(type(self))
        new.__dict__.update(self.__dict__)
        new.G = self.G.copy()
        new.b = self.b.copy()
        return new

    def _check(self, samples):
        t = self.t + 1
        for s in samples:
            if s.g.shape != (self.K,):
                raise ValueError(f"regressor of length {s.g.shape[0]} does not match K={self.K}")
            if s.time != t:
                raise ValueError(f"sample time {s.time} is not the next instance {t}")

    def update(self, samples):
        """Fold in all samples of the next instance and return ``self``."""
        samples = list(samples)
        self._check(samples)
        t = self.t + 1
        outer = np.zeros((self.K, self.K))
        cross = np.zeros(self.K)
        for s in samples:
            outer += np.outer(s.g, s.g)
            cross += s.y * s.g
        w = (t - 1) * self.beta
        G = (w * self.G + outer) / t
        self.G = 0.5 * (G + G.T)
        self.b = (w * self.b + cross) / t
        self.t = t
        return self

    def max_eigenvalue(self):
        return max_eigenvalue(self.G)

    def dump(self, path):
        """Write a CSV snapshot: a ``K=..,t=..,beta=..`` header, K rows of G, one row of b."""
        with open(path, "w") as fh:
            fh.write(f"K={self.K},t={self.t},beta={self.beta!r}\n")
            for row in self.G:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
            fh.write(",".join(repr(float(v)) for v in self.b) + "\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            header = dict(kv.split("=") for kv in fh.readline().strip().split(","))
            rows = [list(map(float, line.split(","))) for line in fh if line.strip()]
        K = int(header["K"])
        if len(rows) != K + 1 or any(len(r) != K for r in rows):
            raise ValueError(f"snapshot body does not match K={K}")
        out = cls(K, beta=float(header["beta"]))
        out.t = int(header["t"])
        out.G = np.array(rows[:K])
        out.b = np.array(rows[K])
        return out


class NodePartialStats(SufficientStats):
    """Statistics built from one sensor's own samples only."""

    def __init__(self, sensor_id, K, beta=1.0):
        super().__init__(K, beta)
        self.sensor_id = sensor_id

    def update(self, samples):
        samples = list(samples)
        for s in samples:
            if s.sensor_id != self.sensor_id:
                raise ValueError(f"node {self.sensor_id} was handed a sample of sensor {s.sensor_id}")
        return super().update(samples)


def update_partial(node, samples):
    return node.update(samples)


def batch_stats(history, K, beta=1.0):
    """(G, b) of the instances in ``history`` computed directly from the definition.

    ``history`` is a sequence of per-instance sample lists.
    """
    t = len(history)
    G = np.zeros((K, K))
    b = np.zeros(K)
    for tau, samples in enumerate(history, start=1):
        w = beta ** (t - tau)
        for s in samples:
            G += w * np.outer(s.g, s.g)
            b += w * s.y * s.g
    return G / t, b / t


def max_eigenvalue(G):
    return float(np.linalg.eigvalsh(G)[-1])
