"""Sparse ground-truth signals and the linear measurement model.

Randomness is drawn from numpy's PCG64 through ``SeedSequence`` with a fixed
spawn key per purpose, so that a given ``(seed, time, sensor)`` always maps
to the same stream no matter which architecture consumes it:

    (0,)          support and amplitudes of the initial signal
    (1, t)        innovation applied after instance t
    (2, t, n)     regressor and noise of sensor n at instance t
"""

from dataclasses import dataclass, field, fields
import json

import numpy as np

_STREAM_SIGNAL = 0
_STREAM_EVOLVE = 1
_STREAM_SAMPLE = 2


@dataclass(frozen=True, eq=False)
class SparseSignal:
    values: np.ndarray

    @property
    def support(self):
        return frozenset(np.flatnonzero(self.values).tolist())

    @property
    def K(self):
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class RegressionSample:
    g: np.ndarray
    y: float
    sensor_id: int
    time: int


@dataclass
class ScenarioConfig:
    """Parameters of a synthetic streaming scenario.

    ``alpha`` switches on the time-varying signal law when set.
    ``leading_support`` places the nonzeros at the first indices instead of
    a random subset.
    """

    K: int = 100
    N: int = 1
    density: float = 0.1
    noise_variance: float = 0.2
    horizon: int = 1000
    seed: int = 0
    nonnegative: bool = False
    alpha: float | None = None
    leading_support: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.K < 1 or self.N < 1 or self.horizon < 1:
            raise ValueError("K, N and horizon must be >= 1")
        if not 0.0 < self.density <= 1.0:
            raise ValueError(f"density must lie in (0, 1], got {self.density}")
        if self.noise_variance < 0:
            raise ValueError("noise_variance must be >= 0")
        if self.alpha is not None and not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def nnz(self):
        return int(round(self.density * self.K))

    @classmethod
    def from_mapping(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_mapping(json.load(fh))

    def to_mapping(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def stream(seed, *key):
    """Independent generator for the stream identified by ``key``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))


def generate_signal(cfg, rng=None):
    """Draw the initial sparse signal.

    Exactly ``round(density*K)`` entries are nonzero with standard normal
    amplitudes (absolute values in nonnegative mode).
    """
    nnz = cfg.nnz
    if nnz < 1:
        raise ValueError(f"density*K = {cfg.density * cfg.K} leaves the signal empty")
    if rng is None:
        rng = stream(cfg.seed, _STREAM_SIGNAL)
    if cfg.leading_support:
        idx = np.arange(nnz)
    else:
        idx = np.sort(rng.choice(cfg.K, size=nnz, replace=False))
    amp = rng.standard_normal(nnz)
    # a draw of exactly 0.0 would shrink the support
    amp[amp == 0.0] = 1.0
    if cfg.nonnegative:
        amp = np.abs(amp)
    values = np.zeros(cfg.K)
    values[idx] = amp
    return SparseSignal(values)


def generate_instance(signal, cfg, t, rng=None):
    """Measurements of all N sensors at instance ``t``: y = g'x + v."""
    out = []
    sd = np.sqrt(cfg.noise_variance)
    for n in range(1, cfg.N + 1):
        r = rng if rng is not None else stream(cfg.seed, _STREAM_SAMPLE, t, n)
        g = r.standard_normal(cfg.K)
        v = sd * r.standard_normal()
        out.append(RegressionSample(g=g, y=float(g @ signal.values + v), sensor_id=n, time=t))
    return out


def evolve_signal(signal, alpha, rng):
    """One step of the AR(1) law on the support; zeros stay zero."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    x = signal.values
    mask = x != 0.0
    w = np.sqrt(1.0 - alpha**2) * rng.standard_normal(x.shape[0])
    new = np.where(mask, alpha * x + w, 0.0)
    # keep the support fixed even if an update lands exactly on zero
    new[mask & (new == 0.0)] = np.finfo(float).tiny
    return SparseSignal(new)


@dataclass
class Scenario:
    """Deterministic sample stream for one configuration.

    Iterating yields ``(t, truth, samples)`` where ``truth`` is the signal that
    generated the samples of instance ``t``.
    """

    cfg: ScenarioConfig
    signal: SparseSignal = field(init=False)

    def __post_init__(self):
        self.signal = generate_signal(self.cfg)

    def __iter__(self):
        truth = self.signal
        for t in range(1, self.cfg.horizon + 1):
            yield t, truth, generate_instance(truth, self.cfg, t)
            if self.cfg.alpha is not None:
                truth = evolve_signal(truth, self.cfg.alpha, stream(self.cfg.seed, _STREAM_EVOLVE, t))
