"""Binary continuous-time switching process.

The regime selector is a two-state Markov process that waits an Exp(lambda)
time in each state before flipping.  Realizations are materialized as
:class:`SwitchSchedule` objects: an initial regime plus the array of waiting
times, drawn from a counter-based Philox stream so that every trajectory
index yields the same schedule regardless of worker count or platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, InvariantError

Seed = "int | tuple[int, ...]"


def stream(seed) -> np.random.Generator:
    """Philox generator for ``seed`` (an int or a tuple such as (master, index))."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def trajectory_stream(master_seed: int, index: int) -> np.random.Generator:
    """Independent per-trajectory stream derived from (master seed, trajectory id)."""
    return stream((int(master_seed), int(index)))


@dataclass(frozen=True)
class SwitchConfig:
    """Switching rate, starting regime, and the seed of the waiting-time stream."""

    rate: float
    initial_regime: int = 0
    seed: object = 0

    def __post_init__(self):
        if not self.rate > 0:
            raise InputError(f"switching rate must be positive, got {self.rate}")
        if self.initial_regime not in (0, 1):
            raise InputError(f"initial regime must be 0 or 1, got {self.initial_regime}")


@dataclass(frozen=True)
class SwitchSchedule:
    """One realized switching path: alternating regimes with positive durations.

    ``durations`` always sum to at least ``horizon``; consumers truncate the
    final event at the horizon.
    """

    initial_regime: int
    durations: np.ndarray = field(repr=False)
    horizon: float

    def __post_init__(self):
        durations = np.asarray(self.durations, dtype=float)
        object.__setattr__(self, "durations", durations)
        if self.initial_regime not in (0, 1):
            raise InputError(f"initial regime must be 0 or 1, got {self.initial_regime}")
        if not self.horizon > 0:
            raise InputError(f"horizon must be positive, got {self.horizon}")
        if durations.ndim != 1 or durations.size == 0:
            raise InvariantError("schedule needs at least one event")
        if not np.all(durations > 0):
            raise InvariantError("all waiting times must be strictly positive")
        if float(durations.sum()) < self.horizon:
            raise InvariantError("waiting times do not cover the horizon")
        durations.setflags(write=False)

    @property
    def n_events(self) -> int:
        return int(self.durations.size)

    @property
    def events(self):
        """Iterator of (regime, duration) pairs; regimes strictly alternate."""
        regime = self.initial_regime
        for d in self.durations:
            yield regime, float(d)
            regime = 1 - regime

    def regime_at(self, t: float) -> int:
        """Regime active at time ``t`` (right-continuous at switch times)."""
        if not 0 <= t <= self.horizon:
            raise InputError(f"time {t} outside [0, {self.horizon}]")
        edges = np.cumsum(self.durations)
        k = int(np.searchsorted(edges, t, side="right"))
        k = min(k, self.durations.size - 1)
        return (self.initial_regime + k) % 2

    def occupation_fraction(self, regime: int) -> float:
        """Fraction of [0, horizon] spent in ``regime``."""
        edges = np.concatenate([[0.0], np.cumsum(self.durations)])
        starts = np.minimum(edges[:-1], self.horizon)
        ends = np.minimum(edges[1:], self.horizon)
        lengths = ends - starts
        which = (np.arange(self.durations.size) + self.initial_regime) % 2
        return float(lengths[which == regime].sum() / self.horizon)


def sample_schedule(cfg: SwitchConfig, horizon: float) -> SwitchSchedule:
    """Draw a schedule of i.i.d. Exp(rate) waiting times covering ``horizon``.

    Deterministic in (seed, rate, horizon): the same config always produces
    the same schedule.
    """
    if not horizon > 0:
        raise InputError(f"horizon must be positive, got {horizon}")
    rng = stream(cfg.seed)
    expected = cfg.rate * horizon
    chunk = max(16, int(expected + 4.0 * math.sqrt(expected) + 8.0))
    parts = []
    total = 0.0
    while total < horizon:
        draw = rng.exponential(1.0 / cfg.rate, size=chunk)
        # exact zeros are measure-zero but would break the positivity invariant
        while not np.all(draw > 0):
            zero = draw <= 0
            draw[zero] = rng.exponential(1.0 / cfg.rate, size=int(zero.sum()))
        parts.append(draw)
        total += float(draw.sum())
        chunk = max(16, chunk // 2)
    durations = np.concatenate(parts) if len(parts) > 1 else parts[0]
    cum = np.cumsum(durations)
    last = int(np.searchsorted(cum, horizon, side="left"))
    return SwitchSchedule(cfg.initial_regime, durations[: last + 1], horizon)


def transition_kernel(t: float, i0: int, rate: float) -> tuple[float, float]:
    """Law of the regime at time ``t`` started from ``i0``: (P[regime 0], P[regime 1]).

    The two-state chain with flip rate ``rate`` mixes at rate ``2 * rate``:
    P[same state] = (1 - exp(-2 rate t))/2 + exp(-2 rate t).
    """
    if not t >= 0:
        raise InputError(f"time must be nonnegative, got {t}")
    if not rate > 0:
        raise InputError(f"rate must be positive, got {rate}")
    if i0 not in (0, 1):
        raise InputError(f"initial regime must be 0 or 1, got {i0}")
    decay = math.exp(-2.0 * rate * t)
    same = (1.0 - decay) / 2.0 + decay
    other = (1.0 - decay) / 2.0
    return (same, other) if i0 == 0 else (other, same)
