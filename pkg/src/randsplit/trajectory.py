"""Recorded paths of switched flows and the generic event walker."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, InvariantError
from .switching import SwitchSchedule


@dataclass(frozen=True)
class TrajectorySample:
    """States of one realized path on a time grid.

    ``states`` has one row per grid time; ``regimes`` (when present) holds
    the regime whose flow produced each row.
    """

    times: np.ndarray = field(repr=False)
    states: np.ndarray = field(repr=False)
    regimes: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if states.ndim == 1:
            states = states[:, None]
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)
        if times.ndim != 1 or times.size == 0:
            raise InputError("time grid must be a nonempty 1D array")
        if np.any(np.diff(times) <= 0):
            raise InvariantError("time grid must be strictly increasing")
        if states.shape[0] != times.size:
            raise InvariantError(
                f"{states.shape[0]} state rows for {times.size} grid times"
            )
        if not np.all(np.isfinite(states)):
            raise InvariantError("trajectory contains non-finite states")
        if self.regimes is not None:
            regimes = np.asarray(self.regimes, dtype=np.int8)
            object.__setattr__(self, "regimes", regimes)
            if regimes.shape != times.shape:
                raise InvariantError("one regime entry per grid time required")
            regimes.setflags(write=False)
        times.setflags(write=False)
        states.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.states.shape[1]


def check_grid(grid, horizon: float) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InputError("time grid must be a nonempty 1D array")
    if np.any(np.diff(grid) <= 0):
        raise InputError("time grid must be strictly increasing")
    if grid[0] < 0:
        raise InputError("time grid must start at or after 0")
    if grid[-1] > horizon:
        raise InputError(f"grid reaches {grid[-1]} beyond the schedule horizon {horizon}")
    return grid


def run_switched_flow(schedule: SwitchSchedule, grid, state0, flow_maps) -> TrajectorySample:
    """Compose the two exact subflow maps along a switch schedule.

    ``flow_maps[i](state, s)`` must return the regime-``i`` subflow state a
    time ``s`` after ``state``.  Grid states are evaluated at exact offsets
    inside the enclosing event, so the only numerical error is the one of
    the subflow maps themselves.
    """
    grid = check_grid(grid, schedule.horizon)
    state = np.array(state0, dtype=float, copy=True)
    if state.ndim != 1:
        raise InputError("state must be a 1D vector")
    states = np.empty((grid.size, state.size))
    regimes = np.empty(grid.size, dtype=np.int8)
    t = 0.0
    gi = 0
    last_regime = schedule.initial_regime
    for regime, duration in schedule.events:
        rem = schedule.horizon - t
        if rem <= 0.0:
            break
        d = min(duration, rem)
        t_end = t + d
        while gi < grid.size and grid[gi] <= t_end:
            off = max(grid[gi] - t, 0.0)
            states[gi] = state if off == 0.0 else flow_maps[regime](state, off)
            regimes[gi] = regime
            gi += 1
        state = flow_maps[regime](state, d)
        t = t_end
        last_regime = regime
    while gi < grid.size:
        states[gi] = state
        regimes[gi] = last_regime
        gi += 1
    return TrajectorySample(times=grid, states=states, regimes=regimes)
