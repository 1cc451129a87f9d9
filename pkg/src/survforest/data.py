"""Core survival-data containers and nonparametric estimators.

Right-censored data are held as parallel numpy arrays (observed time,
event indicator, predictor matrix).  Tied observed times are allowed:
tied events are pooled into a single risk-table row, and censored
observations tied with an event time stay in the risk set at that time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EmptyNode, EmptyRiskTable


def _as_1d(a, dtype=float):
    out = np.asarray(a, dtype=dtype)
    if out.ndim != 1:
        raise ConfigError("expected a 1-d array, got shape %s" % (out.shape,))
    return out


@dataclass(frozen=True)
class SurvivalDataset:
    """Observed times, event indicators and an n x p predictor matrix."""

    time: np.ndarray
    status: np.ndarray
    X: np.ndarray
    variable_names: tuple[str, ...] = ()

    def __post_init__(self):
        time = _as_1d(self.time)
        status = _as_1d(self.status, dtype=np.int8)
        X = np.asarray(self.X, dtype=float)
        if X.ndim != 2:
            raise ConfigError("predictor matrix must be 2-d")
        if X.shape[0] != time.shape[0] or status.shape[0] != time.shape[0]:
            raise ConfigError("row counts of time/status/X disagree")
        if np.any(~np.isfinite(time)) or np.any(time <= 0):
            raise ConfigError("observed times must be finite and > 0")
        if not np.all((status == 0) | (status == 1)):
            raise ConfigError("status must be 0/1")
        if np.any(~np.isfinite(X)):
            raise ConfigError("predictor matrix contains missing values")
        names = tuple(self.variable_names) or tuple(
            f"x{j + 1}" for j in range(X.shape[1])
        )
        if len(names) != X.shape[1]:
            raise ConfigError("variable_names length must equal p")
        for arr in (time, status, X):
            arr.setflags(write=False)
        object.__setattr__(self, "time", time)
        object.__setattr__(self, "status", status)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "variable_names", names)

    @property
    def n(self) -> int:
        return self.time.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def subset(self, idx) -> "SurvivalDataset":
        idx = np.asarray(idx)
        return SurvivalDataset(
            self.time[idx], self.status[idx], self.X[idx], self.variable_names
        )


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous piecewise-constant function on time.

    Value is `initial_value` before the first knot and `values[k]` on
    [knots[k], knots[k+1]).
    """

    knots: np.ndarray
    values: np.ndarray
    initial_value: float = 0.0

    def __post_init__(self):
        knots = _as_1d(self.knots)
        values = _as_1d(self.values)
        if knots.shape != values.shape:
            raise ConfigError("knots and values must have equal length")
        if knots.size > 1 and np.any(np.diff(knots) <= 0):
            raise ConfigError("knots must be strictly increasing")
        knots.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)

    def _eval(self, t, side):
        t = np.asarray(t, dtype=float)
        if self.knots.size == 0:
            out = np.full(t.shape, self.initial_value)
            return out if out.ndim else float(out)
        idx = np.searchsorted(self.knots, t, side=side) - 1
        out = np.where(idx >= 0, self.values[np.maximum(idx, 0)], self.initial_value)
        return out if out.ndim else float(out)

    def __call__(self, t):
        return self._eval(t, "right")

    def left_limit(self, t):
        """Value just before t (used for censoring-survival weights)."""
        return self._eval(t, "left")


def event_table(time, status):
    """Distinct event times with event counts d and at-risk counts Y."""
    time = _as_1d(time)
    status = _as_1d(status, dtype=np.int8)
    ev = status == 1
    if not np.any(ev):
        return np.empty(0), np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    t_ev, d = np.unique(time[ev], return_counts=True)
    # at risk at t: all observations with observed time >= t
    ts = np.sort(time)
    Y = time.size - np.searchsorted(ts, t_ev, side="left")
    return t_ev, d.astype(np.int64), Y.astype(np.int64)


@dataclass(frozen=True)
class RiskTable:
    """Per-event-time counts for a two-group split (group 1 vs group 0)."""

    event_times: np.ndarray
    d: np.ndarray
    Y: np.ndarray
    d1: np.ndarray
    Y1: np.ndarray

    @property
    def d0(self):
        return self.d - self.d1

    @property
    def Y0(self):
        return self.Y - self.Y1


def build_risk_table(time, status, group) -> RiskTable:
    """Two-group risk table over the slice's distinct event times.

    `group` is a 0/1 label per observation (1 = group G1).
    """
    time = _as_1d(time)
    status = _as_1d(status, dtype=np.int8)
    group = _as_1d(group, dtype=np.int8)
    if group.shape != time.shape:
        raise ConfigError("group labels must cover every observation")
    t_ev, d, Y = event_table(time, status)
    if t_ev.size == 0:
        raise EmptyRiskTable("slice contains no events")
    in1 = group == 1
    t1, s1 = time[in1], status[in1]
    ts1 = np.sort(t1)
    Y1 = t1.size - np.searchsorted(ts1, t_ev, side="left")
    ev1 = s1 == 1
    d1 = np.zeros_like(d)
    if np.any(ev1):
        te1, c1 = np.unique(t1[ev1], return_counts=True)
        pos = np.searchsorted(t_ev, te1)
        d1[pos] = c1
    return RiskTable(t_ev, d, Y, d1.astype(np.int64), Y1.astype(np.int64))


def nelson_aalen(time, status) -> StepFunction:
    """Nelson-Aalen cumulative hazard estimate of the slice."""
    time = _as_1d(time)
    if time.size == 0:
        raise EmptyNode("Nelson-Aalen on empty slice")
    t_ev, d, Y = event_table(time, status)
    return StepFunction(t_ev, np.cumsum(d / Y), initial_value=0.0)


def kaplan_meier(time, status, target: str = "events") -> StepFunction:
    """Kaplan-Meier product-limit estimate.

    target="events" estimates the survival function of the event time;
    target="censorings" flips the indicator roles and estimates the
    censoring-survival function G.
    """
    time = _as_1d(time)
    status = _as_1d(status, dtype=np.int8)
    if time.size == 0:
        raise EmptyNode("Kaplan-Meier on empty slice")
    if target == "censorings":
        status = (1 - status).astype(np.int8)
    elif target != "events":
        raise ConfigError("target must be 'events' or 'censorings'")
    t_ev, d, Y = event_table(time, status)
    return StepFunction(t_ev, np.cumprod(1.0 - d / Y), initial_value=1.0)
