"""Two-sample split statistics behind a single dispatch interface.

All four criteria live on a common "larger is better" scale:

* log-rank and its Tarone-Ware weighted variants (per-time weight Y_k^w,
  w=0 log-rank, w=1 Gehan-Wilcoxon) are chi-square style statistics >= 0,
* the concordance-based criterion is mapped to [0.5, 1] by switching the
  child labels whenever the raw value falls below 0.5.

Module-level scan helpers evaluate a criterion at every admissible
threshold of one predictor in a single vectorized pass; they are the
hot path of tree growing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import RiskTable, build_risk_table
from .errors import ConfigError, DegenerateSplit

_KINDS = ("logrank", "c", "weighted-logrank")


@dataclass(frozen=True)
class SplitRule:
    """Split criterion selector; `exponent` is the Tarone-Ware weight w."""

    kind: str
    exponent: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigError(f"unknown split kind {self.kind!r}")
        if self.kind == "weighted-logrank" and not 0.0 <= self.exponent <= 1.0:
            raise ConfigError("weight exponent must lie in [0, 1]")

    @staticmethod
    def logrank() -> "SplitRule":
        return SplitRule("logrank")

    @staticmethod
    def harrell_c() -> "SplitRule":
        return SplitRule("c")

    @staticmethod
    def gehan() -> "SplitRule":
        return SplitRule("weighted-logrank", 1.0)

    @staticmethod
    def tarone_ware(exponent: float) -> "SplitRule":
        return SplitRule("weighted-logrank", float(exponent))

    @property
    def weight_exponent(self) -> float:
        return 0.0 if self.kind == "logrank" else self.exponent

    def label(self) -> str:
        if self.kind == "logrank":
            return "logrank"
        if self.kind == "c":
            return "c"
        if self.exponent == 1.0:
            return "gehan"
        return f"tarone-ware:{self.exponent:g}"


def parse_split_rule(text: str) -> SplitRule:
    """Parse a CLI split-rule spec: logrank | c | gehan | tarone-ware:<w>."""
    if text == "logrank":
        return SplitRule.logrank()
    if text == "c":
        return SplitRule.harrell_c()
    if text == "gehan":
        return SplitRule.gehan()
    if text.startswith("tarone-ware:"):
        try:
            w = float(text.split(":", 1)[1])
        except ValueError as exc:
            raise ConfigError(f"bad tarone-ware weight in {text!r}") from exc
        return SplitRule.tarone_ware(w)
    raise ConfigError(f"unknown split rule {text!r}")


@dataclass(frozen=True)
class SplitEvaluation:
    """Criterion value plus bookkeeping for the concordance/Gehan family.

    `orientation` records a switched node labeling (raw C < 0.5).
    `n_cross`, `n_within0`, `n_within1` are comparable-pair counts
    (populated for the pair-based statistics, None otherwise).
    """

    value: float
    orientation: bool = False
    n_cross: int | None = None
    n_within0: int | None = None
    n_within1: int | None = None


def weighted_logrank_statistic(table: RiskTable, exponent: float) -> SplitEvaluation:
    """Tarone-Ware statistic with per-time weight Y_k^exponent.

    exponent=0 gives the log-rank statistic, exponent=1 the
    Gehan-Wilcoxon statistic.  Variance terms at times with a single
    observation at risk contribute 0.
    """
    Y = table.Y.astype(float)
    Y1 = table.Y1.astype(float)
    d = table.d.astype(float)
    d1 = table.d1.astype(float)
    if Y1[0] == 0 or Y1[0] == Y[0]:
        raise DegenerateSplit("one group empty at the first event time")
    w = Y**exponent
    num = float(np.sum(w * (d1 - Y1 * d / Y))) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        base = np.where(Y > 1, d * (Y - d) / (Y**2 * np.maximum(Y - 1, 1)), 0.0)
    den = float(np.sum(w**2 * Y1 * (Y - Y1) * base))
    if den <= 0.0:
        raise DegenerateSplit("zero variance denominator")
    return SplitEvaluation(num / den)


def logrank_statistic(table: RiskTable) -> SplitEvaluation:
    return weighted_logrank_statistic(table, 0.0)


def _pair_counts(time, status, group):
    """Comparable-pair counts used by the Gehan and concordance statistics.

    Returns (A, B, N0, N1) where A = comparable cross pairs whose smaller
    (event) member lies in G1, B = same with the smaller member in G0,
    and N0/N1 are comparable within-group pair counts.  Tied times are
    non-comparable (strict inequalities).
    """
    time = np.asarray(time, dtype=float)
    status = np.asarray(status)
    group = np.asarray(group)
    in1 = group == 1
    t0, t1 = time[~in1], time[in1]
    s0, s1 = np.sort(t0), np.sort(t1)

    def greater_than(sorted_times, t):
        return sorted_times.size - np.searchsorted(sorted_times, t, side="right")

    ev0 = t0[status[~in1] == 1]
    ev1 = t1[status[in1] == 1]
    A = int(np.sum(greater_than(s0, ev1)))
    B = int(np.sum(greater_than(s1, ev0)))
    N0 = int(np.sum(greater_than(s0, ev0)))
    N1 = int(np.sum(greater_than(s1, ev1)))
    return A, B, N0, N1


def gehan_u(time, status, group):
    """Gehan statistic U with comparable-pair counts.

    Returns (U, N, N0, N1): U is the signed cross-pair count, N the
    number of comparable cross pairs, N0/N1 the comparable within-group
    pair counts.  U = 0 when a group is empty.
    """
    A, B, N0, N1 = _pair_counts(time, status, group)
    return A - B, A + B, N0, N1


def harrell_c_split(time, status, group) -> SplitEvaluation:
    """Concordance of the binary node labels, with orientation switching.

    Full credit for comparable cross pairs ordered late-in-G0 /
    early-in-G1, half credit for comparable same-node pairs.  A raw
    value below 0.5 is replaced by 1 - C with the orientation flag set.
    """
    A, B, N0, N1 = _pair_counts(time, status, group)
    N = A + B
    denom = N + N0 + N1
    if denom == 0:
        raise DegenerateSplit("no comparable pairs")
    raw = (A + 0.5 * (N0 + N1)) / denom
    if raw < 0.5:
        return SplitEvaluation(1.0 - raw, True, N, N0, N1)
    return SplitEvaluation(raw, False, N, N0, N1)


def evaluate_split(rule: SplitRule, time, status, group) -> SplitEvaluation:
    """Evaluate one candidate two-group partition under the given rule."""
    if rule.kind == "c":
        return harrell_c_split(time, status, group)
    table = build_risk_table(time, status, group)
    return weighted_logrank_statistic(table, rule.weight_exponent)


# ---------------------------------------------------------------------------
# Vectorized all-thresholds scans (one predictor, every midpoint threshold).
# Invalid/degenerate thresholds get value -inf.


def candidate_thresholds(x):
    """Midpoints between consecutive distinct values, with split sizes.

    Returns (thresholds, sizes) where sizes[s] observations satisfy
    x <= thresholds[s] ; empty when the variable is constant.
    """
    xs = np.sort(np.asarray(x, dtype=float))
    boundary = np.nonzero(np.diff(xs) > 0)[0]
    thresholds = 0.5 * (xs[boundary] + xs[boundary + 1])
    return thresholds, boundary + 1


def scan_weighted_logrank(time, status, x, exponent):
    """Tarone-Ware values for every midpoint threshold of x (left = G1)."""
    thresholds, sizes = candidate_thresholds(x)
    if thresholds.size == 0:
        return thresholds, np.empty(0), np.zeros(0, dtype=bool)
    time = np.asarray(time, dtype=float)
    status = np.asarray(status)
    ev = status == 1
    if not np.any(ev):
        return thresholds, np.full(thresholds.size, -np.inf), np.zeros(
            thresholds.size, dtype=bool
        )
    t_ev, d_counts = np.unique(time[ev], return_counts=True)
    ts = np.sort(time)
    Y = (time.size - np.searchsorted(ts, t_ev, side="left")).astype(float)
    d = d_counts.astype(float)

    order = np.argsort(x, kind="stable")
    t_sorted = time[order]
    at_risk = t_sorted[None, :] >= t_ev[:, None]
    is_event = (t_sorted[None, :] == t_ev[:, None]) & (status[order][None, :] == 1)
    Y1 = np.cumsum(at_risk, axis=1)[:, sizes - 1].astype(float)
    d1 = np.cumsum(is_event, axis=1)[:, sizes - 1].astype(float)

    w = (Y**exponent)[:, None]
    num = np.sum(w * (d1 - Y1 * (d / Y)[:, None]), axis=0) ** 2
    base = np.where(Y > 1, d * (Y - d) / (Y**2 * np.maximum(Y - 1, 1.0)), 0.0)
    den = np.sum((w**2 * base[:, None]) * Y1 * (Y[:, None] - Y1), axis=0)
    valid = (den > 0) & (Y1[0] > 0) & (Y1[0] < Y[0])
    values = np.where(valid, num / np.where(den > 0, den, 1.0), -np.inf)
    return thresholds, values, valid


def scan_harrell_c(time, status, x):
    """Oriented concordance values for every midpoint threshold of x.

    Returns (thresholds, values, valid, orientation) where orientation
    is True when the raw (left = G1) concordance fell below 0.5.
    """
    thresholds, sizes = candidate_thresholds(x)
    if thresholds.size == 0:
        return (
            thresholds,
            np.empty(0),
            np.zeros(0, dtype=bool),
            np.zeros(0, dtype=bool),
        )
    time = np.asarray(time, dtype=float)
    status = np.asarray(status)
    order = np.argsort(x, kind="stable")
    t = time[order]
    s = status[order]
    # comparable ordered pairs: M[a, b] = 1 iff t_a > t_b and b is an event
    M = ((t[:, None] > t[None, :]) & (s[None, :] == 1)).astype(np.int64)
    n_total = int(M.sum())
    if n_total == 0:
        bad = np.zeros(thresholds.size, dtype=bool)
        return thresholds, np.full(thresholds.size, -np.inf), bad, bad
    col_cum = np.concatenate(([0], np.cumsum(M.sum(axis=0))))
    row_cum = np.concatenate(([0], np.cumsum(M.sum(axis=1))))
    diag = np.concatenate(([0], np.diagonal(M.cumsum(axis=0).cumsum(axis=1))))
    # A(s): smaller member left (G1), larger member right (G0)
    A = col_cum[sizes] - diag[sizes]
    B = row_cum[sizes] - diag[sizes]
    raw = (A + 0.5 * (n_total - A - B)) / n_total
    values = np.maximum(raw, 1.0 - raw)
    orientation = raw < 0.5
    valid = np.ones(thresholds.size, dtype=bool)
    return thresholds, values, valid, orientation


def scan_thresholds(rule: SplitRule, time, status, x):
    """Uniform scan dispatch: (thresholds, values, valid, orientation)."""
    if rule.kind == "c":
        return scan_harrell_c(time, status, x)
    thresholds, values, valid = scan_weighted_logrank(
        time, status, x, rule.weight_exponent
    )
    return thresholds, values, valid, np.zeros(thresholds.size, dtype=bool)
