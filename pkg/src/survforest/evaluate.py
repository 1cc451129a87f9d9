"""Prediction-accuracy metrics and permutation variable importance.

Concordance follows the strict-inequality reading of the pairwise
definition: a comparable pair is (larger time, smaller time with an
event), concordant when the smaller time carries the larger risk score.
Tied scores earn 0 by default; `tie_credit=0.5` is available but off.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .data import StepFunction, SurvivalDataset, kaplan_meier
from .errors import DegenerateEvaluation
from .forest import Forest


@dataclass(frozen=True)
class ConcordanceResult:
    value: float
    concordant: float
    comparable: float


def _pair_masks(time, status, eta):
    time = np.asarray(time, dtype=float)
    status = np.asarray(status)
    eta = np.asarray(eta, dtype=float)
    # comparable[i, j]: T_i > T_j and the smaller time j is an event
    comparable = (time[:, None] > time[None, :]) & (status[None, :] == 1)
    concordant = eta[None, :] > eta[:, None]
    tied = eta[None, :] == eta[:, None]
    return comparable, concordant, tied


def harrell_c(time, status, eta, tie_credit: float = 0.0) -> ConcordanceResult:
    """Harrell's concordance index of risk scores eta."""
    comparable, concordant, tied = _pair_masks(time, status, eta)
    n_comp = float(comparable.sum())
    if n_comp == 0:
        raise DegenerateEvaluation("no comparable pairs")
    n_conc = float((comparable & concordant).sum())
    if tie_credit:
        n_conc += tie_credit * float((comparable & tied).sum())
    return ConcordanceResult(n_conc / n_comp, n_conc, n_comp)


def uno_c(
    time,
    status,
    eta,
    censor_survival: StepFunction | None = None,
    tie_credit: float = 0.0,
) -> ConcordanceResult:
    """Uno's IPC-weighted concordance index.

    Pair terms are weighted by G(T_j-)^-2 where G is the
    censoring-survival function (Kaplan-Meier with indicator roles
    flipped, estimated on the evaluation data unless given) and T_j is
    the pair's smaller, uncensored time.  Pairs with G(T_j-) = 0 are
    excluded.
    """
    time = np.asarray(time, dtype=float)
    status = np.asarray(status)
    if censor_survival is None:
        censor_survival = kaplan_meier(time, status, target="censorings")
    g_left = np.asarray(censor_survival.left_limit(time), dtype=float)
    with np.errstate(divide="ignore"):
        w = np.where(g_left > 0, 1.0 / np.maximum(g_left, 1e-300) ** 2, 0.0)
    comparable, concordant, tied = _pair_masks(time, status, eta)
    wpair = comparable * w[None, :]
    den = float(wpair.sum())
    if den == 0:
        raise DegenerateEvaluation("all IPC weights undefined")
    num = float((wpair * concordant).sum())
    if tie_credit:
        num += tie_credit * float((wpair * tied).sum())
    return ConcordanceResult(num / den, num, den)


def concordance_oracle(time, status, eta, tie_credit: float = 0.0):
    """Plain O(n^2) double-loop concordance, kept as an independent check."""
    n = len(time)
    conc = comp = 0.0
    for i in range(n):
        for j in range(n):
            if time[i] > time[j] and status[j] == 1:
                comp += 1
                if eta[j] > eta[i]:
                    conc += 1
                elif eta[j] == eta[i]:
                    conc += tie_credit
    if comp == 0:
        raise DegenerateEvaluation("no comparable pairs")
    return ConcordanceResult(conc / comp, conc, comp)


@dataclass
class ImportanceReport:
    """Per-variable permutation importance (OOB concordance drop)."""

    variables: tuple[str, ...]
    raw: np.ndarray
    scaled: np.ndarray
    rank: np.ndarray
    baseline: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "variable": list(self.variables),
                "raw": self.raw,
                "scaled": self.scaled,
                "rank": self.rank,
            }
        )


def _oob_concordance(forest: Forest, data: SurvivalDataset, scores) -> float:
    ok = ~np.isnan(scores)
    return harrell_c(data.time[ok], data.status[ok], scores[ok]).value


def permutation_importance(
    forest: Forest, data: SurvivalDataset, seed: int = 0, repeats: int = 5
) -> ImportanceReport:
    """Drop in out-of-bag concordance after permuting each predictor.

    Each variable gets its own RNG stream derived from (seed, variable
    index), so results do not depend on evaluation order.
    """
    baseline = _oob_concordance(forest, data, forest.predict_scores_oob(data))
    raw = np.zeros(data.p)
    for j in range(data.p):
        rng = np.random.default_rng([seed, j])
        drops = []
        for _ in range(repeats):
            Xp = np.array(data.X)
            Xp[:, j] = Xp[rng.permutation(data.n), j]
            perm_data = SurvivalDataset(
                data.time, data.status, Xp, data.variable_names
            )
            scores = forest.predict_scores_oob(perm_data)
            drops.append(baseline - _oob_concordance(forest, data, scores))
        raw[j] = float(np.mean(drops))
    max_raw = raw.max()
    scaled = np.clip(raw, 0.0, None) / max_raw if max_raw > 0 else np.zeros_like(raw)
    order = np.argsort(-raw, kind="stable")
    rank = np.empty(data.p, dtype=np.int64)
    rank[order] = np.arange(1, data.p + 1)
    return ImportanceReport(data.variable_names, raw, scaled, rank, baseline)
