"""Replicated simulation experiments and their summary tables.

run_sim1 reproduces the threshold-selection comparison (selected root
thresholds under log-rank vs concordance splitting, with a kernel
density table).  run_sim2 reproduces the prediction-accuracy comparison
(paired forests per replication, concordance differences on independent
test data).  Both are deterministic given config + seed, with canonical
record ordering regardless of worker count.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy.stats import gaussian_kde

from .errors import DegenerateSplit
from .evaluate import harrell_c, uno_c
from .forest import ForestConfig, train
from .simulate import (
    Study1Config,
    Study2Config,
    gen_study1,
    gen_study2,
    select_root_threshold,
    study1_censoring_rate,
    study2_censoring_rate,
)
from .splits import SplitRule

KDE_GRID_POINTS = 512
BOOTSTRAP_RESAMPLES = 2000


@dataclass
class ExperimentSummary:
    """Per-replication records plus aggregate rows and run metadata."""

    records: pd.DataFrame
    aggregates: pd.DataFrame
    config: dict
    density: pd.DataFrame | None = None

    def write(self, out_dir, stem: str) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        self.records.to_csv(out / f"{stem}_records.csv", index=False)
        self.aggregates.to_csv(out / f"{stem}_summary.csv", index=False)
        if self.density is not None:
            self.density.to_csv(out / f"{stem}_density.csv", index=False)
        with open(out / f"{stem}_config.json", "w", encoding="utf-8") as fh:
            json.dump(self.config, fh, indent=2)


def _median_ci(diffs, seed: int):
    """Nonparametric bootstrap CI for the median of the differences."""
    diffs = np.asarray(diffs, dtype=float)
    rng = np.random.default_rng([seed, 0xB007])
    idx = rng.integers(0, diffs.size, size=(BOOTSTRAP_RESAMPLES, diffs.size))
    medians = np.median(diffs[idx], axis=1)
    return float(np.quantile(medians, 0.025)), float(np.quantile(medians, 0.975))


def _density_table(samples_by_label, lo, hi):
    grid = np.linspace(lo, hi, KDE_GRID_POINTS)
    cols = {"grid": grid}
    meta = {}
    for label, samples in samples_by_label.items():
        samples = np.asarray(samples, dtype=float)
        if samples.size < 2 or np.std(samples) == 0:
            # too few replications for a density estimate
            cols[f"density_{label}"] = np.full(grid.size, np.nan)
            meta[label] = None
            continue
        kde = gaussian_kde(samples, bw_method="silverman")
        cols[f"density_{label}"] = kde(grid)
        meta[label] = float(kde.factor * np.std(samples, ddof=1))
    return pd.DataFrame(cols), meta


def _sim1_replication(config: Study1Config, rep: int, rate_c: float):
    data = gen_study1(config, rep, rate_c)
    rows = []
    for rule in (SplitRule.logrank(), SplitRule.harrell_c()):
        try:
            thr = select_root_threshold(data, rule)
        except DegenerateSplit:
            thr = np.nan
        rows.append((rep, rule.label(), thr))
    return rows


def run_sim1(config: Study1Config, n_jobs: int = 1) -> ExperimentSummary:
    """Selected root thresholds under both criteria, per replication."""
    rate_c = study1_censoring_rate(config)
    if n_jobs == 1:
        chunks = [
            _sim1_replication(config, r, rate_c) for r in range(config.replications)
        ]
    else:
        chunks = Parallel(n_jobs=n_jobs)(
            delayed(_sim1_replication)(config, r, rate_c)
            for r in range(config.replications)
        )
    records = pd.DataFrame(
        [row for chunk in chunks for row in chunk],
        columns=["replication", "criterion", "threshold"],
    )
    lo, hi = config.x_range
    agg_rows = []
    samples_by_label = {}
    for label, sub in records.groupby("criterion"):
        thr = sub["threshold"].dropna().to_numpy()
        samples_by_label[label] = thr
        agg_rows.append(
            {
                "criterion": label,
                "n": thr.size,
                "median": float(np.median(thr)),
                "q25": float(np.quantile(thr, 0.25)),
                "q75": float(np.quantile(thr, 0.75)),
                "outer20_fraction": float(
                    np.mean((thr < lo + 0.1 * (hi - lo)) | (thr > hi - 0.1 * (hi - lo)))
                ),
            }
        )
    density, bandwidths = _density_table(samples_by_label, lo, hi)
    cfg = {
        "experiment": "sim1",
        "variant": config.variant,
        "n": config.n,
        "true_threshold": config.true_threshold if config.variant == "b" else None,
        "censoring_rate": config.censoring_rate,
        "censoring_rate_parameter": rate_c,
        "replications": config.replications,
        "seed": config.seed,
        "kde_bandwidths": bandwidths,
        "kde_bandwidth_rule": "silverman",
    }
    return ExperimentSummary(records, pd.DataFrame(agg_rows), cfg, density)


def _sim2_replication(
    config: Study2Config, rep: int, rate_c: float, forest_cfg: ForestConfig
):
    learn, test = gen_study2(config, rep, rate_c)
    row = {"replication": rep}
    for rule in (SplitRule.harrell_c(), SplitRule.logrank()):
        cfg = ForestConfig(
            ntree=forest_cfg.ntree,
            mtry=forest_cfg.mtry,
            nodesize=forest_cfg.nodesize,
            split_rule=rule,
            seed=forest_cfg.seed + rep,  # paired seeds across the two rules
        )
        forest = train(learn, cfg)
        eta = forest.predict_score(test.X)
        tag = "c" if rule.kind == "c" else "logrank"
        row[f"harrell_{tag}"] = harrell_c(test.time, test.status, eta).value
        row[f"uno_{tag}"] = uno_c(test.time, test.status, eta).value
    row["diff_harrell"] = row["harrell_c"] - row["harrell_logrank"]
    row["diff_uno"] = row["uno_c"] - row["uno_logrank"]
    return row


def run_sim2(
    config: Study2Config,
    replications: int,
    forest_cfg: ForestConfig | None = None,
    n_jobs: int = 1,
) -> ExperimentSummary:
    """Paired concordance differences (C-split minus log-rank split)."""
    forest_cfg = forest_cfg or ForestConfig()
    rate_c = study2_censoring_rate(config)
    if n_jobs == 1:
        rows = [
            _sim2_replication(config, r, rate_c, forest_cfg)
            for r in range(replications)
        ]
    else:
        rows = Parallel(n_jobs=n_jobs)(
            delayed(_sim2_replication)(config, r, rate_c, forest_cfg)
            for r in range(replications)
        )
    records = pd.DataFrame(rows).sort_values("replication").reset_index(drop=True)
    agg_rows = []
    for col in ("diff_harrell", "diff_uno"):
        diffs = records[col].to_numpy()
        lo, hi = _median_ci(diffs, config.seed)
        agg_rows.append(
            {
                "metric": col,
                "median": float(np.median(diffs)),
                "q25": float(np.quantile(diffs, 0.25)),
                "q75": float(np.quantile(diffs, 0.75)),
                "ci95_low": lo,
                "ci95_high": hi,
            }
        )
    cfg = {
        "experiment": "sim2",
        "n": config.n,
        "p": config.p,
        "censoring_rate": config.censoring_rate,
        "censoring_rate_parameter": rate_c,
        "dichotomize": config.dichotomize,
        "correlation": config.correlation,
        "n_test": config.n_test,
        "replications": replications,
        "ntree": forest_cfg.ntree,
        "mtry": forest_cfg.mtry,
        "nodesize": forest_cfg.nodesize,
        "seed": config.seed,
        "bootstrap_resamples": BOOTSTRAP_RESAMPLES,
    }
    return ExperimentSummary(records, pd.DataFrame(agg_rows), cfg)
