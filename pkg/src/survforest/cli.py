"""Command-line front end.

Subcommands: train, predict, evaluate, importance, sim1, sim2.  Input
CSV schema: header row with columns `time`, `status`, then one column
per predictor; decimal-point reals, no missing values.  Errors exit
with a distinct code per error class.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from . import figures
from .data import SurvivalDataset
from .errors import (
    CalibrationError,
    ConfigError,
    DegenerateEvaluation,
    DegenerateSplit,
    LoadError,
    SurvForestError,
    TreeDegenerate,
)
from .evaluate import harrell_c, permutation_importance, uno_c
from .experiments import run_sim1, run_sim2
from .forest import ForestConfig, load_forest, save_forest, train
from .simulate import Study1Config, Study2Config, load_tree_model
from .splits import parse_split_rule

EXIT_CODES = {
    LoadError: 2,
    ConfigError: 3,
    DegenerateSplit: 4,
    TreeDegenerate: 4,
    DegenerateEvaluation: 5,
    CalibrationError: 6,
}


def load_csv(path) -> SurvivalDataset:
    """Load and validate the survival CSV schema with row/column diagnostics."""
    path = Path(path)
    if not path.exists():
        raise LoadError(f"{path}: no such file")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise LoadError(f"{path}: empty file") from None
        if header[:2] != ["time", "status"]:
            raise LoadError(
                f"{path}: first two columns must be 'time','status', got {header[:2]}"
            )
        names = header[2:]
        times, statuses, rows = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise LoadError(
                    f"{path}: row {lineno}: expected {len(header)} cells, got {len(row)}"
                )
            vals = []
            for col, cell in zip(header, row):
                cell = cell.strip()
                if cell == "":
                    raise LoadError(f"{path}: row {lineno}, column {col}: missing value")
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise LoadError(
                        f"{path}: row {lineno}, column {col}: non-numeric value {cell!r}"
                    ) from None
            t, s = vals[0], vals[1]
            if not t > 0:
                raise LoadError(f"{path}: row {lineno}: time must be > 0, got {t}")
            if s not in (0.0, 1.0):
                raise LoadError(f"{path}: row {lineno}: status must be 0 or 1, got {s}")
            times.append(t)
            statuses.append(int(s))
            rows.append(vals[2:])
    if not times:
        raise LoadError(f"{path}: no data rows")
    X = np.asarray(rows, dtype=float).reshape(len(times), len(names))
    return SurvivalDataset(np.asarray(times), np.asarray(statuses), X, tuple(names))


def _forest_config(args, p: int | None = None) -> ForestConfig:
    cfg = ForestConfig(
        ntree=args.ntree,
        mtry=args.mtry,
        nodesize=args.nodesize,
        split_rule=parse_split_rule(args.splitrule),
        seed=args.seed,
    )
    if p is not None:
        cfg.validate(p)
    return cfg


def _add_forest_flags(p):
    p.add_argument("--ntree", type=int, default=500)
    p.add_argument("--mtry", type=int, default=None)
    p.add_argument("--nodesize", type=int, default=3)
    p.add_argument(
        "--splitrule",
        default="logrank",
        help="logrank | c | gehan | tarone-ware:<w>",
    )
    p.add_argument("--seed", type=int, default=0)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_train(args):
    data = load_csv(args.data)
    config = _forest_config(args, data.p)
    forest = train(data, config, n_jobs=args.threads)
    out = _out_dir(args)
    save_forest(forest, out / "model.json")
    print(f"trained {config.ntree} trees -> {out / 'model.json'}")


def cmd_predict(args):
    forest = load_forest(args.model)
    data = load_csv(args.data)
    if data.p != forest.n_variables:
        raise ConfigError(
            f"model expects {forest.n_variables} predictors, data has {data.p}"
        )
    eta = forest.predict_score(data.X)
    out = _out_dir(args)
    pd.DataFrame({"score": eta}).to_csv(out / "scores.csv", index=False)
    print(f"wrote {len(eta)} scores -> {out / 'scores.csv'}")


def cmd_evaluate(args):
    data = load_csv(args.data)
    scores = pd.read_csv(args.scores)
    if "score" not in scores.columns:
        raise LoadError(f"{args.scores}: expected a 'score' column")
    eta = scores["score"].to_numpy(dtype=float)
    if eta.size != data.n:
        raise ConfigError(f"{eta.size} scores for {data.n} observations")
    if args.metric == "harrell":
        res = harrell_c(data.time, data.status, eta)
    else:
        res = uno_c(data.time, data.status, eta)
    out = _out_dir(args)
    frame = pd.DataFrame(
        [
            {
                "metric": args.metric,
                "value": res.value,
                "concordant": res.concordant,
                "comparable": res.comparable,
            }
        ]
    )
    frame.to_csv(out / "concordance.csv", index=False)
    print(f"{args.metric} C = {res.value:.6f}")


def cmd_importance(args):
    forest = load_forest(args.model)
    data = load_csv(args.data)
    report = permutation_importance(
        forest, data, seed=args.seed, repeats=args.repeats
    )
    out = _out_dir(args)
    report.to_frame().to_csv(out / "importance.csv", index=False)
    figures.render_importance_figure(report, out / "importance.png")
    print(f"wrote importance table and figure -> {out}")


def cmd_sim1(args):
    config = Study1Config(
        variant=args.variant,
        n=args.n,
        true_threshold=args.true_threshold,
        censoring_rate=args.censoring,
        replications=args.reps,
        seed=args.seed,
    )
    summary = run_sim1(config, n_jobs=args.threads)
    out = _out_dir(args)
    summary.write(out, "sim1")
    figures.render_sim1_figure(summary, out / "sim1_density.png")
    figures.render_sim1_boxplot(summary, out / "sim1_boxplot.png")
    print(summary.aggregates.to_string(index=False))


def cmd_sim2(args):
    tree_model = load_tree_model(args.tree_model) if args.tree_model else None
    kwargs = dict(
        n=args.n,
        p=args.p,
        censoring_rate=args.censoring,
        dichotomize=args.dichotomize,
        seed=args.seed,
    )
    if tree_model is not None:
        kwargs["tree_model"] = tree_model
    config = Study2Config(**kwargs)
    forest_cfg = _forest_config(args)
    summary = run_sim2(config, args.reps, forest_cfg, n_jobs=args.threads)
    out = _out_dir(args)
    summary.write(out, "sim2")
    figures.render_sim2_figure(summary, out / "sim2_boxplot.png")
    print(summary.aggregates.to_string(index=False))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="survforest",
        description="Random survival forests with concordance-based splitting",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a forest on a survival CSV")
    p.add_argument("data")
    _add_forest_flags(p)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="score observations with a trained model")
    p.add_argument("model")
    p.add_argument("data")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="concordance of scores against outcomes")
    p.add_argument("data")
    p.add_argument("scores")
    p.add_argument("--metric", choices=("harrell", "uno"), default="harrell")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("importance", help="permutation variable importance")
    p.add_argument("model")
    p.add_argument("data")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_importance)

    p = sub.add_parser("sim1", help="threshold-selection simulation study")
    p.add_argument("--variant", choices=("a", "b"), default="a")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--true-threshold", type=float, default=0.25)
    p.add_argument("--censoring", type=float, default=0.5)
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sim1)

    p = sub.add_parser("sim2", help="prediction-accuracy simulation study")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--p", type=int, default=10)
    p.add_argument("--censoring", type=float, default=0.5)
    p.add_argument("--dichotomize", action="store_true")
    p.add_argument("--tree-model", default=None, help="JSON location-tree file")
    p.add_argument("--reps", type=int, default=50)
    _add_forest_flags(p)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sim2)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except SurvForestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CODES.get(type(exc), 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
