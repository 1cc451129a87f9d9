"""Random survival forest: bootstrap training, greedy split search,
Nelson-Aalen terminal estimates and ensemble risk scoring.

Determinism: every tree owns an RNG stream derived from (seed, tree
index), so the trained forest is identical regardless of how many
workers execute the tree loop.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from joblib import Parallel, delayed

from .data import StepFunction, SurvivalDataset, nelson_aalen
from .errors import ConfigError, TreeDegenerate
from .splits import SplitRule, evaluate_split, parse_split_rule, scan_thresholds

MODEL_MAGIC = "SURVFOREST"
MODEL_VERSION = 1


@dataclass(frozen=True)
class ForestConfig:
    """Training hyper-parameters; mtry=None means ceil(sqrt(p))."""

    ntree: int = 500
    mtry: int | None = None
    nodesize: int = 3
    split_rule: SplitRule = field(default_factory=SplitRule.logrank)
    seed: int = 0

    def resolve_mtry(self, p: int) -> int:
        mtry = self.mtry if self.mtry is not None else math.ceil(math.sqrt(p))
        if not 1 <= mtry <= p:
            raise ConfigError(f"mtry={mtry} outside [1, p={p}]")
        return mtry

    def validate(self, p: int) -> None:
        if self.ntree < 1:
            raise ConfigError("ntree must be >= 1")
        if self.nodesize < 1:
            raise ConfigError("nodesize must be >= 1")
        self.resolve_mtry(p)


@dataclass(frozen=True)
class SplitCandidate:
    variable: int
    threshold: float
    value: float
    orientation: bool = False


@dataclass
class TreeNode:
    """Internal node (split + children) or terminal node (chf + counts)."""

    split: SplitCandidate | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    chf: StepFunction | None = None
    n_inbag: int = 0
    n_events: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.split is None


def best_split(time, status, X, candidate_vars, rule: SplitRule):
    """Exhaustive midpoint scan over the candidate variables.

    Variables are taken in the given (already shuffled) order; strictly
    greater criterion values win, so ties go to the first-encountered
    (variable order, ascending threshold) candidate.  Returns None when
    every candidate is degenerate.
    """
    best: SplitCandidate | None = None
    for var in candidate_vars:
        thresholds, values, valid, orientation = scan_thresholds(
            rule, time, status, X[:, var]
        )
        if thresholds.size == 0 or not np.any(valid):
            continue
        k = int(np.argmax(values))
        if not valid[k]:
            continue
        if best is None or values[k] > best.value:
            best = SplitCandidate(
                int(var), float(thresholds[k]), float(values[k]), bool(orientation[k])
            )
    if best is None:
        return None
    # re-derive the stored value through the single-partition path so the
    # split can be replayed exactly from the node data
    group = (X[:, best.variable] <= best.threshold).astype(np.int8)
    ev = evaluate_split(rule, time, status, group)
    return replace(best, value=ev.value, orientation=ev.orientation)


def grow_tree(time, status, X, config: ForestConfig, rng) -> TreeNode:
    """Grow one survival tree on an (expanded) bootstrap sample."""
    if not np.any(status == 1):
        raise TreeDegenerate("bootstrap sample contains no events")
    p = X.shape[1]
    mtry = config.resolve_mtry(p)

    def build(idx):
        t, s = time[idx], status[idx]
        node = TreeNode(n_inbag=idx.size, n_events=int(np.sum(s == 1)))
        if node.n_events > config.nodesize:
            cand = rng.choice(p, size=mtry, replace=False)
            # gather only the candidate columns; X may be very wide
            Xc = X[np.ix_(idx, cand)]
            local = best_split(t, s, Xc, np.arange(cand.size), config.split_rule)
            split = None
            if local is not None:
                split = replace(local, variable=int(cand[local.variable]))
            if split is not None:
                left_mask = X[idx, split.variable] <= split.threshold
                node.split = split
                node.left = build(idx[left_mask])
                node.right = build(idx[~left_mask])
                return node
        node.chf = nelson_aalen(t, s)
        return node

    return build(np.arange(time.size))


@dataclass
class Forest:
    trees: list[TreeNode]
    inbag: np.ndarray  # (ntree, n) bootstrap multiplicities
    event_grid: np.ndarray  # pooled distinct event times of the learning data
    config: ForestConfig
    variable_names: tuple[str, ...]
    n_variables: int

    def __post_init__(self):
        self._leaf_scores = [
            _cache_leaf_scores(tree, self.event_grid) for tree in self.trees
        ]

    @property
    def ntree(self) -> int:
        return len(self.trees)

    def tree_scores(self, X) -> np.ndarray:
        """(ntree, n_rows) matrix of per-tree summed-CHF risk scores."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n_variables:
            raise ConfigError(
                f"expected {self.n_variables} predictor columns, got {X.shape[1]}"
            )
        out = np.empty((self.ntree, X.shape[0]))
        for b, tree in enumerate(self.trees):
            leaf_ids = _route(tree, X)
            out[b] = self._leaf_scores[b][leaf_ids]
        return out

    def predict_score(self, X) -> np.ndarray:
        """Ensemble risk score: mean over trees of the CHF summed over
        the pooled event-time grid.  Larger means higher risk."""
        single = np.asarray(X).ndim == 1
        scores = self.tree_scores(X).mean(axis=0)
        return float(scores[0]) if single else scores

    def predict_scores_oob(self, data: SurvivalDataset) -> np.ndarray:
        """Per-observation score using only trees where it is out-of-bag.

        Observations that are in-bag in every tree get NaN.
        """
        scores = self.tree_scores(data.X)
        oob = self.inbag == 0
        counts = oob.sum(axis=0)
        with np.errstate(invalid="ignore"):
            out = np.where(oob, scores, 0.0).sum(axis=0) / counts
        out[counts == 0] = np.nan
        return out

    def predict_chf(self, x) -> StepFunction:
        """Ensemble cumulative hazard for one predictor vector, averaged
        over trees on the pooled event-time grid."""
        x = np.asarray(x, dtype=float)
        vals = np.zeros(self.event_grid.size)
        for tree in self.trees:
            leaf = _leaf_for(tree, x)
            vals += leaf.chf(self.event_grid)
        return StepFunction(self.event_grid, vals / self.ntree, initial_value=0.0)


def _cache_leaf_scores(tree: TreeNode, grid) -> np.ndarray:
    """Leaf-indexed summed-CHF scores; leaves numbered in preorder."""
    scores = []

    def walk(node):
        if node.is_leaf:
            node._leaf_id = len(scores)  # type: ignore[attr-defined]
            scores.append(float(np.sum(node.chf(grid))))
        else:
            walk(node.left)
            walk(node.right)

    walk(tree)
    return np.asarray(scores)


def _route(tree: TreeNode, X) -> np.ndarray:
    leaf_ids = np.empty(X.shape[0], dtype=np.int64)

    def walk(node, idx):
        if node.is_leaf:
            leaf_ids[idx] = node._leaf_id
            return
        left = X[idx, node.split.variable] <= node.split.threshold
        walk(node.left, idx[left])
        walk(node.right, idx[~left])

    walk(tree, np.arange(X.shape[0]))
    return leaf_ids


def _leaf_for(tree: TreeNode, x) -> TreeNode:
    node = tree
    while not node.is_leaf:
        node = node.left if x[node.split.variable] <= node.split.threshold else node.right
    return node


def _grow_one(time, status, X, config, seed_seq):
    rng = np.random.default_rng(seed_seq)
    n = time.size
    for _ in range(100):
        idx = rng.integers(0, n, size=n)
        if np.any(status[idx] == 1):
            break
    else:
        raise TreeDegenerate("no events in 100 bootstrap redraws")
    inbag = np.bincount(idx, minlength=n)
    tree = grow_tree(time[idx], status[idx], X[idx], config, rng)
    return tree, inbag


def train(data: SurvivalDataset, config: ForestConfig, n_jobs: int = 1) -> Forest:
    """Train an ensemble of `ntree` survival trees on bootstrap samples."""
    if data.n < 2 or not np.any(data.status == 1):
        raise ConfigError("need >= 2 observations and >= 1 event")
    config.validate(data.p)
    seeds = np.random.SeedSequence(config.seed).spawn(config.ntree)
    if n_jobs == 1:
        results = [
            _grow_one(data.time, data.status, data.X, config, ss) for ss in seeds
        ]
    else:
        results = Parallel(n_jobs=n_jobs)(
            delayed(_grow_one)(data.time, data.status, data.X, config, ss)
            for ss in seeds
        )
    trees = [r[0] for r in results]
    inbag = np.stack([r[1] for r in results])
    event_grid = np.unique(data.time[data.status == 1])
    return Forest(trees, inbag, event_grid, config, data.variable_names, data.p)


# ---------------------------------------------------------------------------
# Serialization (versioned JSON with a magic header; round-trip exact).


def _node_to_dict(node: TreeNode):
    if node.is_leaf:
        return {
            "leaf": True,
            "knots": node.chf.knots.tolist(),
            "values": node.chf.values.tolist(),
            "n_inbag": node.n_inbag,
            "n_events": node.n_events,
        }
    return {
        "leaf": False,
        "variable": node.split.variable,
        "threshold": node.split.threshold,
        "value": node.split.value,
        "orientation": node.split.orientation,
        "n_inbag": node.n_inbag,
        "n_events": node.n_events,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _node_from_dict(d) -> TreeNode:
    if d["leaf"]:
        return TreeNode(
            chf=StepFunction(
                np.asarray(d["knots"], dtype=float),
                np.asarray(d["values"], dtype=float),
                initial_value=0.0,
            ),
            n_inbag=d["n_inbag"],
            n_events=d["n_events"],
        )
    return TreeNode(
        split=SplitCandidate(
            d["variable"], d["threshold"], d["value"], d["orientation"]
        ),
        left=_node_from_dict(d["left"]),
        right=_node_from_dict(d["right"]),
        n_inbag=d["n_inbag"],
        n_events=d["n_events"],
    )


def forest_to_dict(forest: Forest) -> dict:
    return {
        "magic": MODEL_MAGIC,
        "version": MODEL_VERSION,
        "config": {
            "ntree": forest.config.ntree,
            "mtry": forest.config.mtry,
            "nodesize": forest.config.nodesize,
            "split_rule": forest.config.split_rule.label(),
            "seed": forest.config.seed,
        },
        "variable_names": list(forest.variable_names),
        "n_variables": forest.n_variables,
        "event_grid": forest.event_grid.tolist(),
        "inbag": forest.inbag.tolist(),
        "trees": [_node_to_dict(t) for t in forest.trees],
    }


def forest_from_dict(d: dict) -> Forest:
    if d.get("magic") != MODEL_MAGIC:
        raise ConfigError("not a survforest model file (bad magic header)")
    if d.get("version") != MODEL_VERSION:
        raise ConfigError(f"unsupported model version {d.get('version')!r}")
    cfg = d["config"]
    config = ForestConfig(
        ntree=cfg["ntree"],
        mtry=cfg["mtry"],
        nodesize=cfg["nodesize"],
        split_rule=parse_split_rule(cfg["split_rule"]),
        seed=cfg["seed"],
    )
    return Forest(
        [_node_from_dict(t) for t in d["trees"]],
        np.asarray(d["inbag"], dtype=np.int64),
        np.asarray(d["event_grid"], dtype=float),
        config,
        tuple(d["variable_names"]),
        d["n_variables"],
    )


def save_forest(forest: Forest, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(forest_to_dict(forest), fh)


def load_forest(path) -> Forest:
    with open(path, encoding="utf-8") as fh:
        return forest_from_dict(json.load(fh))
