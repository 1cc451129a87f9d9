"""Seeded data generators for the threshold-selection and
prediction-accuracy simulation studies.

Study 1.a: one non-informative uniform predictor on [-3, 3], unit
exponential survival.  Study 1.b: one uniform predictor with a log-scale
threshold effect.  Study 2: four informative equicorrelated normal
predictors (rounded to 0.1), location parameter from a fixed probability
tree, Weibull noise, optional noise block and dichotomization.

Censoring is exponential; the rate is solved analytically for unit
exponential survival and by Monte-Carlo bisection otherwise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .data import SurvivalDataset
from .errors import CalibrationError, ConfigError
from .forest import best_split
from .splits import SplitRule

CALIBRATION_DRAWS = 100_000
CALIBRATION_TOL = 0.005


def exponential_censoring_rate(target_rate: float) -> float:
    """Censoring rate c with P(C < T) = target for T ~ Exp(1), C ~ Exp(c)."""
    if not 0.0 < target_rate < 1.0:
        raise ConfigError("censoring rate must lie in (0, 1)")
    return target_rate / (1.0 - target_rate)


def calibrate_censoring(sample_survival, target_rate: float, seed: int = 0) -> float:
    """Monte-Carlo bisection for the exponential censoring rate.

    `sample_survival(rng, m)` must return m independent survival times.
    The achieved censoring fraction is matched to `target_rate` within
    CALIBRATION_TOL on a fixed sample of CALIBRATION_DRAWS draws.
    """
    if not 0.0 < target_rate < 1.0:
        raise ConfigError("censoring rate must lie in (0, 1)")
    rng = np.random.default_rng([seed, 0xCA11])
    T = np.asarray(sample_survival(rng, CALIBRATION_DRAWS), dtype=float)
    E = rng.exponential(1.0, size=T.size)  # censoring times are E / c

    def frac(c):
        return float(np.mean(E / c < T))

    lo, hi = 1e-9, 1.0
    for _ in range(60):
        if frac(hi) >= target_rate:
            break
        hi *= 4.0
    else:
        raise CalibrationError("could not bracket the censoring rate")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f = frac(mid)
        if abs(f - target_rate) <= CALIBRATION_TOL:
            return mid
        if f < target_rate:
            lo = mid
        else:
            hi = mid
    raise CalibrationError("censoring-rate bisection did not converge")


def _apply_censoring(T, rate_c, rng):
    C = rng.exponential(1.0 / rate_c, size=T.size)
    time = np.minimum(T, C)
    status = (T <= C).astype(np.int8)
    return time, status


# ---------------------------------------------------------------------------
# Study 1: threshold selection


@dataclass(frozen=True)
class Study1Config:
    variant: str = "a"  # "a" non-informative, "b" threshold model
    n: int | None = None  # defaults: 1000 (a), 100 (b)
    true_threshold: float = 0.25  # variant b only
    censoring_rate: float = 0.5
    replications: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.variant not in ("a", "b"):
            raise ConfigError("variant must be 'a' or 'b'")
        if not 0.0 < self.censoring_rate < 1.0:
            raise ConfigError("censoring rate must lie in (0, 1)")
        if self.n is None:
            object.__setattr__(self, "n", 1000 if self.variant == "a" else 100)

    @property
    def x_range(self) -> tuple[float, float]:
        return (-3.0, 3.0) if self.variant == "a" else (0.0, 1.0)


def study1_censoring_rate(config: Study1Config) -> float:
    if config.variant == "a":
        return exponential_censoring_rate(config.censoring_rate)

    def sampler(rng, m):
        x = rng.uniform(0.0, 1.0, m)
        return np.exp((x > config.true_threshold) + rng.standard_normal(m))

    return calibrate_censoring(sampler, config.censoring_rate, seed=config.seed)


def gen_study1(config: Study1Config, replication: int, rate_c: float | None = None):
    """One replication of study 1 as a single-predictor dataset."""
    if rate_c is None:
        rate_c = study1_censoring_rate(config)
    rng = np.random.default_rng([config.seed, 1, replication])
    if config.variant == "a":
        x = rng.uniform(-3.0, 3.0, config.n)
        T = rng.exponential(1.0, config.n)
    else:
        x = rng.uniform(0.0, 1.0, config.n)
        T = np.exp((x > config.true_threshold) + rng.standard_normal(config.n))
    time, status = _apply_censoring(T, rate_c, rng)
    return SurvivalDataset(time, status, x[:, None], ("x",))


def select_root_threshold(data: SurvivalDataset, rule: SplitRule) -> float:
    """Argmax threshold of an exhaustive root-split scan (single predictor)."""
    if data.p != 1:
        raise ConfigError("threshold selection expects a single predictor")
    split = best_split(data.time, data.status, data.X, np.array([0]), rule)
    if split is None:
        from .errors import DegenerateSplit

        raise DegenerateSplit("no valid root split")
    return split.threshold


# ---------------------------------------------------------------------------
# Study 2: tree-model location parameters + Weibull survival


@dataclass(frozen=True)
class TreeModelNode:
    """Node of the fixed probability tree producing location parameters."""

    variable: int | None = None
    threshold: float | None = None
    left: "TreeModelNode | None" = None
    right: "TreeModelNode | None" = None
    value: float | None = None

    @property
    def is_leaf(self) -> bool:
        return self.variable is None

    def evaluate(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.empty(X.shape[0])

        def walk(node, idx):
            if node.is_leaf:
                out[idx] = node.value
                return
            left = X[idx, node.variable] <= node.threshold
            walk(node.left, idx[left])
            walk(node.right, idx[~left])

        walk(self, np.arange(X.shape[0]))
        return out

    def leaf_values(self):
        if self.is_leaf:
            return [self.value]
        return self.left.leaf_values() + self.right.leaf_values()


def _node_from_dict(d) -> TreeModelNode:
    if "value" in d:
        v = float(d["value"])
        if not 0.0 <= v <= 1.0:
            raise ConfigError("tree-model leaf values must lie in [0, 1]")
        return TreeModelNode(value=v)
    return TreeModelNode(
        variable=int(d["variable"]),
        threshold=float(d["threshold"]),
        left=_node_from_dict(d["left"]),
        right=_node_from_dict(d["right"]),
    )


def _node_to_dict(node: TreeModelNode):
    if node.is_leaf:
        return {"value": node.value}
    return {
        "variable": node.variable,
        "threshold": node.threshold,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def load_tree_model(path) -> TreeModelNode:
    with open(path, encoding="utf-8") as fh:
        return _node_from_dict(json.load(fh))


def save_tree_model(node: TreeModelNode, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_node_to_dict(node), fh, indent=2)


def default_tree_model() -> TreeModelNode:
    """Depth-3 location tree over the four informative variables.

    Splits x1 at 0, then x2 (left) / x3 (right) at 0, then x4 at 0;
    leaf location values span [0, 1].
    """
    leaves = [0.0, 0.15, 0.3, 0.45, 0.55, 0.7, 0.85, 1.0]

    def pair(var, lo, hi):
        return TreeModelNode(
            variable=var,
            threshold=0.0,
            left=TreeModelNode(value=lo),
            right=TreeModelNode(value=hi),
        )

    return TreeModelNode(
        variable=0,
        threshold=0.0,
        left=TreeModelNode(
            variable=1,
            threshold=0.0,
            left=pair(3, leaves[0], leaves[1]),
            right=pair(3, leaves[2], leaves[3]),
        ),
        right=TreeModelNode(
            variable=2,
            threshold=0.0,
            left=pair(3, leaves[4], leaves[5]),
            right=pair(3, leaves[6], leaves[7]),
        ),
    )


@dataclass(frozen=True)
class Study2Config:
    n: int = 100
    p: int = 10
    censoring_rate: float = 0.5
    dichotomize: bool = False
    correlation: float = 0.5
    n_test: int = 1000
    seed: int = 0
    tree_model: TreeModelNode = field(default_factory=default_tree_model)

    def __post_init__(self):
        if self.p < 4:
            raise ConfigError("study 2 needs at least the 4 informative variables")
        if not 0.0 < self.censoring_rate < 1.0:
            raise ConfigError("censoring rate must lie in (0, 1)")
        if not 0.0 <= self.correlation < 1.0:
            raise ConfigError("correlation must lie in [0, 1)")


def _draw_predictors(config: Study2Config, rng, n):
    """Equicorrelated standard normal block(s), rounded to multiples of 0.1.

    The informative block (4 columns) and the noise block (p - 4
    columns) are internally equicorrelated but mutually independent.
    """
    rho = config.correlation

    def block(cols):
        shared = rng.standard_normal((n, 1))
        return np.sqrt(rho) * shared + np.sqrt(1.0 - rho) * rng.standard_normal(
            (n, cols)
        )

    X = block(4)
    if config.p > 4:
        X = np.hstack([X, block(config.p - 4)])
    return np.round(X, 1)


def _survival_times(config: Study2Config, rng, X):
    lam = config.tree_model.evaluate(X[:, :4])
    sigma = float(np.std(lam))
    # standard minimum extreme value noise: log of a unit exponential
    eps = np.log(rng.exponential(1.0, size=X.shape[0]))
    return np.exp(lam + sigma * eps)


def study2_censoring_rate(config: Study2Config) -> float:
    def sampler(rng, m):
        return _survival_times(config, rng, _draw_predictors(config, rng, m))

    return calibrate_censoring(sampler, config.censoring_rate, seed=config.seed)


def _gen_study2_one(config: Study2Config, rng, n, rate_c) -> SurvivalDataset:
    X = _draw_predictors(config, rng, n)
    T = _survival_times(config, rng, X)
    time, status = _apply_censoring(T, rate_c, rng)
    if config.dichotomize:
        X = (X > 0).astype(float)
    names = tuple(f"x{j + 1}" for j in range(config.p))
    return SurvivalDataset(time, status, X, names)


def gen_study2(config: Study2Config, replication: int, rate_c: float | None = None):
    """One replication of study 2: (learning set, test set)."""
    if rate_c is None:
        rate_c = study2_censoring_rate(config)
    rng = np.random.default_rng([config.seed, 2, replication])
    learn = _gen_study2_one(config, rng, config.n, rate_c)
    test = _gen_study2_one(config, rng, config.n_test, rate_c)
    return learn, test
