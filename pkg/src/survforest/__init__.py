"""Random survival forests with concordance-based node splitting."""

from .data import (
    RiskTable,
    StepFunction,
    SurvivalDataset,
    build_risk_table,
    kaplan_meier,
    nelson_aalen,
)
from .errors import (
    CalibrationError,
    ConfigError,
    DegenerateEvaluation,
    DegenerateSplit,
    EmptyNode,
    EmptyRiskTable,
    LoadError,
    SurvForestError,
    TreeDegenerate,
)
from .evaluate import (
    ConcordanceResult,
    ImportanceReport,
    harrell_c,
    permutation_importance,
    uno_c,
)
from .forest import (
    Forest,
    ForestConfig,
    SplitCandidate,
    best_split,
    grow_tree,
    load_forest,
    save_forest,
    train,
)
from .simulate import (
    Study1Config,
    Study2Config,
    calibrate_censoring,
    default_tree_model,
    exponential_censoring_rate,
    gen_study1,
    gen_study2,
    select_root_threshold,
)
from .splits import (
    SplitEvaluation,
    SplitRule,
    evaluate_split,
    gehan_u,
    harrell_c_split,
    logrank_statistic,
    parse_split_rule,
    weighted_logrank_statistic,
)

__version__ = "0.1.0"

__all__ = [
    "RiskTable",
    "StepFunction",
    "SurvivalDataset",
    "build_risk_table",
    "kaplan_meier",
    "nelson_aalen",
    "SurvForestError",
    "LoadError",
    "ConfigError",
    "EmptyNode",
    "EmptyRiskTable",
    "DegenerateSplit",
    "TreeDegenerate",
    "DegenerateEvaluation",
    "CalibrationError",
    "ConcordanceResult",
    "ImportanceReport",
    "harrell_c",
    "uno_c",
    "permutation_importance",
    "Forest",
    "ForestConfig",
    "SplitCandidate",
    "best_split",
    "grow_tree",
    "train",
    "save_forest",
    "load_forest",
    "Study1Config",
    "Study2Config",
    "calibrate_censoring",
    "exponential_censoring_rate",
    "default_tree_model",
    "gen_study1",
    "gen_study2",
    "select_root_threshold",
    "SplitRule",
    "SplitEvaluation",
    "parse_split_rule",
    "evaluate_split",
    "logrank_statistic",
    "weighted_logrank_statistic",
    "gehan_u",
    "harrell_c_split",
]
