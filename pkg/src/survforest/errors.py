"""Exception hierarchy shared across the package.

Each class maps to a distinct CLI exit code (see cli.EXIT_CODES).
"""


class SurvForestError(Exception):
    """Base class for all package errors."""


class LoadError(SurvForestError):
    """Malformed input file (bad schema, non-numeric cell, invalid value)."""


class ConfigError(SurvForestError):
    """Invalid configuration (e.g. mtry > p, dimension mismatch)."""


class EmptyNode(SurvForestError):
    """Estimator applied to an empty data slice."""


class EmptyRiskTable(SurvForestError):
    """Risk table requested for a slice with no events."""


class DegenerateSplit(SurvForestError):
    """Split candidate carries no between-group information; skip it."""


class TreeDegenerate(SurvForestError):
    """Bootstrap resampling failed to produce a sample with events."""


class DegenerateEvaluation(SurvForestError):
    """Concordance undefined (no comparable pairs / no usable weights)."""


class CalibrationError(SurvForestError):
    """Censoring-rate calibration did not converge."""
