"""Exact risk measures on finite distributions and constructive checks of
where comonotonic additivity conflicts with other desirable properties."""

from .comonotone import ScenarioTable, comonotonic_counterpart, is_comonotonic
from .distortions import Distortion, KusuokaMeasure, SpectralDensity, kusuoka_from_distortion, spectral_from_distortion
from .distributions import DiscretePosition, left_quantile, mean, right_quantile
from .errors import (
    BracketError,
    ComonoriskError,
    DegenerateProblem,
    DomainError,
    InvariantViolation,
    UnsatisfiableError,
)
from .measures import AcceptanceSet, RiskMeasure, avar, choquet, kusuoka_mix, max_loss, spectral, var
from .reports import CheckReport

__version__ = "0.1.0"

__all__ = [
    "AcceptanceSet",
    "BracketError",
    "CheckReport",
    "ComonoriskError",
    "DegenerateProblem",
    "DiscretePosition",
    "Distortion",
    "DomainError",
    "InvariantViolation",
    "KusuokaMeasure",
    "RiskMeasure",
    "ScenarioTable",
    "SpectralDensity",
    "UnsatisfiableError",
    "avar",
    "choquet",
    "comonotonic_counterpart",
    "is_comonotonic",
    "kusuoka_from_distortion",
    "kusuoka_mix",
    "left_quantile",
    "max_loss",
    "mean",
    "right_quantile",
    "spectral",
    "spectral_from_distortion",
    "var",
]
