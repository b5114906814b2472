"""Decision-aware scoring of estimated outcome distributions."""

from .core import (
    AssortmentParams,
    CrReport,
    NewsvendorRatio,
    NormalSpec,
    PricingCost,
    RankingDistribution,
    ScalarDistribution,
    cdf,
    competitive_ratio,
    discretize_normal,
    survival,
)

__all__ = [
    "AssortmentParams",
    "CrReport",
    "NewsvendorRatio",
    "NormalSpec",
    "PricingCost",
    "RankingDistribution",
    "ScalarDistribution",
    "cdf",
    "competitive_ratio",
    "discretize_normal",
    "survival",
]

__version__ = "0.1.0"
