"""Exceedance time of Brownian motion after its running maximum: laws, samplers, checks."""

__version__ = "0.1.0"

from .analytic import (  # noqa: E402
    DomainError,
    IntervalParams,
    LawParams,
    arctan_cdf,
    arctan_density,
    arctan_quantile,
    arctan_survival,
    halfnormal_density,
    interval_cdf,
    reflection_cdf,
)
from .levy_passage import HalfNormal, LevelDistribution, PointMass, passage_cdf, passage_density, sample_passage_time  # noqa: E402
from .simulate import PathConfig, sample_exceedance_exact, simulate_exceedance, simulate_interval_exceedance  # noqa: E402
