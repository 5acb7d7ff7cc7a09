"""Numerical laboratory for AI-agent delegation in ad-funded two-sided markets."""

__version__ = "0.1.0"

from .errors import (
    AmktError,
    DegenerateSlope,
    DomainError,
    EmptyRoster,
    NoCollapse,
    NotViableAtZero,
    ParseError,
    SchemaError,
    UnboundedQuantile,
    ValidationError,
)
from .cost_model import CostDistribution, cdf, pdf, quantile
from .market import (
    MarketParams,
    MispricingReport,
    WelfareBreakdown,
    deadweight_loss,
    impression_price,
    mispricing,
    private_equilibrium,
    social_optimum,
    social_welfare,
    user_surplus,
    welfare_curvature,
    welfare_gradient,
)
from .publisher import (
    AgentValuation,
    PublisherProfile,
    Strategy,
    StrategyOutcome,
    assumption_a_valid,
    best_strategy,
    inelasticity_threshold,
    optimal_toll,
    revenue_blocking,
    revenue_null,
    revenue_tolling,
    validate_roster,
)
from .intervention import TaxedEquilibrium, fee_passthrough, pigouvian_fee, taxed_equilibrium
from .collapse import (
    CollapseReport,
    comparative_statics,
    critical_threshold,
    finite_difference_statics,
    market_profit,
    stability_check,
)
from .montecarlo import SimConfig, SimResult, convergence_sweep, simulate_delegation
