"""Pooled pricing, private vs. efficient delegation, and welfare.

Welfare adds user surplus (utility) to publisher revenue and AI-provider
profit (currency), treating both as one numeraire.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cost_model import CostDistribution, Family
from .errors import DomainError, ValidationError
from .quadrature import adaptive_simpson

QUAD_TOL = 1e-10
# logistic lower tail is cut this many scales below the upper limit; the
# neglected mass is below exp(-60)
_TAIL_SCALES = 60.0


@dataclass(frozen=True)
class MarketParams:
    """Market-wide primitives.

    Attributes:
        v: advertiser value of a human impression.
        delta_u: utility gain a user gets from delegating.
        m: AI-provider profit per delegation.
        cost_dist: law of the private delegation cost.
    """

    v: float
    delta_u: float
    m: float
    cost_dist: CostDistribution

    def __post_init__(self) -> None:
        for name in ("v", "delta_u", "m"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValidationError(f"market.{name}", f"must be finite, got {value}")
        if self.v <= 0:
            raise ValidationError("market.v", f"must be > 0, got {self.v}")
        if self.delta_u <= 0:
            raise ValidationError("market.delta_u", f"must be > 0, got {self.delta_u}")
        if self.m < 0:
            raise ValidationError("market.m", f"must be >= 0, got {self.m}")


@dataclass(frozen=True)
class WelfareBreakdown:
    user_surplus: float
    publisher_revenue: float
    ai_profit: float
    total: float


@dataclass(frozen=True)
class MispricingReport:
    """Per-impression advertiser surplus on each side of the pooled price."""

    human_surplus_per_impression: float
    ai_loss_per_impression: float
    expected_surplus: float


def _check_share(a: float) -> float:
    a = float(a)
    if not 0.0 <= a <= 1.0:
        raise DomainError(f"delegation share must lie in [0, 1], got {a}")
    return a


def _check_interior(a: float) -> float:
    a = float(a)
    if not 0.0 < a < 1.0:
        raise DomainError(f"derivative needs an interior share in (0, 1), got {a}")
    return a


def impression_price(v: float, a: float) -> float:
    """Expected value of a pooled impression, ``v * (1 - a)``."""
    a = _check_share(a)
    return v * (1.0 - a)


def private_equilibrium(p: MarketParams) -> float:
    """Share of users whose private cost is below the delegation gain."""
    return p.cost_dist.cdf(p.delta_u)


def social_optimum(p: MarketParams) -> float:
    """Welfare-maximising share. Clamps to 0 or 1 through the CDF at corners."""
    return p.cost_dist.cdf(p.delta_u - (p.v - p.m))


def _surplus_exact(a: float, q: float, p: MarketParams) -> float:
    d = p.cost_dist
    du = p.delta_u
    if d.family is Family.UNIFORM:
        lo, hi = d.params
        return (du * (q - lo) - 0.5 * (q * q - lo * lo)) / (hi - lo)
    if d.family is Family.EXPONENTIAL:
        (rate,) = d.params
        return (du - 1.0 / rate) * a + q * (1.0 - a)
    _, scale = d.params
    # partial mean of the logistic: E[c; c < q] = q a + scale * log(1 - a)
    return (du - q) * a - scale * math.log1p(-a)


def user_surplus(a: float, p: MarketParams, method: str = "quadrature", tol: float = QUAD_TOL) -> float:
    """Aggregate net gain of the users who delegate when the share is ``a``.

    Integrates ``(delta_u - c) f(c)`` from the bottom of the cost support up
    to the ``a``-quantile. ``method="quadrature"`` uses adaptive Simpson at
    absolute tolerance ``tol``; ``method="exact"`` uses the family's closed
    form.

    Raises:
        UnboundedQuantile: ``a = 1`` under a support with no upper bound.
    """
    a = _check_share(a)
    if a == 0.0:
        return 0.0
    d = p.cost_dist
    q = d.quantile(a)
    if method == "exact":
        return _surplus_exact(a, q, p)
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    lo = d.support_lo
    if math.isinf(lo):
        loc, scale = d.params
        lo = min(loc, q) - _TAIL_SCALES * scale
    du = p.delta_u
    return adaptive_simpson(lambda c: (du - c) * d.pdf(c), lo, q, tol=tol)


def social_welfare(a: float, p: MarketParams, method: str = "quadrature") -> WelfareBreakdown:
    us = user_surplus(a, p, method=method)
    rev = impression_price(p.v, a)
    ai = a * p.m
    return WelfareBreakdown(user_surplus=us, publisher_revenue=rev, ai_profit=ai, total=us + rev + ai)


def welfare_gradient(a: float, p: MarketParams) -> float:
    """Marginal welfare of one more unit of delegation.

    The user-surplus term reduces to the marginal user's net gain
    ``delta_u - F^-1(a)``; the price slope is ``-v``.
    """
    a = _check_interior(a)
    return (p.delta_u - p.cost_dist.quantile(a)) - p.v + p.m


def welfare_curvature(a: float, p: MarketParams) -> float:
    """Second derivative of welfare in ``a``; the linear price adds nothing."""
    a = _check_interior(a)
    density = p.cost_dist.pdf(p.cost_dist.quantile(a))
    if density <= 0:
        raise DomainError(f"cost density vanishes at the {a}-quantile")
    return -1.0 / density


def deadweight_loss(p: MarketParams, method: str = "quadrature") -> float:
    """Welfare gap between the efficient and the private delegation share.

    Measured as a difference of welfare levels, so it stays valid at corner
    optima where the first-order condition does not bind.
    """
    w_star = social_welfare(social_optimum(p), p, method=method).total
    w_priv = social_welfare(private_equilibrium(p), p, method=method).total
    return w_star - w_priv


def mispricing(a: float, v: float) -> MispricingReport:
    a = _check_share(a)
    human = v * a
    ai_loss = -v * (1.0 - a)
    return MispricingReport(
        human_surplus_per_impression=human,
        ai_loss_per_impression=ai_loss,
        expected_surplus=(1.0 - a) * human + a * ai_loss,
    )
