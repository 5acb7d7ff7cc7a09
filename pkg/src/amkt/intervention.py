"""Corrective per-delegation fee."""

from __future__ import annotations

from dataclasses import dataclass

from .market import MarketParams, social_optimum, social_welfare


@dataclass(frozen=True)
class TaxedEquilibrium:
    """Delegation outcome when every delegating user pays ``tau``.

    ``dwl_remaining`` is the welfare still lost relative to the efficient
    share. A negative ``tau`` is a subsidy.
    """

    tau: float
    a_of_tau: float
    welfare_at_a: float
    dwl_remaining: float

    @property
    def is_subsidy(self) -> bool:
        return self.tau < 0


def taxed_equilibrium(p: MarketParams, tau: float, method: str = "quadrature") -> TaxedEquilibrium:
    a = p.cost_dist.cdf(p.delta_u - tau)
    w = social_welfare(a, p, method=method).total
    w_star = social_welfare(social_optimum(p), p, method=method).total
    return TaxedEquilibrium(tau=float(tau), a_of_tau=a, welfare_at_a=w, dwl_remaining=w_star - w)


def pigouvian_fee(p: MarketParams) -> float:
    """Fee equal to the net marginal externality of one delegation, ``v - m``.

    Negative when the AI provider's profit exceeds the lost ad value.
    """
    return p.v - p.m


def fee_passthrough(fee: float) -> tuple[float, float]:
    """Access fee charged to agents and the user-facing fee they pass on, one for one."""
    return fee, fee
