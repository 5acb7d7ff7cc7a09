"""Publisher responses to AI traffic: do nothing, block agents, or toll them.

Revenues are computed under short-run inelastic agent demand: a single
publisher's toll moves neither the market-wide AI share nor its own
traffic share. ``assumption_a_valid`` reports whether the optimal toll
actually stays below the agent developer's willingness to pay.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError, EmptyRoster, ValidationError

SHARE_SUM_TOL = 1e-9


class Strategy(str, enum.Enum):
    NULL = "Null"
    BLOCKING = "Blocking"
    TOLLING = "Tolling"


@dataclass(frozen=True)
class PublisherProfile:
    """One publisher.

    Attributes:
        id: identifier, unique within a roster.
        s: traffic share in (0, 1].
        theta: tolling efficiency; the toll cost is ``tau**2 / (2 * theta)``.
        k: fixed cost of blocking agents.
        lam: fraction of delegating users who come back manually once blocked.
        phi: fixed operating cost.
    """

    id: str
    s: float
    theta: float
    k: float
    lam: float = 0.0
    phi: float = 0.0

    def __post_init__(self) -> None:
        where = f"publishers[{self.id}]"
        for name in ("s", "theta", "k", "lam", "phi"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{where}.{name}", "must be finite")
        if not 0.0 < self.s <= 1.0:
            raise ValidationError(f"{where}.s", f"must lie in (0, 1], got {self.s}")
        if self.theta <= 0:
            raise ValidationError(f"{where}.theta", f"must be > 0, got {self.theta}")
        if self.k <= 0:
            raise ValidationError(f"{where}.k", f"must be > 0, got {self.k}")
        if not 0.0 <= self.lam <= 1.0:
            raise ValidationError(f"{where}.lambda", f"must lie in [0, 1], got {self.lam}")
        if self.phi < 0:
            raise ValidationError(f"{where}.phi", f"must be >= 0, got {self.phi}")


@dataclass(frozen=True)
class AgentValuation:
    """What an agent developer gets from one query.

    ``b`` via this publisher, ``b_alt`` via the best imperfect substitute,
    and ``-c_f`` if the query fails outright.
    """

    b: float
    b_alt: float
    c_f: float

    def __post_init__(self) -> None:
        if not self.b_alt < self.b:
            raise ValidationError("agent_valuation.B_alt", f"must be < B, got {self.b_alt} >= {self.b}")
        if self.c_f <= 0:
            raise ValidationError("agent_valuation.C_F", f"must be > 0, got {self.c_f}")


@dataclass(frozen=True)
class StrategyOutcome:
    revenue_null: float
    revenue_blocking: float
    revenue_tolling: float
    optimal_toll: float
    chosen: Strategy
    assumption_a_valid: Optional[bool] = None


def validate_roster(roster: Sequence[PublisherProfile]) -> None:
    """Check a full market roster: nonempty, unique ids, shares summing to one."""
    if not roster:
        raise EmptyRoster("publisher roster is empty")
    ids = [p.id for p in roster]
    if len(set(ids)) != len(ids):
        raise ValidationError("publishers.id", f"duplicate ids in {ids}")
    total = math.fsum(p.s for p in roster)
    if abs(total - 1.0) > SHARE_SUM_TOL:
        raise ValidationError("publishers.s", f"shares must sum to 1, got {total!r}")


def _check_share(a: float) -> None:
    if not 0.0 <= a <= 1.0:
        raise DomainError(f"delegation share must lie in [0, 1], got {a}")


def revenue_null(pub: PublisherProfile, v: float, a: float) -> float:
    _check_share(a)
    return pub.s * v * (1.0 - a)


def revenue_blocking(pub: PublisherProfile, v: float, a: float) -> float:
    """Blocking revenue; may be negative.

    Retained traffic is the human share plus the fraction ``lam`` of
    delegators who return manually, still sold at the pooled price.
    """
    _check_share(a)
    return v * pub.s * (1.0 - a * (1.0 - pub.lam)) * (1.0 - a) - pub.k


def optimal_toll(pub: PublisherProfile, a: float) -> float:
    return pub.theta * a * pub.s


def revenue_tolling(pub: PublisherProfile, v: float, a: float, tau: float) -> float:
    """Ad revenue plus toll income on AI traffic, net of the quadratic toll cost."""
    _check_share(a)
    if tau < 0:
        raise DomainError(f"toll must be >= 0, got {tau}")
    return pub.s * v * (1.0 - a) + a * pub.s * tau - tau * tau / (2.0 * pub.theta)


def tolling_premium(pub: PublisherProfile, a: float) -> float:
    """Extra revenue of optimal tolling over doing nothing: ``theta a^2 s^2 / 2``."""
    return 0.5 * pub.theta * a * a * pub.s * pub.s


def inelasticity_threshold(av: AgentValuation) -> float:
    """Largest toll the developer pays rather than take its outside option."""
    return av.b - max(av.b_alt, -av.c_f)


def assumption_a_valid(pub: PublisherProfile, a: float, av: AgentValuation) -> bool:
    return optimal_toll(pub, a) < inelasticity_threshold(av)


def best_strategy(
    pub: PublisherProfile, v: float, a: float, av: Optional[AgentValuation] = None
) -> StrategyOutcome:
    """Evaluate all three strategies and pick the revenue maximiser.

    Ties go to Tolling when there is AI traffic and to Null when there is
    none, so a premium that underflows to zero cannot flip the choice.
    """
    _check_share(a)
    tau = optimal_toll(pub, a)
    revenues = {
        Strategy.NULL: revenue_null(pub, v, a),
        Strategy.BLOCKING: revenue_blocking(pub, v, a),
        Strategy.TOLLING: revenue_tolling(pub, v, a, tau),
    }
    if a > 0:
        order = (Strategy.TOLLING, Strategy.NULL, Strategy.BLOCKING)
    else:
        order = (Strategy.NULL, Strategy.TOLLING, Strategy.BLOCKING)
    chosen = max(order, key=lambda s: revenues[s])
    return StrategyOutcome(
        revenue_null=revenues[Strategy.NULL],
        revenue_blocking=revenues[Strategy.BLOCKING],
        revenue_tolling=revenues[Strategy.TOLLING],
        optimal_toll=tau,
        chosen=chosen,
        assumption_a_valid=None if av is None else assumption_a_valid(pub, a, av),
    )
