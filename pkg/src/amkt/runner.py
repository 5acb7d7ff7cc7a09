"""Run analyses over a validated scenario and collect a report."""

from __future__ import annotations

import dataclasses
import logging
import os
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional

from . import __version__
from .collapse import critical_threshold
from .errors import CollapseError, ValidationError
from .intervention import fee_passthrough, pigouvian_fee, taxed_equilibrium
from .market import (
    deadweight_loss,
    impression_price,
    mispricing,
    private_equilibrium,
    social_optimum,
    social_welfare,
)
from .montecarlo import RNG_ALGORITHM, SimConfig, simulate_delegation
from .publisher import best_strategy, inelasticity_threshold
from .scenario import DEFAULT_SEED, PIGOUVIAN, Scenario, SimSpec, SweepSpec, check_sweep, with_param

log = logging.getLogger(__name__)

ANALYSES = ("equilibrium", "welfare", "strategy", "tax", "collapse", "montecarlo")
COLLAPSE_FIELDS = (
    "a_c", "marginal_id", "pi_at_root", "stability_slope",
    "d_ac_dv", "d_ac_dtheta", "d_ac_dphi",
)


@dataclass
class RunReport:
    scenario_digest: str
    analyses: tuple[str, ...]
    seed: dict
    results: Optional[dict] = None
    sweep: Optional[dict] = None
    points: list = field(default_factory=list)
    version: str = __version__

    def to_dict(self) -> dict:
        out = {
            "tool": {"name": "amkt", "version": self.version},
            "scenario_digest": self.scenario_digest,
            "analyses": list(self.analyses),
            "seed": self.seed,
        }
        if self.sweep is None:
            out["results"] = self.results
        else:
            out["sweep"] = self.sweep
            out["points"] = self.points
        return out


def parse_analyses(names: Optional[Iterable[str]]) -> tuple[str, ...]:
    if names is None:
        return ANALYSES
    chosen = [n.strip() for n in names if n.strip()]
    unknown = sorted(set(chosen) - set(ANALYSES))
    if unknown:
        raise ValidationError("analyses", f"unknown analyses {unknown}; choose from {list(ANALYSES)}")
    # canonical order keeps output independent of flag order
    return tuple(n for n in ANALYSES if n in chosen)


def _resolve_fee(fee, sc: Scenario) -> float:
    return pigouvian_fee(sc.market) if fee == PIGOUVIAN else float(fee)


def _effective_share(sc: Scenario) -> tuple[float, str]:
    if sc.a is not None:
        return sc.a, "fixed"
    if sc.tax is not None:
        tau = _resolve_fee(sc.tax, sc)
        return sc.market.cost_dist.cdf(sc.market.delta_u - tau), "taxed"
    return private_equilibrium(sc.market), "private"


def _welfare_dict(w) -> dict:
    return dataclasses.asdict(w)


def _equilibrium(sc: Scenario) -> dict:
    a, source = _effective_share(sc)
    return {
        "a_priv": private_equilibrium(sc.market),
        "a_star": social_optimum(sc.market),
        "a": a,
        "a_source": source,
        "price": impression_price(sc.market.v, a),
    }


def _welfare(sc: Scenario) -> dict:
    p = sc.market
    a, _ = _effective_share(sc)
    return {
        "at_private": _welfare_dict(social_welfare(private_equilibrium(p), p)),
        "at_optimum": _welfare_dict(social_welfare(social_optimum(p), p)),
        "dwl": deadweight_loss(p),
        "mispricing": dataclasses.asdict(mispricing(a, p.v)),
    }


def _strategy(sc: Scenario) -> dict:
    a, _ = _effective_share(sc)
    av = sc.agent_valuation
    pubs = {}
    for pub in sc.publishers:
        out = best_strategy(pub, sc.market.v, a, av)
        pubs[pub.id] = {
            "revenue_null": out.revenue_null,
            "revenue_blocking": out.revenue_blocking,
            "revenue_tolling": out.revenue_tolling,
            "optimal_toll": out.optimal_toll,
            "chosen": out.chosen.value,
            "assumption_a_valid": out.assumption_a_valid,
        }
    return {
        "a": a,
        "tau_max": None if av is None else inelasticity_threshold(av),
        "publishers": pubs,
    }


def _tax(sc: Scenario) -> dict:
    fee = sc.tax if sc.tax is not None else PIGOUVIAN
    tau = _resolve_fee(fee, sc)
    if tau < 0:
        log.warning("corrective fee %.6g is negative: v < m, so it acts as a subsidy", tau)
    eq = taxed_equilibrium(sc.market, tau)
    agent_fee, user_fee = fee_passthrough(tau)
    return {
        "tau": tau,
        "tau_source": "pigouvian" if fee == PIGOUVIAN else "fixed",
        "is_subsidy": eq.is_subsidy,
        "a_of_tau": eq.a_of_tau,
        "a_star": social_optimum(sc.market),
        "welfare_at_a": eq.welfare_at_a,
        "dwl_remaining": eq.dwl_remaining,
        "agent_fee": agent_fee,
        "user_fee": user_fee,
    }


def _collapse(sc: Scenario) -> dict:
    block: dict[str, Any] = {"status": "ok", "message": None}
    block.update({k: None for k in COLLAPSE_FIELDS})
    block["recovery_windows"] = []
    try:
        rep = critical_threshold(sc.publishers, sc.market.v)
    except CollapseError as exc:
        # viability boundaries are routinely crossed in sweeps; report, don't abort
        block["status"] = type(exc).__name__
        block["message"] = str(exc)
        return block
    for k in COLLAPSE_FIELDS:
        block[k] = getattr(rep, k)
    block["recovery_windows"] = [list(w) for w in rep.recovery_windows]
    return block


def _montecarlo(sc: Scenario, seed: int) -> dict:
    spec = sc.sim or SimSpec()
    tau = _resolve_fee(spec.tau, sc)
    res = simulate_delegation(sc.market, SimConfig(m_users=spec.m_users, seed=seed, tau=tau), sc.publishers)
    return {
        "seed": seed,
        "m_users": spec.m_users,
        "tau": tau,
        "rng": res.rng,
        "a_hat": res.a_hat,
        "a_true": res.a_true,
        "abs_error": res.abs_error,
        "ci_halfwidth": res.ci_halfwidth,
        "within_ci": res.within_ci,
        "price_hat": res.price_hat,
        "per_publisher_revenue": res.per_publisher_revenue,
    }


def _seed_provenance(sc: Scenario, seed: Optional[int]) -> dict:
    if seed is not None:
        value, source = seed, "cli"
    elif sc.sim is not None and sc.sim.seed is not None:
        value, source = sc.sim.seed, "scenario"
    else:
        value, source = DEFAULT_SEED, "default"
    return {"value": value, "source": source, "rng": RNG_ALGORITHM}


def evaluate(sc: Scenario, analyses: tuple[str, ...], seed: int) -> dict:
    """Result blocks for one scenario, keyed by analysis name."""
    blocks = {
        "equilibrium": _equilibrium,
        "welfare": _welfare,
        "strategy": _strategy,
        "tax": _tax,
        "collapse": _collapse,
        "montecarlo": lambda s: _montecarlo(s, seed),
    }
    return {name: blocks[name](sc) for name in analyses}


def run(sc: Scenario, analyses: Optional[Iterable[str]] = None, seed: Optional[int] = None) -> RunReport:
    chosen = parse_analyses(analyses)
    prov = _seed_provenance(sc, seed)
    return RunReport(
        scenario_digest=sc.digest(),
        analyses=chosen,
        seed=prov,
        results=evaluate(sc, chosen, prov["value"]),
    )


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("AMKT_THREADS", "1")))
    except ValueError:
        return 1


def run_sweep(
    sc: Scenario,
    analyses: Optional[Iterable[str]] = None,
    sweep: Optional[SweepSpec] = None,
    seed: Optional[int] = None,
) -> RunReport:
    """Re-run the analyses at every grid value of one scalar parameter.

    Grid points may be evaluated in parallel (``AMKT_THREADS``); points are
    always reported in grid order.
    """
    sweep = sweep or sc.sweep
    if sweep is None:
        raise ValidationError("sweep", "no sweep given in the scenario or on the command line")
    check_sweep(sc.raw, sweep)
    chosen = parse_analyses(analyses)
    prov = _seed_provenance(sc, seed)
    values = sweep.values()

    def point(item):
        i, x = item
        return {"index": i, "value": x, "results": evaluate(with_param(sc, sweep.param, x), chosen, prov["value"])}

    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(point, enumerate(values)))
    else:
        points = [point(item) for item in enumerate(values)]
    return RunReport(
        scenario_digest=sc.digest(),
        analyses=chosen,
        seed=prov,
        sweep=dataclasses.asdict(sweep),
        points=points,
    )
