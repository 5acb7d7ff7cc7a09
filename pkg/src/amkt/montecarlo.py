"""Finite-population check of the continuum delegation equilibrium.

Each run draws ``m_users`` private costs by inverse-transform sampling and
lets every user delegate iff ``delta_u - c - tau > 0``. Generators are
numpy ``PCG64`` streams, one per run, seeded from the run's own seed.
"""

from __future__ import annotations

import math
import os
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .market import MarketParams
from .publisher import PublisherProfile

RNG_ALGORITHM = "numpy.PCG64"
CSV_COLUMNS = ("seed", "m_users", "tau", "a_hat", "a_true", "abs_error", "ci_halfwidth")


@dataclass(frozen=True)
class SimConfig:
    m_users: int
    seed: int
    tau: float = 0.0

    def __post_init__(self) -> None:
        if self.m_users < 1:
            raise ValueError(f"m_users must be >= 1, got {self.m_users}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class SimResult:
    a_hat: float
    a_true: float
    price_hat: float
    ci_halfwidth: float
    per_publisher_revenue: dict[str, float] = field(default_factory=dict)
    rng: str = RNG_ALGORITHM

    @property
    def abs_error(self) -> float:
        return abs(self.a_hat - self.a_true)

    @property
    def within_ci(self) -> bool:
        return self.abs_error <= self.ci_halfwidth


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def spawn_seeds(root_seed: int, n: int) -> list[int]:
    """Derive ``n`` independent 64-bit run seeds from one root seed."""
    children = np.random.SeedSequence(root_seed).spawn(n)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def simulate_delegation(
    p: MarketParams, cfg: SimConfig, roster: Sequence[PublisherProfile] = ()
) -> SimResult:
    rng = make_rng(cfg.seed)
    costs = p.cost_dist.ppf(rng.random(cfg.m_users))
    delegates = (p.delta_u - costs - cfg.tau) > 0
    a_hat = float(np.count_nonzero(delegates)) / cfg.m_users
    a_true = p.cost_dist.cdf(p.delta_u - cfg.tau)
    price_hat = p.v * (1.0 - a_hat)
    return SimResult(
        a_hat=a_hat,
        a_true=a_true,
        price_hat=price_hat,
        ci_halfwidth=3.0 * math.sqrt(a_true * (1.0 - a_true) / cfg.m_users),
        per_publisher_revenue={pub.id: pub.s * price_hat for pub in roster},
    )


@dataclass(frozen=True)
class ConvergenceTable:
    """Per-run errors of a sweep over seeds and population sizes."""

    rows: tuple[dict, ...]

    def mean_errors(self) -> dict[int, float]:
        by_m: dict[int, list[float]] = {}
        for row in self.rows:
            by_m.setdefault(row["m_users"], []).append(row["abs_error"])
        return {m: float(np.mean(errs)) for m, errs in sorted(by_m.items())}

    def loglog_slope(self) -> float:
        """Least-squares slope of log mean error against log population size."""
        means = self.mean_errors()
        if len(means) < 2:
            raise ValueError("slope needs at least two population sizes")
        x = np.log([float(m) for m in means])
        y = np.log(list(means.values()))
        return float(np.polyfit(x, y, 1)[0])

    def coverage(self, m_users: int) -> float:
        hits = [r["abs_error"] <= r["ci_halfwidth"] for r in self.rows if r["m_users"] == m_users]
        return sum(hits) / len(hits)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("AMKT_THREADS", "1")))
    except ValueError:
        return 1


def convergence_sweep(
    p: MarketParams, seeds: Iterable[int], m_grid: Iterable[int], tau: float = 0.0
) -> ConvergenceTable:
    """Run every (population size, seed) cell and record its absolute share error.

    Cells are independent and may run in parallel (``AMKT_THREADS``); rows
    always come back ordered by population size, then seed.
    """
    seeds = list(seeds)
    m_grid = list(m_grid)
    if not seeds or not m_grid:
        raise ValueError("seeds and m_grid must be nonempty")
    cells = [(m, seed) for m in m_grid for seed in seeds]

    def run(cell):
        m, seed = cell
        res = simulate_delegation(p, SimConfig(m_users=m, seed=seed, tau=tau))
        return {
            "seed": seed,
            "m_users": m,
            "tau": tau,
            "a_hat": res.a_hat,
            "a_true": res.a_true,
            "abs_error": res.abs_error,
            "ci_halfwidth": res.ci_halfwidth,
        }

    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run, cells))
    else:
        rows = [run(c) for c in cells]
    return ConvergenceTable(rows=tuple(rows))
