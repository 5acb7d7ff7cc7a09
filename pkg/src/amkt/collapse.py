"""Collapse threshold of the ad-funded market.

Every publisher tolls (the dominant strategy), so publisher ``i`` earns
``s v (1 - a) + theta a^2 s^2 / 2 - phi`` at delegation share ``a``. The
market survives while the best of these profits is non-negative; the
threshold is the smallest share at which it reaches zero.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSlope, DomainError, EmptyRoster, NoCollapse, NotViableAtZero
from .publisher import PublisherProfile

GRID_INTERVALS = 1000
BISECT_TOL = 1e-12
SLOPE_TOL = 1e-12


@dataclass(frozen=True)
class CollapseReport:
    """Threshold, its marginal publisher, and IFT comparative statics.

    ``recovery_windows`` lists share intervals above ``a_c`` where the max
    profit turns positive again. A single publisher never has one (its profit
    is a convex quadratic); rosters can.
    """

    a_c: float
    marginal_id: str
    pi_at_root: float
    stability_slope: float
    d_ac_dv: float = float("nan")
    d_ac_dtheta: float = float("nan")
    d_ac_dphi: float = float("nan")
    recovery_windows: tuple[tuple[float, float], ...] = ()


def _profit(pub: PublisherProfile, v: float, a: float) -> float:
    return pub.s * v * (1.0 - a) + 0.5 * pub.theta * a * a * pub.s * pub.s - pub.phi


def market_profit(a: float, roster: Sequence[PublisherProfile], v: float) -> tuple[float, str]:
    """Best publisher profit at share ``a`` and who earns it (lowest id on ties)."""
    if not roster:
        raise EmptyRoster("publisher roster is empty")
    if not 0.0 <= a <= 1.0:
        raise DomainError(f"delegation share must lie in [0, 1], got {a}")
    best = None
    for pub in roster:
        value = _profit(pub, v, a)
        if best is None or value > best[0] or (value == best[0] and pub.id < best[1]):
            best = (value, pub.id)
    return best


def _envelope(grid: np.ndarray, roster: Sequence[PublisherProfile], v: float) -> np.ndarray:
    s = np.array([p.s for p in roster])[:, None]
    theta = np.array([p.theta for p in roster])[:, None]
    phi = np.array([p.phi for p in roster])[:, None]
    return (s * v * (1.0 - grid) + 0.5 * theta * grid**2 * s**2 - phi).max(axis=0)


def _bisect(f, lo: float, hi: float, tol: float = BISECT_TOL) -> float:
    """Sign change of ``f`` inside ``[lo, hi]``, with ``f(lo) > 0 >= f(hi)`` or the reverse."""
    positive_lo = f(lo) > 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == positive_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _find_root(roster: Sequence[PublisherProfile], v: float) -> tuple[float, tuple[tuple[float, float], ...]]:
    pi = lambda a: market_profit(a, roster, v)[0]  # noqa: E731
    if pi(0.0) <= 0:
        raise NotViableAtZero("max profit with no AI traffic is not positive: market never viable")
    if pi(1.0) >= 0:
        raise NoCollapse("max profit at full delegation is not negative: tolling alone sustains the market")

    grid = np.linspace(0.0, 1.0, GRID_INTERVALS + 1)
    values = _envelope(grid, roster, v)
    below = np.flatnonzero(values <= 0)
    k = int(below[0])
    if values[k] == 0:
        a_c = float(grid[k])
    else:
        a_c = _bisect(pi, float(grid[k - 1]), float(grid[k]))

    # positive stretches of the envelope past the threshold
    windows = []
    start = None
    for j in range(k, GRID_INTERVALS + 1):
        if values[j] > 0 and start is None:
            start = _bisect(pi, float(grid[j - 1]), float(grid[j]))
        elif values[j] <= 0 and start is not None:
            windows.append((start, _bisect(pi, float(grid[j - 1]), float(grid[j]))))
            start = None
    return a_c, tuple(windows)


def _by_id(roster: Sequence[PublisherProfile], pub_id: str) -> PublisherProfile:
    return next(p for p in roster if p.id == pub_id)


def stability_check(roster: Sequence[PublisherProfile], v: float, a_c: float) -> float:
    """Slope of the marginal publisher's profit at ``a_c``; negative at a stable threshold."""
    _, pub_id = market_profit(a_c, roster, v)
    pub = _by_id(roster, pub_id)
    return -pub.s * v + pub.theta * a_c * pub.s * pub.s


def comparative_statics(report: CollapseReport, marginal: PublisherProfile, v: float) -> CollapseReport:
    """Fill the threshold's sensitivities to ``v``, ``theta`` and ``phi`` by implicit differentiation.

    Raises:
        DegenerateSlope: the marginal profit slope at ``a_c`` is (numerically) zero.
    """
    a, s, theta = report.a_c, marginal.s, marginal.theta
    slope = -s * v + theta * a * s * s
    if abs(slope) < SLOPE_TOL:
        raise DegenerateSlope(f"profit slope {slope!r} at a_c={a!r} is degenerate")
    return dataclasses.replace(
        report,
        d_ac_dv=-s * (1.0 - a) / slope,
        d_ac_dtheta=-(0.5 * a * a * s * s) / slope,
        d_ac_dphi=1.0 / slope,
    )


def critical_threshold(roster: Sequence[PublisherProfile], v: float) -> CollapseReport:
    """Smallest share at which no publisher covers its fixed cost.

    Scans a uniform grid of 1000 intervals for the first sign change of the
    max-profit envelope, then bisects that interval down to 1e-12. Grid then
    bisection stays reliable at the kinks where the envelope switches
    publisher.

    Raises:
        EmptyRoster: no publishers.
        NotViableAtZero: nobody is profitable even without AI traffic.
        NoCollapse: somebody stays profitable at full delegation.
    """
    a_c, windows = _find_root(roster, v)
    pi, marginal_id = market_profit(a_c, roster, v)
    report = CollapseReport(
        a_c=a_c,
        marginal_id=marginal_id,
        pi_at_root=pi,
        stability_slope=stability_check(roster, v, a_c),
        recovery_windows=windows,
    )
    return comparative_statics(report, _by_id(roster, marginal_id), v)


def finite_difference_statics(
    roster: Sequence[PublisherProfile], v: float, marginal_id: str, rel_step: float = 1e-4
) -> dict[str, float]:
    """Central-difference sensitivities of ``a_c`` from full re-solves at bumped parameters."""

    def solve(roster_, v_):
        return _find_root(roster_, v_)[0]

    def bumped(field, factor):
        return [dataclasses.replace(p, **{field: getattr(p, field) * factor}) if p.id == marginal_id else p
                for p in roster]

    out = {}
    h = rel_step * v
    out["v"] = (solve(roster, v + h) - solve(roster, v - h)) / (2 * h)
    pub = _by_id(roster, marginal_id)
    for field, key in (("theta", "theta"), ("phi", "phi")):
        base = getattr(pub, field)
        if base == 0:
            raise DomainError(f"relative bump of {field} needs a nonzero base value")
        up = solve(bumped(field, 1 + rel_step), v)
        down = solve(bumped(field, 1 - rel_step), v)
        out[key] = (up - down) / (2 * rel_step * base)
    return out
