"""Adaptive Simpson quadrature."""

from __future__ import annotations

from collections.abc import Callable

MAX_DEPTH = 50
# subdivide at least this many times before trusting the error estimate
MIN_DEPTH = 4


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_depth: int = MAX_DEPTH,
) -> float:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    Each panel is accepted once the two-halves estimate differs from the
    whole-panel estimate by less than ``15 * tol`` (Richardson's bound); the
    accepted value carries the Richardson correction. Tolerance is halved on
    each split, and recursion stops at ``max_depth`` levels regardless.
    """
    if a == b:
        return 0.0
    if a > b:
        return -adaptive_simpson(f, b, a, tol, max_depth)

    def panel(lo, hi, flo, fmid, fhi, whole, eps, depth):
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm = f(lm)
        frm = f(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - whole
        if depth >= max_depth or (depth >= MIN_DEPTH and abs(delta) <= 15.0 * eps):
            return left + right + delta / 15.0
        return panel(lo, mid, flo, flm, fmid, left, eps / 2.0, depth + 1) + panel(
            mid, hi, fmid, frm, fhi, right, eps / 2.0, depth + 1
        )

    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return panel(a, b, fa, fm, fb, whole, tol, 0)
