"""Bracketed search on monotone non-decreasing scalar maps."""

from __future__ import annotations

import math
from typing import Callable


def sup_below(
    fn: Callable[[float], float],
    target: float,
    lo_bound: float = -math.inf,
    hi_bound: float = math.inf,
    tol: float = 1e-9,
    max_doublings: int = 60,
) -> float:
    """sup{t in [lo_bound, hi_bound] | fn(t) <= target} for non-decreasing fn.

    Returns -inf when no feasible point is found after doubling the bracket
    ``max_doublings`` times, and +inf when fn never exceeds the target on an
    unbounded domain.  The finite result is the feasible end of a bracket of
    width at most ``tol``.
    """
    feasible = None
    for k in range(max_doublings + 1):
        t = max(lo_bound, min(hi_bound, -(2.0**k)))
        if fn(t) <= target:
            feasible = t
            break
        if t == lo_bound:
            break
    if feasible is None:
        return -math.inf

    infeasible = None
    for k in range(max_doublings + 1):
        t = min(hi_bound, 2.0**k)
        if t <= feasible:
            if t == hi_bound:
                break
            continue
        if fn(t) > target:
            infeasible = t
            break
        feasible = t
        if t == hi_bound:
            break
    if infeasible is None:
        if hi_bound == math.inf and fn(2.0**max_doublings) <= target:
            return math.inf
        return feasible

    lo, hi = feasible, infeasible
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if fn(mid) <= target:
            lo = mid
        else:
            hi = mid
    return lo
