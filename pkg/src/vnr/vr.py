"""Price functional, intrinsic-risk map, and acceptance-set constructions.

The price functional pi(r) is the cheapest price of a family member with
risk reduction at least r; the intrinsic risk r_measure(p) is its
generalized left inverse sup{s | pi(s) <= p}, with -inf below the infimum
of achievable prices and +inf above their supremum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

from ._monotone import sup_below
from .distributions import Distribution, ScenarioSpace
from .families import TestFamily


@dataclass(frozen=True)
class VnRContext:
    """Evaluation context binding a family to one (payoff, measure) pair."""

    family: TestFamily
    scenario: ScenarioSpace
    variable_name: str
    measure_name: str
    tolerance: float = 1e-9
    bracket: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        self.scenario.variable(self.variable_name)
        self.scenario.measure(self.measure_name)
        if self.bracket is not None:
            lo, hi = self.bracket
            dlo, dhi = self.family.domain
            if not (lo < hi and dlo <= lo and hi <= dhi):
                raise ValueError("bracket must be a non-empty interval inside the family domain")

    @property
    def payoffs(self) -> tuple[float, ...]:
        return self.scenario.variable(self.variable_name)

    @property
    def weights(self) -> tuple[float, ...]:
        return self.scenario.measure(self.measure_name)

    def with_measure(self, name: str) -> "VnRContext":
        return replace(self, measure_name=name)

    def with_variable(self, name: str) -> "VnRContext":
        return replace(self, variable_name=name)


def pi(ctx: VnRContext, r: float) -> float:
    """Cheapest price of a risk reduction of at least r (closed form)."""
    return ctx.family.pi(r, ctx.payoffs, ctx.weights)


def r_measure(ctx: VnRContext, p: float) -> float:
    """sup{s | pi(s) <= p} by bracket doubling and bisection.

    The returned s either satisfies |pi(s) - p| <= tolerance or localizes a
    jump of pi straddling p to an interval of width <= tolerance.
    """
    return sup_below(lambda s: pi(ctx, s), p, tol=ctx.tolerance)


def h_function(ctx: VnRContext, p: float) -> float:
    """sup of the risk reduction over family members priced at or below p.

    sup over the empty set is -inf.  The family's canonical parameter search
    honours ctx.bracket when it is set.
    """
    fam = ctx.family
    if ctx.bracket is not None:
        lo, hi = ctx.bracket
        t_lo, t_hi = sorted((fam.to_canonical(lo), fam.to_canonical(hi)))
        t_star = sup_below(
            lambda t: fam.price_at(t, ctx.payoffs, ctx.weights), p, t_lo, t_hi,
            tol=min(ctx.tolerance, 1e-12),
        )
        return -math.inf if t_star == -math.inf else fam.c_at(t_star)
    return fam.h(p, ctx.payoffs, ctx.weights, tol=min(ctx.tolerance, 1e-12))


def h_plus(ctx: VnRContext, p: float, delta: float = 1e-9) -> float:
    """Right-continuous regularization inf_{s > p} h_function(s)."""
    return h_function(ctx, p + delta)


def h_grid_oracle(ctx: VnRContext, p: float, grid_points: int = 10_001) -> float:
    """Plain parameter-sweep version of h_function, used as a cross-check."""
    if ctx.bracket is None:
        raise ValueError("grid oracle needs an explicit parameter bracket")
    lo, hi = ctx.bracket
    fam, xs, qs = ctx.family, ctx.payoffs, ctx.weights
    best = -math.inf
    for i in range(grid_points):
        alpha = lo + (hi - lo) * i / (grid_points - 1)
        if fam.price_at(fam.to_canonical(alpha), xs, qs) <= p:
            best = max(best, fam.risk_reduction(alpha))
    return best


# -- acceptance-set constructions --------------------------------------------


@dataclass(frozen=True)
class AcceptanceFamily:
    """Doubly-indexed acceptance sets A_m^p over distributions.

    Structures:
      * ``ca``      -- A_m^p = T_{-m} A^p for a p-indexed base set, given as a
        predicate ``base(p, d)``; membership must be monotone in m.
      * ``aff``     -- price-affine: the measure is p + beta(d).
      * ``di``      -- deviation-invariant: the measure is beta(T_{-p} d).
      * ``generic`` -- arbitrary predicate ``member(p, m, d)``; needs either
        monotonicity in m or an explicit m-grid to scan.
    """

    structure: str
    base: Callable[[float, Distribution], bool] | None = None
    beta: Callable[[Distribution], float] | None = None
    member: Callable[[float, float, Distribution], bool] | None = None
    monotone_in_m: bool = True
    m_grid: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.structure not in ("ca", "aff", "di", "generic"):
            raise ValueError(f"unknown acceptance structure {self.structure!r}")
        needs = {"ca": self.base, "aff": self.beta, "di": self.beta, "generic": self.member}
        if needs[self.structure] is None:
            raise ValueError(f"structure {self.structure!r} is missing its defining map")


def acceptance_r(
    fam: AcceptanceFamily, p: float, d: Distribution, tol: float = 1e-9
) -> float:
    """inf{m | d in A_m^p}: required capital on top of the price p."""
    if fam.structure == "aff":
        return p + fam.beta(d)
    if fam.structure == "di":
        return fam.beta(d.translate(-p))
    if fam.structure == "ca":
        return _inf_member(lambda m: fam.base(p, d.translate(m)), tol)
    if not fam.monotone_in_m:
        if fam.m_grid is None:
            raise ValueError("non-monotone generic acceptance family needs an m-grid")
        hits = [m for m in fam.m_grid if fam.member(p, m, d)]
        return min(hits) if hits else math.inf
    return _inf_member(lambda m: fam.member(p, m, d), tol)


def _inf_member(member: Callable[[float], bool], tol: float) -> float:
    """inf{m | member(m)} for membership monotone non-decreasing in m."""
    # sup of the complement: member(m) <=> indicator 0/1 step at the target
    value = sup_below(lambda m: 1.0 if member(m) else 0.0, 0.5, tol=tol)
    if value == -math.inf:  # member everywhere: every m was acceptable
        return -math.inf
    if value == math.inf:  # member nowhere within the searched range
        return math.inf
    return value
