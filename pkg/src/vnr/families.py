"""One-parameter derivative test families and their risk-reduction maps.

Each family is an ordered one-parameter class {f_alpha} of payoff transforms
together with a closed-form risk reduction c(alpha) that does not depend on
the underlying payoff.  A canonical re-parameterization t (price and c both
non-decreasing in t) drives the pricing functional and its inverses.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy.optimize import minimize_scalar

from ._monotone import sup_below
from .distributions import Distribution, ScenarioSpace, pushforward
from .risk import RiskMeasure

Weights = Sequence[float]


def _exp(z: float) -> float:
    if z > 700.0:
        return math.inf
    return math.exp(z)


def _bump(x: float) -> float:
    """Curvature profile for the curved approximating family; range (1/2, 1)."""
    return (3.0 + math.tanh(x)) / 4.0


class TestFamily(ABC):
    """Ordered one-parameter test family with closed-form pricing support."""

    kind: str
    domain: tuple[float, float]
    phi_variant: str
    monotone_increasing_in_x: bool = True
    concave_in_x: bool = False
    c_strictly_increasing: bool = True

    # -- public surface ----------------------------------------------------

    def payoff(self, alpha: float, x: float) -> float:
        lo, hi = self.domain
        if not lo <= alpha <= hi:
            raise ValueError(f"parameter {alpha} outside domain [{lo}, {hi}]")
        return self._payoff(alpha, x)

    @abstractmethod
    def _payoff(self, alpha: float, x: float) -> float: ...

    @abstractmethod
    def risk_reduction(self, alpha: float) -> float:
        """c(alpha); independent of the underlying payoff."""

    # -- canonical parameterization ----------------------------------------

    @abstractmethod
    def to_canonical(self, alpha: float) -> float: ...

    @abstractmethod
    def from_canonical(self, t: float) -> float: ...

    @property
    def t_domain(self) -> tuple[float, float]:
        lo, hi = self.domain
        a, b = self.to_canonical(lo), self.to_canonical(hi)
        return (a, b) if a <= b else (b, a)

    @abstractmethod
    def c_at(self, t: float) -> float:
        """Risk reduction in canonical coordinates; defined for t = +-inf."""

    @abstractmethod
    def c_inv(self, r: float) -> float:
        """Exact left inverse of c_at (smallest t with c_at(t) >= r)."""

    @abstractmethod
    def price_at(self, t: float, xs: Weights, qs: Weights) -> float:
        """Expected payoff at canonical parameter t; non-decreasing in t."""

    # -- pricing functional --------------------------------------------------

    def pi(self, r: float, xs: Weights, qs: Weights) -> float:
        """Cheapest price of a family member with risk reduction at least r.

        +inf when the constraint set is empty (r above the family's
        achievable risk reduction).
        """
        t_lo, t_hi = self.t_domain
        if r > self.c_at(t_hi):
            return math.inf
        t_star = min(max(self.c_inv(r), t_lo), t_hi)
        return self.price_at(t_star, xs, qs)

    def h(self, p: float, xs: Weights, qs: Weights, tol: float = 1e-12) -> float:
        """sup of the risk reduction over members priced at or below p."""
        t_lo, t_hi = self.t_domain
        t_star = sup_below(lambda t: self.price_at(t, xs, qs), p, t_lo, t_hi, tol)
        if t_star == -math.inf:
            return -math.inf
        return self.c_at(t_star)


class IdentityShift(TestFamily):
    """f_alpha(x) = x + alpha with phi(f, X) = inf_x {f(x) - x} = alpha."""

    kind = "identity_shift"
    phi_variant = "worst_excess"
    concave_in_x = True

    def __init__(self, domain: tuple[float, float] = (-math.inf, math.inf)):
        self.domain = (float(domain[0]), float(domain[1]))

    def _payoff(self, alpha: float, x: float) -> float:
        return x + alpha

    def risk_reduction(self, alpha: float) -> float:
        return alpha

    def to_canonical(self, alpha: float) -> float:
        return alpha

    def from_canonical(self, t: float) -> float:
        return t

    def c_at(self, t: float) -> float:
        return t

    def c_inv(self, r: float) -> float:
        return r

    def price_at(self, t: float, xs: Weights, qs: Weights) -> float:
        return math.fsum(q * x for q, x in zip(qs, xs)) + t


class ApproxIdentity(TestFamily):
    """Family approximating the identity from above/below (alpha >< 0).

    The reference instance is f_alpha(x) = x + alpha.  The curved instance
    f_alpha(x) = x + alpha * (3 + tanh x) / 4 keeps the bump bounded away
    from zero so that c stays strictly increasing on both half-lines:
    c(alpha) = alpha for alpha >= 0 and alpha / 2 otherwise.
    """

    kind = "approx_identity"
    phi_variant = "worst_shortfall"

    def __init__(
        self,
        curved: bool = False,
        domain: tuple[float, float] = (-math.inf, math.inf),
    ):
        self.curved = bool(curved)
        self.domain = (float(domain[0]), float(domain[1]))
        self.concave_in_x = not self.curved

    def _payoff(self, alpha: float, x: float) -> float:
        if self.curved:
            return x + alpha * _bump(x)
        return x + alpha

    def risk_reduction(self, alpha: float) -> float:
        if self.curved and alpha < 0:
            return alpha / 2.0
        return alpha

    def to_canonical(self, alpha: float) -> float:
        return alpha

    def from_canonical(self, t: float) -> float:
        return t

    def c_at(self, t: float) -> float:
        return self.risk_reduction(t)

    def c_inv(self, r: float) -> float:
        if self.curved and r < 0:
            return 2.0 * r
        return r

    def price_at(self, t: float, xs: Weights, qs: Weights) -> float:
        mean = math.fsum(q * x for q, x in zip(qs, xs))
        if not self.curved:
            return mean + t
        bump_mean = math.fsum(q * _bump(x) for q, x in zip(qs, xs))
        return mean + t * bump_mean


class Call(TestFamily):
    """K = {(x - k)^+}; phi((x-k)^+, X) = -k for an underlying unbounded above."""

    kind = "call"
    phi_variant = "worst_excess"

    def __init__(self, domain: tuple[float, float] = (-math.inf, math.inf)):
        self.domain = (float(domain[0]), float(domain[1]))  # strike domain

    def _payoff(self, k: float, x: float) -> float:
        return max(x - k, 0.0)

    def risk_reduction(self, k: float) -> float:
        return -k

    def to_canonical(self, k: float) -> float:
        return -k

    def from_canonical(self, t: float) -> float:
        return -t

    def c_at(self, t: float) -> float:
        return t

    def c_inv(self, r: float) -> float:
        return r

    def price_at(self, t: float, xs: Weights, qs: Weights) -> float:
        return math.fsum(q * max(x + t, 0.0) for q, x in zip(qs, xs))


@dataclass(frozen=True)
class GTransform:
    """Strictly increasing transform with g(0) = 1 for the concave family."""

    fn: Callable[[float], float]
    inverse: Callable[[float], float]
    lo_limit: float
    hi_limit: float
    name: str = "exp"

    @classmethod
    def exp(cls) -> "GTransform":
        return cls(fn=_exp, inverse=math.log, lo_limit=0.0, hi_limit=math.inf)

    def at(self, t: float) -> float:
        if t == -math.inf:
            return self.lo_limit
        if t == math.inf:
            return self.hi_limit
        return self.fn(t)


class ExpConcave(TestFamily):
    """f_alpha(x) = g(alpha) - exp(-x): concave increasing tail control.

    c(alpha) = g(alpha) - 1 and the cheapest admissible member prices at
    max(r + 1, g(lo)) - E[exp(-X)].
    """

    kind = "exp_concave"
    phi_variant = "worst_shortfall"
    concave_in_x = True

    def __init__(
        self,
        g: GTransform | None = None,
        domain: tuple[float, float] = (-math.inf, math.inf),
    ):
        self.g = g if g is not None else GTransform.exp()
        self.domain = (float(domain[0]), float(domain[1]))

    def _payoff(self, alpha: float, x: float) -> float:
        return self.g.at(alpha) - _exp(-x)

    def risk_reduction(self, alpha: float) -> float:
        return self.g.at(alpha) - 1.0

    def to_canonical(self, alpha: float) -> float:
        return alpha

    def from_canonical(self, t: float) -> float:
        return t

    def c_at(self, t: float) -> float:
        return self.g.at(t) - 1.0

    def c_inv(self, r: float) -> float:
        if r + 1.0 <= self.g.lo_limit:
            return -math.inf
        if r + 1.0 >= self.g.hi_limit:
            return math.inf
        return self.g.inverse(r + 1.0)

    def price_at(self, t: float, xs: Weights, qs: Weights) -> float:
        expneg = math.fsum(q * _exp(-x) for q, x in zip(qs, xs))
        return self.g.at(t) - expneg


class InsuredPut(TestFamily):
    """K = {x + (k - x)^+ - c(k)}: insure the downside with puts.

    Premium c(k) = base + slope * max(k, 0) with 0 < slope < 1, so that
    k - c(k) is strictly increasing and invertible.  phi(f, X) = inf f =
    k - c(k) for an underlying unbounded below.  The price functional is the
    exact minimum of the piecewise-linear cost over admissible strikes (the
    boundary strike is not always the minimizer).
    """

    kind = "insured_put"
    phi_variant = "worst_payoff"

    def __init__(
        self,
        base: float = 0.1,
        slope: float = 0.4,
        domain: tuple[float, float] = (-math.inf, math.inf),
    ):
        if base <= 0 or not 0.0 < slope < 1.0:
            raise ValueError("need base > 0 and slope in (0, 1)")
        self.base = float(base)
        self.slope = float(slope)
        self.domain = (float(domain[0]), float(domain[1]))  # strike domain

    def premium(self, k: float) -> float:
        return self.base + self.slope * max(k, 0.0)

    def strike_for(self, r: float) -> float:
        """Inverse of k -> k - premium(k)."""
        if r <= -self.base:
            return r + self.base
        return (r + self.base) / (1.0 - self.slope)

    def _payoff(self, k: float, x: float) -> float:
        return max(x, k) - self.premium(k)

    def risk_reduction(self, k: float) -> float:
        return k - self.premium(k)

    def to_canonical(self, k: float) -> float:
        return k

    def from_canonical(self, t: float) -> float:
        return t

    def c_at(self, t: float) -> float:
        if t == -math.inf:
            return -math.inf
        if t == math.inf:
            return math.inf
        return self.risk_reduction(t)

    def c_inv(self, r: float) -> float:
        return self.strike_for(r)

    def price_at(self, k: float, xs: Weights, qs: Weights) -> float:
        if k == -math.inf:
            return math.fsum(q * x for q, x in zip(qs, xs)) - self.base
        if k == math.inf:
            return math.inf
        return math.fsum(q * max(x, k) for q, x in zip(qs, xs)) - self.premium(k)

    def _strike_breakpoints(self, xs: Weights) -> list[float]:
        return sorted(set([float(x) for x in xs] + [0.0]))

    def pi(self, r: float, xs: Weights, qs: Weights) -> float:
        """Exact inf of the price over strikes k with k - premium(k) >= r."""
        lo, hi = self.domain
        k_start = max(self.strike_for(r), lo)
        if k_start > hi:
            return math.inf
        candidates = [k_start]
        candidates += [b for b in self._strike_breakpoints(xs) if k_start < b <= hi]
        if hi < math.inf and hi > k_start:
            candidates.append(hi)
        return min(self.price_at(k, xs, qs) for k in candidates)

    def h(self, p: float, xs: Weights, qs: Weights, tol: float = 1e-12) -> float:
        """Largest admissible risk reduction at price p.

        The price is piecewise linear but not monotone in the strike, so the
        rightmost feasible strike is found by scanning pieces right to left.
        """
        lo, hi = self.domain
        bs = [b for b in self._strike_breakpoints(xs) if lo < b < hi]
        knots = [lo] + bs + [hi]
        for right, left in zip(reversed(knots), reversed(knots[:-1])):
            k_star = self._rightmost_on_piece(left, right, p, xs, qs)
            if k_star is not None:
                return self.risk_reduction(k_star)
        return -math.inf

    def _rightmost_on_piece(
        self, left: float, right: float, p: float, xs: Weights, qs: Weights
    ) -> float | None:
        if right == math.inf:
            # terminal piece: slope 1 - slope_premium > 0 beyond the anchor
            anchor = left if left > -math.inf else max(self._strike_breakpoints(xs))
            pa = self.price_at(anchor, xs, qs)
            s = 1.0 - self.slope
            if pa <= p:
                return anchor + (p - pa) / s
            return None
        if left == -math.inf:
            # flat head: price constant at E[X] - base
            pa = self.price_at(right, xs, qs)
            return right if pa <= p else None
        pa = self.price_at(left, xs, qs)
        pb = self.price_at(right, xs, qs)
        if pb <= p:
            return right
        if pa <= p:
            s = (pb - pa) / (right - left)
            return left + (p - pa) / s
        return None


_FAMILY_KINDS: dict[str, type] = {
    "identity_shift": IdentityShift,
    "approx_identity": ApproxIdentity,
    "call": Call,
    "exp_concave": ExpConcave,
    "insured_put": InsuredPut,
}


def build_family(kind: str, params: dict | None = None) -> TestFamily:
    """Construct a built-in family from its JSON tag and parameter dict."""
    params = dict(params or {})
    if kind not in _FAMILY_KINDS:
        raise ValueError(f"unknown family kind {kind!r}")
    if "domain" in params:
        lo, hi = params.pop("domain")
        lo = -math.inf if lo is None else float(lo)
        hi = math.inf if hi is None else float(hi)
        params["domain"] = (lo, hi)
    return _FAMILY_KINDS[kind](**params)


# -- primitive operations -----------------------------------------------------


def payoff_eval(fam: TestFamily, alpha: float, x: float) -> float:
    return fam.payoff(alpha, x)


def risk_reduction(fam: TestFamily, alpha: float) -> float:
    return fam.risk_reduction(alpha)


PHI_VARIANTS = (
    "neg_rho_f",
    "rho_diff",
    "rho_gap",
    "neg_rho_excess",
    "worst_excess",
    "worst_shortfall",
    "worst_payoff",
)


def generic_phi(
    f: Callable[[float], float],
    s: ScenarioSpace,
    variable_name: str,
    rho: RiskMeasure | None,
    variant: str,
    measure_name: str | None = None,
    grid_span: tuple[float, float] = (-1e6, 1e6),
    grid_points: int = 10_001,
) -> float:
    """Risk reduction of a single payoff transform under the chosen recipe.

    The rho-composed variants need a measure name; the worst-case variants
    take infima over a wide strike grid refined by local minimization.
    """
    if variant not in PHI_VARIANTS:
        raise ValueError(f"unknown phi variant {variant!r}")
    if variant == "worst_shortfall":
        return -_infimum(lambda x: x - f(x), grid_span, grid_points)
    if variant == "worst_excess":
        return _infimum(lambda x: f(x) - x, grid_span, grid_points)
    if variant == "worst_payoff":
        return _infimum(f, grid_span, grid_points)

    if rho is None or measure_name is None:
        raise ValueError(f"variant {variant!r} needs a risk measure and a measure name")
    xs = s.variable(variable_name)
    qs = s.measure(measure_name)

    def law(values: Sequence[float]) -> Distribution:
        return Distribution.from_atoms(list(zip(values, qs)))

    fx = [f(x) for x in xs]
    if variant == "neg_rho_f":
        return -rho(law(fx))
    if variant == "rho_diff":
        return rho(law([x - y for x, y in zip(xs, fx)]))
    if variant == "rho_gap":
        return rho(pushforward(s, measure_name, variable_name)) - rho(law(fx))
    return -rho(law([y - x for x, y in zip(xs, fx)]))  # neg_rho_excess


def _infimum(
    h: Callable[[float], float], span: tuple[float, float], points: int
) -> float:
    """Grid scan plus bounded local refinement; exact for piecewise-affine h."""
    lo, hi = span
    step = (hi - lo) / (points - 1)
    best_x, best = lo, h(lo)
    x = lo
    for _ in range(points - 1):
        x += step
        val = h(x)
        if val < best:
            best_x, best = x, val
    if not math.isfinite(best):
        return best
    a, b = max(lo, best_x - step), min(hi, best_x + step)
    res = minimize_scalar(h, bounds=(a, b), method="bounded",
                          options={"xatol": 1e-12})
    return min(best, float(res.fun))
