"""Risk measures on distributions and their dual representation.

Covers V@R, the Lambda-generalized V@R driven by a probability/loss curve,
certainty-equivalent (entropic) maps, the worst-case measure, and the dual
pair V / V^-1 built from bounded decreasing test functions, together with
the finite-grid lower bound for the dual representation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .distributions import Distribution, expectation

_EPS = 1e-15


def _as_readonly(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LambdaFn:
    """Right-continuous increasing function R -> [0, 1].

    Stored like a CDF: breakpoint i carries the value at x_i, reached either
    by a step (flat before, jump at x_i) or a linear rise from the previous
    breakpoint.  ``left_value`` is the constant value before the first
    breakpoint; the last value extends to +inf.
    """

    xs: np.ndarray
    vs: np.ndarray
    steps: np.ndarray
    left_value: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "xs", _as_readonly(self.xs))
        object.__setattr__(self, "vs", _as_readonly(self.vs))
        object.__setattr__(self, "steps", np.asarray(self.steps, dtype=bool))
        if len(self.xs) != len(self.vs) or len(self.xs) != len(self.steps):
            raise ValueError("breakpoint arrays must have matching lengths")
        vals = [self.left_value, *self.vs.tolist()]
        if any(v < -_EPS or v > 1.0 + _EPS for v in vals):
            raise ValueError("values must lie in [0, 1]")
        if any(b - a < -_EPS for a, b in zip(vals, vals[1:])):
            raise ValueError("values must be non-decreasing")
        if len(self.xs) and np.any(np.diff(self.xs) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if len(self.xs) and not self.steps[0]:
            raise ValueError("first breakpoint must be a step")

    @classmethod
    def constant(cls, lam: float) -> "LambdaFn":
        return cls(np.empty(0), np.empty(0), np.empty(0, dtype=bool), float(lam))

    @classmethod
    def from_breakpoints(
        cls, points: Sequence[tuple[float, float, str]], left_value: float = 0.0
    ) -> "LambdaFn":
        xs = [p[0] for p in points]
        vs = [p[1] for p in points]
        steps = []
        for _, _, kind in points:
            if kind not in ("step", "linear"):
                raise ValueError(f"unknown breakpoint kind {kind!r}")
            steps.append(kind == "step")
        return cls(np.array(xs), np.array(vs), np.array(steps, dtype=bool), left_value)

    def __call__(self, x: float) -> float:
        xs, vs = self.xs, self.vs
        if len(xs) == 0:
            return self.left_value
        j = int(np.searchsorted(xs, x, side="right")) - 1
        if j < 0:
            return self.left_value
        if j == len(xs) - 1 or x == xs[j]:
            return float(vs[j])
        if self.steps[j + 1]:
            return float(vs[j])
        x0, x1 = xs[j], xs[j + 1]
        return float(vs[j] + (vs[j + 1] - vs[j]) * (x - x0) / (x1 - x0))

    def left_limit(self, x: float) -> float:
        xs, vs = self.xs, self.vs
        if len(xs) == 0:
            return self.left_value
        k = int(np.searchsorted(xs, x, side="left"))
        if k == len(xs) or xs[k] != x:
            return self(x)
        if self.steps[k]:
            return float(vs[k - 1]) if k > 0 else self.left_value
        return float(vs[k])

    def sup(self) -> float:
        if len(self.vs) == 0:
            return self.left_value
        return max(self.left_value, float(self.vs.max()))

    def shift(self, alpha: float) -> "LambdaFn":
        """The curve x -> Lambda(x + alpha)."""
        return LambdaFn(self.xs - alpha, self.vs, self.steps, self.left_value)


@dataclass(frozen=True)
class DecreasingTestFn:
    """Bounded decreasing piecewise-linear function with constant tails."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "xs", _as_readonly(self.xs))
        object.__setattr__(self, "ys", _as_readonly(self.ys))
        if len(self.xs) != len(self.ys) or len(self.xs) == 0:
            raise ValueError("need matching non-empty breakpoint arrays")
        if np.any(np.diff(self.xs) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if np.any(np.diff(self.ys) > _EPS):
            raise ValueError("values must be non-increasing")
        if not (np.all(np.isfinite(self.xs)) and np.all(np.isfinite(self.ys))):
            raise ValueError("breakpoints must be finite")

    @classmethod
    def ramp(cls, b: float, w: float) -> "DecreasingTestFn":
        """Clipped linear ramp clamp((b - x) / w, 0, 1)."""
        if w <= 0:
            raise ValueError("ramp width must be positive")
        return cls(np.array([b - w, b]), np.array([1.0, 0.0]))

    @classmethod
    def constant(cls, c: float) -> "DecreasingTestFn":
        return cls(np.array([0.0]), np.array([float(c)]))

    @property
    def at_neg_inf(self) -> float:
        return float(self.ys[0])

    @property
    def at_pos_inf(self) -> float:
        return float(self.ys[-1])

    def __call__(self, x: float) -> float:
        return float(np.interp(x, self.xs, self.ys))


# -- primal risk measures -----------------------------------------------------


def var(d: Distribution, lam: float) -> float:
    """Value at Risk at level lam in [0, 1); lam = 0 is the worst case."""
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"V@R level must be in [0, 1), got {lam}")
    return -d.quantile_right(lam)


def lambda_var(d: Distribution, lam: LambdaFn) -> float:
    """-sup{m | F(x) <= Lambda(x) for all x <= m}.

    Equals -inf{x | F(x) > Lambda(x)}; the first violation is located by an
    exact scan over the merged breakpoints of F and Lambda, solving the
    linear crossing inside a segment in closed form.
    """
    if lam.sup() >= 1.0:
        raise ValueError("Lambda must stay below 1 for a well-posed measure")
    grid = np.unique(np.concatenate([d.xs, lam.xs])) if len(lam.xs) else d.xs
    prev = None
    for m in grid:
        m = float(m)
        if prev is not None:
            h_a = d.cdf(prev) - lam(prev)
            h_b = d.cdf_left(m) - lam.left_limit(m)
            if h_a <= 0.0 < h_b:
                t = prev + (m - prev) * (-h_a) / (h_b - h_a)
                return -t
        if d.cdf(m) - lam(m) > 0.0:
            return -m
        prev = m
    # F reaches 1 > sup Lambda at the last distribution node, so the scan
    # above always terminates; guard for completeness.
    return -math.inf  # pragma: no cover


@dataclass(frozen=True)
class CertaintyTransform:
    """Strictly decreasing continuous transform with a declared lower bound."""

    fn: Callable[[float], float]
    inverse: Callable[[float], float] | None = None
    lower_bound: float = 0.0
    name: str = "custom"

    def __post_init__(self) -> None:
        if not math.isfinite(self.lower_bound):
            raise ValueError("transform must be bounded below")
        probe = [self.fn(x) for x in (-8.0, -1.0, 0.0, 1.0, 8.0)]
        if any(b >= a for a, b in zip(probe, probe[1:])):
            raise ValueError("transform must be strictly decreasing")

    @classmethod
    def entropic(cls) -> "CertaintyTransform":
        return cls(fn=lambda x: math.exp(-x), inverse=lambda v: -math.log(v),
                   lower_bound=0.0, name="entropic")

    def invert(self, v: float) -> float:
        if self.inverse is not None:
            return self.inverse(v)
        lo, hi = -1.0, 1.0
        for _ in range(200):  # bracket by doubling, then bisect
            if self.fn(lo) >= v:
                break
            lo *= 2.0
        else:
            return -math.inf
        for _ in range(200):
            if self.fn(hi) <= v:
                break
            hi *= 2.0
        else:
            return math.inf
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.fn(mid) >= v:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


def certainty_equivalent(d: Distribution, transform: CertaintyTransform) -> float:
    """-f^{-1}(integral of f against d); entropic map for f(x) = exp(-x)."""
    v = expectation(d, transform.fn)
    if not math.isfinite(v) or v <= transform.lower_bound:
        return math.inf
    root = transform.invert(v)
    if root == -math.inf:
        return math.inf  # value above the range of f
    return -root


# -- dual representation ------------------------------------------------------


def _merged_pieces(f: DecreasingTestFn, lam: LambdaFn) -> list[tuple[float, float]]:
    """Sub-intervals of the support of df split at breakpoints of Lambda."""
    cuts = np.unique(np.concatenate([f.xs, lam.xs])) if len(lam.xs) else f.xs
    cuts = cuts[(cuts >= f.xs[0]) & (cuts <= f.xs[-1])]
    cuts = np.unique(np.concatenate([cuts, [f.xs[0], f.xs[-1]]]))
    return [(float(a), float(b)) for a, b in zip(cuts[:-1], cuts[1:])]


def _piece_integral(f: DecreasingTestFn, lam: LambdaFn, a: float, b: float) -> float:
    """Exact value of the integral of (1 - Lambda) df over (a, b]."""
    if b <= a:
        return 0.0
    s = (f(b) - f(a)) / (b - a)  # df/dx on the piece (<= 0)
    if s == 0.0:
        return 0.0
    lam_avg = 0.5 * (lam(a) + lam.left_limit(b))
    return s * (b - a) * (1.0 - lam_avg)


def dual_value(a: float, f: DecreasingTestFn, lam: LambdaFn) -> float:
    """V(a, f) = f(-inf) + integral of (1 - Lambda) df over (-inf, -a]."""
    if lam.sup() >= 1.0:
        raise ValueError("Lambda must stay below 1")
    cap = -a
    total = f.at_neg_inf
    if cap <= f.xs[0]:
        return total
    for lo, hi in _merged_pieces(f, lam):
        if lo >= cap:
            break
        total += _piece_integral(f, lam, lo, min(hi, cap))
    return total


def dual_inverse(v: float, f: DecreasingTestFn, lam: LambdaFn) -> float:
    """V^{-1}(v, f) = -sup{a | integral_(-inf, a] of (1 - Lambda) df >= v - f(-inf)}.

    The orientation of the generalized left inverse is fixed so that the
    constant-Lambda case reduces to -f^l((v - lam f(-inf)) / (1 - lam)); it is
    the conservative choice that keeps the finite-grid dual bound below the
    primal value.
    """
    if lam.sup() >= 1.0:
        raise ValueError("Lambda must stay below 1")
    w = v - f.at_neg_inf
    if w > 0.0:
        return math.inf  # v above the range of f: empty sup
    # resolve boundary cases conservatively: a crossing must clear the
    # cancellation noise of w = v - f(-inf), else the sup extends further
    slack = 1e-12 * (1.0 + abs(w))
    phi = 0.0
    for lo, hi in _merged_pieces(f, lam):
        inc = _piece_integral(f, lam, lo, hi)
        if phi + inc < w - slack:
            # crossing inside this piece: largest a with phi(a) >= w
            t = _solve_piece(f, lam, lo, hi, phi, w)
            return -t
        phi += inc
    # phi stays >= w everywhere (flat tail beyond the last breakpoint)
    return -math.inf


def _solve_piece(
    f: DecreasingTestFn, lam: LambdaFn, lo: float, hi: float, phi_lo: float, w: float
) -> float:
    """Largest a in [lo, hi] with phi(a) >= w, where phi is quadratic here."""
    s = (f(hi) - f(lo)) / (hi - lo)
    lam_lo = lam(lo)
    m = (lam.left_limit(hi) - lam_lo) / (hi - lo)
    # phi(lo + u) - w = A u^2 + B u + C
    A = -0.5 * s * m
    B = s * (1.0 - lam_lo)
    C = phi_lo - w
    L = hi - lo
    if abs(A) < 1e-300:
        if B >= 0.0:  # flat piece cannot cross; numerical guard
            return hi
        u = -C / B
    else:
        disc = B * B - 4.0 * A * C
        disc = max(disc, 0.0)
        roots = [(-B + math.sqrt(disc)) / (2.0 * A), (-B - math.sqrt(disc)) / (2.0 * A)]
        candidates = [u for u in roots if -1e-12 <= u <= L * (1.0 + 1e-12)]
        if not candidates:
            candidates = [min(max(u, 0.0), L) for u in roots]
        u = min(candidates, key=lambda t: abs(_phi_on_piece(s, lam_lo, m, t) + phi_lo - w))
    u = min(max(u, 0.0), L)
    return lo + u


def _phi_on_piece(s: float, lam_lo: float, m: float, u: float) -> float:
    return s * ((1.0 - lam_lo) * u - 0.5 * m * u * u)


def propvolle_lower_bound(
    d: Distribution, lam: LambdaFn, f_grid: Sequence[DecreasingTestFn]
) -> float:
    """Finite-grid version of the dual representation: a lower bound that is
    exact in the limit of a dense grid of decreasing test functions."""
    if not f_grid:
        raise ValueError("need a non-empty grid of test functions")
    best = -math.inf
    for f in f_grid:
        val = dual_inverse(expectation(d, f), f, lam)
        if val > best:
            best = val
    return best


def default_ramp_grid(
    d: Distribution,
    count: int = 200,
    width: float | None = None,
    pad: float = 1.0,
) -> list[DecreasingTestFn]:
    """Lattice of clipped linear ramps spanning the padded support of d."""
    if count < 1:
        raise ValueError("grid size must be positive")
    lo = d.support_min() - pad
    hi = d.support_max() + pad
    offsets = np.linspace(lo, hi, count)
    spacing = (hi - lo) / max(count - 1, 1)
    w = width if width is not None else max(2.0 * spacing, 1e-6)
    return [DecreasingTestFn.ramp(float(b), w) for b in offsets]


# -- risk-measure specifications ----------------------------------------------


@dataclass(frozen=True)
class RiskMeasure:
    """Tagged evaluator Distribution -> extended real.

    All built-ins are antitone for first-order dominance and quasi-convex,
    which the property harness checks numerically.
    """

    tag: str
    _eval: Callable[[Distribution], float]

    def __call__(self, d: Distribution) -> float:
        return self._eval(d)

    @classmethod
    def var(cls, lam: float) -> "RiskMeasure":
        return cls(f"var({lam:g})", lambda d: var(d, lam))

    @classmethod
    def lambda_var(cls, lam: LambdaFn) -> "RiskMeasure":
        return cls("lambda_var", lambda d: lambda_var(d, lam))

    @classmethod
    def certainty_equivalent(cls, transform: CertaintyTransform) -> "RiskMeasure":
        return cls(
            f"certainty_equivalent[{transform.name}]",
            lambda d: certainty_equivalent(d, transform),
        )

    @classmethod
    def entropic(cls) -> "RiskMeasure":
        return cls.certainty_equivalent(CertaintyTransform.entropic())

    @classmethod
    def worst_case(cls) -> "RiskMeasure":
        return cls("worst_case", lambda d: -d.support_min())
