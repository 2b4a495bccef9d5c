"""Distributions on the real line and finite scenario spaces.

A distribution is stored as a right-continuous CDF made of jump nodes (atoms)
and linear segments.  Node i carries the CDF value *at* x_i; its kind says how
the CDF approaches x_i from the left: "jump" means flat-then-jump (an atom at
x_i), "linear" means a linear rise from the previous node.  Two nodes may
share an x only when the second is a jump (left limit followed by the atom).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

MASS_TOL = 1e-12

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


def _as_readonly(values, dtype=float) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Distribution:
    """Probability measure on R as a piecewise-linear CDF with atoms.

    ``xs``/``vs`` are the node positions and right-continuous CDF values,
    ``jumps[i]`` tells whether node i is approached by a jump (atom) or a
    linear segment.  ``left_tail`` is the CDF value before the first node
    (zero for a genuine probability measure).
    """

    xs: np.ndarray
    vs: np.ndarray
    jumps: np.ndarray
    left_tail: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "xs", _as_readonly(self.xs))
        object.__setattr__(self, "vs", _as_readonly(self.vs))
        object.__setattr__(self, "jumps", _as_readonly(self.jumps, dtype=bool))
        xs, vs, jumps = self.xs, self.vs, self.jumps
        if not (len(xs) == len(vs) == len(jumps)) or len(xs) == 0:
            raise ValueError("distribution needs matching, non-empty node arrays")
        if not np.all(np.isfinite(xs)) or not np.all(np.isfinite(vs)):
            raise ValueError("nodes must be finite")
        if np.any(np.diff(xs) < 0):
            raise ValueError("node positions must be non-decreasing")
        if np.any(np.diff(vs) < -MASS_TOL):
            raise ValueError("CDF values must be non-decreasing")
        if not jumps[0]:
            raise ValueError("first node must be a jump (anchor of the CDF)")
        ties = np.diff(xs) == 0
        if np.any(ties & ~jumps[1:]):
            raise ValueError("tied node positions must resolve into a jump")
        if self.left_tail < -MASS_TOL or self.left_tail > MASS_TOL:
            raise ValueError("left tail mass must vanish for a probability measure")
        if abs(vs[-1] - 1.0) > 1e-9:
            raise ValueError(f"CDF must reach 1, got {vs[-1]}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_nodes(
        cls,
        nodes: Sequence[tuple[float, float, str]],
        left_tail: float = 0.0,
    ) -> "Distribution":
        xs = [n[0] for n in nodes]
        vs = [n[1] for n in nodes]
        jumps = []
        for _, _, kind in nodes:
            if kind not in ("jump", "linear"):
                raise ValueError(f"unknown segment kind {kind!r}")
            jumps.append(kind == "jump")
        return cls(np.array(xs), np.array(vs), np.array(jumps), left_tail)

    @classmethod
    def from_atoms(cls, pairs: Sequence[tuple[float, float]]) -> "Distribution":
        """Purely atomic distribution; atoms closer than 1e-12 are merged."""
        if not pairs:
            raise ValueError("need at least one atom")
        pts = sorted((float(x), float(w)) for x, w in pairs)
        xs: list[float] = []
        ws: list[float] = []
        for x, w in pts:
            if w < -MASS_TOL:
                raise ValueError("atom weights must be non-negative")
            if xs and x - xs[-1] <= MASS_TOL:
                ws[-1] += w
            else:
                xs.append(x)
                ws.append(w)
        total = math.fsum(ws)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"atom weights must sum to 1, got {total}")
        keep = [(x, w) for x, w in zip(xs, ws) if w > 0.0]
        xs = [x for x, _ in keep]
        vs = list(np.cumsum([w / total for _, w in keep]))
        vs[-1] = 1.0
        return cls(np.array(xs), np.array(vs), np.ones(len(xs), dtype=bool))

    @classmethod
    def dirac(cls, x: float) -> "Distribution":
        return cls.from_atoms([(x, 1.0)])

    @classmethod
    def uniform(cls, a: float, b: float) -> "Distribution":
        if not b > a:
            raise ValueError("uniform needs a < b")
        return cls.from_nodes([(a, 0.0, "jump"), (b, 1.0, "linear")])

    @classmethod
    def from_cdf(
        cls,
        fn: Callable[[float], float],
        lo: float,
        hi: float,
        segments: int = 10_000,
    ) -> "Distribution":
        """Ingest a CDF by piecewise-linear interpolation on a uniform grid.

        ``fn(hi)`` must equal 1; ``fn(lo)`` may be positive (atom at ``lo``).
        """
        if segments < 1:
            raise ValueError("need at least one segment")
        grid = np.linspace(lo, hi, segments + 1)
        vals = np.array([float(fn(x)) for x in grid])
        if np.any(np.diff(vals) < -MASS_TOL):
            raise ValueError("CDF samples must be non-decreasing")
        if abs(vals[-1] - 1.0) > 1e-9:
            raise ValueError("CDF must reach 1 at the right endpoint")
        vals[-1] = 1.0
        xs = np.concatenate([[grid[0]], grid[1:]])
        vs = np.concatenate([[vals[0]], vals[1:]])
        jumps = np.zeros(len(xs), dtype=bool)
        jumps[0] = True
        return cls(xs, vs, jumps)

    # -- evaluation --------------------------------------------------------

    def cdf(self, x: float) -> float:
        """F(x), right-continuous."""
        xs, vs = self.xs, self.vs
        j = int(np.searchsorted(xs, x, side="right")) - 1
        if j < 0:
            return self.left_tail
        if j == len(xs) - 1 or x == xs[j]:
            return float(vs[j])
        # strictly between node j and node j+1
        if self.jumps[j + 1]:
            return float(vs[j])
        x0, x1 = xs[j], xs[j + 1]
        return float(vs[j] + (vs[j + 1] - vs[j]) * (x - x0) / (x1 - x0))

    def cdf_left(self, x: float) -> float:
        """Left limit F(x-)."""
        xs, vs = self.xs, self.vs
        k = int(np.searchsorted(xs, x, side="left"))
        if k == len(xs) or xs[k] != x:
            return self.cdf(x)  # continuous off the nodes
        if self.jumps[k]:
            return float(vs[k - 1]) if k > 0 else self.left_tail
        return float(vs[k])

    def quantile_left(self, u: float) -> float:
        """Generalized left inverse inf{x | F(x) >= u}, u in (0, 1]."""
        if not 0.0 < u <= 1.0:
            raise ValueError(f"quantile level must be in (0, 1], got {u}")
        i = int(np.searchsorted(self.vs, u, side="left"))
        return self._invert_at(i, u)

    def quantile_right(self, u: float) -> float:
        """inf{x | F(x) > u}, u in [0, 1)."""
        if not 0.0 <= u < 1.0:
            raise ValueError(f"level must be in [0, 1), got {u}")
        i = int(np.searchsorted(self.vs, u, side="right"))
        return self._invert_at(i, u)

    def _invert_at(self, i: int, u: float) -> float:
        xs, vs = self.xs, self.vs
        if i >= len(xs):
            raise ValueError("level not attained by the CDF")  # pragma: no cover
        if self.jumps[i]:
            return float(xs[i])
        prev_v = float(vs[i - 1]) if i > 0 else self.left_tail
        prev_x = float(xs[i - 1])
        dv = float(vs[i]) - prev_v
        if dv <= 0:  # flat linear filler, level sits at its left edge
            return prev_x
        return prev_x + (u - prev_v) * (float(xs[i]) - prev_x) / dv

    # -- structure ---------------------------------------------------------

    def atoms(self) -> Iterator[tuple[float, float]]:
        """Yield (position, mass) for every atom with positive mass."""
        prev = self.left_tail
        for x, v, is_jump in zip(self.xs, self.vs, self.jumps):
            if is_jump and v - prev > 0.0:
                yield float(x), float(v - prev)
            prev = v

    def linear_segments(self) -> Iterator[tuple[float, float, float]]:
        """Yield (a, b, mass) for every linear segment with positive mass."""
        for i in range(1, len(self.xs)):
            if not self.jumps[i]:
                mass = float(self.vs[i] - self.vs[i - 1])
                if mass > 0.0:
                    yield float(self.xs[i - 1]), float(self.xs[i]), mass

    @property
    def is_atomic(self) -> bool:
        return bool(self.jumps.all())

    def support_min(self) -> float:
        return self.quantile_right(0.0)

    def support_max(self) -> float:
        return self.quantile_left(1.0)

    def translate(self, p: float) -> "Distribution":
        """T_p: shifts the law so that the CDF becomes x -> F(x - p)."""
        return Distribution(self.xs + p, self.vs, self.jumps, self.left_tail)

    def same_nodes(self, other: "Distribution", atol: float = 0.0) -> bool:
        return (
            len(self.xs) == len(other.xs)
            and np.allclose(self.xs, other.xs, rtol=0.0, atol=atol)
            and np.allclose(self.vs, other.vs, rtol=0.0, atol=atol)
            and bool(np.all(self.jumps == other.jumps))
        )


# -- module-level operations ------------------------------------------------


def cdf_eval(d: Distribution, x: float) -> float:
    return d.cdf(x)


def quantile_left(d: Distribution, u: float) -> float:
    return d.quantile_left(u)


def translate(d: Distribution, p: float) -> Distribution:
    return d.translate(p)


def mix(d1: Distribution, d2: Distribution, lam: float) -> Distribution:
    """Mixture with CDF lam*F1 + (1-lam)*F2, exact on the merged node grid."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"mixture weight must be in [0, 1], got {lam}")
    grid = np.unique(np.concatenate([d1.xs, d2.xs]))
    xs: list[float] = []
    vs: list[float] = []
    jumps: list[bool] = []
    prev_v = 0.0
    for j, m in enumerate(grid):
        m = float(m)
        v = lam * d1.cdf(m) + (1.0 - lam) * d2.cdf(m)
        lv = lam * d1.cdf_left(m) + (1.0 - lam) * d2.cdf_left(m)
        if j == 0:
            xs.append(m), vs.append(v), jumps.append(True)
        elif v - lv > MASS_TOL:
            if lv - prev_v > MASS_TOL:
                xs.append(m), vs.append(lv), jumps.append(False)
            xs.append(m), vs.append(v), jumps.append(True)
        else:
            xs.append(m), vs.append(v), jumps.append(False)
        prev_v = v
    vs[-1] = 1.0
    return Distribution(np.array(xs), np.array(vs), np.array(jumps))


def dominates_first_order(d1: Distribution, d2: Distribution, atol: float = 1e-12) -> bool:
    """True iff d1 precedes d2 in first-order stochastic dominance (F2 <= F1).

    Both CDFs are piecewise linear between merged nodes, so checking values
    and left limits at every merged node covers all crossings exactly.
    """
    grid = np.unique(np.concatenate([d1.xs, d2.xs]))
    for m in grid:
        m = float(m)
        if d2.cdf(m) > d1.cdf(m) + atol:
            return False
        if d2.cdf_left(m) > d1.cdf_left(m) + atol:
            return False
    return True


def expectation(d: Distribution, g: Callable[[float], float]) -> float:
    """Integral of g against d, with the convention inf - inf = -inf.

    Atoms contribute exactly; linear segments are integrated with a 32-node
    Gauss-Legendre rule per segment.
    """
    total = 0.0
    has_pos_inf = False
    has_neg_inf = False
    for x, w in d.atoms():
        val = float(g(x))
        if math.isinf(val):
            if val > 0:
                has_pos_inf = True
            else:
                has_neg_inf = True
        else:
            total += w * val
    for a, b, mass in d.linear_segments():
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        acc = 0.0
        for t, w in zip(_GL_NODES, _GL_WEIGHTS):
            val = float(g(mid + half * t))
            if math.isinf(val):
                if val > 0:
                    has_pos_inf = True
                else:
                    has_neg_inf = True
            else:
                acc += w * val
        total += mass * acc / 2.0
    if has_neg_inf:
        return -math.inf
    if has_pos_inf:
        return math.inf
    return total


# -- finite scenario spaces ---------------------------------------------------


@dataclass(frozen=True)
class ScenarioSpace:
    """Finite state list with named probability vectors and payoff vectors."""

    states: tuple[str, ...]
    measures: Mapping[str, tuple[float, ...]]
    variables: Mapping[str, tuple[float, ...]]

    def __post_init__(self) -> None:
        n = len(self.states)
        if n == 0:
            raise ValueError("scenario space needs at least one state")
        object.__setattr__(self, "states", tuple(str(s) for s in self.states))
        object.__setattr__(
            self, "measures", {k: tuple(float(x) for x in v) for k, v in self.measures.items()}
        )
        object.__setattr__(
            self, "variables", {k: tuple(float(x) for x in v) for k, v in self.variables.items()}
        )
        for name, vec in self.measures.items():
            if len(vec) != n:
                raise ValueError(f"measure {name!r} has wrong length")
            if any(q < -MASS_TOL for q in vec):
                raise ValueError(f"measure {name!r} has negative components")
            if abs(math.fsum(vec) - 1.0) > MASS_TOL:
                raise ValueError(f"measure {name!r} does not sum to 1")
        for name, vec in self.variables.items():
            if len(vec) != n:
                raise ValueError(f"variable {name!r} has wrong length")
            if any(not math.isfinite(x) for x in vec):
                raise ValueError(f"variable {name!r} must be finite valued")

    def measure(self, name: str) -> tuple[float, ...]:
        try:
            return self.measures[name]
        except KeyError:
            raise KeyError(f"unknown measure {name!r}") from None

    def variable(self, name: str) -> tuple[float, ...]:
        try:
            return self.variables[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def with_measure(self, name: str, vec: Sequence[float]) -> "ScenarioSpace":
        measures = dict(self.measures)
        measures[name] = tuple(float(x) for x in vec)
        return ScenarioSpace(self.states, measures, self.variables)

    def with_variable(self, name: str, vec: Sequence[float]) -> "ScenarioSpace":
        variables = dict(self.variables)
        variables[name] = tuple(float(x) for x in vec)
        return ScenarioSpace(self.states, self.measures, variables)

    def expectation(
        self,
        measure_name: str,
        variable_name: str,
        fn: Callable[[float], float] | None = None,
    ) -> float:
        qs = self.measure(measure_name)
        xs = self.variable(variable_name)
        if fn is None:
            return math.fsum(q * x for q, x in zip(qs, xs))
        return math.fsum(q * fn(x) for q, x in zip(qs, xs) if q != 0.0)


def pushforward(s: ScenarioSpace, measure_name: str, variable_name: str) -> Distribution:
    """Law of the named payoff under the named measure (purely atomic)."""
    qs = s.measure(measure_name)
    xs = s.variable(variable_name)
    return Distribution.from_atoms(list(zip(xs, qs)))
