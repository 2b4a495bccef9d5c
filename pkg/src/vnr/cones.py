"""Finite-dimensional cone duality: polar cones, normalized polar slices,
and the dual representation of monotone quasiconcave functionals.

The cone of test claims is given by non-negative combinations of generator
payoff vectors plus free-sign linear directions.  Its polar consists of the
signed vectors pairing non-negatively with the cone's non-negative part; the
mass-one slice of the polar is the dual domain of the representation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog

from ._monotone import sup_below
from .distributions import ScenarioSpace

_FEAS_TOL = 1e-10


@dataclass(frozen=True)
class PhiSpec:
    """Objective for the cone duality: structured kinds get exact LP solves.

    ``kind`` is "min" (worst coordinate), "linear" (fixed weight vector), or
    "custom" (arbitrary callable, handled by lattice maximization).  The
    caller declares monotonicity and quasiconcavity; they are hypotheses of
    the duality theorem, not derived facts.
    """

    kind: str
    weights: tuple[float, ...] | None = None
    fn: Callable[[np.ndarray], float] | None = None
    monotone: bool = True
    quasiconcave: bool = True

    def __post_init__(self) -> None:
        if self.kind not in ("min", "linear", "custom"):
            raise ValueError(f"unknown phi kind {self.kind!r}")
        if self.kind == "linear" and self.weights is None:
            raise ValueError("linear phi needs weights")
        if self.kind == "custom" and self.fn is None:
            raise ValueError("custom phi needs a callable")

    def __call__(self, y: Sequence[float]) -> float:
        arr = np.asarray(y, dtype=float)
        if self.kind == "min":
            return float(arr.min())
        if self.kind == "linear":
            return float(np.dot(self.weights, arr))
        return float(self.fn(arr))


@dataclass(frozen=True)
class ConeSpec:
    """Convex cone of payoff vectors over a finite scenario space."""

    scenario: ScenarioSpace
    generators: tuple[tuple[float, ...], ...] = ()
    linear: tuple[tuple[float, ...], ...] = ()

    def __post_init__(self) -> None:
        n = len(self.scenario.states)
        object.__setattr__(
            self, "generators", tuple(tuple(float(x) for x in g) for g in self.generators)
        )
        object.__setattr__(
            self, "linear", tuple(tuple(float(x) for x in g) for g in self.linear)
        )
        for g in self.generators + self.linear:
            if len(g) != n:
                raise ValueError("generator dimension must match the state count")
            if any(not math.isfinite(x) for x in g):
                raise ValueError("generators must be finite valued")
        if not self.generators and not self.linear:
            raise ValueError("cone needs at least one generator or linear direction")

    @classmethod
    def full_space(cls, scenario: ScenarioSpace) -> "ConeSpec":
        n = len(scenario.states)
        eye = tuple(tuple(1.0 if i == j else 0.0 for j in range(n)) for i in range(n))
        return cls(scenario, generators=(), linear=eye)

    @property
    def dim(self) -> int:
        return len(self.scenario.states)

    def ray_matrix(self) -> np.ndarray:
        """All spanning rays with lineality split into +- pairs."""
        rows = [list(g) for g in self.generators]
        for d in self.linear:
            rows.append(list(d))
            rows.append([-x for x in d])
        return np.array(rows, dtype=float)

    def nonneg_rays(self) -> np.ndarray:
        """Extreme rays of the cone intersected with the non-negative orthant."""
        rays = _dd_intersect_orthant(self.ray_matrix())
        return rays


def _normalize_ray(r: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(r))
    return r / scale if scale > 0 else r


def _dd_intersect_orthant(rays: np.ndarray) -> np.ndarray:
    """Double description: intersect cone given by rays with {x_i >= 0} for
    every coordinate, keeping a generating ray set at each step."""
    current = [(_normalize_ray(r)) for r in rays if np.any(r != 0)]
    n = rays.shape[1]
    for i in range(n):
        keep: list[np.ndarray] = []
        pos = [r for r in current if r[i] > _FEAS_TOL]
        neg = [r for r in current if r[i] < -_FEAS_TOL]
        zero = [r for r in current if abs(r[i]) <= _FEAS_TOL]
        keep.extend(pos)
        keep.extend(zero)
        for rp, rn in itertools.product(pos, neg):
            combo = rn[i] * rp - rp[i] * rn  # zero i-th coordinate
            combo = -combo if rn[i] < 0 else combo
            if np.max(np.abs(combo)) > _FEAS_TOL:
                keep.append(_normalize_ray(combo))
        current = _prune_rays(keep)
    return np.array(current) if current else np.empty((0, n))


def _prune_rays(rays: list[np.ndarray]) -> list[np.ndarray]:
    """Drop duplicates and rays expressible as combinations of the others."""
    out: list[np.ndarray] = []
    for r in rays:
        if any(np.allclose(r, o, atol=1e-9) for o in out):
            continue
        out.append(r)
    pruned: list[np.ndarray] = []
    for idx, r in enumerate(out):
        others = [o for j, o in enumerate(out) if j != idx]
        if others and _in_cone(r, np.array(others)):
            continue
        pruned.append(r)
    return pruned


def _in_cone(x: np.ndarray, rays: np.ndarray) -> bool:
    """Membership of x in the conic hull of the given rays, by LP."""
    k = rays.shape[0]
    res = linprog(
        c=np.zeros(k),
        A_eq=rays.T,
        b_eq=x,
        bounds=[(0, None)] * k,
        method="highs",
    )
    return bool(res.status == 0)


def polar_member(c: ConeSpec, mu: Sequence[float], tol: float = _FEAS_TOL) -> bool:
    """mu pairs non-negatively with every non-negative payoff in the cone.

    Decided by one LP: minimize <mu, x> over x in the cone with x >= 0 and
    total mass capped at 1; membership iff the optimum is >= -tol.
    """
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (c.dim,):
        raise ValueError("measure dimension must match the state count")
    rays = c.ray_matrix()
    k = rays.shape[0]
    # x = rays^T lam, lam >= 0; constraints x >= 0 and sum(x) <= 1
    res = linprog(
        c=rays @ mu,
        A_ub=np.vstack([-rays.T, (rays @ np.ones(c.dim)).reshape(1, k)]),
        b_ub=np.concatenate([np.zeros(c.dim), [1.0]]),
        bounds=[(0, None)] * k,
        method="highs",
    )
    if res.status == 3:  # unbounded below: some admissible direction pays < 0
        return False
    if res.status != 0:
        raise RuntimeError(f"polar membership LP failed with status {res.status}")
    return bool(res.fun >= -tol)


def k1_polar_sample(c: ConeSpec, resolution: int = 1) -> list[np.ndarray]:
    """Deterministic sample of the mass-one slice of the polar cone.

    Includes every vertex of the slice polytope (exact enumeration from the
    H-representation induced by the extreme rays of the cone's non-negative
    part), a barycentric lattice between vertices at the given resolution,
    and unit steps along recession rays for unbounded slices.
    """
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    rays = c.nonneg_rays()
    n = c.dim
    verts = _slice_vertices(rays, n)
    if not verts:
        return []
    samples: list[np.ndarray] = []
    for combo in _compositions(resolution, len(verts)):
        point = sum(w * v for w, v in zip(combo, verts)) / resolution
        samples.append(point)
    rec = _slice_recession_rays(rays, n)
    for v in verts:
        for d in rec:
            for step in range(1, resolution + 1):
                samples.append(v + step * d)
    out: list[np.ndarray] = []
    for p in samples:
        if any(np.allclose(p, o, atol=1e-9) for o in out):
            continue
        out.append(p)
    out.sort(key=lambda p: tuple(np.round(p, 12)))
    return out


def _compositions(total: int, parts: int):
    """Weak compositions of ``total`` into ``parts`` non-negative integers."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head, *rest)


def _slice_vertices(rays: np.ndarray, n: int) -> list[np.ndarray]:
    """Vertices of {mu | rays @ mu >= 0, sum(mu) = 1} by basis enumeration."""
    verts: list[np.ndarray] = []
    m = rays.shape[0]
    ones = np.ones(n)
    for active in itertools.combinations(range(m), n - 1):
        a = np.vstack([rays[list(active)], ones]) if active else ones.reshape(1, -1)
        if a.shape[0] != n:
            continue
        b = np.zeros(n)
        b[-1] = 1.0
        try:
            mu = np.linalg.solve(a, b)
        except np.linalg.LinAlgError:
            continue
        if np.all(rays @ mu >= -1e-9):
            if not any(np.allclose(mu, v, atol=1e-9) for v in verts):
                verts.append(mu)
    if n == 1 and m == 0:
        verts.append(np.array([1.0]))
    return verts


def _slice_recession_rays(rays: np.ndarray, n: int) -> list[np.ndarray]:
    """Extreme directions of {d | rays @ d >= 0, sum(d) = 0}, normalized to
    unit maximum coordinate."""
    if rays.size == 0:
        constraints = np.empty((0, n))
    else:
        constraints = rays
    # rays of the polyhedral cone {d | constraints @ d >= 0, 1.d = 0}: run the
    # double description on the free space restricted by each halfspace
    basis = np.vstack([np.eye(n), -np.eye(n)])
    current = [r for r in basis]
    ones = np.ones(n)
    # impose the equality by intersecting with +-halfspaces of 1.d
    for normal in (ones, -ones):
        current = _intersect_halfspace(current, normal)
    for row in constraints:
        current = _intersect_halfspace(current, row)
    out: list[np.ndarray] = []
    for d in current:
        if np.max(np.abs(d)) <= _FEAS_TOL:
            continue
        d = d / np.max(np.abs(d))
        if not any(np.allclose(d, o, atol=1e-9) for o in out):
            out.append(d)
    return out


def _intersect_halfspace(rays: list[np.ndarray], normal: np.ndarray) -> list[np.ndarray]:
    pos = [r for r in rays if float(normal @ r) > _FEAS_TOL]
    neg = [r for r in rays if float(normal @ r) < -_FEAS_TOL]
    zero = [r for r in rays if abs(float(normal @ r)) <= _FEAS_TOL]
    keep = pos + zero
    for rp, rn in itertools.product(pos, neg):
        combo = float(normal @ rp) * rn - float(normal @ rn) * rp
        if np.max(np.abs(combo)) > _FEAS_TOL:
            keep.append(_normalize_ray(combo))
    return _prune_rays(keep)


# -- the dual functions ---------------------------------------------------------


def h_cone(c: ConeSpec, phi: PhiSpec, p: float, mu: Sequence[float]) -> float:
    """sup{phi(xi) | xi in cone, <mu, xi> <= p}.

    Exact LP for structured phi; adaptive coefficient-lattice maximization
    for custom callables (first-order accuracy in the lattice spacing).
    """
    mu = np.asarray(mu, dtype=float)
    rays = c.ray_matrix()
    k = rays.shape[0]
    if phi.kind in ("min", "linear"):
        # variables: lam (k), and t for the min objective
        if phi.kind == "min":
            cols = k + 1
            cvec = np.zeros(cols)
            cvec[-1] = -1.0  # maximize t
            a_ub = np.zeros((c.dim + 1, cols))
            a_ub[: c.dim, :k] = -rays.T  # t - xi_s <= 0
            a_ub[: c.dim, -1] = 1.0
            a_ub[c.dim, :k] = rays @ mu  # <mu, xi> <= p
            b_ub = np.concatenate([np.zeros(c.dim), [p]])
            bounds = [(0, None)] * k + [(None, None)]
        else:
            cols = k
            cvec = -(rays @ np.asarray(phi.weights, dtype=float))
            a_ub = (rays @ mu).reshape(1, -1)
            b_ub = np.array([p])
            bounds = [(0, None)] * k
        res = linprog(c=cvec, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
        if res.status == 3:
            return math.inf
        if res.status == 2:
            return -math.inf
        if res.status != 0:
            raise RuntimeError(f"inner sup LP failed with status {res.status}")
        return float(-res.fun)
    return _h_lattice(c, phi, p, mu)


def _h_lattice(
    c: ConeSpec,
    phi: PhiSpec,
    p: float,
    mu: np.ndarray,
    resolution: int = 16,
    tol: float = 1e-6,
    max_doublings: int = 12,
) -> float:
    """Maximize phi over a coefficient lattice in [0, C]^k, doubling the cap C
    until the constrained optimum stops moving."""
    rays = c.ray_matrix()
    k = rays.shape[0]
    pairing = rays @ mu
    best_prev = -math.inf
    cap = 1.0
    for _ in range(max_doublings):
        axis = np.linspace(0.0, cap, resolution + 1)
        best = -math.inf
        for combo in itertools.product(axis, repeat=k):
            lam = np.asarray(combo)
            if float(pairing @ lam) > p + _FEAS_TOL:
                continue
            best = max(best, phi(lam @ rays))
        if math.isfinite(best_prev) and abs(best - best_prev) < tol:
            return best
        best_prev = best
        cap *= 2.0
    return best_prev


def psi(
    c: ConeSpec,
    phi: PhiSpec,
    y: Sequence[float],
    members: Sequence[Sequence[float]],
) -> float:
    """inf over the member measures of the dual majorant H(<Q, y>, Q)."""
    if len(members) == 0:
        raise ValueError("need at least one member of the polar slice")
    y = np.asarray(y, dtype=float)
    best = math.inf
    for mu in members:
        mu = np.asarray(mu, dtype=float)
        best = min(best, h_cone(c, phi, float(mu @ y), mu))
    return best


def pi_cone(c: ConeSpec, phi: PhiSpec, r: float, mu: Sequence[float]) -> float:
    """inf{<mu, xi> | xi in cone, phi(xi) >= r}; exact LP for structured phi."""
    mu = np.asarray(mu, dtype=float)
    rays = c.ray_matrix()
    k = rays.shape[0]
    if phi.kind == "min":
        a_ub = -rays.T
        b_ub = -r * np.ones(c.dim)  # xi_s >= r
    elif phi.kind == "linear":
        a_ub = -(rays @ np.asarray(phi.weights, dtype=float)).reshape(1, -1)
        b_ub = np.array([-r])
    else:
        raise ValueError("price functional needs a structured phi")
    res = linprog(c=rays @ mu, A_ub=a_ub, b_ub=b_ub,
                  bounds=[(0, None)] * k, method="highs")
    if res.status == 2:
        return math.inf
    if res.status == 3:
        return -math.inf
    if res.status != 0:
        raise RuntimeError(f"price LP failed with status {res.status}")
    return float(res.fun)


def r_cone(c: ConeSpec, phi: PhiSpec, p: float, mu: Sequence[float], tol: float = 1e-10) -> float:
    """Generalized right inverse sup{r | pi_cone(r, mu) <= p}."""
    return sup_below(lambda r: pi_cone(c, phi, r, mu), p, tol=tol)


@dataclass
class DualityReport:
    max_gap: float
    worst_y: list[float]
    members_used: int
    weak_violations: int
    cases: int
    skipped: str | None = None

    def as_dict(self) -> dict:
        return {
            "max_gap": self.max_gap,
            "worst_y": self.worst_y,
            "members_used": self.members_used,
            "weak_violations": self.weak_violations,
            "cases": self.cases,
            "skipped": self.skipped,
        }


def tol_for_resolution(resolution: int) -> float:
    """First-order lattice error bound used by the verification gate."""
    return 2.0 / resolution


def verify_thA(
    c: ConeSpec,
    phi: PhiSpec,
    y_grid: Sequence[Sequence[float]],
    resolution: int = 1,
    extra_members: Sequence[Sequence[float]] | None = None,
    weak_tol: float = 1e-9,
) -> DualityReport:
    """Check the dual representation phi(y) = inf_Q H(<Q, y>, Q) on a grid.

    Weak duality (phi(y) <= H for every member) is exact and must hold with
    zero violations; the reported max gap compares phi(y) with the inf over
    the sampled members.
    """
    if not (phi.monotone and phi.quasiconcave):
        return DualityReport(
            math.nan, [], 0, 0, 0, skipped="phi must be declared monotone and quasiconcave"
        )
    members = [np.asarray(m, dtype=float) for m in k1_polar_sample(c, resolution)]
    for m in extra_members or ():
        members.append(np.asarray(m, dtype=float))
    if not members:
        return DualityReport(math.nan, [], 0, 0, 0, skipped="empty polar slice sample")
    max_gap = 0.0
    worst: Sequence[float] = []
    weak_violations = 0
    for y in y_grid:
        y = np.asarray(y, dtype=float)
        target = phi(y)
        best = math.inf
        for mu in members:
            h_val = h_cone(c, phi, float(mu @ y), mu)
            if h_val < target - weak_tol:
                weak_violations += 1
            best = min(best, h_val)
        gap = abs(best - target) if math.isfinite(best) else math.inf
        if gap > max_gap:
            max_gap, worst = gap, [float(t) for t in y]
    return DualityReport(max_gap, list(worst), len(members), weak_violations, len(y_grid))
