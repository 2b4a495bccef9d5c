"""Randomized verification harness for V&R axioms and structural laws.

Implementations under test expose the map (p, variable, measure, scenario)
-> extended real.  Each axiom derives its comparison instances
constructively (mass transfers, payoff shifts, measure mixtures), so no
rejection sampling is needed; when a required ordering cannot be built the
case is skipped with a reason rather than passing silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .distributions import ScenarioSpace, pushforward
from .families import Call, ExpConcave, IdentityShift, InsuredPut, TestFamily
from .risk import var
from .vr import VnRContext, pi, r_measure

RImpl = Callable[[float, str, str, ScenarioSpace], float]

AXIOMS = ("1Mon", "2Mon", "3Mon", "QCo", "QCoX", "CLI", "CA", "Aff", "DI", "DCA", "Nor")

_IMPLICATIONS = (
    (("Aff", "CA"), "DI"),
    (("Aff", "DI"), "CA"),
    (("CA", "DI"), "Aff"),
    (("CA", "CLI"), "DCA"),
    (("DCA",), "CA"),
    (("DCA",), "CLI"),
)


@dataclass
class AxiomReport:
    axiom: str
    cases: int = 0
    failures: int = 0
    skipped: int = 0
    skip_reason: str | None = None
    first_counterexample: dict | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.cases > self.skipped

    def as_dict(self) -> dict:
        return {
            "axiom": self.axiom,
            "cases": self.cases,
            "failures": self.failures,
            "skipped": self.skipped,
            "skip_reason": self.skip_reason,
            "first_counterexample": self.first_counterexample,
        }


@dataclass
class SuiteReport:
    reports: dict[str, AxiomReport]
    implication_violations: list[str] = field(default_factory=list)

    @property
    def total_failures(self) -> int:
        return sum(r.failures for r in self.reports.values())

    def as_dict(self) -> dict:
        return {
            "axioms": [r.as_dict() for r in self.reports.values()],
            "implication_violations": self.implication_violations,
        }


@dataclass(frozen=True)
class AxiomInstance:
    scenario: ScenarioSpace
    variable_name: str
    measure_name: str
    p: float


def make_family_r(family: TestFamily, tolerance: float = 1e-9) -> RImpl:
    """Intrinsic-risk map of a test family as a harness implementation."""

    def impl(p: float, variable: str, measure: str, scenario: ScenarioSpace) -> float:
        ctx = VnRContext(family, scenario, variable, measure, tolerance)
        return r_measure(ctx, p)

    return impl


def make_pnl_var_r(lam: float) -> RImpl:
    """Control map p + V@R_lam(P_X); fails quasi-convexity in the payoff."""

    def impl(p: float, variable: str, measure: str, scenario: ScenarioSpace) -> float:
        return p + var(pushforward(scenario, measure, variable), lam)

    return impl


def default_instance_gen(
    rng: np.random.Generator,
    n_states: tuple[int, int] = (2, 6),
    value_range: tuple[float, float] = (-3.0, 3.0),
) -> AxiomInstance:
    n = int(rng.integers(n_states[0], n_states[1] + 1))
    raw = rng.random(n) + 0.05
    qs = raw / raw.sum()
    xs = rng.uniform(value_range[0], value_range[1], n)
    scenario = ScenarioSpace(
        states=tuple(f"s{i}" for i in range(n)),
        measures={"Q": tuple(qs)},
        variables={"X": tuple(xs)},
    )
    p = float(np.dot(qs, xs) + rng.uniform(-1.5, 1.5))
    return AxiomInstance(scenario, "X", "Q", p)


def _random_measure(rng: np.random.Generator, n: int) -> tuple[float, ...]:
    raw = rng.random(n) + 0.05
    return tuple(raw / raw.sum())


def _close(a: float, b: float, slack: float) -> bool:
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= slack


def _leq(a: float, b: float, slack: float) -> bool:
    if a == -math.inf or b == math.inf:
        return True
    if math.isinf(a) or math.isinf(b):
        return a <= b
    return a <= b + slack


def _scenario_dict(s: ScenarioSpace) -> dict:
    return {
        "states": list(s.states),
        "measures": {k: list(v) for k, v in s.measures.items()},
        "variables": {k: list(v) for k, v in s.variables.items()},
    }


def axiom_check(
    r_impl: RImpl,
    suite: Sequence[str],
    gen: Callable[[np.random.Generator], AxiomInstance] = default_instance_gen,
    n_cases: int = 1000,
    seed: int = 0,
    slack: float = 1e-7,
) -> SuiteReport:
    """Run each axiom in the suite over n_cases generated instances.

    Case i draws from an isolated stream seeded by (seed, axiom index, i),
    so results are reproducible and order-independent.
    """
    unknown = [a for a in suite if a not in AXIOMS]
    if unknown:
        raise ValueError(f"unknown axioms: {unknown}")
    reports: dict[str, AxiomReport] = {}
    for ai, axiom in enumerate(suite):
        report = AxiomReport(axiom=axiom)
        for case in range(n_cases):
            rng = np.random.default_rng([seed, ai, case])
            inst = gen(rng)
            outcome = _check_one(r_impl, axiom, inst, rng, slack)
            report.cases += 1
            if outcome is None:
                continue
            if outcome.get("skipped"):
                report.skipped += 1
                report.skip_reason = outcome.get("reason", "instance not constructible")
                continue
            report.failures += 1
            if report.first_counterexample is None:
                outcome["case_index"] = case
                report.first_counterexample = outcome
        reports[axiom] = report
    return SuiteReport(reports, _implication_violations(reports))


def _implication_violations(reports: dict[str, AxiomReport]) -> list[str]:
    notes = []
    for antecedents, consequent in _IMPLICATIONS:
        have = all(a in reports for a in antecedents) and consequent in reports
        if not have:
            continue
        if all(reports[a].passed for a in antecedents) and not reports[consequent].passed:
            notes.append(f"{' and '.join(antecedents)} passed but {consequent} failed")
    return notes


def _check_one(
    r_impl: RImpl,
    axiom: str,
    inst: AxiomInstance,
    rng: np.random.Generator,
    slack: float,
) -> dict | None:
    s, v, m, p = inst.scenario, inst.variable_name, inst.measure_name, inst.p
    n = len(s.states)
    xs = s.variable(v)

    def fail(lhs: float, rhs: float, **extra) -> dict:
        out = {"axiom": axiom, "p": p, "scenario": _scenario_dict(s),
               "lhs": lhs, "rhs": rhs}
        out.update(extra)
        return out

    if axiom == "1Mon":
        q = p + float(rng.uniform(0.0, 2.0))
        lhs, rhs = r_impl(p, v, m, s), r_impl(q, v, m, s)
        return None if _leq(lhs, rhs, slack) else fail(lhs, rhs, q=q)

    if axiom == "2Mon":
        bump = rng.uniform(0.0, 2.0, n)
        s2 = s.with_variable("Y", [x + b for x, b in zip(xs, bump)])
        lhs, rhs = r_impl(p, "Y", m, s2), r_impl(p, v, m, s2)
        return None if _leq(lhs, rhs, slack) else fail(lhs, rhs, bump=list(bump))

    if axiom == "3Mon":
        q2 = _transfer_up(rng, list(s.measure(m)), xs)
        if q2 is None:
            return {"skipped": True, "reason": "no strictly ordered payoff pair"}
        s2 = s.with_measure("Q2", q2)
        lhs, rhs = r_impl(p, v, "Q2", s2), r_impl(p, v, m, s2)
        return None if _leq(lhs, rhs, slack) else fail(lhs, rhs, q2=list(q2))

    if axiom == "QCo":
        lam = float(rng.uniform(0.0, 1.0))
        qb = _random_measure(rng, n)
        qa = s.measure(m)
        qmix = tuple(lam * a + (1 - lam) * b for a, b in zip(qa, qb))
        s2 = s.with_measure("Qb", qb).with_measure("Qmix", qmix)
        lhs = r_impl(p, v, "Qmix", s2)
        rhs = max(r_impl(p, v, m, s2), r_impl(p, v, "Qb", s2))
        return None if _leq(lhs, rhs, slack) else fail(lhs, rhs, lam=lam, qb=list(qb))

    if axiom == "QCoX":
        lam = float(rng.uniform(0.1, 0.9))
        x2 = rng.uniform(min(xs) - 1.0, max(xs) + 1.0, n)
        xmix = [lam * a + (1 - lam) * b for a, b in zip(xs, x2)]
        s2 = s.with_variable("X2", x2).with_variable("Xmix", xmix)
        lhs = r_impl(p, "Xmix", m, s2)
        rhs = max(r_impl(p, v, m, s2), r_impl(p, "X2", m, s2))
        return None if _leq(lhs, rhs, slack) else fail(lhs, rhs, lam=lam, x2=list(x2))

    if axiom == "CLI":
        perm = rng.permutation(n)
        s2 = s.with_variable("Y", [xs[i] for i in perm]).with_measure(
            "Q2", [s.measure(m)[i] for i in perm]
        )
        lhs, rhs = r_impl(p, v, m, s2), r_impl(p, "Y", "Q2", s2)
        return None if _close(lhs, rhs, slack) else fail(lhs, rhs, perm=[int(i) for i in perm])

    if axiom == "CA":
        alpha = float(rng.uniform(-2.0, 2.0))
        s2 = s.with_variable("Y", [x + alpha for x in xs])
        lhs, rhs = r_impl(p, "Y", m, s2), r_impl(p, v, m, s2) - alpha
        return None if _close(lhs, rhs, slack) else fail(lhs, rhs, alpha=alpha)

    if axiom == "Aff":
        alpha = float(rng.uniform(-2.0, 2.0))
        lhs, rhs = r_impl(p + alpha, v, m, s), r_impl(p, v, m, s) + alpha
        return None if _close(lhs, rhs, slack) else fail(lhs, rhs, alpha=alpha)

    if axiom == "DI":
        alpha = float(rng.uniform(-2.0, 2.0))
        s2 = s.with_variable("Y", [x + alpha for x in xs])
        lhs, rhs = r_impl(p + alpha, "Y", m, s2), r_impl(p, v, m, s2)
        return None if _close(lhs, rhs, slack) else fail(lhs, rhs, alpha=alpha)

    if axiom == "DCA":
        alpha = float(rng.uniform(-2.0, 2.0))
        perm = rng.permutation(n)
        s2 = s.with_variable("Y", [xs[i] + alpha for i in perm]).with_measure(
            "Q2", [s.measure(m)[i] for i in perm]
        )
        lhs = r_impl(p, v, m, s2) - alpha
        rhs = r_impl(p, "Y", "Q2", s2)
        return None if _close(lhs, rhs, slack) else fail(lhs, rhs, alpha=alpha)

    if axiom == "Nor":
        s2 = s.with_variable("Z", [0.0] * n)
        lhs = r_impl(0.0, "Z", m, s2)
        return None if _close(lhs, 0.0, slack) else fail(lhs, 0.0)

    raise AssertionError(f"unhandled axiom {axiom}")  # pragma: no cover


def _transfer_up(
    rng: np.random.Generator, qs: list[float], xs: Sequence[float], moves: int = 3
) -> tuple[float, ...] | None:
    """Build a measure dominating the input along the payoff ordering by
    moving probability mass toward states with higher payoff values."""
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    pairs = [(a, b) for ai, a in enumerate(order) for b in order[ai + 1:] if xs[a] < xs[b]]
    if not pairs:
        return None
    out = list(qs)
    for _ in range(moves):
        i, j = pairs[int(rng.integers(len(pairs)))]
        amount = float(rng.uniform(0.0, out[i]))
        out[i] -= amount
        out[j] += amount
    return tuple(out)


# -- dependence on the test-claim set ------------------------------------------


@dataclass
class ItemResult:
    checked: int = 0
    violations: int = 0
    max_gap: float = 0.0
    skipped: str | None = None

    def as_dict(self) -> dict:
        return {
            "checked": self.checked,
            "violations": self.violations,
            "max_gap": self.max_gap,
            "skipped": self.skipped,
        }


@dataclass
class DependenceReport:
    items: dict[str, ItemResult]

    @property
    def total_violations(self) -> int:
        return sum(r.violations for r in self.items.values())

    def as_dict(self) -> dict:
        return {name: r.as_dict() for name, r in self.items.items()}


def dependence_k_check(
    fam1: TestFamily,
    fam2: TestFamily,
    ctx: VnRContext,
    lam: float,
    p_grid: Sequence[float],
    r_grid: Sequence[float],
    tol: float = 1e-8,
) -> DependenceReport:
    """Verify the monotonicity / convex-combination / Minkowski-sum laws for
    a pair of same-kind families over the context's scenario."""
    if fam1.kind != fam2.kind:
        raise ValueError("paired families must share a kind")
    xs, qs = ctx.payoffs, ctx.weights
    items = {
        "containment": _check_containment(fam1, fam2, xs, qs, p_grid, r_grid, tol),
        "convex_combination": _check_convex_combination(
            fam1, fam2, lam, xs, qs, p_grid, r_grid, tol
        ),
        "minkowski_sum": _check_minkowski(fam1, fam2, xs, qs, p_grid, r_grid, tol),
    }
    return DependenceReport(items)


def _pi_r_pair(fam: TestFamily, xs, qs) -> tuple[Callable, Callable]:
    def pi_f(r: float) -> float:
        return fam.pi(r, xs, qs)

    def r_f(p: float) -> float:
        from ._monotone import sup_below

        return sup_below(pi_f, p, tol=1e-10)

    return pi_f, r_f


def _check_containment(fam1, fam2, xs, qs, p_grid, r_grid, tol) -> ItemResult:
    res = ItemResult()
    lo1, hi1 = fam1.domain
    lo2, hi2 = fam2.domain
    if not (lo2 <= lo1 and hi1 <= hi2):
        res.skipped = "first family domain is not contained in the second"
        return res
    pi1, r1 = _pi_r_pair(fam1, xs, qs)
    pi2, r2 = _pi_r_pair(fam2, xs, qs)
    for r in r_grid:
        res.checked += 1
        gap = pi2(r) - pi1(r)  # require pi1 >= pi2
        _record_leq(res, gap, tol)
    for p in p_grid:
        res.checked += 1
        gap = r1(p) - r2(p)  # require r1 <= r2
        _record_leq(res, gap, tol)
    return res


def _record_leq(res: ItemResult, gap: float, tol: float) -> None:
    """Accumulate a check of gap <= 0 (inf-aware)."""
    if math.isnan(gap):
        gap = 0.0  # inf - inf: both sides equal at the same infinity
    if gap > tol:
        res.violations += 1
        res.max_gap = max(res.max_gap, gap if math.isfinite(gap) else math.inf)
    elif math.isfinite(gap):
        res.max_gap = max(res.max_gap, gap)


def _mix_pi(fam1, fam2, lam, xs, qs) -> Callable[[float], float] | None:
    """Exact price functional of the convex combination lam*K1 + (1-lam)*K2."""
    kind = fam1.kind
    if kind == "identity_shift" or (kind == "approx_identity" and not getattr(fam1, "curved", False)):
        lo = lam * fam1.domain[0] + (1 - lam) * fam2.domain[0]
        hi = lam * fam1.domain[1] + (1 - lam) * fam2.domain[1]
        mean = math.fsum(q * x for q, x in zip(qs, xs))

        def pi_mix(r: float) -> float:
            if r > hi:
                return math.inf
            return mean + max(r, lo)

        return pi_mix
    if kind == "exp_concave":
        g1, g2 = fam1.g, fam2.g
        glo = lam * g1.at(fam1.domain[0]) + (1 - lam) * g2.at(fam2.domain[0])
        ghi = lam * g1.at(fam1.domain[1]) + (1 - lam) * g2.at(fam2.domain[1])
        expneg = math.fsum(q * math.exp(-x) for q, x in zip(qs, xs))

        def pi_mix(r: float) -> float:
            if r + 1.0 > ghi:
                return math.inf
            return max(r + 1.0, glo) - expneg

        return pi_mix
    if kind == "call":
        return lambda r: _call_pair_mix_pi(r, lam, xs, qs, fam1.domain, fam2.domain)
    return None


def _call_price(k: float, xs, qs) -> float:
    if k == -math.inf:
        return math.inf
    if k == math.inf:
        return 0.0
    return math.fsum(q * max(x - k, 0.0) for q, x in zip(qs, xs))


def _call_pair_mix_pi(r, lam, xs, qs, dom1, dom2) -> float:
    """inf{lam*E[(X-k1)^+] + (1-lam)*E[(X-k2)^+] | lam*(-k1)+(1-lam)*(-k2) >= r}.

    The objective restricted to the active constraint line is piecewise
    linear in k1 with kinks where either strike crosses an atom, so the exact
    minimum is attained on the kink/endpoint candidate set (plus the corner
    where both strikes sit at their domain tops and the constraint is slack).
    """
    l1, h1 = dom1
    l2, h2 = dom2
    best = math.inf
    # slack-constraint corner
    if lam * (-_cap(h1)) + (1 - lam) * (-_cap(h2)) >= r:
        best = lam * _call_price(h1, xs, qs) + (1 - lam) * _call_price(h2, xs, qs)

    def k2_of(k1: float) -> float:
        return (-r - lam * k1) / (1.0 - lam) if lam < 1.0 else math.inf

    def k1_of(k2: float) -> float:
        return (-r - (1.0 - lam) * k2) / lam if lam > 0.0 else math.inf

    candidates = set()
    for x in list(xs) + [l1, h1]:
        if math.isfinite(x):
            candidates.add(float(x))
    for x in list(xs) + [l2, h2]:
        k1 = k1_of(float(x))
        if math.isfinite(k1):
            candidates.add(k1)
    for k1 in candidates:
        if not (l1 <= k1 <= h1):
            continue
        k2 = min(k2_of(k1), h2)
        if not (l2 <= k2 <= h2):
            continue
        if lam * (-k1) + (1 - lam) * (-k2) < r - 1e-12:
            continue
        val = lam * _call_price(k1, xs, qs) + (1 - lam) * _call_price(k2, xs, qs)
        best = min(best, val)
    return best


def _cap(k: float) -> float:
    return min(k, 1e18) if math.isinf(k) else k


def _check_convex_combination(fam1, fam2, lam, xs, qs, p_grid, r_grid, tol) -> ItemResult:
    res = ItemResult()
    pi_mix = _mix_pi(fam1, fam2, lam, xs, qs)
    if pi_mix is None:
        res.skipped = f"no exact mixed price functional for kind {fam1.kind!r}"
        return res
    pi1, r1 = _pi_r_pair(fam1, xs, qs)
    pi2, r2 = _pi_r_pair(fam2, xs, qs)
    from ._monotone import sup_below

    for r in r_grid:
        res.checked += 1
        rhs = lam * pi1(r) + (1 - lam) * pi2(r)
        _record_leq(res, pi_mix(r) - rhs, tol)
    for p in p_grid:
        res.checked += 1
        lhs = sup_below(pi_mix, p, tol=1e-10)
        rhs = min(r1(p), r2(p))
        _record_leq(res, rhs - lhs, tol)
    return res


def _check_minkowski(fam1, fam2, xs, qs, p_grid, r_grid, tol) -> ItemResult:
    res = ItemResult()
    if fam1.kind != "call":
        res.skipped = (
            "superlevel additivity of the risk reduction holds only for the call family"
        )
        return res

    l1, h1 = fam1.domain
    l2, h2 = fam2.domain

    def pi_sum(r: float) -> float:
        # constraint -min(k1, k2) >= r; the unconstrained strike floats to
        # its domain top where the call price is cheapest
        best = math.inf
        k1 = min(-r, h1)
        if k1 >= l1:
            best = min(best, _call_price(k1, xs, qs) + _call_price(h2, xs, qs))
        k2 = min(-r, h2)
        if k2 >= l2:
            best = min(best, _call_price(h1, xs, qs) + _call_price(k2, xs, qs))
        return best

    pi1, r1 = _pi_r_pair(fam1, xs, qs)
    pi2, r2 = _pi_r_pair(fam2, xs, qs)
    from ._monotone import sup_below

    for r in r_grid:
        res.checked += 1
        _record_leq(res, pi_sum(r) - (pi1(r) + pi2(r)), tol)
    for p in p_grid:
        res.checked += 1
        lhs = sup_below(pi_sum, p, tol=1e-10)
        rhs = -math.inf
        for frac in np.linspace(-1.0, 2.0, 61):
            p1 = frac * p if p != 0 else float(frac)
            rhs = max(rhs, min(r1(p1), r2(p - p1)))
        _record_leq(res, rhs - lhs, tol)
    return res


# -- cash behaviour -------------------------------------------------------------


@dataclass
class CashConditionResult:
    condition: str
    holds: bool
    detect_gap: float
    assert_checked: int = 0
    assert_violations: int = 0
    assert_gap: float = 0.0

    def as_dict(self) -> dict:
        return {
            "condition": self.condition,
            "holds": self.holds,
            "detect_gap": self.detect_gap,
            "assert_checked": self.assert_checked,
            "assert_violations": self.assert_violations,
            "assert_gap": self.assert_gap,
        }


@dataclass
class CashReport:
    conditions: list[CashConditionResult]

    @property
    def total_violations(self) -> int:
        return sum(c.assert_violations for c in self.conditions)

    def as_dict(self) -> dict:
        return {"conditions": [c.as_dict() for c in self.conditions]}


def cash_check(
    ctx: VnRContext,
    alpha_grid: Sequence[float],
    p_grid: Sequence[float],
    detect_tol: float = 1e-9,
    assert_tol: float = 1e-7,
) -> CashReport:
    """Detect which price-side cash conditions hold on the grids and assert
    the matching intrinsic-risk identities for each detected condition."""
    n = len(ctx.scenario.states)
    fam = ctx.family
    xs, qs = ctx.payoffs, ctx.weights

    def gap_max(pairs: Iterable[tuple[float, float]]) -> float:
        worst = 0.0
        for a, b in pairs:
            if math.isinf(a) or math.isinf(b):
                if a != b:
                    return math.inf
                continue
            worst = max(worst, abs(a - b))
        return worst

    results: list[CashConditionResult] = []

    # (a) pi(r, const p) = p + r  =>  R(p, p) = 0
    detect = gap_max(
        (fam.pi(r, [pv] * n, qs), pv + r) for r in alpha_grid for pv in p_grid
    )
    cond = CashConditionResult("a", detect <= detect_tol, detect)
    if cond.holds:
        for pv in p_grid:
            ctx2 = ctx.scenario.with_variable("__const__", [pv] * n)
            val = r_measure(
                VnRContext(fam, ctx2, "__const__", ctx.measure_name, ctx.tolerance), pv
            )
            cond.assert_checked += 1
            if not _close(val, 0.0, assert_tol):
                cond.assert_violations += 1
            if math.isfinite(val):
                cond.assert_gap = max(cond.assert_gap, abs(val))
    results.append(cond)

    # (b) pi(r + a) = a + pi(r)  =>  R(p + a) = a + R(p)
    detect = gap_max(
        (fam.pi(r + a, xs, qs), a + fam.pi(r, xs, qs))
        for r in alpha_grid
        for a in alpha_grid
    )
    cond = CashConditionResult("b", detect <= detect_tol, detect)
    if cond.holds:
        for pv in p_grid:
            for a in alpha_grid:
                lhs = r_measure(ctx, pv + a)
                rhs = r_measure(ctx, pv)
                cond.assert_checked += 1
                if not _close(lhs, rhs + a if math.isfinite(rhs) else rhs, assert_tol):
                    cond.assert_violations += 1
                elif math.isfinite(lhs) and math.isfinite(rhs):
                    cond.assert_gap = max(cond.assert_gap, abs(lhs - rhs - a))
    results.append(cond)

    # (c) pi(r + a, X) = pi(r, X + a)  =>  R(p, X + a) = R(p, X) - a
    detect = gap_max(
        (fam.pi(r + a, xs, qs), fam.pi(r, [x + a for x in xs], qs))
        for r in alpha_grid
        for a in alpha_grid
    )
    cond = CashConditionResult("c", detect <= detect_tol, detect)
    if cond.holds:
        for pv in p_grid:
            for a in alpha_grid:
                s2 = ctx.scenario.with_variable("__shift__", [x + a for x in xs])
                lhs = r_measure(
                    VnRContext(fam, s2, "__shift__", ctx.measure_name, ctx.tolerance), pv
                )
                rhs = r_measure(ctx, pv)
                cond.assert_checked += 1
                if not _close(lhs, rhs - a if math.isfinite(rhs) else rhs, assert_tol):
                    cond.assert_violations += 1
                elif math.isfinite(lhs) and math.isfinite(rhs):
                    cond.assert_gap = max(cond.assert_gap, abs(lhs - rhs + a))
    results.append(cond)

    # (d) pi(r, X + a) = pi(r, X) + a  =>  R(p + a, X + a) = R(p, X)
    detect = gap_max(
        (fam.pi(r, [x + a for x in xs], qs), fam.pi(r, xs, qs) + a)
        for r in alpha_grid
        for a in alpha_grid
    )
    cond = CashConditionResult("d", detect <= detect_tol, detect)
    if cond.holds:
        for pv in p_grid:
            for a in alpha_grid:
                s2 = ctx.scenario.with_variable("__shift__", [x + a for x in xs])
                lhs = r_measure(
                    VnRContext(fam, s2, "__shift__", ctx.measure_name, ctx.tolerance),
                    pv + a,
                )
                rhs = r_measure(ctx, pv)
                cond.assert_checked += 1
                if not _close(lhs, rhs, assert_tol):
                    cond.assert_violations += 1
                elif math.isfinite(lhs) and math.isfinite(rhs):
                    cond.assert_gap = max(cond.assert_gap, abs(lhs - rhs))
    results.append(cond)

    return CashReport(results)
