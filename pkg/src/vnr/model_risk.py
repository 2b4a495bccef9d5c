"""Constrained best-price over a set of pricing models and its inverse.

A model set is a finite list of named measures on a shared scenario space,
each carrying a model-risk level per variable.  The value function is the
best price over models within a risk budget; its generalized inverse
recovers the smallest budget needed to reach a quoted price, and taking the
supremum over a basket of claims yields the indirect model-risk function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .distributions import ScenarioSpace


@dataclass(frozen=True)
class ModelSet:
    """Finite family of pricing measures with model-risk levels.

    ``model_risk[measure][variable]`` is the risk A(Q, X) of using measure Q
    to price claims on variable X; levels are extended reals >= 0.
    """

    scenario: ScenarioSpace
    measure_names: tuple[str, ...]
    model_risk: Mapping[str, Mapping[str, float]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "measure_names", tuple(self.measure_names))
        object.__setattr__(
            self,
            "model_risk",
            {m: {v: float(x) for v, x in row.items()} for m, row in self.model_risk.items()},
        )
        if not self.measure_names:
            raise ValueError("model set needs at least one measure")
        for name in self.measure_names:
            self.scenario.measure(name)  # raises on unknown names
        for name, row in self.model_risk.items():
            for variable, level in row.items():
                if math.isnan(level):
                    raise ValueError(
                        f"model risk of ({name}, {variable}) must be a real or extended value"
                    )

    def risk_of(self, measure_name: str, variable_name: str) -> float:
        try:
            return self.model_risk[measure_name][variable_name]
        except KeyError:
            raise KeyError(
                f"no model-risk level for measure {measure_name!r}, variable {variable_name!r}"
            ) from None

    def price(self, measure_name: str, variable_name: str, f: Callable[[float], float]) -> float:
        return self.scenario.expectation(measure_name, variable_name, f)


def v_value(ms: ModelSet, a: float, variable_name: str, f: Callable[[float], float]) -> float:
    """Best price of the claim f(X) over models with risk at most a; sup of
    the empty set is -inf."""
    best = -math.inf
    for name in ms.measure_names:
        if ms.risk_of(name, variable_name) <= a:
            best = max(best, ms.price(name, variable_name, f))
    return best


def v_inverse(
    ms: ModelSet,
    v: float,
    variable_name: str,
    f: Callable[[float], float],
    atol: float = 0.0,
) -> float:
    """inf{a | v_value(a) >= v}, computed exactly by a prefix scan over the
    models sorted by risk level.  ``atol`` relaxes the price comparison to
    absorb floating-point noise in externally computed targets."""
    rows = sorted(
        (ms.risk_of(name, variable_name), ms.price(name, variable_name, f))
        for name in ms.measure_names
    )
    best = -math.inf
    for level, price in rows:
        best = max(best, price)
        if best >= v - atol:
            return level
    return math.inf


def alpha_k(
    ms: ModelSet,
    measure_name: str,
    variable_name: str,
    k_grid: Sequence[Callable[[float], float]],
    atol: float = 0.0,
) -> float:
    """Indirect model risk: sup over the claim basket of the inverse value at
    the target measure's own price of the claim."""
    if not k_grid:
        raise ValueError("need a non-empty grid of claims")
    best = -math.inf
    for f in k_grid:
        quote = ms.price(measure_name, variable_name, f)
        best = max(best, v_inverse(ms, quote, variable_name, f, atol=atol))
    return best


def cont_spread(ms: ModelSet, variable_name: str, f: Callable[[float], float]) -> float:
    """Worst-case minus best-case price over all models (risk ignored)."""
    prices = [ms.price(name, variable_name, f) for name in ms.measure_names]
    return max(prices) - min(prices)
