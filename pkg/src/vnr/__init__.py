"""Value&Risk measures over finite scenario spaces and laws on the line.

The package splits into distribution machinery (`distributions`), risk
measures and their dual representation (`risk`), one-parameter derivative
test families (`families`), the price functional and its intrinsic-risk
inverse plus acceptance sets (`vr`), the randomized axiom harness
(`harness`), model-risk value functions (`model_risk`), finite-dimensional
cone duality (`cones`), file schemas (`io`), and the `vnr` CLI (`cli`).
"""

from .distributions import (
    Distribution,
    ScenarioSpace,
    cdf_eval,
    dominates_first_order,
    expectation,
    mix,
    pushforward,
    quantile_left,
    translate,
)
from .families import (
    ApproxIdentity,
    Call,
    ExpConcave,
    IdentityShift,
    InsuredPut,
    TestFamily,
    build_family,
    generic_phi,
    payoff_eval,
    risk_reduction,
)
from .risk import (
    CertaintyTransform,
    DecreasingTestFn,
    LambdaFn,
    RiskMeasure,
    certainty_equivalent,
    default_ramp_grid,
    dual_inverse,
    dual_value,
    lambda_var,
    propvolle_lower_bound,
    var,
)
from .vr import AcceptanceFamily, VnRContext, acceptance_r, h_function, h_plus, pi, r_measure
from .harness import axiom_check, cash_check, dependence_k_check, make_family_r, make_pnl_var_r
from .model_risk import ModelSet, alpha_k, cont_spread, v_inverse, v_value
from .cones import ConeSpec, PhiSpec, k1_polar_sample, polar_member, psi, verify_thA

__version__ = "0.1.0"

__all__ = [
    "AcceptanceFamily",
    "ApproxIdentity",
    "Call",
    "CertaintyTransform",
    "ConeSpec",
    "DecreasingTestFn",
    "Distribution",
    "ExpConcave",
    "IdentityShift",
    "InsuredPut",
    "LambdaFn",
    "ModelSet",
    "PhiSpec",
    "RiskMeasure",
    "ScenarioSpace",
    "TestFamily",
    "VnRContext",
    "acceptance_r",
    "alpha_k",
    "axiom_check",
    "build_family",
    "cash_check",
    "cdf_eval",
    "certainty_equivalent",
    "cont_spread",
    "default_ramp_grid",
    "dependence_k_check",
    "dominates_first_order",
    "dual_inverse",
    "dual_value",
    "expectation",
    "generic_phi",
    "h_function",
    "h_plus",
    "k1_polar_sample",
    "lambda_var",
    "make_family_r",
    "make_pnl_var_r",
    "mix",
    "payoff_eval",
    "pi",
    "polar_member",
    "propvolle_lower_bound",
    "psi",
    "pushforward",
    "quantile_left",
    "r_measure",
    "risk_reduction",
    "translate",
    "v_inverse",
    "v_value",
    "var",
    "verify_thA",
]
