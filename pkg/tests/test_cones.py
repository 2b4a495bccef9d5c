import itertools
import math

import numpy as np
import pytest

from vnr.cones import (
    ConeSpec,
    PhiSpec,
    h_cone,
    k1_polar_sample,
    pi_cone,
    polar_member,
    psi,
    r_cone,
    verify_thA,
)
from vnr.distributions import ScenarioSpace


def scn(n):
    return ScenarioSpace(
        tuple(f"s{i}" for i in range(n)),
        {"Q": tuple([1.0 / n] * n)},
        {"X": tuple(float(i) for i in range(n))},
    )


def lattice_h_oracle(cone, phi, p, mu, cap=8.0, steps=33):
    """Brute-force inner sup over a coefficient lattice."""
    rays = cone.ray_matrix()
    best = -math.inf
    axis = np.linspace(0.0, cap, steps)
    for combo in itertools.product(axis, repeat=rays.shape[0]):
        lam = np.asarray(combo)
        xi = lam @ rays
        if float(np.dot(mu, xi)) <= p + 1e-12:
            best = max(best, phi(xi))
    return best


class TestPolarMembership:
    def test_full_space_polar_is_nonneg_orthant(self):
        cone = ConeSpec.full_space(scn(3))
        rng = np.random.default_rng(0)
        for _ in range(40):
            mu = rng.uniform(-1, 1, 3)
            assert polar_member(cone, mu) == bool(np.all(mu >= -1e-10))

    def test_probability_vector_always_member(self):
        rng = np.random.default_rng(1)
        for gens in [((1.0, 0.0, 0.0),), ((1.0, 2.0, 0.5), (0.0, 1.0, 1.0))]:
            cone = ConeSpec(scn(3), generators=gens)
            q = rng.random(3)
            q = q / q.sum()
            assert polar_member(cone, q)

    def test_negative_component_excluded_full_space(self):
        cone = ConeSpec.full_space(scn(3))
        assert not polar_member(cone, [0.5, 0.6, -0.1])

    def test_single_generator_allows_signed(self):
        cone = ConeSpec(scn(2), generators=((1.0, 0.0),))
        assert polar_member(cone, [2.0, -1.0])
        assert not polar_member(cone, [-0.5, 1.5])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            polar_member(ConeSpec.full_space(scn(3)), [1.0, 0.0])


class TestPolarSlice:
    def test_full_space_slice_is_simplex(self):
        cone = ConeSpec.full_space(scn(2))
        verts = k1_polar_sample(cone, 1)
        assert sorted(tuple(np.round(v, 9)) for v in verts) == [(0.0, 1.0), (1.0, 0.0)]

    def test_lattice_interior(self):
        cone = ConeSpec.full_space(scn(2))
        pts = k1_polar_sample(cone, 4)
        assert any(np.allclose(p, [0.5, 0.5]) for p in pts)
        for p in pts:
            assert abs(p.sum() - 1.0) < 1e-9
            assert polar_member(cone, p)

    def test_unbounded_slice_walks_rays(self):
        cone = ConeSpec(scn(2), generators=((1.0, 0.0),))
        pts = [tuple(np.round(p, 9)) for p in k1_polar_sample(cone, 2)]
        assert (0.0, 1.0) in pts
        assert (1.0, 0.0) in pts
        assert (2.0, -1.0) in pts

    def test_resolution_one_is_vertices_only(self):
        cone = ConeSpec.full_space(scn(4))
        assert len(k1_polar_sample(cone, 1)) == 4


class TestInnerSup:
    def test_worst_coordinate_closed_form(self):
        # for a probability vector the optimal payoff is the constant one
        cone = ConeSpec.full_space(scn(3))
        rng = np.random.default_rng(2)
        for _ in range(20):
            q = rng.random(3)
            q = q / q.sum()
            p = float(rng.uniform(-2, 2))
            assert h_cone(cone, PhiSpec("min"), p, q) == pytest.approx(p, abs=1e-9)

    def test_against_lattice_oracle(self):
        cone = ConeSpec(scn(2), generators=((1.0, 0.0), (1.0, 1.0)))
        phi = PhiSpec("min")
        mu = np.array([0.4, 0.6])
        for p in (0.5, 1.0, 2.0):
            exact = h_cone(cone, phi, p, mu)
            brute = lattice_h_oracle(cone, phi, p, mu)
            assert brute <= exact + 1e-9
            assert exact == pytest.approx(brute, abs=0.3)

    def test_custom_phi_uses_lattice(self):
        cone = ConeSpec(scn(2), generators=((1.0, 0.0), (1.0, 1.0)))
        phi_custom = PhiSpec("custom", fn=lambda xi: float(np.minimum(xi, 1.5).sum()))
        mu = np.array([0.5, 0.5])
        got = h_cone(cone, phi_custom, 1.0, mu)
        brute = lattice_h_oracle(cone, phi_custom, 1.0, mu)
        assert got == pytest.approx(brute, abs=0.3)

    def test_scale_invariance_in_the_measure(self):
        cone = ConeSpec.full_space(scn(3))
        rng = np.random.default_rng(3)
        for _ in range(10):
            mu = rng.uniform(0.1, 1.0, 3)
            y = rng.uniform(-2, 2, 3)
            lamb = float(rng.uniform(0.2, 5.0))
            a = h_cone(cone, PhiSpec("min"), float(mu @ y), mu)
            b = h_cone(cone, PhiSpec("min"), float((lamb * mu) @ y), lamb * mu)
            assert a == pytest.approx(b, abs=1e-8)


class TestPsi:
    def test_full_space_min_recovers_phi(self):
        cone = ConeSpec.full_space(scn(3))
        verts = k1_polar_sample(cone, 1)
        rng = np.random.default_rng(4)
        for _ in range(20):
            y = rng.uniform(-3, 3, 3)
            assert psi(cone, PhiSpec("min"), y, verts) == pytest.approx(min(y), abs=1e-9)

    def test_constant_payoff(self):
        cone = ConeSpec.full_space(scn(3))
        verts = k1_polar_sample(cone, 1)
        assert psi(cone, PhiSpec("min"), [1.7] * 3, verts) == pytest.approx(1.7)

    def test_member_subset_inflates(self):
        cone = ConeSpec.full_space(scn(3))
        verts = k1_polar_sample(cone, 1)
        y = [0.3, -1.2, 2.0]
        assert psi(cone, PhiSpec("min"), y, verts[:1]) >= min(y) - 1e-12

    def test_empty_members_rejected(self):
        with pytest.raises(ValueError):
            psi(ConeSpec.full_space(scn(2)), PhiSpec("min"), [0.0, 0.0], [])


class TestVerification:
    def test_min_objective_exact_at_vertices(self):
        rng = np.random.default_rng(5)
        for n in (2, 3, 4):
            cone = ConeSpec.full_space(scn(n))
            ys = [rng.uniform(-3, 3, n) for _ in range(25)]
            rep = verify_thA(cone, PhiSpec("min"), ys, resolution=1)
            assert rep.weak_violations == 0
            assert rep.max_gap <= 1e-9

    def test_linear_objective_needs_the_weight_in_the_sample(self):
        n = 3
        cone = ConeSpec.full_space(scn(n))
        w = tuple([1.0 / n] * n)
        ys = [np.array([0.5, -1.0, 2.0]), np.array([1.0, 1.0, 1.0])]
        rep = verify_thA(cone, PhiSpec("linear", weights=w), ys, resolution=n)
        assert rep.weak_violations == 0
        assert rep.max_gap <= 1e-9

    def test_refinement_does_not_increase_gap(self):
        cone = ConeSpec.full_space(scn(3))
        rng = np.random.default_rng(6)
        ys = [rng.uniform(-2, 2, 3) for _ in range(10)]
        w = (1.0 / 3, 1.0 / 3, 1.0 / 3)
        gaps = [verify_thA(cone, PhiSpec("linear", weights=w), ys, resolution=res).max_gap
                for res in (1, 3, 6)]
        assert gaps[1] <= gaps[0] + 1e-12
        assert gaps[2] <= gaps[1] + 1e-12

    def test_hypothesis_flags_gate_the_run(self):
        cone = ConeSpec.full_space(scn(2))
        phi = PhiSpec("min", monotone=False)
        rep = verify_thA(cone, phi, [np.zeros(2)], resolution=1)
        assert rep.skipped is not None

    def test_psi_continuous_from_above(self):
        # decreasing payoff sequences y_n -> y push psi down to psi(y)
        cone = ConeSpec.full_space(scn(3))
        members = k1_polar_sample(cone, 2)
        y = np.array([0.4, -0.6, 1.1])
        vals = [psi(cone, PhiSpec("min"), y + eps, members)
                for eps in (0.5, 0.1, 0.01, 0.0)]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
        assert vals[-1] == pytest.approx(psi(cone, PhiSpec("min"), y, members))


class TestConePriceInverse:
    def test_prop_hh_at_cone_level(self):
        cone = ConeSpec.full_space(scn(3))
        rng = np.random.default_rng(7)
        for phi in (PhiSpec("min"), PhiSpec("linear", weights=(0.2, 0.3, 0.5))):
            for _ in range(8):
                mu = rng.random(3)
                mu = mu / mu.sum()
                p = float(rng.uniform(-1, 2))
                h_right = h_cone(cone, phi, p + 1e-9, mu)
                r = r_cone(cone, phi, p, mu)
                if math.isinf(h_right) or math.isinf(r):
                    assert h_right == r
                else:
                    assert h_right == pytest.approx(r, abs=1e-6)

    def test_price_monotone_in_r(self):
        cone = ConeSpec.full_space(scn(2))
        mu = np.array([0.4, 0.6])
        vals = [pi_cone(cone, PhiSpec("min"), r, mu) for r in np.linspace(-2, 2, 9)]
        assert all(a <= b + 1e-9 for a, b in zip(vals, vals[1:]))
