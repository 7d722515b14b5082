import json

import numpy as np
import pytest

import oracles
from dirlip import testfns
from dirlip.approx import (
    convex_approx,
    decay_constant,
    decay_slope,
    ideal_membership,
    pinch_to_tolerance,
    pinching_factor,
    theorem1_pipeline,
)
from dirlip.disc import BoundaryPointSet, complement_arcs, tail_arcs
from dirlip.errors import DirlipError, HypothesisError, PinchError
from dirlip.factor import (
    BlaschkeProduct,
    DiscFunction,
    LogModulus,
    outer_from_modulus,
    outer_power,
    product_potential,
)
from dirlip.norms import aalpha_norm, sup_norm

ORIGIN = BoundaryPointSet((0.0,))
INTERIOR = np.array([0.0, -0.5, 0.3j])


@pytest.fixture(scope="module")
def candidates(canonical_4096):
    f = canonical_4096
    L = LogModulus.from_log(f.potential.v, correct_zeros=False)
    arcs = complement_arcs(ORIGIN)
    cands = [product_potential(f, 1.5, L, tail_arcs(arcs, p), 4) for p in range(8)]
    return cands, outer_power(f, 1.5)


class TestConvex:
    def test_single_candidate_is_target(self):
        f = DiscFunction.from_coeffs([1.0, 0.5, 0.25], 64)
        w = convex_approx([f], f)
        assert list(w.weights) == [1.0] and w.distance == pytest.approx(0.0, abs=1e-14)

    def test_midpoint(self):
        f = DiscFunction.from_coeffs([1.0, 0.5, 0.25], 64)
        w = convex_approx([f.scale(0.0), f.scale(2.0)], f)
        assert w.weights == pytest.approx([0.5, 0.5], abs=1e-6)
        assert w.distance < 1e-6

    def test_empty_rejected(self):
        with pytest.raises(DirlipError):
            convex_approx([], DiscFunction.constant(1.0, 64))

    def test_nested_candidates_never_worse(self, candidates):
        cands, target = candidates
        dist = [convex_approx(cands[:k], target).distance for k in range(1, 9)]
        assert all(b <= a + 1e-12 for a, b in zip(dist, dist[1:]))
        # each of the first seven candidates improves the fit; the eighth gets weight 0
        assert all(b < a - 1e-4 for a, b in zip(dist[:7], dist[1:7]))

    def test_against_simplex_grid(self, candidates):
        cands, target = candidates
        three = cands[:3]
        w = convex_approx(three, target)
        assert abs(w.weights.sum() - 1) < 1e-12
        brute = oracles.brute_force_simplex([c.coeffs.coeffs for c in three], target.coeffs.coeffs)
        assert w.distance <= brute + 1e-9


class TestPinchingFactor:
    def test_zero_order_is_one(self):
        F = pinching_factor(ORIGIN, 0, 0.5, 256)
        assert np.allclose(F(INTERIOR), 1.0)

    def test_tiny_delta_is_nearly_one(self):
        n = 4096
        F = pinching_factor(ORIGIN, 3, np.pi / n, n)
        assert np.max(np.abs(F(INTERIOR) - 1)) < 1e-2

    def test_against_herglotz_quadrature(self):
        F = pinching_factor(ORIGIN, 3, 0.5, 4096)
        t0 = 2 * np.arcsin(0.25)
        logw = lambda t: min(0.0, 3 * np.log(2 * abs(np.sin(t / 2)) / 0.5))
        for z in INTERIOR:
            assert F(z) == pytest.approx(oracles.herglotz_exp(logw, z, (t0, 2 * np.pi - t0)), abs=1e-6)
        k = 2048  # node at pi, distance 2 from the pinch point
        assert abs(F.boundary.values[k]) == pytest.approx(1.0, abs=1e-6)

    def test_bounded_and_converging(self):
        devs = []
        for delta in (0.4, 0.2, 0.1):
            F = pinching_factor(ORIGIN, 3, delta, 4096)
            assert sup_norm(F) <= 1 + 1e-9
            devs.append(np.abs(F(np.array([0.0, -0.5, 0.5j])) - 1))
        assert np.all(devs[1] < devs[0]) and np.all(devs[2] < devs[1])


class TestPinchToTolerance:
    def test_loose_tolerance_accepts_first_trial(self, canonical_4096):
        norm = aalpha_norm(canonical_4096, 0.5).aalpha
        _, delta, err = pinch_to_tolerance(canonical_4096, ORIGIN, 3, 2 * norm, 0.5)
        assert delta == 1.0 and err <= 2 * norm

    def test_monotone_in_tolerance(self):
        f = testfns.canonical(16384)
        norm = aalpha_norm(f, 0.5).aalpha
        _, d_loose, e_loose = pinch_to_tolerance(f, ORIGIN, 3, 0.3 * norm, 0.5)
        _, d_tight, e_tight = pinch_to_tolerance(f, ORIGIN, 3, 0.15 * norm, 0.5)
        assert 0 < d_tight <= d_loose
        assert e_tight <= 0.15 * norm and e_loose <= 0.3 * norm

    def test_five_percent_is_below_grid_scale(self, canonical_4096):
        # the smallest resolvable delta still leaves about 17% of the norm
        norm = aalpha_norm(canonical_4096, 0.5).aalpha
        with pytest.raises(PinchError) as info:
            pinch_to_tolerance(canonical_4096, ORIGIN, 3, 0.05 * norm, 0.5)
        assert 0.1 * norm < info.value.best_error < 0.2 * norm

    def test_requires_vanishing(self):
        f = DiscFunction.from_function(lambda z: 2 + z, 256)
        with pytest.raises(HypothesisError):
            pinch_to_tolerance(f, ORIGIN, 3, 0.1, 0.5)


class TestPipeline:
    def test_needs_boundary_zeros(self):
        g = DiscFunction.from_function(lambda z: 2 + z, 256)
        f = outer_from_modulus(LogModulus.from_samples(np.abs(g.boundary.values)))
        with pytest.raises(DirlipError):
            theorem1_pipeline(f)

    def test_single_step_bookkeeping(self, canonical_4096):
        run = theorem1_pipeline(canonical_4096, M=3, N=6, eps=0.5, schedule=[1],
                                zeros=ORIGIN)
        s = run.steps[0]
        assert s.err_total <= s.err_power + s.err_convex + s.err_pinch + 1e-9
        assert np.isfinite(s.C_m) and s.vanishes_on_zeros
        assert run.to_csv().splitlines()[0] == "m,err_power,err_convex,err_pinch,err_total,C_m"
        assert json.loads(run.to_json())["N"] == 6

    def test_decay_helpers(self):
        n = 4096
        g = DiscFunction.from_function(lambda z: ((1 - z) / 2) ** 3, n)
        assert decay_constant(g, ORIGIN, 3) == pytest.approx(1 / 8, rel=1e-6)
        assert decay_slope(g, ORIGIN, 0.1) == pytest.approx(3.0, abs=1e-6)


class TestMembership:
    def test_exact_divisor(self):
        f = DiscFunction.from_function(lambda z: z * (2 + z), 256)
        assert ideal_membership(f, BoundaryPointSet(()), BlaschkeProduct(((0, 1),))).member

    def test_missing_zero(self):
        f = DiscFunction.from_function(lambda z: 2 + z, 256)
        v = ideal_membership(f, BoundaryPointSet(()), BlaschkeProduct(((0, 1),)))
        assert not v.member

    def test_boundary_zero(self, canonical_4096):
        assert ideal_membership(canonical_4096, ORIGIN, BlaschkeProduct(()), tol=1e-3).member
