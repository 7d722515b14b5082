import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from dirlip import testfns
from dirlip.disc import Arc, ArcSet, BoundaryPointSet, complement_arcs
from dirlip.errors import FactorizationError, GridResolutionError
from dirlip.factor import (
    BlaschkeProduct,
    DiscFunction,
    LogModulus,
    g_kernel,
    herglotz_potential,
    inner_outer_split,
    localized_outer_power,
    outer_from_modulus,
    outer_power,
)
from dirlip.norms import aalpha_norm

N64 = 64
THETA64 = 2 * np.pi * np.arange(N64) / N64
DISC_POINTS = np.array([0.0, 0.3, -0.5j, 0.6 + 0.2j, -0.9, 0.9j])


def two_plus_z_modulus(n):
    theta = 2 * np.pi * np.arange(n) / n
    return LogModulus.from_samples(np.abs(2 + np.exp(1j * theta)))


class TestLogModulus:
    def test_clamp_floor(self):
        L = LogModulus.from_samples(np.r_[0.0, np.ones(63)], correct_zeros=False)
        assert L.values.min() == -30.0 and L.clamped_fraction == pytest.approx(1 / 64)

    def test_degenerate_data_rejected(self):
        L = LogModulus.from_samples(np.r_[np.zeros(20), np.ones(44)])
        with pytest.raises(FactorizationError):
            outer_from_modulus(L)


class TestHerglotz:
    def test_unimodular_gives_zero(self):
        L = LogModulus.from_samples(np.ones(N64))
        assert herglotz_potential(L, None, 0.3) == pytest.approx(0.0, abs=1e-15)

    def test_mean_value(self):
        L = two_plus_z_modulus(256)
        assert herglotz_potential(L, None, 0.0) == pytest.approx(np.log(2), abs=1e-8)

    def test_empty_localization(self):
        L = two_plus_z_modulus(256)
        assert herglotz_potential(L, ArcSet(()), 0.4j) == 0

    def test_too_close_to_boundary(self):
        L = two_plus_z_modulus(256)
        with pytest.raises(GridResolutionError):
            herglotz_potential(L, None, 0.999)

    def test_against_adaptive_quadrature(self, canonical_4096):
        L = LogModulus.from_log(canonical_4096.potential.v, correct_zeros=False)
        logw = lambda t: 0.6 * np.log(abs(np.sin(t / 2)))
        for z in (0.5, -0.3 + 0.4j):
            ref = oracles.herglotz_exp(logw, z, breaks=(np.pi,))
            assert np.exp(herglotz_potential(L, None, z)) == pytest.approx(ref, rel=1e-6)


class TestOuter:
    def test_constant_modulus(self):
        f = outer_from_modulus(LogModulus.from_log(np.ones(N64)))
        assert f.coeffs.coeffs[0] == pytest.approx(np.e)
        assert np.max(np.abs(f.coeffs.coeffs[1:])) < 1e-12

    def test_two_plus_z(self):
        c = outer_from_modulus(two_plus_z_modulus(256)).coeffs.coeffs
        assert abs(c[0] - 2) < 1e-6 and abs(c[1] - 1) < 1e-6
        assert np.sum(np.abs(c[2:]) ** 2) < 1e-10

    def test_empty_localization_is_one(self):
        f = outer_from_modulus(two_plus_z_modulus(256), ArcSet(()))
        assert np.allclose(f(DISC_POINTS), 1.0)

    def test_canonical_matches_closed_form(self, canonical_4096):
        z = DISC_POINTS
        assert np.max(np.abs(canonical_4096(z) - testfns.canonical_closed(z))) < 1e-6

    def test_powers(self):
        L = two_plus_z_modulus(256)
        G = ArcSet((Arc(0.5, 2.0),))
        assert localized_outer_power(L, ArcSet(()), 7)(0.5) == pytest.approx(1.0)
        one = outer_from_modulus(L, G)
        assert np.allclose(localized_outer_power(L, G, 1)(DISC_POINTS), one(DISC_POINTS), atol=1e-12)
        two = localized_outer_power(L, G, 2)(DISC_POINTS)
        assert np.max(np.abs(two - one(DISC_POINTS) ** 2)) < 1e-8

    def test_multiplicativity(self, canonical_4096):
        L = LogModulus.from_log(canonical_4096.potential.v, correct_zeros=False)
        arcs = complement_arcs(BoundaryPointSet((0.0,)))
        G1, G2 = arcs.subset([0, 3, 5]), arcs.subset([1, 8])
        both = outer_from_modulus(L, arcs.subset([0, 1, 3, 5, 8]))
        prod = outer_from_modulus(L, G1)(DISC_POINTS) * outer_from_modulus(L, G2)(DISC_POINTS)
        assert np.max(np.abs(both(DISC_POINTS) - prod)) < 1e-8

    def test_localized_factor_bounded(self, canonical_unit):
        L = LogModulus.from_log(canonical_unit.potential.v, correct_zeros=False)
        arcs = complement_arcs(BoundaryPointSet((0.0,)))
        fG = outer_from_modulus(L, arcs.subset([0, 2, 4, 6]))
        assert np.max(np.abs(fG.boundary.values)) <= 1 + 1e-12
        r = np.linspace(0, 0.99, 12)[:, None] * np.exp(1j * np.linspace(0, 2 * np.pi, 64))
        assert np.max(np.abs(fG(r))) <= 1 + 1e-8


class TestKernel:
    def test_unimodular(self):
        assert g_kernel(LogModulus.from_samples(np.ones(N64)), None, 0.2) == pytest.approx(0.0, abs=1e-15)

    def test_two_plus_z_at_origin(self):
        assert g_kernel(two_plus_z_modulus(256), None, 0.0) == pytest.approx(0.5, abs=1e-8)

    def test_empty(self):
        assert g_kernel(two_plus_z_modulus(256), ArcSet(()), 0.0) == 0


class TestBlaschke:
    def test_origin_zero(self):
        assert BlaschkeProduct(((0, 1),))(0.3j) == pytest.approx(0.3j)

    def test_normalized_factor(self):
        assert BlaschkeProduct(((0.5, 1),))(0.0) == pytest.approx(0.5)

    def test_empty_product(self):
        assert BlaschkeProduct(())(0.4) == 1

    def test_zero_outside_rejected(self):
        with pytest.raises(FactorizationError):
            BlaschkeProduct(((1.2, 1),))

    @given(st.lists(st.tuples(st.floats(0, 0.95), st.floats(0, 2 * np.pi), st.integers(1, 3)),
                    max_size=4), st.floats(0, 2 * np.pi))
    def test_unimodular_on_circle(self, zeros, theta):
        B = BlaschkeProduct(tuple((r * np.exp(1j * t), m) for r, t, m in zeros))
        assert abs(abs(B(np.exp(1j * theta))) - 1) < 1e-10


class TestSplit:
    def test_outer_input(self):
        f = DiscFunction.from_function(lambda z: 2 + z, 256)
        assert inner_outer_split(f).defect < 1e-6

    def test_blaschke_times_outer(self):
        f = DiscFunction.from_function(lambda z: z * (2 + z), 256)
        split = inner_outer_split(f)
        assert split.defect < 1e-6
        assert np.allclose(split.inner.coeffs.coeffs[:3], [0, 1, 0], atol=1e-6)
        assert np.allclose(split.outer.coeffs.coeffs[:3], [2, 1, 0], atol=1e-6)

    def test_zero_rejected(self):
        with pytest.raises(FactorizationError):
            inner_outer_split(DiscFunction.from_function(lambda z: 0 * z, 64))

    def test_f_property_ratio(self):
        B = BlaschkeProduct(((0.5, 1), (-0.3j, 1)))
        O = testfns.canonical(4096)
        f = DiscFunction.from_function(lambda z: B(z) * testfns.canonical_closed(z), 4096)
        ratio = aalpha_norm(O, 0.5).aalpha / aalpha_norm(f, 0.5).aalpha
        assert np.isfinite(ratio) and ratio < 50


class TestOuterPower:
    def test_identity_and_zero(self):
        f = outer_from_modulus(two_plus_z_modulus(256))
        assert outer_power(f, 1) is f
        assert np.allclose(outer_power(f, 0)(DISC_POINTS), 1.0)

    def test_square(self):
        c = outer_power(outer_from_modulus(two_plus_z_modulus(256)), 2).coeffs.coeffs
        assert np.allclose(c[:4], [4, 4, 1, 0], atol=1e-6)

    def test_needs_potential(self):
        with pytest.raises(FactorizationError):
            outer_power(DiscFunction.from_function(lambda z: 2 + z, 64), 2)


class TestSerialization:
    def test_json_fields_and_round_trip(self):
        f = outer_from_modulus(two_plus_z_modulus(64))
        d = json.loads(f.to_json())
        assert {"n", "boundary_re", "boundary_im", "coeffs_re", "coeffs_im", "has_potential",
                "lambda"} <= set(d)
        g = DiscFunction.from_json(f.to_json())
        assert np.allclose(g(DISC_POINTS), f(DISC_POINTS), atol=1e-14)
        assert g.has_potential
