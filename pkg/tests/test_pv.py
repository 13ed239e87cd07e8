"""Singular-quadrature evaluator against analytic and brute-force oracles."""
import dataclasses
import math

import numpy as np
import pytest
from scipy.integrate import quad as scipy_quad
from scipy.special import j0

from fracblow.profiles import bracket_profile, constant_profile, gaussian_profile
from fracblow.pv import (PVQuadratureConfig, QuadratureError, frac_laplacian_pv,
                         frac_laplacian_pv_many, normalization_constant)


def lorentzian_half_laplacian(x):
    # op(1+x^2)^(-1) = (1-x^2)/(1+x^2)^2, checked symbolically via the
    # Fourier pair 1/(1+x^2) <-> pi e^(-|xi|)
    return (1.0 - x * x) / (1.0 + x * x) ** 2


class TestNormalizationConstant:
    def test_dim1_analytic_oracle(self, quad):
        # oracle: int (1-cos t)/t^2 over R equals pi, so B = 1/pi
        res = normalization_constant(1, quad)
        assert abs(res.value - 1.0 / math.pi) < 1e-6
        assert res.error <= 1e-8

    def test_dim1_tail_consistency(self, quad):
        doubled = dataclasses.replace(quad, y_max=2 * quad.y_max)
        a = normalization_constant(1, quad)
        b = normalization_constant(1, doubled)
        assert abs(a.value - b.value) <= a.error + b.error

    def test_dim2_brute_force_oracle(self, quad):
        # independent oracle: 2 pi int_0^inf (1 - J0(r))/r^2 dr by adaptive
        # panels of half a period, plus the coarse 1/Y tail bracket
        y = 3000.0
        total = 0.0
        edges = np.arange(0.0, y, 0.5 * math.pi)
        for a, b in zip(edges[:-1], edges[1:]):
            total += scipy_quad(lambda r: (1.0 - j0(r)) / r**2 if r > 0 else 0.25,
                                a, b, limit=200)[0]
        tail_lo, tail_hi = 1.0 / y - math.sqrt(2 / math.pi) * y**-1.5, 1.0 / y + math.sqrt(2 / math.pi) * y**-1.5
        oracle = 1.0 / (2.0 * math.pi * (total + 0.5 * (tail_lo + tail_hi)))
        res = normalization_constant(2, quad)
        assert abs(res.value - oracle) < 1e-6
        assert res.error <= 1e-8

    def test_bad_dimension(self, quad):
        with pytest.raises(ValueError):
            normalization_constant(3, quad)


class TestPointwiseEvaluator:
    def test_constant_profile_vanishes(self, quad, b1):
        for x in (0.0, 1.7, -3.2):
            res = frac_laplacian_pv(constant_profile(1.0), x, b1, quad)
            assert res.value == 0.0
            assert res.error < 1e-9  # roundoff certificate only

    @pytest.mark.parametrize("x,expected", [(0.0, 1.0), (1.0, 0.0), (2.0, -3.0 / 25.0)])
    def test_lorentzian_closed_form(self, quad, b1, x, expected):
        res = frac_laplacian_pv(bracket_profile(2.0), x, b1, quad)
        assert res.value == pytest.approx(expected, abs=1e-6)
        assert abs(res.value - expected) <= 2.0 * res.error + 1e-10

    def test_lorentzian_far_field(self, b1):
        for x in (1e2, 1e3, 1e4):
            cfg = PVQuadratureConfig(y_max=120.0 * (1 + x), tol=1.0)
            res = frac_laplacian_pv(bracket_profile(2.0), x, b1, cfg)
            want = lorentzian_half_laplacian(x)
            assert res.value == pytest.approx(want, rel=1e-6)

    def test_dim2_bracket_identity(self, quad, b2):
        # op <x>^(-1) = <x>^(-3) in two dimensions (Poisson-kernel Hankel
        # pair: the weight transforms to 2 pi e^(-s)/s, the multiplier
        # strips the 1/s, and s e^(-s) transforms back to <x>^(-3))
        for r in (0.0, 0.5, 2.0, 10.0, 100.0):
            cfg = PVQuadratureConfig(y_max=max(256.0, 120.0 * (1 + r)), tol=1.0)
            res = frac_laplacian_pv(bracket_profile(1.0), (r, 0.0), b2, cfg)
            want = (1 + r * r) ** -1.5
            assert abs(res.value - want) <= res.error + 1e-12
            assert res.value == pytest.approx(want, rel=1e-4)

    def test_gaussian_cross_method(self, quad, b1):
        # against the spectral route on a wide fine grid
        from fracblow.grid import Field, GridSpec
        from fracblow.spectral import frac_laplacian_spectral

        g = GridSpec(1, 80.0, 8192)
        x = g.axis()
        spectral = frac_laplacian_spectral(Field(g, np.exp(-x * x) + 0j)).values.real
        pts = np.linspace(-3.0, 3.0, 13)
        idx = np.argmin(np.abs(x[None, :] - pts[:, None]), axis=1)
        vals, _ = frac_laplacian_pv_many(gaussian_profile(), x[idx], b1, quad)
        assert np.max(np.abs(vals - spectral[idx])) < 1e-4

    def test_gaussian_at_origin(self, quad, b1):
        # 2/sqrt(pi), from integrating |xi| against the Gaussian transform
        res = frac_laplacian_pv(gaussian_profile(), 0.0, b1, quad)
        assert res.value == pytest.approx(2.0 / math.sqrt(math.pi), abs=1e-8)

    def test_evenness_bitwise(self, quad, b1):
        a = frac_laplacian_pv(bracket_profile(2.0), 1.3, b1, quad)
        b = frac_laplacian_pv(bracket_profile(2.0), -1.3, b1, quad)
        assert a.value == b.value

    def test_linearity(self, quad, b1):
        f, g = bracket_profile(2.0), gaussian_profile()
        combo = f.combine(g, a=0.7, b=-0.4)
        for x in (0.0, 0.9, 3.0):
            lhs = frac_laplacian_pv(combo, x, b1, dataclasses.replace(quad, tol=1.0))
            rhs = 0.7 * frac_laplacian_pv(f, x, b1, quad).value \
                - 0.4 * frac_laplacian_pv(g, x, b1, quad).value
            assert lhs.value == pytest.approx(rhs, abs=1e-10)

    def test_refinement_stability(self, quad, b1):
        # halving eps0 and doubling nodes moves the value by less than the
        # reported certificate
        refined = dataclasses.replace(quad, eps0=quad.eps0 / 2,
                                      radial_nodes=2 * quad.radial_nodes)
        for prof in (bracket_profile(2.0), gaussian_profile(), bracket_profile(3.0)):
            for x in (0.0, 0.3, 1.5, 4.0, 9.0):
                a = frac_laplacian_pv(prof, x, b1, quad)
                b = frac_laplacian_pv(prof, x, b1, refined)
                assert abs(a.value - b.value) <= a.error

    def test_nonconvergence_raises_with_residual(self, b1):
        tight = PVQuadratureConfig(y_max=8.0, tol=1e-12)
        with pytest.raises(QuadratureError) as err:
            frac_laplacian_pv(bracket_profile(0.5), 0.0, b1, tight)
        assert err.value.residual > 1e-12
        assert math.isfinite(err.value.value)

    def test_batch_matches_pointwise(self, quad, b1):
        xs = [0.0, 0.5, 2.5]
        vals, errs = frac_laplacian_pv_many(bracket_profile(2.0), xs, b1, quad)
        for x, v, e in zip(xs, vals, errs):
            res = frac_laplacian_pv(bracket_profile(2.0), x, b1, quad)
            assert res.value == v and res.error == e


def test_config_validation():
    with pytest.raises(ValueError):
        PVQuadratureConfig(eps0=2.0)
    with pytest.raises(ValueError):
        PVQuadratureConfig(growth=0.9)
    with pytest.raises(ValueError):
        PVQuadratureConfig(tol=0.0)
    with pytest.raises(ValueError):
        PVQuadratureConfig(y_max=0.5)
