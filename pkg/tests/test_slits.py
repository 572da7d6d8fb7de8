import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadmod.elliptic import EllipticModulus, complete_E_comp, complete_K_comp
from quadmod.errors import DomainError, SandwichViolation
from quadmod.modulus_fd import ModulusEstimate, make_quad
from quadmod.rectangle_moduli import ext_modulus_rectangle
from quadmod.slit_bounds import (
    aspect_residual,
    g1h_star_modulus,
    g2h_half_modulus,
    g2h_modulus,
    g2h_solve,
    sandwich_check,
    slit_aspect_terms,
)


def _mp_moduli(p):
    """k, lam in high precision from the stored complements."""
    kc, lc = mp.mpf(p.k.k_comp), mp.mpf(p.lam.k_comp)
    return mp.sqrt(1 - kc**2), mp.sqrt(1 - lc**2)


def _zeta_lengths(p):
    """Real-segment half-length and both slit-side heights by quadrature of the slit map."""
    with mp.workdps(40):
        k, lam = _mp_moduli(p)
        a2 = 1 / lam**2

        def root(t):
            return mp.sqrt(abs((1 - t * t) * (1 - k * k * t * t)))

        half = mp.quad(lambda t: (a2 - t * t) / root(t), [0, 1])
        inner = mp.quad(lambda t: (a2 - t * t) / root(t), [1, 1 / lam])
        outer = mp.quad(lambda t: (t * t - a2) / root(t), [1 / lam, 1 / k])
        return half, inner, outer


def _half_modulus_by_quadrature(p):
    """Modulus of the upper half-plane with vertices +-1/lam, +-1/k, from the rectangle it maps onto."""
    with mp.workdps(40):
        k, lam = _mp_moduli(p)
        a, b = 1 / lam, 1 / k

        def g(t):
            return 1 / mp.sqrt(abs((t * t - a * a) * (t * t - b * b)))

        width = 2 * mp.quad(g, [0, a])
        height = mp.quad(g, [a, b])
        return width / height


class TestSolve:
    @pytest.mark.parametrize("H", [10.0, 100.0, 1e4])
    def test_slit_map_reproduces_geometry(self, H):
        p = g2h_solve(1.0, 1.0, H)
        half, inner, outer = _zeta_lengths(p)
        # both sides of the slit have the same height, and the aspect matches
        assert float(inner / outer) == pytest.approx(1.0, rel=1e-10)
        assert float(half / inner) == pytest.approx(H, rel=1e-10)

    @pytest.mark.parametrize("alpha, beta, H", [(1.0, 1.0, 10.0), (2.0, 0.5, 3.0), (1.0, 3.0, 16.0)])
    def test_modulus_by_quadrature(self, alpha, beta, H):
        p = g2h_solve(alpha, beta, H)
        assert g2h_half_modulus(p) == pytest.approx(float(_half_modulus_by_quadrature(p)), rel=1e-10)
        assert g2h_half_modulus(p) == pytest.approx(2 * g2h_modulus(p), rel=1e-15)

    @pytest.mark.parametrize("e", range(1, 11))
    def test_invariants(self, e):
        p = g2h_solve(1.0, 1.0, 10.0**e)
        assert aspect_residual(p) <= 1e-10
        assert 0 < p.lam.one_minus_k < p.k.one_minus_k
        lam2 = p.k.k**2 * complete_K_comp(p.k) / complete_E_comp(p.k)
        assert p.lam.k**2 == pytest.approx(lam2, rel=1e-10)
        assert p.l == pytest.approx(p.k.k / p.k.k_comp * p.lam.k_comp / p.lam.k, rel=1e-10)
        assert p.l_comp == pytest.approx(math.sqrt((1 - p.l) * (1 + p.l)), rel=1e-8)
        assert 0 < p.l < 1 and 0 < p.l_comp < 1

    @given(st.floats(-0.5, 12.0), st.floats(-0.5, 12.0))
    @settings(max_examples=30, deadline=None)
    def test_k_increases_with_H(self, a, b):
        if abs(a - b) < 1e-6:
            return
        lo, hi = sorted((10.0**a, 10.0**b))
        assert g2h_solve(1.0, 1.0, lo).k.log_ratio > g2h_solve(1.0, 1.0, hi).k.log_ratio

    def test_scale_invariance(self):
        # only H alpha / beta matters
        a = g2h_modulus(g2h_solve(2.0, 4.0, 50.0))
        b = g2h_modulus(g2h_solve(1.0, 1.0, 25.0))
        assert a == pytest.approx(b, rel=1e-13)

    def test_parameter_limits(self):
        p = g2h_solve(1.0, 1.0, 1e12)
        assert p.lam.one_minus_k / p.k.one_minus_k == pytest.approx(0.5, abs=1e-6)
        assert p.l_comp == pytest.approx(1 / math.sqrt(2), abs=1e-6)
        # H k'^2 -> 4 alpha / beta
        assert p.H * p.k.k_comp**2 == pytest.approx(4.0, rel=1e-3)

    def test_aspect_terms_positive(self):
        for u in (-20.0, -1.0, 0.0, 1.0, 3.0):
            num, den = slit_aspect_terms(EllipticModulus.from_log_ratio(u))
            assert num > 0 and den > 0

    @pytest.mark.parametrize("H", [1e-3, 1e-300])
    def test_tiny_H(self, H):
        with pytest.raises(DomainError):
            g2h_solve(1.0, 1.0, H)

    @pytest.mark.parametrize("args", [(0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, float("inf"))])
    def test_bad_input(self, args):
        with pytest.raises(DomainError):
            g2h_solve(*args)


class TestModulusTrend:
    def test_offset(self):
        # Mod G_2H - log(H)/pi -> log(8)/pi with alpha = beta = 1
        H = 1e10
        gap = g2h_modulus(g2h_solve(1.0, 1.0, H)) - math.log(H) / math.pi
        assert gap == pytest.approx(math.log(8) / math.pi, abs=1e-6)

    def test_ratio_decreases_to_one(self):
        Hs = [10.0**e for e in (2, 4, 6, 8, 10, 14)]
        r = [g2h_modulus(g2h_solve(1.0, 1.0, H)) / (math.log(H) / math.pi) for H in Hs]
        assert all(b < a for a, b in zip(r[:-1], r[1:]))
        assert all(x > 1 for x in r)
        assert r[-1] > 0.9

    def test_ratio_at_1e6(self):
        H = 1e6
        r = g2h_modulus(g2h_solve(1.0, 1.0, H)) / (math.log(H) / math.pi)
        assert r == pytest.approx(1 + math.log(8) / math.log(H), abs=1e-5)

    def test_below_rectangle_exterior(self):
        # the slit domain contains the complement of the rectangle [-H, H] x [-1, 1]
        for H in (2.0, 10.0, 1e3, 1e6):
            assert g2h_modulus(g2h_solve(1.0, 1.0, H)) < ext_modulus_rectangle(H)


class TestStar:
    def test_corner_box(self):
        assert g1h_star_modulus(1.0, 2.0, 8.0) == pytest.approx(ext_modulus_rectangle(4.0), rel=1e-15)

    def test_bad(self):
        with pytest.raises(DomainError):
            g1h_star_modulus(1.0, 0.0, 2.0)


def _est(v, err=0.0):
    return ModulusEstimate(value=v, raw=[(0.1, v)], err_est=err, converged=True, tol=1e-2)


class TestSandwich:
    def test_proxy(self):
        quad = make_quad("cosine")
        rep = sandwich_check(quad, 8.0, 3.3)
        assert rep.upper_is_proxy and rep.ext_numeric is None
        assert rep.lower < rep.upper
        assert rep.asymptote == pytest.approx(math.log(8) / math.pi)

    def test_ordered_with_values(self):
        quad = make_quad("cosine")
        rep = sandwich_check(quad, 8.0, 3.3, fd=(_est(1.19), _est(1.34)))
        assert rep.ordered and not rep.upper_is_proxy

    def test_violation_raises(self):
        quad = make_quad("cosine")
        with pytest.raises(SandwichViolation):
            sandwich_check(quad, 8.0, 3.3, fd=(_est(0.5), _est(1.34)))
        rep = sandwich_check(quad, 8.0, 3.3, fd=(_est(2.0), _est(1.34)), strict=False)
        assert not rep.ordered and "exceeds upper bound" in rep.violations[0]

    def test_slack(self):
        quad = make_quad("cosine")
        rep = sandwich_check(quad, 8.0, 3.3, fd=(_est(1.35), _est(1.34)), slack=0.02, strict=False)
        assert rep.ordered

    def test_M_must_clear_curve(self):
        with pytest.raises(DomainError):
            sandwich_check(make_quad("cosine"), 8.0, 2.0)
