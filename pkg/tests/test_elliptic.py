import csv
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from quadmod.elliptic import (
    EllipticModulus,
    SeriesKind,
    SeriesSpec,
    carlson_rd,
    carlson_rf,
    complete_E,
    complete_E_comp,
    complete_K,
    complete_K_comp,
    e_minus_comp_sq_k,
    i2n,
    incomplete_E,
    incomplete_F,
    k_minus_e,
    landen_ascend,
    log_series_omitted_term,
    reference_series,
)
from quadmod.errors import DomainError

ORACLES = list(csv.DictReader(open(Path(__file__).parent / "data" / "elliptic_oracles.csv")))

moduli = st.floats(min_value=1e-6, max_value=1 - 1e-6)
log_ratios = st.floats(min_value=-30.0, max_value=30.0)


def _eval(row):
    kind = row["kind"]
    s = float(row["k"]) if row["k"] else None
    if kind == "K":
        return complete_K(EllipticModulus.from_k(s))
    if kind == "E":
        return complete_E(EllipticModulus.from_k(s))
    if kind == "Kprime_from_comp":
        return complete_K_comp(EllipticModulus.from_comp(s))
    if kind == "Eprime_from_comp":
        return complete_E_comp(EllipticModulus.from_comp(s))
    m = EllipticModulus.from_comp(s) if s is not None else None
    if kind == "K_near_one":
        return complete_K(m)
    if kind == "E_near_one":
        return complete_E(m)
    if kind == "K_minus_E":
        return k_minus_e(m)
    if kind == "E_minus_kc2K":
        return e_minus_comp_sq_k(m)
    x = float(row["x"])
    if kind == "F":
        return incomplete_F(x, EllipticModulus.from_k(s))
    if kind == "Einc":
        return incomplete_E(x, EllipticModulus.from_k(s))
    if kind.startswith("I2n_"):
        return i2n(x, int(kind[4:]))
    raise AssertionError(kind)


@pytest.mark.parametrize("row", ORACLES, ids=lambda r: f"{r['kind']}-{r['k']}-{r['x']}")
def test_frozen_oracles(row):
    expected = float(row["expected"])
    assert _eval(row) == pytest.approx(expected, rel=float(row["tolerance"]), abs=0)


class TestModulus:
    def test_from_k_and_comp_agree(self):
        a = EllipticModulus.from_k(0.6)
        b = EllipticModulus.from_comp(0.8)
        assert a.k == pytest.approx(b.k, rel=1e-15)
        assert a.k_comp == pytest.approx(b.k_comp, rel=1e-15)

    def test_tiny_complement_is_kept_exactly(self):
        m = EllipticModulus.from_comp(1e-100)
        assert m.k == 1.0
        assert m.k_comp == 1e-100
        assert m.one_minus_k == pytest.approx(0.5e-200, rel=1e-15)

    @given(log_ratios)
    def test_log_ratio_roundtrip(self, u):
        m = EllipticModulus.from_log_ratio(u)
        assert m.log_ratio == pytest.approx(u, abs=1e-12, rel=1e-12)
        assert m.k**2 + m.k_comp**2 == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("k, kc", [(0.0, 1.0), (1.0, 1.0), (0.6, 0.6), (-0.5, 0.8), (1.2, 0.0)])
    def test_invalid(self, k, kc):
        with pytest.raises(DomainError):
            EllipticModulus(k, kc)

    def test_comp_swaps(self):
        m = EllipticModulus.from_k(0.3)
        assert m.comp.k == m.k_comp and m.comp.k_comp == m.k


class TestCarlson:
    @pytest.mark.parametrize("x, y, z, expected", [(1.0, 2.0, 0.0, 1.3110287771461), (0.5, 1.0, 0.0, 1.8540746773014)])
    def test_rf_reference(self, x, y, z, expected):
        # tabulated values of R_F from Carlson's test set
        assert carlson_rf(x, y, z) == pytest.approx(expected, rel=1e-12)

    def test_rd_reference(self):
        assert carlson_rd(0.0, 2.0, 1.0) == pytest.approx(1.7972103521034, rel=1e-12)
        assert carlson_rd(2.0, 3.0, 4.0) == pytest.approx(0.16510527294261, rel=1e-11)

    @given(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0.01, 10))
    def test_rf_symmetric_and_homogeneous(self, x, y, z):
        v = carlson_rf(x, y, z)
        assert carlson_rf(z, x, y) == pytest.approx(v, rel=1e-14)
        assert carlson_rf(4 * x, 4 * y, 4 * z) == pytest.approx(v / 2, rel=1e-14)

    def test_rd_needs_positive_z(self):
        with pytest.raises(DomainError):
            carlson_rd(1.0, 1.0, 0.0)


class TestComplete:
    def test_limits_at_zero(self):
        m = EllipticModulus.from_k(1e-300)
        assert complete_K(m) == pytest.approx(math.pi / 2, rel=1e-15)
        assert complete_E(m) == pytest.approx(math.pi / 2, rel=1e-15)

    @given(moduli)
    def test_legendre_relation(self, k):
        m = EllipticModulus.from_k(k)
        K, E, Kp, Ep = complete_K(m), complete_E(m), complete_K_comp(m), complete_E_comp(m)
        assert E * Kp + Ep * K - K * Kp == pytest.approx(math.pi / 2, abs=1e-12 * max(1.0, K * Kp))

    @given(moduli, moduli)
    def test_monotone(self, a, b):
        a, b = sorted((a, b))
        if a == b:
            return
        ma, mb = EllipticModulus.from_k(a), EllipticModulus.from_k(b)
        assert complete_K(ma) <= complete_K(mb)
        assert complete_E(ma) >= complete_E(mb)

    @given(log_ratios)
    def test_differences_are_cancellation_free(self, u):
        m = EllipticModulus.from_log_ratio(u)
        K, E = complete_K(m), complete_E(m)
        assert k_minus_e(m) > 0
        assert e_minus_comp_sq_k(m) > 0
        if m.k > 0.5 and m.k_comp > 0.5:
            assert k_minus_e(m) == pytest.approx(K - E, rel=1e-12)

    def test_log_switch_is_continuous(self):
        below = EllipticModulus.from_comp(0.999e-8)
        above = EllipticModulus.from_comp(1.001e-8)
        assert complete_K(below) - math.log(4 / below.k_comp) == pytest.approx(
            complete_K(above) - math.log(4 / above.k_comp), abs=1e-14
        )


class TestIncomplete:
    @staticmethod
    def _quad_F(x, k):
        # t = sin(phi) removes the endpoint singularity
        val, _ = quad(lambda p: 1.0 / math.sqrt(1 - (k * math.sin(p)) ** 2), 0, math.asin(x), epsabs=0, epsrel=1e-13)
        return val

    @staticmethod
    def _quad_E(x, k):
        val, _ = quad(lambda p: math.sqrt(1 - (k * math.sin(p)) ** 2), 0, math.asin(x), epsabs=0, epsrel=1e-13)
        return val

    @given(st.floats(0.0, 1.0), st.floats(0.0, 0.999))
    @settings(max_examples=60)
    def test_against_quadrature(self, x, k):
        if k == 0.0:
            k = 1e-3
        m = EllipticModulus.from_k(k)
        assert incomplete_F(x, m) == pytest.approx(self._quad_F(x, k), rel=1e-12, abs=1e-15)
        assert incomplete_E(x, m) == pytest.approx(self._quad_E(x, k), rel=1e-12, abs=1e-15)

    @given(moduli)
    def test_complete_at_one(self, k):
        m = EllipticModulus.from_k(k)
        assert incomplete_F(1.0, m) == pytest.approx(complete_K(m), rel=1e-13)
        assert incomplete_E(1.0, m) == pytest.approx(complete_E(m), rel=1e-13)

    def test_zero(self):
        m = EllipticModulus.from_k(0.4)
        assert incomplete_F(0.0, m) == 0.0 and incomplete_E(0.0, m) == 0.0

    @pytest.mark.parametrize("x", [-0.1, 1.5, float("nan")])
    def test_bad_argument(self, x):
        with pytest.raises(DomainError):
            incomplete_F(x, EllipticModulus.from_k(0.4))

    @given(st.floats(0.01, 0.99), st.floats(0.01, 0.95))
    @settings(max_examples=40)
    def test_series_expansions(self, x, k):
        m = EllipticModulus.from_k(k)
        n = 400
        assert reference_series(SeriesSpec(SeriesKind.F_expansion, n), m, x) == pytest.approx(incomplete_F(x, m), rel=1e-11)
        assert reference_series(SeriesSpec(SeriesKind.E_expansion, n), m, x) == pytest.approx(incomplete_E(x, m), rel=1e-11)


class TestI2n:
    def test_first_values(self):
        x = 0.6
        assert i2n(x, 0) == pytest.approx(math.asin(x))
        assert i2n(x, 1) == pytest.approx(0.5 * (math.asin(x) - x * math.sqrt(1 - x * x)))

    @given(st.floats(0.0, 1.0), st.integers(0, 30))
    def test_positive_and_decreasing(self, x, n):
        a, b = i2n(x, n), i2n(x, n + 1)
        assert 0 <= b <= a

    def test_at_one(self):
        # I_2n(1) = (pi/2) (2n-1)!!/(2n)!!
        b = 1.0
        for n in range(1, 12):
            b *= (2 * n - 1) / (2 * n)
            assert i2n(1.0, n) == pytest.approx(0.5 * math.pi * b, rel=1e-14)


class TestSeries:
    @pytest.mark.parametrize("k", [0.1, 0.2, 0.3, 0.4, 0.5])
    def test_power_series(self, k):
        m = EllipticModulus.from_k(k)
        assert abs(complete_K(m) - reference_series(SeriesSpec("K", 50), m)) <= 1e-12
        assert abs(complete_E(m) - reference_series(SeriesSpec("E", 50), m)) <= 1e-12

    def test_printed_E_coefficients(self):
        # E = (pi/2)(1 - k^2/4 - 3k^4/64 - ...), coefficients -b_n^2/(2n-1)
        m = EllipticModulus.from_k(0.01)
        two = reference_series(SeriesSpec("E", 2), m)
        assert two == pytest.approx(0.5 * math.pi * (1 - 0.25e-4), rel=1e-15)
        three = reference_series(SeriesSpec("E", 3), m)
        assert three - two == pytest.approx(-0.5 * math.pi * 3 / 64 * 1e-8, rel=1e-10)

    @pytest.mark.parametrize("kind, fn", [("Kprime", complete_K_comp), ("Eprime", complete_E_comp)])
    @pytest.mark.parametrize("s", [0.3, 0.1, 0.01, 1e-4])
    def test_log_series_tail_bound(self, kind, fn, s):
        m = EllipticModulus.from_k(s)
        for n in (2, 3):
            err = abs(fn(m) - reference_series(SeriesSpec(kind, n), m))
            omitted = log_series_omitted_term(kind, m, n)
            assert err <= omitted / (1 - s * s) + 1e-14 * fn(m)
            # the omitted terms are all positive, so the error is at least the first one
            assert err >= 0.9 * omitted or omitted < 1e-15

    def test_third_K_constant(self):
        # with the offset 4/3 the truncation misses by far more than the omitted term
        s = 0.01
        m = EllipticModulus.from_k(s)
        wrong = reference_series(SeriesSpec("Kprime", 3), m) - 9 / 64 * (7 / 6 - 4 / 3) * s**4
        assert abs(complete_K_comp(m) - wrong) > 100 * log_series_omitted_term("Kprime", m, 3)

    def test_log_series_term_limit(self):
        with pytest.raises(DomainError):
            reference_series(SeriesSpec("Kprime", 5), EllipticModulus.from_k(0.1))
        with pytest.raises(DomainError):
            log_series_omitted_term("Kprime", EllipticModulus.from_k(0.1), 4)

    def test_bad_spec(self):
        with pytest.raises(DomainError):
            SeriesSpec("K", 0)
        with pytest.raises(ValueError):
            SeriesSpec("nope")
        with pytest.raises(DomainError):
            reference_series(SeriesSpec("F_expansion"), EllipticModulus.from_k(0.3))


class TestLanden:
    def test_example(self):
        m = EllipticModulus.from_k(0.6)
        lam = landen_ascend(m)
        assert complete_K(lam) == pytest.approx(1.6 * complete_K(m), rel=1e-11)
        assert complete_K_comp(lam) == pytest.approx(0.8 * complete_K_comp(m), rel=1e-11)

    @given(log_ratios)
    def test_all_four_identities(self, u):
        m = EllipticModulus.from_log_ratio(u)
        lam = landen_ascend(m)
        k = m.k
        K, E, Kp, Ep = complete_K(m), complete_E(m), complete_K_comp(m), complete_E_comp(m)
        assert complete_K(lam) == pytest.approx((1 + k) * K, rel=1e-12)
        assert complete_K_comp(lam) == pytest.approx(0.5 * (1 + k) * Kp, rel=1e-12)
        assert complete_E(lam) == pytest.approx((2 * E - m.k_comp**2 * K) / (1 + k), rel=1e-12)
        assert complete_E_comp(lam) == pytest.approx((Ep + k * Kp) / (1 + k), rel=1e-12)

    def test_complement_is_exact_near_one(self):
        m = EllipticModulus.from_comp(1e-9)
        lam = landen_ascend(m)
        assert lam.k_comp == pytest.approx(0.25e-18, rel=1e-12)
        assert np.isclose(lam.k, 1.0)
