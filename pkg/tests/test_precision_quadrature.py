"""Precision plumbing and the Gauss-Legendre rule generator."""

import pytest
from mpmath import mp, mpf

from twlab.errors import PrecisionError
from twlab.precision import PrecisionContext, round_to, stabilize
from twlab.quadrature import gauss_legendre, integrate_gl


class TestPrecisionContext:
    def test_validation(self):
        with pytest.raises(ValueError):
            PrecisionContext(precision_bits=32)
        with pytest.raises(ValueError):
            PrecisionContext(tolerance=0)
        with pytest.raises(ValueError):
            PrecisionContext(max_refinements=0)

    def test_round_to(self):
        with mp.workprec(300):
            v = mp.sqrt(2)
        r = round_to(v, 64)
        assert r._mpf_[3] <= 64

    def test_stabilize_converges(self):
        calls = []

        def compute(bits):
            calls.append(bits)
            with mp.workprec(bits):
                return +mp.pi

        ctx = PrecisionContext(64, 1e-15, 4)
        val, bits = stabilize(compute, 64, ctx, lambda a, b: abs(a - b))
        assert bits == 128
        assert calls == [64, 128]
        with mp.workprec(200):
            assert abs(val - mp.pi) < mpf(2) ** -120

    def test_stabilize_raises_on_budget(self):
        def compute(bits):
            # never stabilizes: changes with the precision tag
            return mpf(bits)

        ctx = PrecisionContext(64, 1e-15, 3)
        with pytest.raises(PrecisionError):
            stabilize(compute, 64, ctx, lambda a, b: abs(a - b))


class TestGaussLegendre:
    def test_weights_sum_to_two(self):
        for n in (5, 16, 80):
            xs, ws = gauss_legendre(n, 200)
            with mp.workprec(220):
                assert abs(mp.fsum(ws) - 2) < mpf(2) ** -180
            assert all(-1 < x < 1 for x in xs)
            assert all(a < b for a, b in zip(xs, xs[1:]))

    def test_polynomial_exactness(self):
        # n-point rule integrates degree 2n-1 exactly
        n = 12
        with mp.workprec(220):
            val = integrate_gl(lambda x: x ** 23 + 3 * x ** 8, -1, 1, n, 200)
            exact = mpf(0) + 2 * mpf(3) / 9
            assert abs(val - exact) < mpf(2) ** -180

    def test_analytic_integrand(self):
        with mp.workprec(220):
            val = integrate_gl(mp.exp, 0, 2, 40, 200)
            assert abs(val - (mp.exp(2) - 1)) < mpf(10) ** -50

    def test_cache_returns_same_object(self):
        a = gauss_legendre(24, 160)
        b = gauss_legendre(24, 160)
        assert a is b
