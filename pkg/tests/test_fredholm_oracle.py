"""Airy-kernel Fredholm determinant oracle."""

import pytest
from mpmath import mp, mpf

from twlab import fredholm_oracle, specialfn
from twlab.errors import DomainError, PrecisionError
from twlab.precision import PrecisionContext
from twlab.quadrature import integrate_gl

CTX = PrecisionContext(256, 1e-12)


class TestKernel:
    def test_diagonal_at_zero_closed_form(self, wp300):
        k = fredholm_oracle.airy_kernel(0, 0, CTX)
        ref = mp.power(3, mpf(-2) / 3) / mp.gamma(mpf(1) / 3) ** 2
        assert abs(k - ref) < mpf(10) ** -70

    def test_symmetry(self, wp300):
        for (u, v) in ((0, 1), (-2, 3), (1.5, 1.5000001)):
            a = fredholm_oracle.airy_kernel(u, v, CTX)
            b = fredholm_oracle.airy_kernel(v, u, CTX)
            assert abs(a - b) < mpf(10) ** -70

    def test_integral_form_oracle(self, wp300):
        # A(u, v) = int_0^inf Ai(u+s) Ai(v+s) ds
        k = fredholm_oracle.airy_kernel(0, 1, CTX)
        oracle = integrate_gl(lambda s: mp.airyai(s) * mp.airyai(1 + s),
                              0, 18, 64, 300)
        assert abs(k - oracle) < mpf(10) ** -30

    def test_taylor_patch_matches_quotient(self, wp300):
        u = mpf(1)
        v = mpf(1) + mpf(9) / mpf(10) ** 7   # inside the switch threshold
        patched = fredholm_oracle.airy_kernel(u, v, CTX)
        quotient = ((mp.airyai(u) * mp.airyai(v, derivative=1)
                     - mp.airyai(u, derivative=1) * mp.airyai(v)) / (u - v))
        assert abs(patched - quotient) < mpf(10) ** -25


class TestDeterminant:
    def test_right_tail_value(self, wp300):
        # 1 - F2(4) ~ 2 e^(-(4/3) 4^(3/2))/(32 pi 4^(3/2)) (1 - 35/(24 4^(3/2)));
        # the omitted corrections are O(x^-3) relative to the defect
        v = fredholm_oracle.f2_fredholm(4, 40, CTX, verify_convergence=False)
        x32 = mpf(4) ** mpf("1.5")
        defect = 2 * mp.exp(-mpf(4) / 3 * x32) / (32 * mp.pi * x32) * (1 - 35 / (24 * x32))
        assert abs((1 - v) - defect) < 10 * defect / x32 ** 2

    def test_monotone(self, wp300):
        vals = [fredholm_oracle.f2_fredholm(x, 40, CTX, verify_convergence=False)
                for x in (-6, -2, 2)]
        assert vals[0] < vals[1] < vals[2]

    def test_m_convergence(self, wp300):
        a = fredholm_oracle.f2_fredholm(-2, 40, CTX, verify_convergence=False)
        b = fredholm_oracle.f2_fredholm(-2, 80, CTX, verify_convergence=False)
        assert abs(a - b) < mpf(10) ** -12

    def test_convergence_guard_raises(self):
        strict = PrecisionContext(256, 1e-60)
        with pytest.raises(PrecisionError):
            fredholm_oracle.f2_fredholm(-2, 20, strict, verify_convergence=True)

    def test_rejects_small_rule(self):
        with pytest.raises(DomainError):
            fredholm_oracle.f2_fredholm(0, 10, CTX)

    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            fredholm_oracle.f2_fredholm(float("nan"), 40, CTX)


class TestRule:
    def test_rule_invariants(self):
        rule = fredholm_oracle.build_rule(-3, 48, CTX)
        assert rule.size == 48
        assert all(w > 0 for w in rule.weights)
        assert all(a < b for a, b in zip(rule.nodes, rule.nodes[1:]))
        assert rule.nodes[0] > -3

    def test_truncation_point(self):
        u = fredholm_oracle._truncation_point(-8.0)
        with mp.workprec(200):
            assert mp.airyai(u) ** 2 < mpf(10) ** -39
            assert mp.airyai(u - 2) ** 2 > mpf(10) ** -41


class TestSpectrum:
    def test_matrix_spd_with_eigenvalues_in_unit_interval(self, wp300):
        mat = fredholm_oracle.nystrom_matrix(-4, 40, CTX)
        m = mp.matrix(mat)
        eigvals = mp.eigsy(m, eigvals_only=True)
        # the operator tail beyond the truncation point contributes ~1e-40,
        # so "at most 1" holds to that scale
        assert all(0 < ev <= 1 + mpf(10) ** -35 for ev in eigvals)

    def test_determinant_in_unit_interval(self, wp300):
        for x in (-6, 0, 3):
            v = fredholm_oracle.f2_fredholm(x, 40, CTX, verify_convergence=False)
            assert 0 < v < 1
