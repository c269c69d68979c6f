import numpy as np
import pytest
from scipy.integrate import quad

from meridian.kernels import (AngularIntegralSpec, SUBSTITUTION_K,
                              angular_bound_ratio, angular_integral,
                              k_modulus, kernel_batch, kernel_triple,
                              swirl_source_kernel)
from meridian.quadrature import QuadratureError


def quad_kernel_reference(r, rho, zeta, which):
    """Independent full-period [0, 2pi] quadrature of the kernel displays."""
    def integrand(p):
        den = (r * r + rho * rho - 2 * r * rho * np.cos(p) + zeta * zeta) ** 1.5
        if which == 1:
            return zeta * np.cos(p) / den / (4 * np.pi)
        if which == 2:
            return -(rho - r * np.cos(p)) / den / (4 * np.pi)
        return -(rho - r * np.cos(p)) * np.cos(p) / den / (4 * np.pi)
    val, _ = quad(integrand, 0.0, 2.0 * np.pi, limit=400, epsabs=1e-13)
    return val


def test_angular_closed_form_beta2():
    for K in (0.0, 1.0, 10.0, 1e4, 1e6):
        val, err = angular_integral(AngularIntegralSpec(K=K, beta=2.0, tol=1e-12))
        exact = np.pi / (2.0 * np.sqrt(1.0 + K))
        assert abs(val / exact - 1.0) < 1e-10


def test_angular_k_zero_any_beta():
    for beta in (1.0, 1.7, 3.0, 5.5):
        val, _ = angular_integral(AngularIntegralSpec(K=0.0, beta=beta))
        assert val == pytest.approx(np.pi / 2, abs=1e-12)


def test_angular_monotone_decay_in_k():
    for beta in (1.0, 2.0, 3.0):
        vals = [angular_integral(AngularIntegralSpec(K=K, beta=beta))[0]
                for K in np.geomspace(1e-2, 1e8, 11)]
        assert np.all(np.diff(vals) < 0)


def test_angular_bound_ratio_at_k_zero():
    assert angular_bound_ratio(
        AngularIntegralSpec(K=0.0, beta=3.0)) == pytest.approx(np.pi / 2)


def test_angular_envelope_beta_gt1():
    # I(K, 3) * sqrt(K) stays bounded: the K^{-1/2} envelope shape
    ratios = [angular_bound_ratio(AngularIntegralSpec(K=K, beta=3.0))
              for K in np.geomspace(1.0, 1e8, 17)]
    assert max(ratios) < 2.0
    assert all(r > 0 for r in ratios)


def test_angular_envelope_beta1_needs_delta():
    spec = AngularIntegralSpec(K=100.0, beta=1.0)
    with pytest.raises(ValueError):
        angular_bound_ratio(spec)
    with pytest.raises(ValueError):
        angular_bound_ratio(spec, delta=1.0)
    ladder = np.geomspace(1.0, 1e6, 13)
    ratios = [angular_bound_ratio(AngularIntegralSpec(K=K, beta=1.0), delta=0.9)
              for K in ladder]
    # boundedness is the claim; the constant is an empirical output.  The
    # sup must also be stable under ladder refinement.
    fine = [angular_bound_ratio(AngularIntegralSpec(K=K, beta=1.0), delta=0.9)
            for K in np.geomspace(1.0, 1e6, 25)]
    assert max(ratios) < 10.0
    assert abs(max(fine) - max(ratios)) < 0.05 * max(ratios)


def test_angular_budget_failure_carries_estimate():
    with pytest.raises(QuadratureError) as info:
        angular_integral(AngularIntegralSpec(K=1e10, beta=1.0, tol=1e-15,
                                             budget=6))
    assert 0 < info.value.best < np.pi / 2


def test_angular_spec_validation():
    with pytest.raises(ValueError):
        AngularIntegralSpec(K=-1.0, beta=2.0)
    with pytest.raises(ValueError):
        AngularIntegralSpec(K=1.0, beta=0.5)


def test_kernel_axis_closed_forms():
    rng = np.random.default_rng(7)
    for _ in range(20):
        rho = rng.uniform(0.2, 8.0)
        zeta = rng.uniform(-5.0, 5.0)
        kt = kernel_triple(0.0, rho, zeta, tol=1e-13)
        exact = -rho / (2.0 * (rho * rho + zeta * zeta) ** 1.5)
        assert abs(kt.gamma2 / exact - 1.0) < 1e-10
        assert abs(kt.gamma1) < 1e-12
        assert abs(kt.gamma3) < 1e-12


def test_kernel_zeta_zero_gamma1_vanishes():
    for r, rho in ((1.0, 2.0), (3.0, 0.5), (10.0, 11.0)):
        kt = kernel_triple(r, rho, 0.0)
        assert kt.gamma1 == 0.0


def test_kernel_gamma1_odd_in_zeta():
    rng = np.random.default_rng(3)
    for _ in range(100):
        r = rng.uniform(0.5, 20.0)
        rho = rng.uniform(0.1, 30.0)
        zeta = rng.uniform(0.05, 10.0)
        a = kernel_triple(r, rho, zeta, tol=1e-12)
        b = kernel_triple(r, rho, -zeta, tol=1e-12)
        tol = 2e-11 + a.err1 + b.err1
        assert abs(a.gamma1 + b.gamma1) < tol
        assert abs(a.gamma2 - b.gamma2) < 2e-11 + a.err2 + b.err2
        assert abs(a.gamma3 - b.gamma3) < 2e-11 + a.err3 + b.err3


def test_kernel_full_period_reduction_consistency():
    # the [0, pi/2] reduced quadrature equals raw full-period integration
    pts = [(2.0, 1.0, 0.5), (3.0, 3.1, 0.05), (5.0, 0.2, -1.0), (2.0, 8.0, 3.0)]
    for (r, rho, zeta) in pts:
        kt = kernel_triple(r, rho, zeta, tol=1e-13)
        for which, got, err in ((1, kt.gamma1, kt.err1),
                                (2, kt.gamma2, kt.err2),
                                (3, kt.gamma3, kt.err3)):
            ref = quad_kernel_reference(r, rho, zeta, which)
            assert abs(got - ref) < 1e-9 + err


def test_kernel_triple_rejects_diagonal():
    with pytest.raises(ValueError):
        kernel_triple(2.0, 2.0, 0.0)


def test_kernel_error_estimates_within_tolerance():
    kt = kernel_triple(4.0, 3.9, 0.01, tol=1e-11)
    assert kt.err1 <= 1e-10 and kt.err2 <= 1e-10 and kt.err3 <= 1e-10


def test_kernel_substitution_branch_near_diagonal():
    # K beyond the substitution threshold: compare both paths
    r, rho = 100.0, 100.001
    zeta = 5e-4
    K = k_modulus(r, rho, zeta)
    assert K > SUBSTITUTION_K
    kt = kernel_triple(r, rho, zeta, tol=1e-12)
    kb = kernel_batch(r, np.array([rho]), np.array([zeta]))
    assert abs(kt.gamma2 - kb.g2[0]) < 1e-8 * abs(kt.gamma2)
    assert abs(kt.gamma1 - kb.g1[0]) < 1e-8 * abs(kt.gamma1)


def test_kernel_batch_matches_triple():
    rng = np.random.default_rng(11)
    r = 3.0
    rho = rng.uniform(0.1, 12.0, 40)
    zeta = rng.uniform(-6.0, 6.0, 40)
    kb = kernel_batch(r, rho, zeta)
    for i in range(rho.size):
        kt = kernel_triple(r, rho[i], zeta[i], tol=1e-12)
        assert abs(kb.g1[i] - kt.gamma1) < 1e-9 + kb.e1[i] + kt.err1
        assert abs(kb.g2[i] - kt.gamma2) < 1e-9 + kb.e2[i] + kt.err2
        assert abs(kb.g3[i] - kt.gamma3) < 1e-9 + kb.e3[i] + kt.err3


def test_kernel_batch_g1_over_zeta_limit():
    kb0 = kernel_batch(2.0, np.array([3.0]), np.array([0.0]))
    kb1 = kernel_batch(2.0, np.array([3.0]), np.array([1e-8]))
    assert abs(kb0.g1_over_zeta[0] - kb1.g1[0] / 1e-8) < 1e-8
    assert kb0.g1[0] == 0.0


def test_swirl_kernel_is_swapped_gamma2():
    for (r, rho, zeta) in ((2.0, 1.0, 0.4), (5.0, 6.0, -1.0)):
        m, err = swirl_source_kernel(r, rho, zeta)
        kt = kernel_triple(rho, r, zeta)
        assert abs(m + kt.gamma2) < 1e-10 + err
        kb = kernel_batch(r, np.array([rho]), np.array([zeta]))
        assert abs(kb.g_swirl[0] - m) < 1e-9 + kb.e_swirl[0] + err
