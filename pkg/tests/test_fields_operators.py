import numpy as np
import pytest

from meridian.fields import (AxialEnvelope, AxisymField, MeridianPoint,
                             cutoff_phi, power_law_vorticity,
                             stream_bump_field, stream_function_field,
                             swirl_bump_field)
from meridian.operators import (AxisTooCloseError, curl_axisym,
                                divergence_axisym, ns_residual)
from meridian.profiles import (Profile, SmoothBump, constant_profile,
                               gaussian_swirl_profile, zero_profile)


def fd_only(profile):
    """Strip the analytic-derivative channel, keeping only evaluation."""
    return Profile(fn=profile.fn, name=profile.name + "[fd]")


def test_meridian_point_validation():
    MeridianPoint(0.0, -3.0)
    with pytest.raises(ValueError):
        MeridianPoint(-0.1, 0.0)
    with pytest.raises(ValueError):
        MeridianPoint(float("nan"), 0.0)


def test_curl_gaussian_swirl_closed_form():
    # u_theta = r e^{-r^2 - z^2}: w_z = (2 - 2 r^2) e^{-r^2-z^2}, w_r = 2 r z e^{...}
    field = AxisymField(u_r=zero_profile(), u_theta=gaussian_swirl_profile(),
                        u_z=zero_profile())
    w_r, w_t, w_z = curl_axisym(field, MeridianPoint(1.0, 0.0))
    assert abs(w_z) < 1e-13          # (2 - 2 r^2) vanishes at r = 1
    assert abs(w_r) < 1e-13
    assert w_t == 0.0
    w_r2, _, w_z2 = curl_axisym(field, MeridianPoint(0.5, 0.3))
    g = np.exp(-(0.25 + 0.09))
    assert w_z2 == pytest.approx((2 - 2 * 0.25) * g, rel=1e-12)
    assert w_r2 == pytest.approx(2 * 0.5 * 0.3 * g, rel=1e-12)


def test_curl_zero_field():
    field = AxisymField(u_r=zero_profile(), u_theta=zero_profile(),
                        u_z=zero_profile())
    assert curl_axisym(field, MeridianPoint(2.0, 1.0)) == (0.0, 0.0, 0.0)


def test_curl_no_swirl_field_pure_w_theta():
    field, _ = stream_bump_field()
    w_r, w_t, w_z = curl_axisym(field, MeridianPoint(3.0, 0.2))
    assert w_r == 0.0 and w_z == 0.0
    assert w_t != 0.0


def test_curl_matches_exact_curl_of_bump():
    field, w = stream_bump_field()
    for (r, z) in ((2.7, 0.1), (3.3, -0.5)):
        _, w_t, _ = curl_axisym(field, MeridianPoint(r, z), h=1e-4)
        exact = float(w.w_theta(np.array(r), np.array(z)))
        assert w_t == pytest.approx(exact, rel=1e-6)


def test_curl_axis_rejection_without_analytics():
    field = AxisymField(u_r=zero_profile(),
                        u_theta=fd_only(gaussian_swirl_profile()),
                        u_z=zero_profile())
    with pytest.raises(AxisTooCloseError):
        curl_axisym(field, MeridianPoint(1e-6, 0.0), h=1e-4)


def test_divergence_examples():
    # u_r = r, u_z = -2z is divergence free: (1/r) d(r^2)/dr - 2 = 0
    lin = AxisymField(
        u_r=Profile(fn=lambda r, z: np.asarray(r, float)),
        u_theta=zero_profile(),
        u_z=Profile(fn=lambda r, z: -2.0 * np.asarray(z, float)))
    assert divergence_axisym(lin, MeridianPoint(1.7, 0.3)) == pytest.approx(0.0, abs=1e-9)
    # u_r = 1, u_z = 0: div = 1/r
    unit = AxisymField(u_r=constant_profile(1.0), u_theta=zero_profile(),
                       u_z=zero_profile())
    assert divergence_axisym(unit, MeridianPoint(2.0, 0.0)) == pytest.approx(0.5, rel=1e-10)


def test_stream_function_divergence_free_analytic():
    field, _ = stream_bump_field()
    rng = np.random.default_rng(5)
    for _ in range(100):
        r = rng.uniform(1.8, 4.2)
        z = rng.uniform(-1.2, 1.2)
        div = divergence_axisym(field, MeridianPoint(r, z))
        assert abs(div) < 1e-8


def test_stream_function_divergence_fd_second_order():
    field, _ = stream_bump_field()
    fd_field = AxisymField(u_r=fd_only(field.u_r), u_theta=zero_profile(),
                           u_z=fd_only(field.u_z))
    p = MeridianPoint(2.6, 0.4)
    e1 = abs(divergence_axisym(fd_field, p, h=0.08))
    e2 = abs(divergence_axisym(fd_field, p, h=0.04))
    assert 4.0 == pytest.approx(e1 / e2, abs=0.5)


def test_stream_function_requires_derivatives_and_support():
    bare = Profile(fn=lambda r, z: np.zeros(np.broadcast(r, z).shape))
    with pytest.raises(ValueError):
        stream_function_field(bare)
    with pytest.raises(ValueError):
        stream_bump_field(r0=0.5, radius=1.0)


def test_ns_residual_zero_field():
    field = AxisymField(u_r=zero_profile(), u_theta=zero_profile(),
                        u_z=zero_profile(), pressure=constant_profile(3.0))
    res = ns_residual(field, MeridianPoint(1.5, 0.0))
    assert res == (0.0, 0.0, 0.0)


def test_ns_residual_missing_pressure():
    field = AxisymField(u_r=zero_profile(), u_theta=zero_profile(),
                        u_z=zero_profile())
    with pytest.raises(ValueError):
        ns_residual(field, MeridianPoint(1.0, 0.0))


def test_ns_residual_rigid_swirl_balances():
    # u_theta = W r with pressure p = W^2 r^2 / 2: all residuals vanish
    W = 0.8
    swirl = Profile(
        fn=lambda r, z: W * np.asarray(r, float),
        d_r=lambda r, z: np.full(np.broadcast(r, z).shape, W),
        d_z=lambda r, z: np.zeros(np.broadcast(r, z).shape),
        d_rr=lambda r, z: np.zeros(np.broadcast(r, z).shape),
        d_zz=lambda r, z: np.zeros(np.broadcast(r, z).shape),
        d_rz=lambda r, z: np.zeros(np.broadcast(r, z).shape))
    pressure = Profile(
        fn=lambda r, z: 0.5 * W * W * np.asarray(r, float) ** 2,
        d_r=lambda r, z: W * W * np.asarray(r, float),
        d_z=lambda r, z: np.zeros(np.broadcast(r, z).shape))
    field = AxisymField(u_r=zero_profile(), u_theta=swirl,
                        u_z=zero_profile(), pressure=pressure)
    for (r, z) in ((0.7, 0.0), (2.0, 1.5)):
        res = ns_residual(field, MeridianPoint(r, z))
        assert max(abs(v) for v in res) < 1e-12


def test_ns_residual_bump_field_fd_stable():
    # generic non-solution: the residual is nonzero and stable under h -> h/2
    u_r = fd_only(SmoothBump(2.5, 0.0, 1.0).profile())
    u_z = fd_only(SmoothBump(3.0, 0.2, 1.2).profile())
    pres = fd_only(SmoothBump(2.8, -0.2, 1.1).profile())
    field = AxisymField(u_r=u_r, u_theta=zero_profile(), u_z=u_z, pressure=pres)
    p = MeridianPoint(2.8, 0.1)
    r1 = np.array(ns_residual(field, p, h=0.02))
    r2 = np.array(ns_residual(field, p, h=0.01))
    assert np.linalg.norm(r1) > 0.1
    assert np.linalg.norm(r1 - r2) < 0.05 * np.linalg.norm(r2)


def test_ns_residual_fd_requires_room():
    field = AxisymField(u_r=fd_only(zero_profile()), u_theta=zero_profile(),
                        u_z=zero_profile(), pressure=constant_profile(0.0))
    with pytest.raises(AxisTooCloseError):
        ns_residual(field, MeridianPoint(0.01, 0.0), h=0.02)


def test_curl_second_order_convergence():
    exact_field = AxisymField(u_r=zero_profile(),
                              u_theta=gaussian_swirl_profile(),
                              u_z=zero_profile())
    field = AxisymField(u_r=zero_profile(),
                        u_theta=fd_only(gaussian_swirl_profile()),
                        u_z=zero_profile())
    p = MeridianPoint(1.3, 0.4)
    w_exact = np.array(curl_axisym(exact_field, p))
    e1 = np.linalg.norm(np.array(curl_axisym(field, p, h=0.1)) - w_exact)
    e2 = np.linalg.norm(np.array(curl_axisym(field, p, h=0.05)) - w_exact)
    assert 4.0 == pytest.approx(e1 / e2, abs=0.5)


def test_power_law_vorticity_values():
    w = power_law_vorticity(3.0)
    val = float(w.w_theta(np.array(1.0), np.array(0.0)))
    assert val == pytest.approx(0.125, rel=1e-14)
    rho = np.linspace(0.0, 50.0, 201)
    k = np.zeros_like(rho)
    assert np.max(w.w_theta(rho, k) * (1.0 + rho) ** 3.0) <= 1.0 + 1e-12


def test_power_law_vorticity_validation():
    power_law_vorticity(5.0 / 3.0 + 1e-6)
    with pytest.raises(ValueError):
        power_law_vorticity(1.0)
    with pytest.raises(ValueError):
        power_law_vorticity(3.0, component="bogus")


def test_power_law_vorticity_components():
    w = power_law_vorticity(2.0, component="r_and_z")
    assert float(w.w_theta(np.array(1.0), np.array(0.0))) == 0.0
    assert float(w.w_r(np.array(1.0), np.array(0.0))) == pytest.approx(0.25)
    assert float(w.w_z(np.array(1.0), np.array(0.0))) == pytest.approx(0.25)


def test_axial_envelope_kinds():
    g = AxialEnvelope("gauss", scale=2.0)
    assert g(np.array(0.0)) == 1.0
    assert g.integral() == pytest.approx(2.0 * np.sqrt(np.pi))
    assert g.tail_integral(20.0) < 1e-6 * g.integral()
    c = AxialEnvelope("compact", half_width=3.0)
    assert c.integral() == 6.0
    assert c.tail_integral(3.0) == 0.0
    with pytest.raises(ValueError):
        AxialEnvelope("triangle")


def test_cutoff_plateau_and_support():
    for R in (4.0, 1024.0):
        phi = cutoff_phi(R)
        inside = [(0.3 * R, 0.2 * R), (0.5 * R, 0.5 * R), (0.0, 0.0)]
        outside = [(1.01 * R, 0.0), (0.2 * R, 1.2 * R), (1.5 * R, 1.5 * R)]
        for (r, z) in inside:
            assert float(phi.value(np.array(r), np.array(z))) == 1.0
        for (r, z) in outside:
            assert float(phi.value(np.array(r), np.array(z))) == 0.0


def test_cutoff_gradient_scaling_across_scales():
    # R sup|grad phi| is the same number at R = 4 and R = 1024
    rel = np.linspace(0.0, 1.05, 401)
    sups = {}
    hess_sups = {}
    for R in (4.0, 1024.0):
        phi = cutoff_phi(R)
        RR, ZZ = np.meshgrid(rel * R, rel * R, indexing="ij")
        sups[R] = R * float(np.max(phi.grad(RR, ZZ)))
        hess_sups[R] = R ** 2 * float(np.max(phi.hess(RR, ZZ)))
    assert abs(sups[4.0] - sups[1024.0]) < 1e-6 * sups[4.0]
    assert abs(hess_sups[4.0] - hess_sups[1024.0]) < 1e-6 * hess_sups[4.0]
    assert 0 < sups[4.0] < 10.0
    assert 0 < hess_sups[4.0] < 100.0


def test_cutoff_continuity_on_mesh():
    R = 8.0
    phi = cutoff_phi(R)
    mesh = np.linspace(0.0, 1.1 * R, 600)
    h = mesh[1] - mesh[0]
    RR, ZZ = np.meshgrid(mesh, mesh, indexing="ij")
    vals = phi.value(RR, ZZ)
    sup_grad = float(np.max(phi.grad(RR, ZZ)))
    jump_r = np.max(np.abs(np.diff(vals, axis=0)))
    jump_z = np.max(np.abs(np.diff(vals, axis=1)))
    assert max(jump_r, jump_z) < h * sup_grad * 1.1


def test_cutoff_validation():
    with pytest.raises(ValueError):
        cutoff_phi(0.0)


def test_swirl_bump_exact_curl():
    field, w = swirl_bump_field()
    p = MeridianPoint(3.2, 0.3)
    w_r, w_t, w_z = curl_axisym(field, p)
    assert w_t == 0.0
    assert w_r == pytest.approx(float(w.w_r(np.array(p.r), np.array(p.z))), rel=1e-10)
    assert w_z == pytest.approx(float(w.w_z(np.array(p.r), np.array(p.z))), rel=1e-10)


def test_axis_regularity_of_smooth_fields():
    # smooth axisymmetric fields vanish in u_r and u_theta on the axis
    z = np.linspace(-2.0, 2.0, 9)
    swirl = gaussian_swirl_profile()
    assert np.all(swirl(np.zeros_like(z), z) == 0.0)
    field, _ = stream_bump_field()
    # supported away from the axis: both meridian components vanish there
    assert np.all(field.u_r(np.full_like(z, 1e-9), z) == 0.0)
    assert np.all(field.u_z(np.full_like(z, 1e-9), z) == 0.0)
