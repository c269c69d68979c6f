"""Evaluable scalar profiles on the meridian half-plane.

A Profile wraps f(r, z) together with optional analytic derivatives.  All
callables must accept numpy arrays and broadcast; quadrature and scan code
relies on vectorized evaluation.  Derivative-hungry operators (curl,
divergence, momentum residual, Dirichlet energy) use the analytic channel
when present and fall back to central finite differences otherwise.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


@dataclass
class Profile:
    """Scalar profile with an optional analytic-derivative channel.

    fn(r, z) is mandatory.  d_r, d_z, d_rr, d_zz, d_rz are optional exact
    partial derivatives; `has_derivatives` reports whether first derivatives
    exist, `has_second_derivatives` whether the diagonal seconds do too.
    """
    fn: Callable
    d_r: Optional[Callable] = None
    d_z: Optional[Callable] = None
    d_rr: Optional[Callable] = None
    d_zz: Optional[Callable] = None
    d_rz: Optional[Callable] = None
    name: str = ""

    def __call__(self, r, z):
        return self.fn(r, z)

    @property
    def has_derivatives(self):
        return self.d_r is not None and self.d_z is not None

    @property
    def has_second_derivatives(self):
        return (self.has_derivatives and self.d_rr is not None
                and self.d_zz is not None)


def constant_profile(c):
    val = float(c)
    zero = lambda r, z: np.zeros(np.broadcast(r, z).shape)
    return Profile(fn=lambda r, z: np.full(np.broadcast(r, z).shape, val),
                   d_r=zero, d_z=zero, d_rr=zero, d_zz=zero, d_rz=zero,
                   name="const(%g)" % val)


def zero_profile():
    return constant_profile(0.0)


@dataclass
class SmoothBump:
    """C^infinity bump exp(1 - 1/(1 - q^2)) on q < 1, zero outside.

    q^2 = ((r - r0)^2 + (z - z0)^2) / radius^2, normalized to 1 at the
    center.  Carries exact first and second derivatives; supported on the
    closed disk of `radius` about (r0, z0).
    """
    r0: float
    z0: float
    radius: float
    amplitude: float = 1.0

    def _core(self, r, z):
        r = np.asarray(r, dtype=float)
        z = np.asarray(z, dtype=float)
        t = ((r - self.r0) ** 2 + (z - self.z0) ** 2) / self.radius ** 2
        inside = t < 1.0 - 1e-14
        ts = np.where(inside, t, 0.0)
        om = 1.0 - ts
        f = np.where(inside, self.amplitude * np.exp(1.0 - 1.0 / om), 0.0)
        fp = np.where(inside, -f / om ** 2, 0.0)
        fpp = np.where(inside, f * (1.0 / om ** 4 - 2.0 / om ** 3), 0.0)
        return t, f, fp, fpp, inside

    def value(self, r, z):
        return self._core(r, z)[1]

    def profile(self):
        a2 = self.radius ** 2

        def d_r(r, z):
            _, _, fp, _, _ = self._core(r, z)
            return fp * 2.0 * (np.asarray(r, float) - self.r0) / a2

        def d_z(r, z):
            _, _, fp, _, _ = self._core(r, z)
            return fp * 2.0 * (np.asarray(z, float) - self.z0) / a2

        def d_rr(r, z):
            _, _, fp, fpp, _ = self._core(r, z)
            tr = 2.0 * (np.asarray(r, float) - self.r0) / a2
            return fpp * tr * tr + fp * 2.0 / a2

        def d_zz(r, z):
            _, _, fp, fpp, _ = self._core(r, z)
            tz = 2.0 * (np.asarray(z, float) - self.z0) / a2
            return fpp * tz * tz + fp * 2.0 / a2

        def d_rz(r, z):
            _, _, fp, fpp, _ = self._core(r, z)
            tr = 2.0 * (np.asarray(r, float) - self.r0) / a2
            tz = 2.0 * (np.asarray(z, float) - self.z0) / a2
            return fpp * tr * tz

        return Profile(fn=self.value, d_r=d_r, d_z=d_z, d_rr=d_rr,
                       d_zz=d_zz, d_rz=d_rz,
                       name="bump(%g,%g;%g)" % (self.r0, self.z0, self.radius))

    @property
    def support(self):
        return (max(self.r0 - self.radius, 0.0), self.r0 + self.radius,
                self.z0 - self.radius, self.z0 + self.radius)


def gaussian_swirl_profile(amplitude=1.0, width=1.0):
    """u_theta = A r exp(-(r^2 + z^2)/w^2), smooth through the axis."""
    w2 = width ** 2

    def g(r, z):
        return np.exp(-(np.asarray(r, float) ** 2 + np.asarray(z, float) ** 2) / w2)

    return Profile(
        fn=lambda r, z: amplitude * np.asarray(r, float) * g(r, z),
        d_r=lambda r, z: amplitude * g(r, z) * (1.0 - 2.0 * np.asarray(r, float) ** 2 / w2),
        d_z=lambda r, z: amplitude * np.asarray(r, float) * g(r, z) * (-2.0 * np.asarray(z, float) / w2),
        d_rr=lambda r, z: amplitude * g(r, z) * (-2.0 * np.asarray(r, float) / w2) * (3.0 - 2.0 * np.asarray(r, float) ** 2 / w2),
        d_zz=lambda r, z: amplitude * np.asarray(r, float) * g(r, z) * (4.0 * np.asarray(z, float) ** 2 / w2 ** 2 - 2.0 / w2),
        d_rz=lambda r, z: amplitude * g(r, z) * (-2.0 * np.asarray(z, float) / w2) * (1.0 - 2.0 * np.asarray(r, float) ** 2 / w2),
        name="gaussian_swirl",
    )


def power_law_profile(mu, offset=1.0):
    """f(r, z) = (offset + r)^(-mu), z-independent."""
    def f(r, z):
        return (offset + np.asarray(r, dtype=float)) ** (-mu)

    return Profile(
        fn=f,
        d_r=lambda r, z: -mu * (offset + np.asarray(r, float)) ** (-mu - 1.0),
        d_z=lambda r, z: np.zeros(np.broadcast(r, z).shape),
        d_rr=lambda r, z: mu * (mu + 1.0) * (offset + np.asarray(r, float)) ** (-mu - 2.0),
        d_zz=lambda r, z: np.zeros(np.broadcast(r, z).shape),
        d_rz=lambda r, z: np.zeros(np.broadcast(r, z).shape),
        name="power_law(mu=%g)" % mu,
    )
