"""Angular integrals of the meridian-plane Biot-Savart kernels.

The three kernels coupling a source ring at (rho, k) to a field point at
(r, z), with zeta = z - k, are

    G1(r, rho, zeta) = (1/4pi) int_0^{2pi} zeta cos(p) / D(p)^{3/2} dp
    G2(r, rho, zeta) = -(1/4pi) int_0^{2pi} (rho - r cos(p)) / D(p)^{3/2} dp
    G3(r, rho, zeta) = -(1/4pi) int_0^{2pi} (rho - r cos(p)) cos(p) / D(p)^{3/2} dp

with D(p) = r^2 + rho^2 - 2 r rho cos(p) + zeta^2.  Periodicity and evenness
reduce every integral to [0, pi/2] via p = 2t:

    D(2t) = (r - rho)^2 + 4 r rho sin(t)^2 + zeta^2.

The integrand develops a boundary layer of width K^{-1/2} at t = 0, where

    K = 4 r rho / ((r - rho)^2 + zeta^2)

is the near-diagonal modulus.  All quadrature here resolves that layer with
geometrically graded panels; `angular_integral` additionally refines
adaptively to a requested absolute tolerance.

The model integral behind the kernel envelopes is

    I(K, beta) = int_0^{pi/2} dt / (1 + K sin(t)^2)^{beta/2}

which admits the closed form pi / (2 sqrt(1 + K)) at beta = 2 and decays
like K^{-1/2} (beta > 1) or K^{-delta/2} (beta = 1, any delta < 1).
"""

from dataclasses import dataclass

import numpy as np

from .quadrature import (DEFAULT_PANEL_BUDGET, adaptive_integrate,
                         panel_nodes)

# K above which kernel quadrature switches to the u = sin(t) substitution;
# the layer is then exactly algebraic and geometric panels in u are optimal.
SUBSTITUTION_K = 1e6


@dataclass(frozen=True)
class AngularIntegralSpec:
    """Parameters of the model integral I(K, beta)."""
    K: float
    beta: float
    tol: float = 1e-10
    budget: int = DEFAULT_PANEL_BUDGET

    def __post_init__(self):
        if not (self.K >= 0):
            raise ValueError("K must be >= 0, got %r" % (self.K,))
        if not (self.beta >= 1):
            raise ValueError("beta must be >= 1, got %r" % (self.beta,))
        if not (self.tol > 0):
            raise ValueError("tol must be positive")
        if self.budget < 1:
            raise ValueError("subdivision budget must be positive")


@dataclass(frozen=True)
class KernelTriple:
    """Kernel values at one (r, rho, zeta) with absolute error estimates."""
    gamma1: float
    gamma2: float
    gamma3: float
    err1: float
    err2: float
    err3: float


def layer_panels(K, span=np.pi / 2, deepen=0):
    """Panel edges on [0, span] graded into the K sin^2 boundary layer."""
    scale = min(span, 1.0 / np.sqrt(max(K, 1.0))) * 0.5 ** deepen
    edges = [span]
    e = span
    while e > scale:
        e *= 0.5
        edges.append(e)
    edges.append(0.0)
    return np.array(sorted(edges))


def angular_integral(spec):
    """Evaluate I(K, beta) to spec.tol (absolute).

    Adaptive bisection seeded with layer-resolving panels; raises
    QuadratureError carrying the best estimate if the budget is exhausted.
    Returns (value, error_estimate).
    """
    K, beta = spec.K, spec.beta

    def f(t):
        return (1.0 + K * np.sin(t) ** 2) ** (-0.5 * beta)

    seed = layer_panels(K)
    return adaptive_integrate(f, 0.0, np.pi / 2, spec.tol, budget=spec.budget,
                              seed_edges=seed)


def angular_bound_ratio(spec, delta=None):
    """Ratio of I(K, beta) to its decay envelope.

    envelope = min(1, K^{-delta/2}) for beta = 1 (requires 0 <= delta < 1)
    and min(1, K^{-1/2}) for beta > 1.  Scanning the ratio over K estimates
    the sharp constant in the envelope; the ratio at K = 0 is pi/2.
    """
    if spec.beta == 1.0:
        if delta is None or not (0 <= delta < 1):
            raise ValueError("beta = 1 requires an exponent 0 <= delta < 1")
        expo = 0.5 * delta
    else:
        expo = 0.5
    value, _ = angular_integral(spec)
    envelope = min(1.0, spec.K ** (-expo)) if spec.K > 0 else 1.0
    return value / envelope


def k_modulus(r, rho, zeta):
    """K = 4 r rho / ((r - rho)^2 + zeta^2); inf on the diagonal."""
    d2 = (r - rho) ** 2 + zeta ** 2
    with np.errstate(divide="ignore"):
        return np.where(d2 > 0, 4.0 * r * rho / np.where(d2 > 0, d2, 1.0), np.inf)


def kernel_triple(r, rho, zeta, tol=1e-12):
    """G1, G2, G3 at a single point, each to absolute tolerance `tol`.

    The diagonal point (rho = r, zeta = 0) is a non-integrable singularity
    of the kernels themselves and is rejected.
    """
    d2 = (r - rho) ** 2 + zeta ** 2
    if d2 <= 0.0:
        raise ValueError("kernel singular at the diagonal point rho=r, zeta=0")
    if r < 0 or rho < 0:
        raise ValueError("radii must be nonnegative")
    K = 4.0 * r * rho / d2

    four = _reduced_moments_scalar(r, rho, zeta, K, tol)
    (j0, e0), (j1, e1), (j2, e2) = four
    g1 = (zeta / np.pi) * j1
    g2 = -(rho * j0 - r * j1) / np.pi
    g3 = -(rho * j1 - r * j2) / np.pi
    return KernelTriple(
        gamma1=g1, gamma2=g2, gamma3=g3,
        err1=abs(zeta) / np.pi * e1,
        err2=(rho * e0 + r * e1) / np.pi,
        err3=(rho * e1 + r * e2) / np.pi,
    )


def _reduced_moments_scalar(r, rho, zeta, K, tol):
    """Adaptive J_m = int_0^{pi/2} cos(2t)^m / D(2t)^{3/2} dt for m = 0, 1, 2.

    For K > SUBSTITUTION_K the substitution u = sin(t) is applied first so
    the boundary layer becomes an algebraic feature at u = 0.
    """
    D0 = (r - rho) ** 2 + zeta ** 2
    results = []
    if K <= SUBSTITUTION_K:
        seed = layer_panels(K)
        for m in (0, 1, 2):
            def f(t, m=m):
                den = (D0 + 4.0 * r * rho * np.sin(t) ** 2) ** 1.5
                return np.cos(2 * t) ** m / den
            results.append(adaptive_integrate(f, 0.0, np.pi / 2, tol, seed_edges=seed))
    else:
        # t = arcsin(u): dt = du / sqrt(1 - u^2), cos 2t = 1 - 2 u^2
        seed = layer_panels(K, span=1.0)
        for m in (0, 1, 2):
            def f(u, m=m):
                u2 = u * u
                den = (D0 + 4.0 * r * rho * u2) ** 1.5
                return (1.0 - 2.0 * u2) ** m / (den * np.sqrt(1.0 - u2))
            results.append(adaptive_integrate(f, 0.0, 1.0 - 1e-12, tol, seed_edges=seed))
    return results


@dataclass
class KernelValues:
    """Batched kernel values with per-point absolute error estimates.

    g_swirl is the kernel pairing the axial vorticity in the swirl
    reconstruction, (1/4pi) int (r - rho cos p)/D^{3/2} dp; by the symmetry
    of D it equals -G2(rho, r, zeta) and shares the reduced moments.
    g1_over_zeta = G1 / zeta stays finite through zeta = 0 (G1 is odd in
    zeta); envelope-ratio scans use it to evaluate the zeta -> 0 limit.
    """
    g1: np.ndarray
    g2: np.ndarray
    g3: np.ndarray
    g_swirl: np.ndarray
    g1_over_zeta: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    e_swirl: np.ndarray


def kernel_batch(r, rho, zeta, n_nodes=16, n_err=8, deepen=0,
                 with_errors=True):
    """Vectorized kernel evaluation over source-point arrays for one field
    radius r.

    Uses a single layer-graded panel mesh sized for the worst K in the batch
    plus an embedded lower-order rule for per-point error estimates (skipped
    when `with_errors` is false; callers with their own error control, like
    the reconstruction meshes, avoid the second pass).  This is the
    workhorse for grid scans and half-plane reconstruction; its agreement
    with the adaptive `kernel_triple` path is asserted in tests.
    """
    rho, zeta = np.broadcast_arrays(np.asarray(rho, dtype=float),
                                    np.asarray(zeta, dtype=float))
    D = (r - rho) ** 2 + zeta ** 2
    if np.any(D <= 0):
        raise ValueError("kernel_batch received a diagonal point")
    K_max = float(np.max(4.0 * r * rho / D))
    edges = layer_panels(K_max, deepen=deepen)

    shape = rho.shape
    rho = rho.ravel()
    zeta = zeta.ravel()
    D = D.ravel()
    out = [np.empty(rho.size) for _ in range(9)]
    # chunk so the (points, nodes) integrand matrix stays modest
    n_phi = (len(edges) - 1) * n_nodes
    chunk = max(1, int(4e6 / max(n_phi, 1)))
    for lo in range(0, rho.size, chunk):
        sl = slice(lo, min(lo + chunk, rho.size))
        j0, j1, j2 = _chunk_moments(r, rho[sl], D[sl], edges, n_nodes)
        z = zeta[sl]
        p = rho[sl]
        out[0][sl] = (z / np.pi) * j1
        out[1][sl] = -(p * j0 - r * j1) / np.pi
        out[2][sl] = -(p * j1 - r * j2) / np.pi
        out[3][sl] = (r * j0 - p * j1) / np.pi
        out[4][sl] = j1 / np.pi
        if with_errors:
            k0, k1, k2 = _chunk_moments(r, rho[sl], D[sl], edges, n_err)
            d0, d1, d2 = np.abs(j0 - k0), np.abs(j1 - k1), np.abs(j2 - k2)
            out[5][sl] = np.abs(z) / np.pi * d1
            out[6][sl] = (p * d0 + r * d1) / np.pi
            out[7][sl] = (p * d1 + r * d2) / np.pi
            out[8][sl] = (r * d0 + p * d1) / np.pi
        else:
            out[5][sl] = out[6][sl] = out[7][sl] = out[8][sl] = 0.0
    a = [o.reshape(shape) for o in out]
    return KernelValues(g1=a[0], g2=a[1], g3=a[2], g_swirl=a[3],
                        g1_over_zeta=a[4], e1=a[5], e2=a[6], e3=a[7],
                        e_swirl=a[8])


def _chunk_moments(r, rho, D, edges, n):
    t, wt = panel_nodes(edges, n)
    s2 = np.sin(t) ** 2
    c2 = np.cos(2 * t)
    inv = (D[:, None] + (4.0 * r) * rho[:, None] * s2[None, :]) ** -1.5
    j0 = inv @ wt
    j1 = inv @ (wt * c2)
    j2 = inv @ (wt * c2 * c2)
    return j0, j1, j2


def swirl_source_kernel(r, rho, zeta, tol=1e-12):
    """Kernel pairing the axial vorticity component in swirl reconstruction.

    Direct evaluation of the cross product in the Biot-Savart integral gives

        M(r, rho, zeta) = (1/4pi) int_0^{2pi} (r - rho cos p) / D(p)^{3/2} dp

    for the w_k factor of u_theta, i.e. M(r, rho, zeta) = -G2(rho, r, zeta).
    The round-trip identity on pure-swirl fields holds with M and fails with
    G3; see the package notes on the swirl representation.
    """
    kt = kernel_triple(rho, r, zeta, tol=tol)
    return -kt.gamma2, kt.err2
