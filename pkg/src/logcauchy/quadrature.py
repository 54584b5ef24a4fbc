"""Integration primitives: periodic-trapezoid contour integrals, principal-value
Cauchy integrals by singularity subtraction on a graded mesh, polar-desingularized
area integrals on discs, and log-weighted one-dimensional integrals.

The principal-value rule reparametrizes the contour so the singular node sits at
a seam where the mesh Jacobian vanishes to high order; the subtracted integrand
times the Jacobian then extends by zero across the singularity, and dyadic node
doubling drives the estimate to a caller tolerance.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .geometry import TWO_PI, BoundarySystem, Disc, GeometryError, HolderIndex

MAX_PV_NODES = 1 << 20


class QuadratureError(ValueError):
    """Bad quadrature input (non-finite integrand, point off-domain, ...)."""


class ToleranceError(RuntimeError):
    """Refinement cap reached before the requested tolerance was met."""


@dataclass
class QuadratureResult:
    value: complex
    node_count: int
    refinement_estimate: float

    def to_json_dict(self):
        return {"value": [self.value.real, self.value.imag],
                "node_count": self.node_count,
                "refinement_estimate": self.refinement_estimate}


def contour_integral(f, contour) -> QuadratureResult:
    """Trapezoid rule for \\int f(zeta) d\\zeta over a closed contour.

    Spectrally accurate for smooth periodic integrands.  The refinement
    estimate compares against the half-resolution node subset.
    """
    with np.errstate(all="ignore"):
        vals = np.asarray(f(contour.z), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise QuadratureError("integrand not finite at a contour node")
    terms = vals * contour.dz
    full = (TWO_PI / contour.n) * terms.sum()
    half = (2.0 * TWO_PI / contour.n) * terms[::2].sum()
    return QuadratureResult(complex(full), contour.n, float(abs(full - half)))


# ---------------------------------------------------------------------------
# graded-mesh machinery for the principal value

def _graded_map(sigma, p):
    """Kress-style mesh grading on [0, 2*pi]: w(0)=0, w(2pi)=2pi, w' vanishing
    to order p-1 at both ends.  Returns (w, w')."""
    sigma = np.asarray(sigma, dtype=float)

    def v(x):
        return (1.0 / p - 0.5) * ((math.pi - x) / math.pi) ** 3 \
            + (x - math.pi) / (p * math.pi) + 0.5

    def vp(x):
        return -(3.0 / math.pi) * (1.0 / p - 0.5) * ((math.pi - x) / math.pi) ** 2 \
            + 1.0 / (p * math.pi)

    a, b = v(sigma), v(TWO_PI - sigma)
    ap, bp = vp(sigma), -vp(TWO_PI - sigma)
    A, B = a ** p, b ** p
    Ap = p * a ** (p - 1) * ap
    Bp = p * b ** (p - 1) * bp
    w = TWO_PI * A / (A + B)
    wp = TWO_PI * (Ap * B - A * Bp) / (A + B) ** 2
    return w, wp


def _pv_singular_part(f, t, ft, contour, s0, n_sigma, p):
    """Graded-trapezoid value of (1/2pi i) int (f - f(t))/(zeta - t) dzeta over
    the contour hosting t."""
    k = np.arange(1, n_sigma)
    sigma = k * (TWO_PI / n_sigma)
    w, wp = _graded_map(sigma, p)
    ss = s0 + w
    zz = np.asarray(contour.point(ss), dtype=complex)
    dzz = np.asarray(contour.derivative(ss), dtype=complex)
    num = np.asarray(f(zz), dtype=complex) - ft
    d = zz - t
    # nodes graded so close to t that p(s) rounds onto it carry a vanishing
    # Jacobian weight; drop them instead of dividing by zero
    live = d != 0
    g = np.zeros_like(d)
    g[live] = num[live] * dzz[live] / d[live]
    return (TWO_PI / n_sigma) * (g * wp).sum() / (2j * math.pi)


def pv_cauchy(f, t, bs: BoundarySystem, *, tol=1e-10, start_nodes=512,
              max_nodes=MAX_PV_NODES, grading=6):
    """Principal value of (1/2pi i) int_{boundary} f(zeta)/(zeta - t) dzeta
    at a boundary node t, via singularity subtraction:

        (1/2pi i) int (f(zeta) - f(t))/(zeta - t) dzeta  +  f(t)/2.

    Hölder-continuous f suffices; the graded mesh clusters nodes dyadically
    near t and node counts double until the refinement estimate drops below
    tol (capped at 2^20 effective nodes).
    """
    host, idx = bs.host_contour(t)
    s_host = host.s[idx]
    ft = complex(np.asarray(f(np.array([t], dtype=complex)), dtype=complex)[0])

    fixed = 0j
    for c in bs.contours:
        if c is host:
            continue
        s, z, dz = c.dense(2)
        vals = np.asarray(f(z), dtype=complex) - ft
        fixed += (TWO_PI / len(s)) * (vals * dz / (z - t)).sum() / (2j * math.pi)

    n_sigma = max(start_nodes, host.n)
    prev = _pv_singular_part(f, t, ft, host, s_host, n_sigma, grading)
    while True:
        n_sigma *= 2
        cur = _pv_singular_part(f, t, ft, host, s_host, n_sigma, grading)
        if abs(cur - prev) <= tol or n_sigma >= max_nodes:
            break
        prev = cur
    return cur + fixed + ft / 2.0


def area_cauchy_rule(z, disc: Disc, n_theta=256, n_r=64):
    """Nodes and weights realizing the solid Cauchy transform at z as a
    weighted sum: T f(z) = sum_k w_k f(p_k).  Polar coordinates around z;
    the Jacobian cancels the 1/(zeta - z) kernel exactly."""
    d = z - disc.center
    if abs(d) >= disc.radius:
        raise QuadratureError("z must lie strictly inside the disc")
    theta = np.arange(n_theta) * (TWO_PI / n_theta)
    e = np.exp(1j * theta)
    b = (d * np.conj(e)).real
    rmax = -b + np.sqrt(b * b + disc.radius ** 2 - abs(d) ** 2)
    x, wx = np.polynomial.legendre.leggauss(n_r)
    x = 0.5 * (x + 1.0)
    wx = 0.5 * wx
    pts = z + (rmax[None, :] * x[:, None]) * e[None, :]
    wts = -(2.0 / n_theta) * (rmax[None, :] * wx[:, None]) * np.conj(e)[None, :]
    return pts.ravel(), wts.ravel()


def area_cauchy(f, z, disc: Disc, n_theta=256, n_r=64):
    """Solid Cauchy transform -(1/pi) int int_disc f(zeta)/(zeta-z) dA at an
    interior point z, in polar coordinates centered at z.

    The Jacobian cancels the kernel exactly, leaving the bounded integrand
    f(z + r e^{i theta}) e^{-i theta}; trapezoid in theta (periodic), Gauss-
    Legendre along each ray out to the circle.
    """
    pts, wts = area_cauchy_rule(z, disc, n_theta, n_r)
    vals = np.asarray(f(pts), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise QuadratureError("integrand not finite on the disc")
    return complex((wts * vals).sum())


def lemma_h0(alpha, nu):
    return HolderIndex(alpha=alpha, nu=nu).h0


def log_weight_integral(h, alpha, nu, mode, h0=None):
    """Log-weighted power integrals behind the calculus inequalities.

    mode="near_zero": int_0^h s^{alpha-1} |ln s|^nu ds
    mode="to_h0":     int_h^{h0} s^{alpha-2} |ln s|^nu ds

    Both are evaluated after the substitution s = e^{-u}, which turns them
    into smooth exponential-weight integrals handled by adaptive quadrature.
    """
    if h0 is None:
        h0 = lemma_h0(alpha, nu)
    if not (0.0 < h <= h0 * (1.0 + 1e-12)):
        raise QuadratureError("h must lie in (0, h0]")
    u_h = -math.log(h)
    if mode == "near_zero":
        val, _ = quad(lambda u: math.exp(-alpha * u) * u ** nu,
                      u_h, math.inf, epsabs=1e-14, epsrel=1e-12, limit=400)
        return val
    if mode == "to_h0":
        u_0 = -math.log(h0)
        if u_h <= u_0:
            return 0.0
        val, _ = quad(lambda u: math.exp((1.0 - alpha) * u) * u ** nu,
                      u_0, u_h, epsabs=1e-14, epsrel=1e-12, limit=400)
        return val
    raise QuadratureError(f"unknown mode {mode!r}")


def lemma_bound_near_zero(h, alpha, nu):
    """Proof-constant bound for the near-zero integral: (2/alpha, or 1/alpha when nu <= 0) h^a |ln h|^nu."""
    c = 2.0 / alpha if nu > 0 else 1.0 / alpha
    return c * h ** alpha * abs(math.log(h)) ** nu


def lemma_bound_to_h0(h, alpha, nu):
    """Proof-constant bound for the tail integral."""
    if alpha < 1.0:
        c = 1.0 / (1.0 - alpha) if nu >= 0 else 2.0 / (1.0 - alpha)
        return c * h ** (alpha - 1.0) * abs(math.log(h)) ** nu
    return abs(math.log(h)) ** (nu + 1.0) / (nu + 1.0)
