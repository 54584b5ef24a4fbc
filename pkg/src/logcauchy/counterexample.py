"""The sharpness construction: a piecewise Holder boundary function whose
slice Cauchy integral at the point 1 picks up exactly one logarithm in the
parameter.

The value 2*pi*i*S(1, lam) splits into a smooth correction (the cotangent
remainder), a closed-form middle integral carrying the |lam|^alpha |ln lam|
growth, and a bounded imaginary mass term.  The divergence experiment
measures the middle-carrying component: the full complex value hides the
log growth behind the bounded i*pi*|lam|^alpha mass term at desk scale.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .geometry import TWO_PI

LN2 = math.log(2.0)


@dataclass(frozen=True)
class TumanovParams:
    alpha: float = 0.5
    lambdas: tuple = field(default_factory=lambda: tuple(2.0 ** -j for j in range(2, 13)))
    theta_nodes: int = 2048

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError("alpha must lie in (0, 1)")
        if any(abs(l) >= 1.0 for l in self.lambdas):
            raise ValueError("all |lambda| must be < 1")


def tumanov_boundary(theta, lam, alpha):
    """Piecewise boundary data on [-pi, pi] for parameter lam in the unit disc.

    |lam|^a on [-pi, -sqrt|lam|], |theta|^{2a} on [-sqrt|lam|, 0], theta^a on
    [0, |lam|], |lam|^a on [|lam|, pi].  Only |lam| enters.  The middle-left
    power is read as |theta|^{2a}, forced by real-valuedness and continuity
    at the junction.
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < -math.pi - 1e-12) or np.any(theta > math.pi + 1e-12):
        raise ValueError("theta must lie in [-pi, pi]")
    r = abs(lam)
    if r == 0.0:
        return np.zeros_like(theta)
    root = math.sqrt(r)
    out = np.empty_like(theta)
    left = theta <= -root
    midl = (~left) & (theta <= 0.0)
    midr = (theta > 0.0) & (theta <= r)
    right = theta > r
    out[left] = r ** alpha
    out[midl] = np.abs(theta[midl]) ** (2.0 * alpha)
    out[midr] = theta[midr] ** alpha
    out[right] = r ** alpha
    return out


def boundary_handle(lam, alpha):
    """The same data as a function of the boundary point zeta = e^{i theta}."""
    def f(zeta):
        return tumanov_boundary(np.angle(np.asarray(zeta, dtype=complex)), lam, alpha)
    return f


def tumanov_middle_closed_form(lam, alpha):
    """Closed form of int_{-pi}^{pi} f(e^{i theta}, lam)/theta dtheta:
    |lam|^a/(2a) + (1/2)|lam|^a |ln |lam||."""
    r = abs(lam)
    if r == 0.0:
        warnings.warn("middle integral evaluated at lambda = 0; returning the limit 0")
        return 0.0
    return r ** alpha / (2.0 * alpha) + 0.5 * r ** alpha * abs(math.log(r))


def tumanov_middle_quadrature(lam, alpha):
    """Adaptive quadrature of int f/theta dtheta over the four smooth pieces."""
    r = abs(lam)
    root = math.sqrt(r)
    f = lambda th: tumanov_boundary(np.array([th]), lam, alpha)[0]
    total = 0.0
    total += quad(lambda th: f(th) / th, -math.pi, -root, limit=200)[0]
    total += quad(lambda th: f(th) / th, -root, 0.0, limit=200)[0]
    total += quad(lambda th: f(th) / th, 0.0, r, limit=200, points=[r / 2])[0]
    total += quad(lambda th: f(th) / th, r, math.pi, limit=200)[0]
    return total


def _cot_correction(theta):
    """cot(theta/2) - 2/theta, extended continuously by 0 at theta = 0."""
    theta = np.asarray(theta, dtype=float)
    out = np.empty_like(theta)
    small = np.abs(theta) < 1e-4
    ts = theta[small]
    out[small] = -ts / 6.0 - ts ** 3 / 360.0
    tb = theta[~small]
    out[~small] = 1.0 / np.tan(tb / 2.0) - 2.0 / tb
    return out


def tumanov_mass_quadrature(lam, alpha):
    """int_{-pi}^{pi} f(e^{i theta}, lam) dtheta by piecewise quadrature."""
    r = abs(lam)
    root = math.sqrt(r)
    f = lambda th: tumanov_boundary(np.array([th]), lam, alpha)[0]
    return (quad(f, -math.pi, -root, limit=200)[0]
            + quad(f, -root, 0.0, limit=200)[0]
            + quad(f, 0.0, r, limit=200)[0]
            + quad(f, r, math.pi, limit=200)[0])


def tumanov_mass_closed_form(lam, alpha):
    """Piecewise antiderivatives for the mass integral int f dtheta."""
    r = abs(lam)
    if r == 0.0:
        return 0.0
    root = math.sqrt(r)
    left_flat = r ** alpha * (math.pi - root)
    mid_left = root ** (2.0 * alpha + 1.0) / (2.0 * alpha + 1.0)
    mid_right = r ** (alpha + 1.0) / (alpha + 1.0)
    right_flat = r ** alpha * (math.pi - r)
    return left_flat + mid_left + mid_right + right_flat


def tumanov_S_components(lam, alpha):
    """The three parts of 2*pi*i*S(1, lam): cotangent correction, closed-form
    middle integral, and the mass integral (entering with weight i/2)."""
    r = abs(lam)
    if r == 0.0:
        return 0.0, 0.0, 0.0
    root = math.sqrt(r)
    f = lambda th: tumanov_boundary(np.array([th]), lam, alpha)[0]
    g = lambda th: f(th) * _cot_correction(np.array([th]))[0]
    corr = 0.5 * (quad(g, -math.pi, -root, limit=200)[0]
                  + quad(g, -root, 0.0, limit=200)[0]
                  + quad(g, 0.0, r, limit=200)[0]
                  + quad(g, r, math.pi, limit=200)[0])
    middle = tumanov_middle_closed_form(lam, alpha)
    mass = tumanov_mass_quadrature(lam, alpha)
    return corr, middle, mass


def tumanov_S_at_one(lam, alpha):
    """S f(1, lam) = [ (1/2) int f (cot(t/2) - 2/t) dt + middle closed form
    + (i/2) int f dt ] / (2 pi i).  Returns 0 at lam = 0 (the data vanishes)."""
    if abs(lam) == 0.0:
        return 0j
    corr, middle, mass = tumanov_S_components(lam, alpha)
    return complex((corr + middle + 0.5j * mass) / (2j * math.pi))


def singular_component(lam, alpha):
    """The log-carrying component of S(1, lam): -Im S = (correction + middle)/(2 pi).

    The real part of S carries only the bounded mass term and stays Holder;
    all divergence statements are measured on this component.
    """
    if abs(lam) == 0.0:
        return 0.0
    corr, middle, _ = tumanov_S_components(lam, alpha)
    return (corr + middle) / (2.0 * math.pi)


def remark_divergence_experiment(alpha, mus, J, *, j_min=2):
    """Dyadic divergence table for the parameter regularity of S(1, .).

    For j = j_min..J and each exponent mu, computes

        q_j(mu) = sigma(2^-j) / ( (2^-j)^alpha * (j ln 2)^mu )

    where sigma is the log-carrying component of S(1, lam) against the base
    value sigma(0) = 0; q_abs columns use the full complex |S| instead.  The
    q sequence increases without bound for mu < 1 and is bounded for mu = 1.
    """
    if J < 4:
        raise ValueError("J must be at least 4")
    mus = list(mus)
    rows = []
    for j in range(j_min, J + 1):
        lam = 2.0 ** -j
        s_val = tumanov_S_at_one(lam, alpha)
        sig = abs(s_val.imag)
        denom0 = lam ** alpha
        row = {"j": j, "lam": lam, "S_re": s_val.real, "S_im": s_val.imag}
        for mu in mus:
            w = denom0 * (j * LN2) ** mu
            row[f"q_mu{mu:g}"] = sig / w
            row[f"qabs_mu{mu:g}"] = abs(s_val) / w
        rows.append(row)
    return rows


def parameter_band_quotients(alpha, nu_weight, J, *, j_min=2):
    """Band-max Holder quotients of the singular component of S(1, .) over the
    dyadic lambda sequence (with the base point 0), binned by the rounded
    dyadic level of the pair gap.  Weight: h^alpha |ln h|^{nu_weight}."""
    lams = [0.0] + [2.0 ** -j for j in range(j_min, J + 1)]
    vals = {lam: singular_component(lam, alpha) for lam in lams}
    bands = {}
    for i, la in enumerate(lams):
        for lb in lams[i + 1:]:
            gap = abs(la - lb)
            if gap <= 0:
                continue
            lev = round(-math.log2(gap))
            q = abs(vals[la] - vals[lb]) / (gap ** alpha * abs(math.log(gap)) ** nu_weight)
            bands[lev] = max(bands.get(lev, 0.0), q)
    return dict(sorted(bands.items()))


def middle_coefficient_fit(alpha, js=range(4, 11)):
    """Recovers the coefficient of |lam|^a |ln lam| in S(1, lam) by a linear
    fit of the middle component (the two smooth terms subtracted) against
    the weight, over dyadic lam.  The target modulus is 1/(4 pi)."""
    xs, ys = [], []
    for j in js:
        lam = 2.0 ** -j
        corr, middle, mass = tumanov_S_components(lam, alpha)
        two_pi_i_S = corr + middle + 0.5j * mass
        cleaned = two_pi_i_S - corr - 0.5j * mass   # the middle term alone
        xs.append(lam ** alpha * abs(math.log(lam)))
        ys.append(cleaned.real)
    A = np.stack([np.asarray(xs), np.array([2.0 ** -j for j in js]) ** alpha], axis=1)
    coef, *_ = np.linalg.lstsq(A, np.asarray(ys), rcond=None)
    return abs(coef[0]) / (2.0 * math.pi)
