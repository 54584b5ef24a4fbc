"""Smooth Jordan-curve boundaries, product domains, and their geometric constants.

A contour is a 2*pi-periodic parametrization with derivative data and a fixed
node set.  Boundary systems collect pairwise-disjoint contours together with
the constants every estimate in this package leans on: the chord-arc constant
c0, the minimal arclength s0, the contour separation delta0 and the log-weight
cut-off h0.
"""

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping

import numpy as np

TWO_PI = 2.0 * math.pi


class GeometryError(ValueError):
    """Invalid geometric input (degenerate curve, point outside domain, ...)."""


# 16-point Gauss-Legendre rule on [0, 1]; used to accumulate arclength
# between parameter nodes, which is exact enough (~1e-15) for smooth curves.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def _segment_arclengths(derivative, s_edges):
    """Arclength of each parameter segment [s_i, s_{i+1}] by per-segment Gauss."""
    s_edges = np.asarray(s_edges, dtype=float)
    widths = np.diff(s_edges)
    pts = s_edges[:-1, None] + widths[:, None] * _GL_X[None, :]
    speed = np.abs(np.asarray(derivative(pts.ravel()), dtype=complex))
    speed = speed.reshape(pts.shape)
    return widths * (speed * _GL_W[None, :]).sum(axis=1)


@dataclass(frozen=True, eq=False)
class Contour:
    """Closed parametrized curve p(s), s in [0, 2*pi), with derivative data.

    Positive orientation means the bounded domain lies to the left while
    traversing.  Nodes are the n equispaced parameter values; arclength is
    accumulated numerically (the parametrization need not be arclength).
    """

    point: Callable
    derivative: Callable
    n: int
    spec: dict
    orientation: int = 1
    s: np.ndarray = field(init=False, repr=False)
    z: np.ndarray = field(init=False, repr=False)
    dz: np.ndarray = field(init=False, repr=False)
    cum_arc: np.ndarray = field(init=False, repr=False)
    diameter: float = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 8 or self.n % 2 != 0:
            raise GeometryError("node count must be even and at least 8")
        s = np.arange(self.n) * (TWO_PI / self.n)
        z = np.asarray(self.point(s), dtype=complex)
        dz = np.asarray(self.derivative(s), dtype=complex)
        if not (np.all(np.isfinite(z)) and np.all(np.isfinite(dz))):
            raise GeometryError("parametrization not finite at a node")
        speed = np.abs(dz)
        scale = float(np.max(speed))
        if scale == 0.0 or np.any(speed <= 1e-12 * scale):
            raise GeometryError("parametrization derivative vanishes at a node")
        edges = np.append(s, TWO_PI)
        seg = _segment_arclengths(self.derivative, edges)
        cum = np.concatenate(([0.0], np.cumsum(seg)))
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "dz", dz)
        object.__setattr__(self, "cum_arc", cum)
        object.__setattr__(self, "diameter", self._node_diameter(z))
        self._check_injective(z)

    @staticmethod
    def _node_diameter(z):
        m = len(z)
        step = max(1, m // 1024)
        zz = z[::step]
        d = np.abs(zz[:, None] - zz[None, :])
        return float(d.max())

    def _check_injective(self, z):
        # Probabilistic self-intersection test: no two non-adjacent nodes may
        # come closer than a fraction of the typical adjacent gap.
        m = len(z)
        step = max(1, m // 1024)
        zz = z[::step]
        k = len(zz)
        gaps = np.abs(np.roll(zz, -1) - zz)
        thresh = 0.25 * np.median(gaps)
        d = np.abs(zz[:, None] - zz[None, :])
        idx = np.arange(k)
        ring = np.minimum((idx[:, None] - idx[None, :]) % k,
                          (idx[None, :] - idx[:, None]) % k)
        bad = (d < thresh) & (ring > 1)
        if np.any(bad):
            raise GeometryError("contour appears to self-intersect")

    @property
    def arclength(self):
        return float(self.cum_arc[-1])

    @property
    def max_node_gap(self):
        """Largest arclength between adjacent nodes."""
        return float(np.max(np.diff(self.cum_arc)))

    def dense(self, factor):
        """Equispaced refinement of the node set by an integer factor."""
        m = self.n * int(factor)
        s = np.arange(m) * (TWO_PI / m)
        z = np.asarray(self.point(s), dtype=complex)
        dz = np.asarray(self.derivative(s), dtype=complex)
        return s, z, dz

    def nearest_node(self, t):
        i = int(np.argmin(np.abs(self.z - t)))
        return i, float(np.abs(self.z[i] - t))

    def nearest_point(self, w, refinements=6):
        """Parameter and location of the closest curve point to w.

        Dense sampling at 4x node resolution followed by local quadratic
        refinement of |p(s) - w|^2; smooth contours reach ~1e-10.
        """
        s, z, _ = self.dense(4)
        i = int(np.argmin(np.abs(z - w)))
        s0 = s[i]
        g = TWO_PI / len(s)
        for _ in range(refinements):
            trip = np.array([s0 - g, s0, s0 + g])
            d = np.abs(np.asarray(self.point(trip), dtype=complex) - w) ** 2
            denom = d[2] - 2.0 * d[1] + d[0]
            if denom > 0:
                s0 = s0 - 0.5 * g * (d[2] - d[0]) / denom
            g *= 0.25
        s0 = s0 % TWO_PI
        return s0, complex(self.point(np.array([s0]))[0])

    def distance_to(self, w):
        _, p = self.nearest_point(w)
        return abs(p - w)

    def winding_number(self, w):
        """Winding of the sampled curve around w (points off the curve only)."""
        _, z, _ = self.dense(4)
        rel = z - w
        ang = np.angle(np.roll(rel, -1) / rel)
        return int(round(float(ang.sum() / TWO_PI)))

    def to_json(self):
        return json.dumps(self.spec, sort_keys=True)


def make_circle(center, radius, n):
    """Positively oriented circle, p(s) = center + radius*e^{is}."""
    if radius <= 0:
        raise GeometryError("radius must be positive")
    center = complex(center)
    radius = float(radius)

    def point(s):
        return center + radius * np.exp(1j * np.asarray(s, dtype=float))

    def derivative(s):
        return 1j * radius * np.exp(1j * np.asarray(s, dtype=float))

    spec = {"kind": "circle", "center": [center.real, center.imag],
            "radius": radius, "n": int(n)}
    return Contour(point, derivative, int(n), spec)


def make_fourier_contour(coefficients: Mapping[int, complex], n):
    """Contour from a finite Fourier series p(s) = sum_k c_k e^{iks}.

    Raises if the derivative vanishes at a node or the sampled curve
    self-intersects (probabilistic check on pairwise node distances).
    """
    ks = np.array(sorted(int(k) for k in coefficients), dtype=float)
    cs = np.array([complex(coefficients[int(k)]) for k in ks])
    if len(ks) == 0:
        raise GeometryError("empty coefficient set")

    def point(s):
        s = np.asarray(s, dtype=float)
        return (cs[None, :] * np.exp(1j * np.outer(s.ravel(), ks))).sum(axis=1).reshape(s.shape)

    def derivative(s):
        s = np.asarray(s, dtype=float)
        return ((1j * ks * cs)[None, :] * np.exp(1j * np.outer(s.ravel(), ks))).sum(axis=1).reshape(s.shape)

    spec = {"kind": "fourier",
            "coefficients": {str(int(k)): [complex(coefficients[int(k)]).real,
                                           complex(coefficients[int(k)]).imag]
                             for k in ks},
            "n": int(n)}
    return Contour(point, derivative, int(n), spec)


def contour_from_json(text):
    spec = json.loads(text)
    if spec["kind"] == "circle":
        return make_circle(complex(*spec["center"]), spec["radius"], spec["n"])
    if spec["kind"] == "fourier":
        coeffs = {int(k): complex(v[0], v[1]) for k, v in spec["coefficients"].items()}
        return make_fourier_contour(coeffs, spec["n"])
    raise GeometryError(f"unknown contour kind {spec['kind']!r}")


def chord_arc_constant(contour, m):
    """Max over sampled point pairs of (shorter arc length)/(chord length).

    Monotone nondecreasing under grid doubling (the coarse pairs nest in the
    fine ones); always >= 1.
    """
    m = int(m)
    if m < contour.n:
        raise GeometryError("sampling density m must be at least the node count")
    s = np.arange(m) * (TWO_PI / m)
    z = np.asarray(contour.point(s), dtype=complex)
    edges = np.append(s, TWO_PI)
    cum = np.concatenate(([0.0], np.cumsum(_segment_arclengths(contour.derivative, edges))))
    total = cum[-1]
    arc = cum[:-1]
    best = 1.0
    tiny = 1e-13 * contour.diameter
    block = 512
    for i0 in range(0, m, block):
        i1 = min(i0 + block, m)
        darc = np.abs(arc[i0:i1, None] - arc[None, :])
        darc = np.minimum(darc, total - darc)
        chord = np.abs(z[i0:i1, None] - z[None, :])
        off = chord > 0
        if np.any((chord < tiny) & (darc > 100 * tiny)):
            raise GeometryError("degenerate contour: coincident samples far apart in arclength")
        ratio = np.where(off, darc, 0.0) / np.where(off, chord, 1.0)
        best = max(best, float(ratio.max()))
    return best


@dataclass(frozen=True)
class HolderIndex:
    """Indices (k, alpha, nu) of a log-weighted Holder space.

    alpha in (0, 1]; when alpha = 1 the space is trivial unless nu >= 0.
    """

    alpha: float
    nu: float = 0.0
    k: int = 0

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise GeometryError("alpha must lie in (0, 1]")
        if self.k < 0 or int(self.k) != self.k:
            raise GeometryError("k must be a nonnegative integer")
        if self.alpha == 1.0 and self.nu < 0.0:
            raise GeometryError("alpha = 1 requires nu >= 0 (space is trivial otherwise)")

    @property
    def h0(self):
        """Cut-off min{e^{-2nu/alpha}, e^{2nu/(1-alpha)}, 1/2} (middle term dropped at alpha=1)."""
        terms = [math.exp(-2.0 * self.nu / self.alpha), 0.5]
        if self.alpha < 1.0:
            terms.append(math.exp(2.0 * self.nu / (1.0 - self.alpha)))
        return min(terms)

    @property
    def r0(self):
        """Radius min{e^{-nu/alpha}, 1/2} on which s^alpha |ln s|^nu is nondecreasing."""
        return min(math.exp(-self.nu / self.alpha), 0.5)


class BoundarySystem:
    """A finite union of disjoint positively-oriented contours bounding a domain."""

    def __init__(self, contours):
        contours = list(contours)
        if not contours:
            raise GeometryError("boundary system needs at least one contour")
        self.contours = contours
        if len(contours) >= 2 and self.delta0 <= 0.0:
            raise GeometryError("contours are not pairwise disjoint")

    @classmethod
    def disc(cls, center=0j, radius=1.0, n=256):
        return cls([make_circle(center, radius, n)])

    @cached_property
    def s0(self):
        return min(c.arclength for c in self.contours)

    @cached_property
    def diameter(self):
        if len(self.contours) == 1:
            return self.contours[0].diameter
        pts = np.concatenate([c.z for c in self.contours])
        step = max(1, len(pts) // 2048)
        pts = pts[::step]
        return float(np.abs(pts[:, None] - pts[None, :]).max())

    @cached_property
    def delta0(self):
        """Min distance between distinct contours; the diameter when N = 1."""
        if len(self.contours) == 1:
            return self.contours[0].diameter
        best = math.inf
        dense = [c.dense(4)[1] for c in self.contours]
        for i in range(len(dense)):
            for j in range(i + 1, len(dense)):
                d = np.abs(dense[i][:, None] - dense[j][None, :]).min()
                best = min(best, float(d))
        return best

    @cached_property
    def c0(self):
        return max(chord_arc_constant(c, 2 * c.n) for c in self.contours)

    @property
    def max_node_gap(self):
        return max(c.max_node_gap for c in self.contours)

    def contains(self, z):
        """True when z lies in the bounded domain (total winding number 1)."""
        return sum(c.winding_number(z) for c in self.contours) == 1

    def distance_to_boundary(self, z):
        return min(c.distance_to(z) for c in self.contours)

    def nearest_boundary_point(self, z):
        best = None
        for c in self.contours:
            _, p = c.nearest_point(z)
            if best is None or abs(p - z) < abs(best - z):
                best = p
        return best

    def host_contour(self, t, tol_factor=1e-6):
        """Contour owning boundary node t, plus the node index."""
        best = (None, None, math.inf)
        for c in self.contours:
            i, d = c.nearest_node(t)
            if d < best[2]:
                best = (c, i, d)
        c, i, d = best
        if d > tol_factor * self.diameter:
            raise GeometryError("t is not a boundary node within tolerance")
        return c, i


def boundary_constants(bs: BoundarySystem, idx: HolderIndex):
    """The constants (s0, delta0, h0, c0) the boundary estimates depend on."""
    return {"s0": bs.s0, "delta0": bs.delta0, "h0": idx.h0, "c0": bs.c0}


def boundary_constants_json(bs, idx):
    return json.dumps(boundary_constants(bs, idx), sort_keys=True)


def nontangential_contains(t, z, bs: BoundarySystem):
    """Membership of z in the nontangential approach region of boundary point t.

    True iff |z - t| <= min{4 dist(z, boundary), delta0 / 4}.
    """
    if not bs.contains(z):
        raise GeometryError("z lies outside the domain")
    if bs.distance_to_boundary(t) > 1e-6 * bs.diameter:
        raise GeometryError("t is not on the boundary within tolerance")
    d = bs.distance_to_boundary(z)
    return abs(z - t) <= min(4.0 * d, bs.delta0 / 4.0)


@dataclass(frozen=True)
class Disc:
    """Round slice domain; the only factor type the area transform accepts."""

    center: complex = 0j
    radius: float = 1.0

    def __post_init__(self):
        if self.radius <= 0:
            raise GeometryError("radius must be positive")

    def boundary_contour(self, n):
        return make_circle(self.center, self.radius, n)

    def boundary_system(self, n):
        return BoundarySystem([self.boundary_contour(n)])

    def contains(self, z, margin=0.0):
        return bool(np.all(np.abs(np.asarray(z) - self.center) < self.radius - margin))

    def distance_to_boundary(self, z):
        return self.radius - abs(z - self.center)


@dataclass(frozen=True, eq=False)
class ProductDomain:
    """Cartesian product of slice domains with per-slice sample grids."""

    factors: tuple
    interior_grids: tuple
    boundary_grids: tuple
    boundary_contours: tuple = ()

    def __post_init__(self):
        if len(self.factors) < 1:
            raise GeometryError("a product domain needs at least one factor")
        if not (len(self.factors) == len(self.interior_grids) == len(self.boundary_grids)):
            raise GeometryError("factor/grid count mismatch")
        for f, g in zip(self.factors, self.interior_grids):
            if isinstance(f, Disc) and not f.contains(np.asarray(g)):
                raise GeometryError("interior grid point escapes its slice domain")

    @property
    def nfactors(self):
        return len(self.factors)

    def contour(self, j):
        if not self.boundary_contours:
            raise GeometryError("product domain carries no boundary contours")
        return self.boundary_contours[j]

    def boundary_system(self, j):
        return BoundarySystem([self.contour(j)])

    @classmethod
    def of_discs(cls, discs, boundary_n=128, rings=4, rays=8, clearance=0.25):
        discs = tuple(discs)
        interior, boundary, contours = [], [], []
        for d in discs:
            rr = d.radius * (1.0 - clearance) * (np.arange(rings) + 1.0) / rings
            th = np.arange(rays) * (TWO_PI / rays)
            grid = (d.center + rr[:, None] * np.exp(1j * th[None, :])).ravel()
            interior.append(grid)
            c = d.boundary_contour(boundary_n)
            contours.append(c)
            boundary.append(c.z)
        return cls(discs, tuple(interior), tuple(boundary), tuple(contours))

    @classmethod
    def bidisc(cls, radius=1.0, **kw):
        return cls.of_discs((Disc(0j, radius), Disc(0j, radius)), **kw)
