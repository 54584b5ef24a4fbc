"""Log-weighted Holder seminorm estimation on sampled functions.

Estimates are sups over sampled point pairs, hence certified lower bounds
only.  Pair gaps are stratified over dyadic bands so logarithmic blow-up
near zero gap is visible, and each band carries a few deterministic pairs
anchored at domain extremes (that is where witnesses of the model functions
live).  All sampling is driven by an explicit seed.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import TWO_PI


class SamplingError(ValueError):
    pass


def log_holder_weight(h, alpha, nu):
    """The weight h^alpha |ln h|^nu for gaps h in (0, 1)."""
    h = np.asarray(h, dtype=float)
    if np.any(h <= 0.0) or np.any(h >= 1.0):
        raise SamplingError("gap must lie in (0, 1)")
    return h ** alpha * np.abs(np.log(h)) ** nu


# ---------------------------------------------------------------------------
# pair-sampling domains

class Interval:
    """Closed real interval [a, b] embedded in the complex plane."""

    dim = 1

    def __init__(self, a, b):
        if not b > a:
            raise SamplingError("need b > a")
        self.a = float(a)
        self.b = float(b)

    def pair_batch(self, rng, count, lo, hi):
        hi = min(hi, self.b - self.a)
        if hi <= lo:
            return (np.empty((0, 1), dtype=complex),) * 2
        mag = rng.uniform(lo, hi, count)
        w = rng.uniform(self.a, self.b - mag)
        return w.astype(complex)[:, None], mag.astype(complex)[:, None]

    def anchor_pairs(self, h):
        if h > self.b - self.a:
            return (np.empty((0, 1), dtype=complex),) * 2
        w = np.array([self.a, self.b - h], dtype=complex)
        hh = np.array([h, h], dtype=complex)
        return w[:, None], hh[:, None]

    def freeze_grid(self, k):
        return np.linspace(self.a, self.b, k).astype(complex)

    def sup_grid(self, k):
        return self.freeze_grid(k)


class DiscRegion:
    """Open disc; pairs are drawn with both endpoints inside."""

    dim = 1

    def __init__(self, center=0j, radius=1.0):
        self.center = complex(center)
        self.radius = float(radius)

    def pair_batch(self, rng, count, lo, hi):
        hi = min(hi, self.radius)
        if hi <= lo:
            return (np.empty((0, 1), dtype=complex),) * 2
        mag = rng.uniform(lo, hi, count)
        r = (self.radius - mag) * np.sqrt(rng.uniform(0.0, 1.0, count))
        w = self.center + r * np.exp(1j * rng.uniform(0.0, TWO_PI, count))
        h = mag * np.exp(1j * rng.uniform(0.0, TWO_PI, count))
        return w[:, None], h[:, None]

    def anchor_pairs(self, h):
        if h >= self.radius:
            return (np.empty((0, 1), dtype=complex),) * 2
        psi = np.arange(4) * (math.pi / 2.0)
        w = self.center + (self.radius - 1.001 * h) * np.exp(1j * psi)
        hh = -h * np.exp(1j * psi)
        return w[:, None], hh[:, None]

    def freeze_grid(self, k):
        r = np.sqrt(np.linspace(0.04, 0.81, k))
        th = np.linspace(0.0, TWO_PI, k, endpoint=False)
        return (self.center + self.radius * r * np.exp(1j * th)).astype(complex)

    def sup_grid(self, k):
        return self.freeze_grid(k)


class BoundaryCurve:
    """Points on a contour; the gap is the ambient (chordal) distance."""

    dim = 1

    def __init__(self, contour):
        self.contour = contour

    def pair_batch(self, rng, count, lo, hi):
        s = rng.uniform(0.0, TWO_PI, count)
        speed = np.abs(np.asarray(self.contour.derivative(s), dtype=complex))
        ds = rng.uniform(lo, hi, count) / speed * rng.choice([-1.0, 1.0], count)
        w = np.asarray(self.contour.point(s), dtype=complex)
        w2 = np.asarray(self.contour.point(s + ds), dtype=complex)
        h = w2 - w
        keep = np.abs(h) > 0
        return w[keep][:, None], h[keep][:, None]

    def anchor_pairs(self, h):
        s = np.array([0.0, math.pi / 2.0, math.pi, 3.0 * math.pi / 2.0])
        speed = np.abs(np.asarray(self.contour.derivative(s), dtype=complex))
        w = np.asarray(self.contour.point(s), dtype=complex)
        w2 = np.asarray(self.contour.point(s + h / speed), dtype=complex)
        hh = w2 - w
        keep = np.abs(hh) > 0
        return w[keep][:, None], hh[keep][:, None]

    def freeze_grid(self, k):
        s = np.arange(k) * (TWO_PI / k)
        return np.asarray(self.contour.point(s), dtype=complex)

    def sup_grid(self, k):
        return self.freeze_grid(k)


class ProductPairs:
    """Pairs in a two-factor product; the gap is the Euclidean norm of the
    pair of slot increments (the metric the recombination proof uses)."""

    dim = 2

    def __init__(self, first, second):
        self.first = first
        self.second = second

    def pair_batch(self, rng, count, lo, hi):
        mag = rng.uniform(lo, hi, count)
        phi = rng.uniform(0.0, math.pi / 2.0, count)
        w1, h1 = self._slot_with_mag(self.first, rng, mag * np.cos(phi))
        w2, h2 = self._slot_with_mag(self.second, rng, mag * np.sin(phi))
        return np.hstack([w1, w2]), np.hstack([h1, h2])

    @staticmethod
    def _slot_with_mag(dom, rng, mags):
        ws = np.empty((len(mags), 1), dtype=complex)
        hs = np.empty((len(mags), 1), dtype=complex)
        for i, m in enumerate(mags):
            if m <= 0.0:
                g = dom.freeze_grid(5)
                ws[i, 0] = g[int(rng.integers(len(g)))]
                hs[i, 0] = 0j
                continue
            w, h = dom.pair_batch(rng, 1, m * (1.0 - 1e-9), m)
            while len(w) == 0:
                w, h = dom.pair_batch(rng, 1, m * 0.5, m)
            ws[i, 0] = w[0, 0]
            hs[i, 0] = h[0, 0]
        return ws, hs

    def anchor_pairs(self, h):
        ws, hs = [], []
        w1, h1 = self.first.anchor_pairs(h)
        for i in range(len(w1)):
            g = self.second.freeze_grid(3)
            for x2 in g:
                ws.append([w1[i, 0], x2])
                hs.append([h1[i, 0], 0j])
        w2, h2 = self.second.anchor_pairs(h)
        for i in range(len(w2)):
            g = self.first.freeze_grid(3)
            for x1 in g:
                ws.append([x1, w2[i, 0]])
                hs.append([0j, h2[i, 0]])
        if not ws:
            return (np.empty((0, 2), dtype=complex),) * 2
        return np.array(ws, dtype=complex), np.array(hs, dtype=complex)

    def freeze_grid(self, k):
        raise SamplingError("freeze_grid is per-slot for products")

    def sup_grid(self, k):
        g1 = self.first.sup_grid(k)
        g2 = self.second.sup_grid(k)
        a, b = np.meshgrid(g1, g2, indexing="ij")
        return np.stack([a.ravel(), b.ravel()], axis=1)


# ---------------------------------------------------------------------------
# estimators

@dataclass
class SeminormEstimate:
    """A sampled lower bound for the log-weighted Holder seminorm."""

    value: float
    witness: tuple
    alpha: float
    nu: float
    pair_count: int
    h_cap: float
    band_table: list = field(default_factory=list)

    def to_json_dict(self):
        def cx(v):
            return [complex(v).real, complex(v).imag]
        w0, w1 = self.witness
        return {"value": self.value,
                "witness": [[cx(v) for v in w0], [cx(v) for v in w1]],
                "alpha": self.alpha, "nu": self.nu,
                "pair_count": self.pair_count, "h_cap": self.h_cap,
                "bands": [[int(j), hm, q] for j, hm, q in self.band_table]}

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)


def _evaluate_pairs(f, W, W1):
    args0 = [W[:, i] for i in range(W.shape[1])]
    args1 = [W1[:, i] for i in range(W.shape[1])]
    v0 = np.asarray(f(*args0), dtype=complex)
    v1 = np.asarray(f(*args1), dtype=complex)
    return np.abs(v1 - v0)


def seminorm_estimate(f, domain, alpha, nu, budget, *, h_cap=0.5, bands=20, seed=0):
    """Stratified max of |f(w+h) - f(w)| / (|h|^alpha |ln |h||^nu).

    The budget is split over dyadic gap bands [h_cap 2^-j, h_cap 2^{1-j}],
    j = 1..bands; the estimate is a running max, so it is monotone
    nondecreasing in the budget for a fixed seed.
    """
    if budget < 1:
        raise SamplingError("empty sample set")
    if not (0.0 < h_cap < 1.0):
        raise SamplingError("h_cap must lie in (0, 1)")
    best = -1.0
    witness = None
    total = 0
    band_table = []
    per_band = max(1, budget // bands)
    for j in range(1, bands + 1):
        rng = np.random.default_rng((seed, j))
        lo, hi = h_cap * 2.0 ** (-j), h_cap * 2.0 ** (1 - j)
        Wa, Ha = domain.anchor_pairs(hi)
        Wr, Hr = domain.pair_batch(rng, per_band, lo, hi)
        W = np.vstack([Wa, Wr])
        H = np.vstack([Ha, Hr])
        if len(W) == 0:
            continue
        # the realized pair is (W, W1); the gap is recomputed from it so the
        # weight matches the points the difference actually sees
        W1 = W + H
        H = W1 - W
        gaps = np.sqrt((np.abs(H) ** 2).sum(axis=1))
        keep = (gaps > 0) & (gaps <= h_cap * (1 + 1e-12))
        W, W1, gaps = W[keep], W1[keep], gaps[keep]
        if len(W) == 0:
            continue
        diffs = _evaluate_pairs(f, W, W1)
        q = diffs / (gaps ** alpha * np.abs(np.log(gaps)) ** nu)
        i = int(np.argmax(q))
        band_table.append((j, float(np.exp(np.log(lo * hi) / 2.0)), float(q[i])))
        total += len(W)
        if q[i] > best:
            best = float(q[i])
            witness = (tuple(W[i]), tuple(W1[i]))
    if witness is None:
        raise SamplingError("no admissible pairs were sampled")
    return SeminormEstimate(max(best, 0.0), witness, alpha, nu, total, h_cap, band_table)


@dataclass
class SliceSeminorms:
    first_part: float     # sup over frozen second slot of the first-slot seminorm
    second_part: float    # sup over frozen first slot of the second-slot seminorm
    first_witness: tuple = ()
    second_witness: tuple = ()


def slice_seminorms(f, dom1, dom2, alpha, nu, budget, *, freeze=7, seed=0, h_cap=0.5):
    """Per-slice seminorm estimates, maximized over a grid in the frozen slot."""
    best1, wit1 = 0.0, ()
    for lam in dom2.freeze_grid(freeze):
        est = seminorm_estimate(lambda z, _l=lam: f(z, _l), dom1, alpha, nu,
                                budget, h_cap=h_cap, bands=12, seed=seed)
        if est.value > best1:
            best1, wit1 = est.value, (est.witness, lam)
    best2, wit2 = 0.0, ()
    for z in dom1.freeze_grid(freeze):
        est = seminorm_estimate(lambda lam, _z=z: f(_z, lam), dom2, alpha, nu,
                                budget, h_cap=h_cap, bands=12, seed=seed + 1)
        if est.value > best2:
            best2, wit2 = est.value, (est.witness, z)
    return SliceSeminorms(best1, best2, wit1, wit2)


@dataclass
class RecombinationReport:
    lhs: float
    rhs: float
    r0: float
    violation: bool


def recombination_check(f, dom1, dom2, alpha, nu, budget, *, seed=0):
    """Empirical check of the slice-recombination inequality.

    Both sides are restricted to gaps below r0 = min{e^{-nu/alpha}, 1/2},
    where the pair-splitting step of the proof holds with constant 1.
    """
    r0 = min(math.exp(-nu / alpha), 0.5)
    prod = ProductPairs(dom1, dom2)
    lhs = seminorm_estimate(f, prod, alpha, nu, budget, h_cap=r0, seed=seed).value
    sl = slice_seminorms(f, dom1, dom2, alpha, nu, budget, seed=seed, h_cap=r0)
    pts = prod.sup_grid(9)
    sup_c = float(np.max(np.abs(np.asarray(f(pts[:, 0], pts[:, 1]), dtype=complex))))
    rhs = sup_c + sl.first_part + sl.second_part
    return RecombinationReport(lhs, rhs, r0, bool(lhs > rhs + 1e-12))


def holder_extension(points, values, M, alpha):
    """Infimal-convolution extension of data g on a finite set E:

        w  ->  min_{eta in E} ( g(eta) + M |w - eta|^alpha ).

    The result is (M, alpha)-Holder on the whole space and agrees with g on E
    whenever M dominates the Holder constant of g on E.  Values must be real.
    """
    pts = np.asarray(points, dtype=complex)
    if pts.ndim == 1:
        pts = pts[:, None]
    vals = np.asarray(values, dtype=float)
    if len(pts) == 0:
        raise SamplingError("empty extension data set")
    if len(vals) != len(pts):
        raise SamplingError("values/points length mismatch")

    def extension(*slots):
        slots = [np.asarray(s, dtype=complex) for s in slots]
        if len(slots) != pts.shape[1]:
            raise SamplingError("slot count mismatch with extension data")
        bshape = np.broadcast(*slots).shape
        flat = np.stack([np.broadcast_to(s, bshape).ravel() for s in slots], axis=1)
        out = np.empty(flat.shape[0], dtype=float)
        chunk = max(1, 8_000_000 // max(1, len(pts)))
        for i0 in range(0, flat.shape[0], chunk):
            i1 = min(i0 + chunk, flat.shape[0])
            d2 = np.zeros((i1 - i0, len(pts)))
            for c in range(pts.shape[1]):
                d2 += np.abs(flat[i0:i1, c, None] - pts[None, :, c]) ** 2
            out[i0:i1] = (vals[None, :] + M * d2 ** (alpha / 2.0)).min(axis=1)
        return out.reshape(bshape) if bshape else float(out[0])

    return extension
