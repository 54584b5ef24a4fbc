"""The Cauchy-kernel operators: interior singular integral S, Sokhotski-Plemelj
boundary value Phi, the solid transform T on discs, and their slice-wise
versions acting on tensor-grid functions over product domains.

Interior evaluation close to the boundary dyadically refines the node set
until the kernel peak is resolved; boundary evaluation goes through the
principal value.  Grid functions store flat values in row-major tensor order;
anything off-grid goes through the closure fallback, never interpolation.
"""

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import TWO_PI, BoundarySystem, Disc, ProductDomain
from .quadrature import (MAX_PV_NODES, QuadratureError, ToleranceError,
                         area_cauchy_rule, pv_cauchy)


def _interior_sum(f, z, contours_dense, subtract_at=None, f_star=0j):
    total = 0j
    for s, zz, dzz in contours_dense:
        vals = np.asarray(f(zz), dtype=complex)
        if subtract_at is not None:
            vals = vals - f_star
        total += (TWO_PI / len(s)) * (vals * dzz / (zz - z)).sum() / (2j * math.pi)
    if subtract_at is not None:
        total += f_star
    return total


def cauchy_interior(f, z, bs: BoundarySystem, *, tol=1e-11, max_nodes=MAX_PV_NODES):
    """S f(z) = (1/2pi i) int_{boundary} f(zeta)/(zeta - z) dzeta, z interior.

    Near the boundary (dist < 10 node gaps) the density is recentered by
    subtracting f at the nearest boundary point, and nodes double dyadically
    until the value stabilizes below tol.
    """
    z = complex(z)
    if not bs.contains(z):
        raise QuadratureError("z must lie strictly inside the domain")
    d = bs.distance_to_boundary(z)
    near = d < 10.0 * bs.max_node_gap
    subtract_at = None
    f_star = 0j
    if near:
        subtract_at = bs.nearest_boundary_point(z)
        f_star = complex(np.asarray(f(np.array([subtract_at])), dtype=complex)[0])

    total_base = sum(c.n for c in bs.contours)
    k = 1
    dense = [c.dense(k) for c in bs.contours]
    prev = _interior_sum(f, z, dense, subtract_at, f_star)
    while True:
        k *= 2
        if total_base * k > max_nodes:
            if abs(d) < bs.max_node_gap / k * 10.0:
                raise ToleranceError("z too close to the boundary for the refinement cap")
            return prev
        dense = [c.dense(k) for c in bs.contours]
        cur = _interior_sum(f, z, dense, subtract_at, f_star)
        if abs(cur - prev) <= tol:
            return cur
        prev = cur


def plemelj_boundary(f, t, bs: BoundarySystem, *, tol=1e-10):
    """Boundary value Phi f(t) = PV S f(t) + f(t)/2, the nontangential interior
    limit of the Cauchy integral."""
    ft = complex(np.asarray(f(np.array([t], dtype=complex)), dtype=complex)[0])
    return pv_cauchy(f, t, bs, tol=tol) + ft / 2.0


# ---------------------------------------------------------------------------
# node-based kernel matrices (used when a grid function has no closure)

def _lagrange_zero_weights(offsets):
    offsets = np.asarray(offsets, dtype=float)
    w = np.empty(len(offsets))
    for a, ka in enumerate(offsets):
        others = np.delete(offsets, a)
        w[a] = np.prod((0.0 - others) / (ka - others))
    return w


def interior_kernel_matrix(contour, targets):
    """Matrix K with (S f)(targets) = K @ f(nodes) by the plain trapezoid rule."""
    tz = np.asarray(targets, dtype=complex)
    return (TWO_PI / contour.n) * contour.dz[None, :] / \
        (contour.z[None, :] - tz[:, None]) / (2j * math.pi)


def plemelj_kernel_matrix(contour):
    """Matrix realizing Phi on node values: punctured trapezoid for the
    subtracted kernel, with the singular node's limit filled by symmetric
    polynomial extrapolation from its neighbours."""
    n = contour.n
    z, dz = contour.z, contour.dz
    m = min(4, (n - 2) // 2)
    offs = np.array([k for k in range(-m, m + 1) if k != 0])
    cw = _lagrange_zero_weights(offs)
    K = np.zeros((n, n), dtype=complex)
    w = TWO_PI / n / (2j * math.pi)
    for a in range(n):
        diff = z - z[a]
        with np.errstate(divide="ignore", invalid="ignore"):
            col = w * dz / diff
        col[a] = 0.0
        gamma = col.copy()
        for k, c in zip(offs, cw):
            gamma[(a + k) % n] += c * col[(a + k) % n]
        K[a, :] = gamma
        K[a, a] = 1.0 - gamma.sum() + gamma[a]
    return K


# ---------------------------------------------------------------------------
# grid functions on product domains

@dataclass(eq=False)
class GridFunction:
    """Complex samples on a tensor-product grid, one grid per factor.

    roles[j] is "interior" or "boundary" and selects which per-factor grid
    the j-th tensor axis runs over.  values is flat, row-major.  fallback, if
    given, evaluates the underlying function at arbitrary points.
    """

    domain: ProductDomain
    roles: tuple
    values: np.ndarray
    fallback: object = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex).ravel()
        if len(self.roles) != self.domain.nfactors:
            raise ValueError("one role per factor required")
        if self.values.size != int(np.prod(self.shape)):
            raise ValueError("value count does not match the tensor grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")

    def grid(self, j):
        if self.roles[j] == "interior":
            return self.domain.interior_grids[j]
        if self.roles[j] == "boundary":
            return self.domain.boundary_grids[j]
        raise ValueError(f"unknown role {self.roles[j]!r}")

    @property
    def shape(self):
        return tuple(len(self.grid(j)) for j in range(self.domain.nfactors))

    def tensor(self):
        return self.values.reshape(self.shape)

    def evaluate(self, *slots):
        if self.fallback is None:
            raise ValueError("grid function has no closure fallback for off-grid points")
        return self.fallback(*slots)

    def to_json_dict(self):
        return {"shape": list(self.shape),
                "roles": list(self.roles),
                "values": [[v.real, v.imag] for v in self.values]}

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)

    def slice2d_csv_rows(self):
        """Rows (i, j, z1, z2, re, im) for two-factor grids."""
        if self.domain.nfactors != 2:
            raise ValueError("CSV slice export is for two-factor grids")
        g1, g2 = self.grid(0), self.grid(1)
        V = self.tensor()
        rows = []
        for i, a in enumerate(g1):
            for j, b in enumerate(g2):
                v = V[i, j]
                rows.append((i, j, a.real, a.imag, b.real, b.imag, v.real, v.imag))
        return rows


def grid_function_from_callable(domain, roles, func):
    grids = [domain.interior_grids[j] if r == "interior" else domain.boundary_grids[j]
             for j, r in enumerate(roles)]
    mesh = np.meshgrid(*grids, indexing="ij", sparse=True)
    vals = np.asarray(func(*mesh), dtype=complex)
    vals = np.broadcast_to(vals, tuple(len(g) for g in grids))
    return GridFunction(domain, tuple(roles), vals.ravel().copy(), fallback=func)


def _apply_along_axis(matrix, tensor, axis):
    moved = np.moveaxis(tensor, axis, -1)
    out = moved @ matrix.T
    return np.moveaxis(out, -1, axis)


def slice_S(f: GridFunction, j, target="interior", *, tol=1e-8):
    """Cauchy singular integral along factor j of a tensor-grid function.

    Factor j of f must be sampled on its boundary grid.  With target
    "interior" the result lives on factor j's interior grid; with "boundary"
    the Sokhotski-Plemelj value Phi is produced at the boundary nodes.  When
    f carries a closure the integrals are evaluated adaptively through it;
    otherwise fixed node-based kernel matrices are applied.
    """
    if f.roles[j] != "boundary":
        raise ValueError("factor j of f must be sampled on boundary nodes")
    dom = f.domain
    contour = dom.contour(j)
    out_roles = list(f.roles)
    out_roles[j] = target
    out_roles = tuple(out_roles)

    if f.fallback is None:
        if target == "interior":
            K = interior_kernel_matrix(contour, dom.interior_grids[j])
        elif target == "boundary":
            K = plemelj_kernel_matrix(contour)
        else:
            raise ValueError(f"unknown target {target!r}")
        out = _apply_along_axis(K, f.tensor(), j)
        return GridFunction(dom, out_roles, out.ravel())

    bs = dom.boundary_system(j)
    out_grid = dom.interior_grids[j] if target == "interior" else dom.boundary_grids[j]
    other_axes = [a for a in range(dom.nfactors) if a != j]
    other_grids = [f.grid(a) for a in other_axes]
    out_shape = [len(f.grid(a)) for a in range(dom.nfactors)]
    out_shape[j] = len(out_grid)
    out = np.empty(out_shape, dtype=complex)
    for combo in itertools.product(*(range(len(g)) for g in other_grids)):
        frozen = {a: other_grids[pos][combo[pos]] for pos, a in enumerate(other_axes)}

        def g(zeta, _frozen=frozen):
            args = [None] * dom.nfactors
            for a, v in _frozen.items():
                args[a] = np.full(np.shape(zeta), v, dtype=complex)
            args[j] = zeta
            return f.fallback(*args)

        for ti, tgt in enumerate(out_grid):
            if target == "interior":
                val = cauchy_interior(g, tgt, bs, tol=tol)
            else:
                val = plemelj_boundary(g, tgt, bs, tol=tol)
            idx = list(combo)
            idx.insert(other_axes.index(j) if j in other_axes else j, ti)
            full = [0] * dom.nfactors
            for pos, a in enumerate(other_axes):
                full[a] = combo[pos]
            full[j] = ti
            out[tuple(full)] = val
    return GridFunction(dom, out_roles, out.ravel())


def slice_T(f: GridFunction, j, *, n_theta=64, n_r=64):
    """Solid Cauchy transform along factor j (a disc) of a tensor-grid function.

    The polar nodes depend on each target point, so a closure fallback is
    required; the other factors are frozen at their grid nodes.
    """
    dom = f.domain
    if not isinstance(dom.factors[j], Disc):
        raise ValueError("factor j must be a disc for the area transform")
    if f.fallback is None:
        raise ValueError("slice_T needs a closure fallback for polar nodes")
    disc = dom.factors[j]
    out_grid = dom.interior_grids[j]
    other_axes = [a for a in range(dom.nfactors) if a != j]
    other_grids = [f.grid(a) for a in other_axes]
    other_shape = tuple(len(g) for g in other_grids)
    out_shape = [len(f.grid(a)) for a in range(dom.nfactors)]
    out_shape[j] = len(out_grid)
    out = np.empty(out_shape, dtype=complex)

    mesh = np.meshgrid(*other_grids, indexing="ij", sparse=False) if other_axes else []
    for ti, z in enumerate(out_grid):
        pts, wts = area_cauchy_rule(z, disc, n_theta, n_r)
        val = np.zeros(other_shape, dtype=complex)
        chunk = max(1, 2_000_000 // max(1, int(np.prod(other_shape))))
        for p0 in range(0, len(pts), chunk):
            p1 = min(p0 + chunk, len(pts))
            args = [None] * dom.nfactors
            for pos, a in enumerate(other_axes):
                args[a] = mesh[pos][..., None]
            args[j] = pts[None, p0:p1] if not other_axes else pts[(None,) * len(other_axes) + (slice(p0, p1),)]
            if not other_axes:
                args[j] = pts[p0:p1]
            vals = np.asarray(f.fallback(*args), dtype=complex)
            vals = np.broadcast_to(vals, other_shape + (p1 - p0,))
            val += (vals * wts[p0:p1]).sum(axis=-1)
        sel = [slice(None)] * dom.nfactors
        sel[j] = ti
        out[tuple(sel)] = val if other_axes else complex(val)
    roles = list(f.roles)
    roles[j] = "interior"
    return GridFunction(dom, tuple(roles), out.ravel())


# ---------------------------------------------------------------------------
# empirical operator-norm experiments

def nontangential_pairs(bs, rng, count, h0, s0, n_anchors=8):
    """Sampled (t, z) with z in the nontangential region of boundary node t and
    |z - t| <= min(h0, s0/2).  The t values cycle over a few fixed anchors so
    per-t boundary values can be reused."""
    from .geometry import nontangential_contains
    out = []
    cap = min(h0, s0 / 2.0)
    c = bs.contours[0]
    anchors = c.z[:: max(1, c.n // n_anchors)]
    tries = 0
    while len(out) < count and tries < 50 * count:
        tries += 1
        t = anchors[int(rng.integers(len(anchors)))]
        r = cap * 2.0 ** -rng.uniform(0.0, 8.0)
        # step inward: the domain lies to the left of the travel direction
        normal = 1j * c.dz[int(np.argmin(np.abs(c.z - t)))]
        normal /= abs(normal)
        tilt = rng.uniform(-0.2, 0.2)
        z = t + r * normal * np.exp(1j * tilt)
        try:
            if nontangential_contains(t, z, bs):
                out.append((complex(t), complex(z)))
        except Exception:
            continue
    return out


def boundary_approach_quotients(f, bs, idx, pairs, *, tol=1e-9):
    """Quotients |S f(z) - Phi f(t)| / (|z-t|^alpha |ln|z-t||^nu) over sampled
    nontangential pairs; bounded quotients are the empirical content of the
    boundary-approach estimate."""
    rows = []
    phi_cache = {}
    for t, z in pairs:
        key = complex(t)
        if key not in phi_cache:
            phi_cache[key] = plemelj_boundary(f, t, bs, tol=tol)
        sf = cauchy_interior(f, z, bs, tol=tol)
        gap = abs(z - t)
        q = abs(sf - phi_cache[key]) / (gap ** idx.alpha * abs(math.log(gap)) ** idx.nu)
        rows.append({"t": t, "z": z, "gap": gap, "quotient": q})
    return rows


def trig_polynomial_ratio_experiment(degrees, alpha, nu, *, n=256, budget=160,
                                     seed=0, radius=0.97):
    """Seminorm ratio of S f against f for random trigonometric boundary data.

    For each degree d, draws data f(zeta) = sum_{k<=d} a_k zeta^k + b_k
    conj(zeta)^k on the unit circle, estimates the interior (alpha, nu)
    seminorm of S f on a slightly shrunk disc against the boundary seminorm
    of f, and reports the ratio; boundedness across degrees is the empirical
    operator-norm statement.
    """
    from .geometry import make_circle
    from .holder import BoundaryCurve, DiscRegion, seminorm_estimate

    contour = make_circle(0j, 1.0, n)
    bs = BoundarySystem([contour])
    results = []
    for deg in degrees:
        rng = np.random.default_rng((seed, deg))
        ks = np.arange(1, deg + 1)
        a = (rng.normal(size=deg) + 1j * rng.normal(size=deg)) / np.sqrt(ks)
        b = (rng.normal(size=deg) + 1j * rng.normal(size=deg)) / np.sqrt(ks)

        def f(zeta):
            zeta = np.asarray(zeta, dtype=complex)
            pw = zeta[..., None] ** ks
            return (pw * a).sum(axis=-1) + (np.conj(zeta)[..., None] ** ks * b).sum(axis=-1)

        denom = seminorm_estimate(f, BoundaryCurve(contour), alpha, nu,
                                  budget, seed=seed + 1).value

        def sf(z):
            z = np.asarray(z, dtype=complex)
            out = np.empty(z.shape, dtype=complex)
            for i, zz in np.ndenumerate(z):
                out[i] = cauchy_interior(f, complex(zz), bs, tol=1e-10)
            return out

        numer = seminorm_estimate(sf, DiscRegion(0j, radius), alpha, nu,
                                  budget, seed=seed + 2).value
        results.append({"degree": deg, "f_seminorm": denom,
                        "sf_seminorm": numer, "ratio": numer / denom})
    return results
