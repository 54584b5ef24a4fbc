"""Solution operator for dbar on products of discs, residual verification via
Wirtinger finite differences, and the explicit bidisc witness computation.

The operator is the alternating composition

    u = T_0 f_0 + T_1 S_0 f_1 + ... + T_{n-1} S_0 ... S_{n-2} f_{n-1}

with S contractions applied in slot order before the area transform.  When a
component is known not to depend on a slot, the corresponding S contraction
is the identity (Cauchy's formula on a constant slice) and is skipped; the
area integral in the component's own slot is always carried out numerically.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import TWO_PI, Disc, ProductDomain, make_circle
from .operators import GridFunction, cauchy_interior
from .quadrature import QuadratureError, area_cauchy_rule


class StencilError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Form01:
    """A (0,1)-form sum_j f_j dconj(z_j) on a product domain.

    components[j] is a callable of all n slot variables (vectorized);
    depends[j] optionally lists the slots f_j actually uses, enabling exact
    slice shortcuts.  Omitted metadata means "all slots".
    """

    domain: ProductDomain
    components: tuple
    depends: tuple = None

    def __post_init__(self):
        n = self.domain.nfactors
        if len(self.components) != n:
            raise ValueError("one component per factor required")
        if self.depends is None:
            object.__setattr__(self, "depends", tuple(tuple(range(n)) for _ in range(n)))
        if len(self.depends) != n:
            raise ValueError("one dependence tuple per component required")
        for f in self.domain.factors:
            if not isinstance(f, Disc):
                raise ValueError("area transforms require every factor to be a disc")


def _s_kernel(contour, z):
    """Trapezoid weights turning boundary node values into S g(z), z interior."""
    return (TWO_PI / contour.n) * contour.dz / (contour.z - z) / (2j * math.pi)


def solve_dbar(f: Form01, *, area=(64, 64), adaptive=True, s_tol=1e-9,
               fill_grid=True, chunk=2048):
    """Composed solution operator on the product of discs.

    Returns a GridFunction on the interior tensor grid whose closure fallback
    evaluates the same operator formula at arbitrary interior points.  With
    adaptive=True, single-slot S contractions whose result is constant across
    the area nodes are evaluated by the adaptive interior Cauchy integral
    (and cached); everything else goes through fixed-resolution tensor
    contraction in the order S_0, S_1, ..., then the area transform.
    """
    dom = f.domain
    n = dom.nfactors
    contours = [dom.contour(j) for j in range(n)]
    cache = {}

    def chain_on_area(j, zvals, pts):
        """(S_{active} f_j)(z_0..z_{j-1}, pts, z_{j+1}..) for area nodes pts."""
        dep = f.depends[j]
        active = [l for l in range(j) if l in dep]
        const_over_area = j not in dep

        if const_over_area and adaptive and len(active) == 1:
            l = active[0]
            key = (j, l, complex(zvals[l]))
            if key not in cache:
                bs = dom.boundary_system(l)

                def g(zeta, _j=j, _l=l):
                    args = [np.full(np.shape(zeta), zv, dtype=complex) for zv in zvals]
                    args[_l] = zeta
                    return f.components[_j](*args)

                cache[key] = cauchy_interior(g, zvals[l], bs, tol=s_tol)
            return np.full(len(pts), cache[key], dtype=complex)

        if not active:
            args = [np.full(len(pts), zv, dtype=complex) for zv in zvals]
            if not const_over_area:
                args[j] = pts
            return np.broadcast_to(
                np.asarray(f.components[j](*args), dtype=complex), (len(pts),)).copy()

        kernels = [_s_kernel(contours[l], zvals[l]) for l in active]
        out = np.empty(len(pts), dtype=complex)
        for p0 in range(0, len(pts), chunk):
            p1 = min(p0 + chunk, len(pts))
            shape = tuple(contours[l].n for l in active) + (p1 - p0,)
            args = []
            for a in range(n):
                if a in active:
                    pos = active.index(a)
                    view = (1,) * pos + (contours[a].n,) + (1,) * (len(active) - pos - 1) + (1,)
                    args.append(contours[a].z.reshape(view))
                elif a == j and not const_over_area:
                    args.append(pts[p0:p1].reshape((1,) * len(active) + (-1,)))
                else:
                    args.append(np.array(zvals[a], dtype=complex).reshape((1,) * (len(active) + 1)))
            vals = np.broadcast_to(np.asarray(f.components[j](*args), dtype=complex), shape)
            for k in kernels:
                vals = np.tensordot(k, vals, axes=([0], [0]))
            out[p0:p1] = vals
        return out

    def u_point(*zvals):
        zvals = [complex(z) for z in zvals]
        total = 0j
        for j in range(n):
            disc = dom.factors[j]
            pts, wts = area_cauchy_rule(zvals[j], disc, *area)
            vals = chain_on_area(j, zvals, pts)
            total += (wts * vals).sum()
        return total

    def u_eval(*slots):
        slots = [np.asarray(s, dtype=complex) for s in slots]
        bshape = np.broadcast(*slots).shape
        flat = [np.broadcast_to(s, bshape).ravel() for s in slots]
        out = np.array([u_point(*pt) for pt in zip(*flat)], dtype=complex)
        return out.reshape(bshape) if bshape else complex(out[0])

    roles = tuple("interior" for _ in range(n))
    if fill_grid:
        grids = dom.interior_grids
        vals = np.empty(tuple(len(g) for g in grids), dtype=complex)
        for idx in np.ndindex(vals.shape):
            vals[idx] = u_point(*(grids[a][idx[a]] for a in range(n)))
        values = vals.ravel()
    else:
        values = np.zeros(tuple(len(g) for g in dom.interior_grids), dtype=complex).ravel()
    return GridFunction(dom, roles, values, fallback=u_eval)


def wirtinger_dbar(u, j, z, h):
    """Central-difference Wirtinger derivative (1/2)(d_x + i d_y) in slot j:

        [u(z + h e_x) - u(z - h e_x) + i (u(z + h e_y) - u(z - h e_y))] / (4h).
    """
    if h <= 0:
        raise StencilError("step must be positive")
    z = list(z)
    evalf = u.evaluate if isinstance(u, GridFunction) else u
    if isinstance(u, GridFunction):
        factor = u.domain.factors[j]
        for dz in (h, -h, 1j * h, -1j * h):
            p = z[j] + dz
            if isinstance(factor, Disc) and not factor.contains(p):
                raise StencilError("stencil leaves the domain")

    def at(dz):
        pt = list(z)
        pt[j] = z[j] + dz
        return complex(np.asarray(evalf(*[np.array([p]) for p in pt]), dtype=complex).ravel()[0])

    return (at(h) - at(-h) + 1j * (at(1j * h) - at(-1j * h))) / (4.0 * h)


@dataclass
class ResidualReport:
    max_rel_err: tuple
    overall: float
    nodes: list
    h: float


def residual_report(f: Form01, u, nodes, h):
    """Max over nodes and components of the relative dbar residual
    |wirtinger(u, j) - f_j| / (1 + |f_j|)."""
    n = f.domain.nfactors
    worst = [0.0] * n
    for z in nodes:
        for j in range(n):
            target = complex(np.asarray(
                f.components[j](*[np.array([zz]) for zz in z]), dtype=complex).ravel()[0])
            got = wirtinger_dbar(u, j, z, h)
            rel = abs(got - target) / (1.0 + abs(target))
            worst[j] = max(worst[j], rel)
    return ResidualReport(tuple(worst), max(worst), list(nodes), h)


# ---------------------------------------------------------------------------
# the explicit bidisc example

def _branch_log(z1):
    """log(z1 - 1) on the branch arg(z1 - 1) in (pi/2, 3pi/2); well defined on
    the unit disc, where Re(z1 - 1) < 0."""
    w = np.asarray(z1, dtype=complex) - 1.0
    th = np.angle(w)
    th = np.where(th <= 0.0, th + TWO_PI, th)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(w)) + 1j * th


def example_component(k, alpha, nu):
    """(z1 - 1)^{k+alpha} log^nu (z1 - 1) on the stated branch; 0 at z1 = 1
    (the modulus vanishes there for k + alpha > 0)."""
    if k + alpha <= 0:
        raise ValueError("k + alpha must be positive")

    def f2(z1):
        z1 = np.asarray(z1, dtype=complex)
        sing = np.abs(z1 - 1.0) == 0.0
        L = _branch_log(np.where(sing, 0.0, z1))
        out = np.exp((k + alpha) * L) * L ** nu
        return np.where(sing, 0.0, out)

    return f2


def example_form(k, alpha, nu, domain=None):
    """The dbar-closed (0,1)-form f = (z1-1)^{k+alpha} log^nu(z1-1) dconj(z2)
    on the bidisc (first component identically zero)."""
    if domain is None:
        domain = ProductDomain.bidisc(boundary_n=512)
    phi = example_component(k, alpha, nu)

    def f1(z1, z2):
        return np.zeros(np.broadcast(z1, z2).shape, dtype=complex)

    def f2(z1, z2):
        return np.broadcast_to(phi(z1), np.broadcast(z1, z2).shape).copy()

    return Form01(domain, (f1, f2), depends=((), (0,)))


def witness_target(xi, k, alpha, nu):
    """Closed form (pi i / 2) (xi-1)^{k+alpha} log^nu (xi-1) the witness must match."""
    return 0.5j * math.pi * example_component(k, alpha, nu)(xi)


def example_witness(u, xis, m=128, *, k=None, alpha=None, nu=None):
    """Contour integral w(xi) = int_{|z2|=1/2} u(xi, z2) dz2 per xi.

    Returns rows (xi, w, target, abs_err); target columns are filled when the
    example indices are supplied.
    """
    c = make_circle(0j, 0.5, m)
    evalf = u.evaluate if isinstance(u, GridFunction) else u
    rows = []
    for xi in np.asarray(xis, dtype=complex):
        if abs(xi) >= 1.0:
            raise QuadratureError("xi must lie in the open unit disc")
        vals = np.array([complex(np.asarray(
            evalf(np.array([xi]), np.array([z2])), dtype=complex).ravel()[0])
            for z2 in c.z])
        w = (TWO_PI / c.n) * (vals * c.dz).sum()
        row = {"xi": complex(xi), "w": complex(w)}
        if k is not None:
            tgt = complex(witness_target(np.array([xi]), k, alpha, nu)[0])
            row["target"] = tgt
            row["abs_err"] = abs(w - tgt)
        rows.append(row)
    return rows


def witness_dyadic_quotients(w_values, alpha, nu, j_values):
    """Difference quotients of the witness along the dyadic approach
    xi_j = 1 - 2^-j, over consecutive pairs, with weight h^alpha |ln h|^nu."""
    rows = []
    for j in j_values[:-1]:
        gap = 2.0 ** -(j + 1)
        d = abs(w_values[j] - w_values[j + 1])
        rows.append({"j": j, "gap": gap,
                     "quotient": d / (gap ** alpha * abs(math.log(gap)) ** nu)})
    return rows


def solution_norm_ratio_experiment(lambdas, alpha, nu, *, area=(48, 48),
                                   boundary_n=256, budget=90, seed=0):
    """Norm-ratio table for the sharp family pushed through the solution
    operator on the bidisc: estimated (alpha, nu+1)-seminorm of u against the
    (alpha, nu)-data norm, per parameter value.  Boundedness across the family
    is the empirical content of the composed-operator estimate."""
    from .counterexample import boundary_handle, tumanov_boundary
    from .holder import (BoundaryCurve, DiscRegion, ProductPairs,
                         seminorm_estimate)

    dom = ProductDomain.bidisc(boundary_n=boundary_n)
    rows = []
    for lam in lambdas:
        g = boundary_handle(lam, alpha)

        def f2(z1, z2, _g=g):
            return np.broadcast_to(np.asarray(_g(z1), dtype=complex),
                                   np.broadcast(z1, z2).shape).copy()

        def f1(z1, z2):
            return np.zeros(np.broadcast(z1, z2).shape, dtype=complex)

        form = Form01(dom, (f1, f2), depends=((), (0,)))
        u = solve_dbar(form, area=area, adaptive=True, s_tol=1e-6, fill_grid=False)
        pairs = ProductPairs(DiscRegion(0j, 0.8), DiscRegion(0j, 0.8))
        u_sem = seminorm_estimate(u.evaluate, pairs, alpha, nu + 1.0, budget,
                                  bands=8, seed=seed).value
        data_sem = seminorm_estimate(g, BoundaryCurve(dom.contour(0)), alpha, nu,
                                     budget, bands=8, seed=seed + 1).value
        sup = float(np.max(np.abs(tumanov_boundary(
            np.linspace(-math.pi, math.pi, 512), lam, alpha))))
        rows.append({"lam": lam, "u_seminorm": u_sem,
                     "data_norm": data_sem + sup,
                     "ratio": u_sem / (data_sem + sup)})
    return rows
