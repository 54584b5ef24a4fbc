import json
import math

import numpy as np
import pytest

from logcauchy.geometry import (BoundarySystem, Disc, HolderIndex, ProductDomain,
                                make_circle)
from logcauchy.operators import (GridFunction, boundary_approach_quotients,
                                 cauchy_interior, grid_function_from_callable,
                                 nontangential_pairs, plemelj_boundary, slice_S,
                                 slice_T, trig_polynomial_ratio_experiment)
from logcauchy.counterexample import boundary_handle, tumanov_S_at_one
from conftest import const_fn


def test_cauchy_interior_constant(unit_disc_bs):
    assert abs(cauchy_interior(const_fn(1.0), 0.3, unit_disc_bs) - 1.0) < 1e-12


def test_cauchy_interior_conj(unit_disc_bs):
    # residue oracle: 1/(zeta (zeta - z)) has cancelling residues
    assert abs(cauchy_interior(np.conj, 0.5j, unit_disc_bs)) < 1e-10


def test_cauchy_interior_reproduces_polynomials(unit_disc_bs):
    assert abs(cauchy_interior(lambda z: z ** 2, 0.2, unit_disc_bs) - 0.04) < 1e-12
    rng = np.random.default_rng(2)
    coeffs = rng.normal(size=5) + 1j * rng.normal(size=5)
    p = lambda z: sum(c * z ** k for k, c in enumerate(coeffs))
    for z in (0.1 - 0.6j, -0.75, 0.88j):
        assert abs(cauchy_interior(p, z, unit_disc_bs) - p(z)) < 1e-10


def test_cauchy_interior_near_boundary(unit_disc_bs):
    # refinement keeps holomorphic reproduction within a node gap of the wall
    z = 0.995
    assert abs(cauchy_interior(lambda w: w ** 3, z, unit_disc_bs) - z ** 3) < 1e-9


def test_cauchy_interior_rejects_exterior(unit_disc_bs):
    with pytest.raises(Exception):
        cauchy_interior(const_fn(1.0), 1.2, unit_disc_bs)


def test_plemelj_constant(unit_disc_bs):
    assert abs(plemelj_boundary(const_fn(1.0), 1.0 + 0j, unit_disc_bs) - 1.0) < 1e-12


def test_plemelj_identity(unit_disc_bs):
    assert abs(plemelj_boundary(lambda z: z, 1.0 + 0j, unit_disc_bs) - 1.0) < 1e-10


def test_plemelj_conj(unit_disc_bs):
    assert abs(plemelj_boundary(np.conj, 1.0 + 0j, unit_disc_bs)) < 1e-8


def test_plemelj_consistency_richardson(unit_disc_bs):
    # interior values extrapolated in the approach parameter hit Phi
    f = lambda z: np.conj(z) + z ** 2
    for k in range(0, 16, 3):
        t = np.exp(2j * math.pi * k / 16)
        phi = plemelj_boundary(f, t, unit_disc_bs)
        assert abs(phi - t ** 2) < 1e-8
        e1, e2 = 1e-2, 1e-3
        v1 = cauchy_interior(f, t * (1 - e1), unit_disc_bs)
        v2 = cauchy_interior(f, t * (1 - e2), unit_disc_bs)
        rich = (e1 * v2 - e2 * v1) / (e1 - e2)
        assert abs(rich - phi) < 1e-4


def small_domain(boundary_n=128):
    return ProductDomain.bidisc(boundary_n=boundary_n, rings=3, rays=6, clearance=0.3)


def test_grid_function_shape_and_json():
    dom = small_domain(64)
    f = grid_function_from_callable(dom, ("boundary", "interior"),
                                    lambda z, lam: z + lam)
    assert f.shape == (64, 18)
    doc = json.loads(f.to_json())
    assert doc["shape"] == [64, 18]
    assert doc["roles"] == ["boundary", "interior"]
    assert len(doc["values"]) == 64 * 18
    re, im = doc["values"][0]
    assert isinstance(re, float) and isinstance(im, float)


def test_grid_function_csv_rows():
    dom = small_domain(64)
    f = grid_function_from_callable(dom, ("interior", "interior"),
                                    lambda z, lam: z * lam)
    rows = f.slice2d_csv_rows()
    assert len(rows) == 18 * 18
    assert len(rows[0]) == 8


def test_grid_function_validation():
    dom = small_domain(64)
    with pytest.raises(ValueError):
        GridFunction(dom, ("interior",), np.zeros(4))
    with pytest.raises(ValueError):
        GridFunction(dom, ("interior", "interior"), np.zeros(7))


def test_slice_S_parameter_linearity():
    # S acts on the first slot only: f = lam * g(zeta) maps to lam * S g
    dom = small_domain(64)
    f = grid_function_from_callable(dom, ("boundary", "interior"),
                                    lambda z, lam: lam * z ** 2)
    out = slice_S(f, 0, "interior")
    g1 = dom.interior_grids[0]
    g2 = dom.interior_grids[1]
    assert np.max(np.abs(out.tensor() - g1[:, None] ** 2 * g2[None, :])) < 1e-12


def test_slice_S_constant_is_one():
    dom = small_domain(64)
    f = grid_function_from_callable(
        dom, ("boundary", "interior"),
        lambda z, lam: np.ones(np.broadcast(z, lam).shape, dtype=complex))
    out = slice_S(f, 0, "interior")
    assert np.max(np.abs(out.tensor() - 1.0)) < 1e-10


def test_slice_S_boundary_matrix_matches_pv():
    # node-based Phi matrix against the adaptive principal value, smooth data
    dom = small_domain(128)
    contour = dom.contour(0)
    bs = dom.boundary_system(0)
    f = grid_function_from_callable(dom, ("boundary", "interior"),
                                    lambda z, lam: np.conj(z) + z ** 2 + 0.0 * lam)
    f_nodes = GridFunction(dom, f.roles, f.values)   # strip the closure
    out = slice_S(f_nodes, 0, "boundary")
    g = lambda z: np.conj(z) + z ** 2
    for idx in (0, 17, 64):
        expect = plemelj_boundary(g, contour.z[idx], bs)
        assert abs(out.tensor()[idx, 0] - expect) < 1e-6


def test_slice_S_tumanov_semianalytic():
    # boundary value at the singular point against the explicit decomposition
    alpha = 0.5
    lams = np.array([2.0 ** -j for j in range(4, 11)])
    disc = Disc(0j, 1.0)
    dom = ProductDomain((disc, disc),
                        (np.array([0.0j]), lams.astype(complex)),
                        (disc.boundary_contour(128).z, disc.boundary_contour(128).z),
                        (disc.boundary_contour(128), disc.boundary_contour(128)))

    def handle(z, lam):
        shape = np.broadcast(z, lam).shape
        zb = np.broadcast_to(z, shape)
        lb = np.broadcast_to(lam, shape)
        out = np.empty(shape, dtype=complex)
        for i in np.ndindex(shape):
            out[i] = boundary_handle(lb[i], alpha)(np.array([zb[i]]))[0]
        return out

    f = grid_function_from_callable(dom, ("boundary", "interior"), handle)
    out = slice_S(f, 0, "boundary", tol=1e-5)
    for col, lam in enumerate(lams):
        got = out.tensor()[0, col]          # node 0 is the point 1
        ref = tumanov_S_at_one(lam, alpha)
        assert abs(got - ref) < 1e-3


def test_slice_T_constant():
    dom = small_domain(64)
    f = grid_function_from_callable(
        dom, ("interior", "interior"),
        lambda z, lam: np.ones(np.broadcast(z, lam).shape, dtype=complex))
    out = slice_T(f, 0, n_theta=64, n_r=32)
    g1 = dom.interior_grids[0]
    assert np.max(np.abs(out.tensor() - np.conj(g1)[:, None])) < 1e-8


def test_slice_T_zero():
    dom = small_domain(64)
    f = grid_function_from_callable(
        dom, ("interior", "interior"),
        lambda z, lam: np.zeros(np.broadcast(z, lam).shape, dtype=complex))
    out = slice_T(f, 0, n_theta=32, n_r=16)
    assert np.max(np.abs(out.values)) == 0.0


def test_slice_T_separable():
    dom = small_domain(64)
    f = grid_function_from_callable(
        dom, ("interior", "interior"),
        lambda z, lam: np.broadcast_to(lam, np.broadcast(z, lam).shape).astype(complex))
    out = slice_T(f, 0, n_theta=64, n_r=32)
    g1, g2 = dom.interior_grids
    assert np.max(np.abs(out.tensor() - g2[None, :] * np.conj(g1)[:, None])) < 1e-8


def test_slice_T_requires_fallback():
    dom = small_domain(64)
    f = grid_function_from_callable(
        dom, ("interior", "interior"),
        lambda z, lam: np.ones(np.broadcast(z, lam).shape, dtype=complex))
    bare = GridFunction(dom, f.roles, f.values)
    with pytest.raises(ValueError):
        slice_T(bare, 0)


def test_boundary_approach_quotients_bounded(unit_disc_bs):
    # Sf approaches Phi f at the weighted Holder rate inside the cone
    idx = HolderIndex(alpha=0.5, nu=0.0)
    rng = np.random.default_rng(3)
    pairs = nontangential_pairs(unit_disc_bs, rng, 30, idx.h0, unit_disc_bs.s0,
                                n_anchors=6)
    assert len(pairs) >= 20
    f = boundary_handle(2.0 ** -4, 0.5)
    rows = boundary_approach_quotients(f, unit_disc_bs, idx, pairs, tol=1e-7)
    qs = np.array([r["quotient"] for r in rows])
    gaps = np.array([r["gap"] for r in rows])
    assert qs.max() <= 1.0
    order = np.argsort(gaps)
    half = len(qs) // 2
    small_max = qs[order[:half]].max()
    large_max = qs[order[half:]].max()
    assert small_max <= 3.0 * max(large_max, 0.05)


def test_trig_ratio_experiment_bounded():
    res = trig_polynomial_ratio_experiment([4, 8, 16, 32], 0.5, 0.0,
                                           n=256, budget=120, seed=7)
    ratios = [r["ratio"] for r in res]
    assert all(r <= 0.6 for r in ratios)
    assert max(ratios) <= 1.2 * ratios[0]
