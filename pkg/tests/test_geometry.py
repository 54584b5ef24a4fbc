import json
import math

import numpy as np
import pytest

from logcauchy.geometry import (BoundarySystem, Disc, GeometryError, HolderIndex,
                                ProductDomain, boundary_constants,
                                chord_arc_constant, contour_from_json,
                                make_circle, make_fourier_contour,
                                nontangential_contains)

# frozen by a 2^16-node arclength run (also 4*E(3/4) from the elliptic integral)
ELLIPSE_ARCLENGTH = 4.844224110273838


def test_circle_arclength():
    assert abs(make_circle(0, 1, 256).arclength - 2 * math.pi) < 1e-12
    assert abs(make_circle(0, 0.5, 128).arclength - math.pi) < 1e-12


def test_circle_first_node():
    c = make_circle(1 + 1j, 2, 64)
    assert abs(c.z[0] - (3 + 1j)) < 1e-14


def test_circle_rejects_bad_input():
    with pytest.raises(GeometryError):
        make_circle(0, -1.0, 64)
    with pytest.raises(GeometryError):
        make_circle(0, 1.0, 6)
    with pytest.raises(GeometryError):
        make_circle(0, 1.0, 9)


def test_fourier_matches_circle():
    f = make_fourier_contour({1: 1.0}, 64)
    c = make_circle(0, 1, 64)
    assert np.max(np.abs(f.z - c.z)) < 1e-14
    assert np.max(np.abs(f.dz - c.dz)) < 1e-14


def test_ellipse_arclength(ellipse):
    assert abs(ellipse.arclength - ELLIPSE_ARCLENGTH) < 1e-4


def test_figure_eight_rejected():
    # cos s + (i/2) sin 2s passes through 0 twice
    coeffs = {1: 0.5, -1: 0.5, 2: 0.25, -2: -0.25}
    with pytest.raises(GeometryError):
        make_fourier_contour(coeffs, 256)


def test_vanishing_derivative_rejected():
    with pytest.raises(GeometryError):
        make_fourier_contour({1: 0.5, -1: 0.5}, 64)  # p(s) = cos s


def test_chord_arc_circle(unit_circle):
    val = chord_arc_constant(unit_circle, 1024)
    assert abs(val - math.pi / 2) < 1e-3
    assert val >= 1.0


def test_chord_arc_monotone_and_below_limit(unit_circle):
    vals = [chord_arc_constant(unit_circle, m) for m in (256, 512, 1024)]
    assert vals[0] <= vals[1] + 1e-14 <= vals[2] + 2e-14
    assert all(v <= math.pi / 2 + 1e-12 for v in vals)


def test_chord_arc_ellipse(ellipse):
    assert chord_arc_constant(ellipse, 1024) > math.pi / 2


def test_chord_arc_bounds_sampled_pairs(ellipse):
    c0 = chord_arc_constant(ellipse, 512)
    s = np.arange(512) * (2 * math.pi / 512)
    z = ellipse.point(s)
    from logcauchy.geometry import _segment_arclengths
    cum = np.concatenate(([0.0], np.cumsum(_segment_arclengths(ellipse.derivative,
                                                               np.append(s, 2 * math.pi)))))
    total = cum[-1]
    rng = np.random.default_rng(0)
    idx = rng.integers(0, 512, size=(200, 2))
    for i, j in idx:
        if i == j:
            continue
        chord = abs(z[i] - z[j])
        arc = abs(cum[i] - cum[j])
        arc = min(arc, total - arc)
        assert chord <= arc + 1e-12
        assert arc <= c0 * chord * (1 + 1e-9)


def test_chord_arc_requires_density(unit_circle):
    with pytest.raises(GeometryError):
        chord_arc_constant(unit_circle, 64)


def test_holder_index_h0_values():
    idx = HolderIndex(alpha=0.5, nu=1.0)
    assert abs(idx.h0 - math.exp(-4)) < 1e-15
    assert abs(HolderIndex(alpha=0.5, nu=0.0).h0 - 0.5) < 1e-15


def test_holder_index_h0_cap():
    # h0 = 1/2 exactly when both exponential terms are >= 1/2
    for alpha, nu in [(0.5, 0.0), (0.25, 0.05), (0.9, -0.01)]:
        idx = HolderIndex(alpha=alpha, nu=nu)
        terms = [math.exp(-2 * nu / alpha), math.exp(2 * nu / (1 - alpha))]
        if min(terms) >= 0.5:
            assert idx.h0 == 0.5
        else:
            assert idx.h0 < 0.5
        assert idx.h0 <= 0.5


def test_holder_index_validation():
    with pytest.raises(GeometryError):
        HolderIndex(alpha=1.0, nu=-0.5)
    with pytest.raises(GeometryError):
        HolderIndex(alpha=1.5, nu=0.0)
    HolderIndex(alpha=1.0, nu=0.0)  # boundary case allowed


def test_boundary_constants_single_circle(unit_disc_bs):
    rec = boundary_constants(unit_disc_bs, HolderIndex(alpha=0.5, nu=1.0))
    assert abs(rec["s0"] - 2 * math.pi) < 1e-12
    assert abs(rec["h0"] - math.exp(-4)) < 1e-15
    assert abs(rec["h0"] - 0.018315638888734179) < 1e-12
    assert rec["c0"] >= 1.0
    # single contour: delta0 falls back to the diameter
    assert abs(rec["delta0"] - 2.0) < 1e-3


def test_boundary_constants_two_circles():
    bs = BoundarySystem([make_circle(0, 1, 128), make_circle(4, 1, 128)])
    rec = boundary_constants(bs, HolderIndex(alpha=0.5, nu=0.0))
    assert abs(rec["delta0"] - 2.0) < 1e-6
    assert rec["h0"] == 0.5


def test_nontangential_examples(unit_disc_bs):
    assert nontangential_contains(1.0, 0.99, unit_disc_bs)
    assert not nontangential_contains(1.0, 0.0, unit_disc_bs)
    assert not nontangential_contains(1.0, 0.5 + 0.86j, unit_disc_bs)
    with pytest.raises(GeometryError):
        nontangential_contains(1.0, 1.5, unit_disc_bs)


def test_nontangential_kernel_inequality(unit_disc_bs):
    # membership implies |zeta - z| >= max(|z-t|/4, |zeta-t|/5) on the boundary
    c = unit_disc_bs.contours[0]
    rng = np.random.default_rng(1)
    checked = 0
    for _ in range(200):
        t = c.z[int(rng.integers(c.n))]
        r = 10.0 ** rng.uniform(-3, -0.5)
        z = t * (1 - r)
        if not nontangential_contains(t, z, unit_disc_bs):
            continue
        lhs = np.abs(c.z - z)
        rhs = np.maximum(abs(z - t) / 4.0, np.abs(c.z - t) / 5.0)
        assert np.all(lhs >= rhs * (1 - 1e-12))
        checked += 1
    assert checked > 50


def test_contour_json_roundtrip(unit_circle, ellipse):
    for c in (unit_circle, ellipse):
        c2 = contour_from_json(c.to_json())
        assert np.max(np.abs(c2.z - c.z)) < 1e-14
        spec = json.loads(c.to_json())
        assert spec["kind"] in ("circle", "fourier")


def test_product_domain_grids_interior():
    dom = ProductDomain.bidisc(boundary_n=64, rings=3, rays=4)
    for d, g in zip(dom.factors, dom.interior_grids):
        assert d.contains(np.asarray(g))
    with pytest.raises(GeometryError):
        ProductDomain((Disc(0j, 1.0),), (np.array([1.5 + 0j]),), (np.array([1.0 + 0j]),))


def test_distance_to_boundary(unit_disc_bs):
    for z, d in [(0.0, 1.0), (0.5, 0.5), (0.3 + 0.4j, 0.5)]:
        assert abs(unit_disc_bs.distance_to_boundary(z) - d) < 1e-9
