import math

import numpy as np
import pytest

from logcauchy.counterexample import tumanov_boundary
from logcauchy.holder import (BoundaryCurve, DiscRegion, Interval, ProductPairs,
                              SamplingError, holder_extension, log_holder_weight,
                              recombination_check, seminorm_estimate,
                              slice_seminorms)

HALF_INTERVAL = Interval(0.0, 0.5)


def test_weight_values():
    assert abs(log_holder_weight(0.5, 1.0, 0.0) - 0.5) < 1e-15
    assert abs(log_holder_weight(math.exp(-1), 1.0, 1.0) - math.exp(-1)) < 1e-15
    assert abs(log_holder_weight(math.exp(-2), 0.5, 2.0) - 4 * math.exp(-1)) < 1e-12


def test_weight_domain():
    with pytest.raises(SamplingError):
        log_holder_weight(1.0, 0.5, 1.0)
    with pytest.raises(SamplingError):
        log_holder_weight(0.0, 0.5, 1.0)


def test_seminorm_constant():
    est = seminorm_estimate(lambda x: np.full(np.shape(x), 7.0, dtype=complex),
                            HALF_INTERVAL, 1.0, 0.0, 200, seed=1)
    assert est.value == 0.0


def test_seminorm_linear():
    est = seminorm_estimate(lambda x: x, HALF_INTERVAL, 1.0, 0.0, 200, seed=1)
    assert abs(est.value - 1.0) < 1e-12


def test_seminorm_linear_log_weight():
    # quotient 1/|ln h| peaks at the cap h = 1/2
    est = seminorm_estimate(lambda x: x, HALF_INTERVAL, 1.0, 1.0, 200, seed=1)
    assert abs(est.value - 1.0 / math.log(2.0)) < 1e-12
    w0, w1 = est.witness
    assert abs(abs(w1[0] - w0[0]) - 0.5) < 1e-12


def test_seminorm_sqrt():
    est = seminorm_estimate(lambda x: np.sqrt(np.abs(x)) + 0j, HALF_INTERVAL,
                            0.5, 0.0, 400, seed=1)
    assert abs(est.value - 1.0) < 1e-3


def test_seminorm_monotone_in_budget():
    f = lambda x: np.sqrt(np.abs(x)) + 0j
    vals = [seminorm_estimate(f, HALF_INTERVAL, 0.5, 0.0, b, seed=4).value
            for b in (60, 120, 240, 480)]
    for a, b in zip(vals, vals[1:]):
        assert a <= b + 1e-15


def test_seminorm_needs_budget():
    with pytest.raises(SamplingError):
        seminorm_estimate(lambda x: x, HALF_INTERVAL, 1.0, 0.0, 0)


def test_embedding_chain():
    # raising the log exponent by mu scales down by at most (ln 2)^-mu
    f = lambda x: np.sqrt(np.abs(x)) + 0j
    for mu in (0.5, 1.0):
        base = seminorm_estimate(f, HALF_INTERVAL, 0.5, 0.5, 300, seed=3)
        up = seminorm_estimate(f, HALF_INTERVAL, 0.5, 0.5 + mu, 300, seed=3)
        assert up.value <= base.value * math.log(2.0) ** (-mu) + 1e-12


def test_slice_seminorms_lambda_free():
    ss = slice_seminorms(lambda z, lam: np.sin(z) + 0.0 * lam,
                         HALF_INTERVAL, HALF_INTERVAL, 1.0, 0.0, 150, seed=2)
    assert ss.second_part == 0.0


def test_slice_seminorms_bilinear():
    ss = slice_seminorms(lambda z, lam: z * lam, HALF_INTERVAL, HALF_INTERVAL,
                         1.0, 0.0, 150, seed=2)
    assert abs(ss.first_part - 0.5) < 1e-12
    assert abs(ss.second_part - 0.5) < 1e-12


def test_slice_seminorms_sqrt_parameter():
    ss = slice_seminorms(lambda z, lam: np.sqrt(np.abs(lam)) + 0.0 * z,
                         HALF_INTERVAL, HALF_INTERVAL, 0.5, 0.0, 300, seed=2)
    assert abs(ss.second_part - 1.0) < 1e-3
    assert ss.first_part == 0.0


def test_slice_below_full_seminorm():
    # each slice family is a subfamily of product pairs
    f = lambda z, lam: np.sin(z) * np.cos(lam)
    ss = slice_seminorms(f, HALF_INTERVAL, HALF_INTERVAL, 0.5, 0.0, 200, seed=5)
    full = seminorm_estimate(f, ProductPairs(HALF_INTERVAL, HALF_INTERVAL),
                             0.5, 0.0, 800, seed=5)
    assert max(ss.first_part, ss.second_part) <= full.value * (1 + 5e-2)


@pytest.mark.parametrize("f,alpha,nu", [
    (lambda z, lam: np.ones(np.broadcast(z, lam).shape, dtype=complex), 1.0, 0.0),
    (lambda z, lam: z + lam, 1.0, 0.0),
    (lambda z, lam: np.sin(z) * np.cos(lam), 0.5, 1.0),
])
def test_recombination_no_violation(f, alpha, nu):
    rep = recombination_check(f, HALF_INTERVAL, HALF_INTERVAL, alpha, nu, 150, seed=0)
    assert not rep.violation
    assert rep.lhs <= rep.rhs + 1e-12


def test_recombination_linear_bound():
    rep = recombination_check(lambda z, lam: z + lam, HALF_INTERVAL, HALF_INTERVAL,
                              1.0, 0.0, 150, seed=0)
    assert rep.lhs <= 2.0 + 1e-9
    assert rep.rhs >= 2.0 - 1e-9


def test_extension_constant():
    # constant data has Holder constant 0, so M = 0 reproduces the constant
    ext = holder_extension(np.array([0j, 1 + 0j]), np.array([3.0, 3.0]), 0.0, 0.5)
    assert np.allclose(ext(np.array([10 + 3j, -2j])), 3.0)


def test_extension_single_point():
    ext = holder_extension(np.array([0j]), np.array([0.0]), 1.0, 0.5)
    w = np.array([0.25 + 0j, -1.0 + 0j, 4j])
    assert np.max(np.abs(ext(w) - np.sqrt(np.abs(w)))) < 1e-14


def test_extension_holder_property():
    rng = np.random.default_rng(7)
    pts = rng.normal(size=(40, 2)).view(complex).reshape(40)
    vals = np.sin(pts.real) + np.cos(pts.imag)
    M, alpha = 2.0, 0.5
    ext = holder_extension(pts, vals, M, alpha)
    w1 = rng.normal(size=(60, 2)).view(complex).reshape(60)
    w2 = w1 + rng.normal(scale=0.3, size=(60, 2)).view(complex).reshape(60)
    lhs = np.abs(ext(w1) - ext(w2))
    rhs = M * np.abs(w1 - w2) ** alpha
    assert np.all(lhs <= rhs + 1e-12)


def test_extension_tumanov_data():
    # extension of the sharp boundary data matches it on the grid
    alpha = 0.5
    lam_grid = np.array([2.0 ** -j for j in range(2, 8)])
    th_grid = np.linspace(-math.pi, math.pi, 96)
    TH, LA = np.meshgrid(th_grid, lam_grid, indexing="ij")
    pts = np.stack([np.exp(1j * TH.ravel()), LA.ravel().astype(complex)], axis=1)
    vals = np.concatenate([tumanov_boundary(th_grid, lam, alpha) for lam in lam_grid])
    vals = np.stack([tumanov_boundary(th_grid, lam, alpha) for lam in lam_grid],
                    axis=1).ravel()
    # measured Holder constant of the data on the grid
    M = 0.0
    for i in range(0, len(pts), 7):
        d = np.sqrt(np.abs(pts[:, 0] - pts[i, 0]) ** 2 + np.abs(pts[:, 1] - pts[i, 1]) ** 2)
        good = d > 0
        M = max(M, float(np.max(np.abs(vals[good] - vals[i]) / d[good] ** alpha)))
    ext = holder_extension(pts, vals, M, alpha)
    got = ext(pts[:, 0], pts[:, 1])
    gap = np.abs(np.exp(1j * th_grid[1]) - np.exp(1j * th_grid[0]))
    assert np.max(np.abs(got - vals)) <= 2.0 * M * gap ** alpha


def test_boundary_curve_sampler(unit_circle):
    est = seminorm_estimate(lambda z: np.real(z) + 0j, BoundaryCurve(unit_circle),
                            1.0, 0.0, 300, seed=9)
    assert 0.5 < est.value <= 1.0 + 1e-9


def test_disc_region_sampler():
    est = seminorm_estimate(lambda z: np.abs(z) + 0j, DiscRegion(0j, 1.0),
                            1.0, 0.0, 300, seed=9)
    assert 0.6 < est.value <= 1.0 + 1e-9


def test_estimate_json(unit_circle):
    est = seminorm_estimate(lambda x: x, HALF_INTERVAL, 1.0, 0.0, 100, seed=1)
    doc = est.to_json_dict()
    assert doc["value"] == est.value
    assert len(doc["bands"]) >= 1
