import math

import numpy as np
import pytest

import dunkl_lab as dl


def test_root_systems():
    rs = dl.root_system("rank-one", 1, [1.5])
    assert rs.dimension == 1
    assert rs.group_order == 2
    assert rs.k_sum() == pytest.approx(3.0)
    assert rs.weight_density([2.0]) == pytest.approx((2.0 * math.sqrt(2.0)) ** 3)
    r = math.sqrt(2.0)
    roots = [[r, 0], [-r, 0], [0, r], [0, -r], [1, 1], [-1, -1], [1, -1], [-1, 1]]
    b2 = dl.root_system("general", 2, [0.5, 1.0], roots)
    assert b2.group_order == 8
    back = dl.RootSystem.from_json(b2.to_json())
    assert back.roots == b2.roots
    with pytest.raises(RuntimeError):
        dl.root_system("hexagonal", 2, [1.0])


def test_kernel():
    k0 = dl.root_system("rank-one", 1, [0.0])
    for x, y in [(1.0, 2.0), (-3.0, 0.5), (4.0, -4.0)]:
        assert abs(dl.dunkl_kernel(k0, [x], [y]) - math.exp(x * y)) <= 1e-10 * math.exp(abs(x * y))
    k1 = dl.root_system("rank-one", 1, [1.0])
    assert dl.dunkl_kernel(k1, [1.0], [1.0]) == pytest.approx(math.cosh(1.0), abs=1e-12)
    assert dl.kernel_ode_residual(1.0, 0.7, -1.3) <= 1e-10


def test_transform_and_poisson():
    rs = dl.root_system("rank-one", 1, [1.0])
    lab = dl.Lab(rs, 8.0, 256)
    x = lab.nodes[:, 0]
    assert lab.weights.shape == x.shape
    f = np.exp(-0.5 * x**2).astype(complex)
    assert np.max(np.abs(lab.forward_backward(f) - f)) <= 1e-5
    assert lab.plancherel_residual(f) <= 1e-5
    pf = lab.poisson(f, 0.5)
    assert lab.lp_norm(pf, 1.0) <= lab.lp_norm(f, 1.0) * (1 + 1e-4)
    assert lab.poisson_kernel([0.3], [-0.7], 1.0) > 0.0
    with pytest.raises(ValueError):
        lab.poisson(f[:-1], 0.5)


def test_riesz_ratios():
    rs = dl.root_system("rank-one", 1, [1.5])
    lab = dl.Lab(rs, 24.0, 768, 16.0, 512)
    ratios, bound = lab.norm_ratios(2.0, trials=4, seed=3)
    assert bound == pytest.approx(1440.0)
    assert all(abs(r - 1.0) <= 1e-4 for r in ratios)
    ratios4, bound4 = lab.norm_ratios(4.0, trials=4, seed=3)
    assert max(ratios4) <= bound4


def test_bellman():
    bp = dl.BellmanParams(2.0)
    assert bp.gamma == pytest.approx(0.25)
    assert dl.beta(bp, 1.0, 1.0) == pytest.approx(2.25, abs=1e-14)
    assert dl.bellman_B(bp, [1.0], [1.0]) == pytest.approx(1.125, abs=1e-14)
    h = dl.bellman_hessian(bp, [0.5], [2.0])
    assert h.shape == (2, 2)
    np.testing.assert_allclose(h, np.diag([1.25, 1.0]), atol=1e-12)
    with pytest.raises(ValueError):
        dl.BellmanParams(1.5)
    bp4 = dl.BellmanParams(4.0)
    with pytest.raises(ArithmeticError):
        dl.bellman_hessian(bp4, [1.0], [0.0])
    m1, m2 = dl.elementary_margins(2.0, [0.3], [-0.7])
    assert m1 == pytest.approx(0.5 - 1.0 / 64.0, abs=1e-15)


def test_harness_helpers():
    assert dl.nu(1.0, 0.5) == pytest.approx(math.exp(-1.0))
    assert dl.nu_second_integral(0.01) <= 2.0 * (1.0 + math.exp(-2.0)) + 0.05
    assert dl.cutoff_phi([0.5], 1.0) == 1.0
    assert dl.cutoff_phi([2.5], 1.0) == 0.0


def test_run_suite():
    assert "bellman" in dl.suite_names()
    rep = dl.run_suite(suite="transform", k=0.5)
    assert rep["suite"] == "transform"
    assert rep["pass"] is True
    assert rep["config"]["k"] == 0.5
    with pytest.raises(dl.ConfigError):
        dl.run_suite(suite="riesz", p=1.0)
    with pytest.raises(dl.ConfigError):
        dl.run_suite(colour="red")
