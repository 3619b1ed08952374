"""Periodic-grid fields: norms, operators, soliton sums, residuals."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solistab.fields import (
    GridTooSmall,
    SolitonConfig,
    TorusField,
    TorusGrid,
    gamma_residual,
    helmholtz_inverse,
    inner_h1,
    interaction_term_f,
    laplacian,
    load_field,
    nonlinear_remainder_N,
    norm,
    odd_power,
    residual_h,
    sample_soliton,
    sample_soliton_derivative,
    sample_soliton_sum,
    save_field,
)
from solistab.groundstate import radial_integral


def plane_wave(grid, k, amp=1.0):
    x = grid.meshgrid()[0]
    return TorusField(grid, amp * np.cos(2.0 * math.pi * k * x / grid.L))


def test_norms_of_plane_wave(grid1d):
    # cos(xi x) has L2 norm sqrt(L/2); H1 scales by sqrt(1+xi^2)
    k = 7
    xi = 2.0 * math.pi * k / grid1d.L
    f = plane_wave(grid1d, k)
    l2 = math.sqrt(grid1d.L / 2.0)
    assert abs(norm(f, "L2") - l2) / l2 < 1e-12
    assert abs(norm(f, "H1") - l2 * math.sqrt(1 + xi**2)) / l2 < 1e-12
    assert abs(norm(f, "Hm1") - l2 / math.sqrt(1 + xi**2)) / l2 < 1e-12


def test_norm_duality_chain(grid1d, gs13):
    # Hm1 <= L2 <= H1 and the three agree for the zero mode
    f = sample_soliton(gs13, np.array([0.0]), grid1d)
    assert norm(f, "Hm1") < norm(f, "L2") < norm(f, "H1")
    const = TorusField(grid1d, np.full(grid1d.n, 0.7))
    v = 0.7 * math.sqrt(grid1d.volume)
    for which in ("L2", "H1", "Hm1"):
        assert abs(norm(const, which) - v) < 1e-12 * v


def test_helmholtz_inverse_of_constant(grid2d):
    c = -2.3
    f = TorusField(grid2d, np.full((grid2d.n,) * 2, c))
    g = helmholtz_inverse(f)
    assert np.max(np.abs(g.values - c)) < 1e-13
    assert abs(norm(f, "Hm1") - abs(c) * math.sqrt(grid2d.volume)) < 1e-10


def test_helmholtz_inverse_is_inverse(grid1d, gs13):
    f = sample_soliton(gs13, np.array([3.0]), grid1d)
    g = helmholtz_inverse(f)
    back = TorusField(grid1d, -laplacian(g).values + g.values)
    assert norm(back - f, "L2") < 1e-10


def test_inner_h1_matches_norm(grid1d, gs13):
    f = sample_soliton(gs13, np.array([-2.0]), grid1d)
    assert abs(inner_h1(f, f) - norm(f, "H1") ** 2) < 1e-10


def test_soliton_h1_norm_matches_radial_quadrature(grid1d, gs13):
    # grid-based H1 norm vs the radial quadrature of Q^2 + Q'^2
    f = sample_soliton(gs13, np.array([0.0]), grid1d)
    exact = radial_integral(gs13, gs13.q**2 + gs13.dq**2)
    assert abs(norm(f, "H1") ** 2 - exact) / exact < 1e-8


def test_single_soliton_residual_small(grid1d, gs13):
    u = sample_soliton(gs13, np.array([0.0]), grid1d)
    assert gamma_residual(u, gs13.params) < 1e-7


def test_two_soliton_f_symmetry(grid1d, gs13, two_soliton_cfg):
    f = interaction_term_f(gs13, two_soliton_cfg, grid1d)
    flipped = f.values[::-1]
    flipped = np.roll(flipped, 1)  # periodic reflection about x = 0
    assert np.max(np.abs(f.values - flipped)) < 1e-12
    assert np.all(f.values > -1e-14)  # p=3: cross terms are positive


def test_h_sigma_equals_minus_f(grid1d, gs13, two_soliton_cfg):
    # the residual of a sum of exact solitons is exactly -f up to profile error
    sigma = sample_soliton_sum(gs13, two_soliton_cfg, grid1d)
    h = residual_h(sigma, gs13.params)
    f = interaction_term_f(gs13, two_soliton_cfg, grid1d)
    assert norm(h + f, "Hm1") < 1e-7


def test_m1_interaction_is_zero(grid1d, gs13):
    cfg = SolitonConfig(gs13.params, np.array([[1.0]]))
    f = interaction_term_f(gs13, cfg, grid1d)
    assert np.all(f.values == 0.0)


def test_odd_power_signs_and_complex():
    u = np.array([-2.0, 0.0, 3.0])
    out = odd_power(u, 2.0)
    assert np.allclose(out, [-4.0, 0.0, 9.0])
    z = np.array([1.0 + 1.0j])
    out = odd_power(z, 3.0)
    assert abs(out[0] - 2.0 * z[0]) < 1e-14  # |z|^2 z with |z|^2 = 2


def test_nonlinear_remainder_quadratic(grid1d, gs13, two_soliton_cfg):
    # N(eps w) = O(eps^2) for p = 3
    sigma = sample_soliton_sum(gs13, two_soliton_cfg, grid1d)
    w = sample_soliton(gs13, np.array([0.0]), grid1d)
    n1 = norm(nonlinear_remainder_N(sigma, 1e-3 * w, gs13.params), "L2")
    n2 = norm(nonlinear_remainder_N(sigma, 1e-4 * w, gs13.params), "L2")
    assert 50.0 < n1 / n2 < 200.0


def test_derivative_matches_finite_difference(grid1d, gs13):
    y = np.array([1.5])
    d = sample_soliton_derivative(gs13, y, 0, grid1d)
    eps = 1e-6
    qp = sample_soliton(gs13, y + eps, grid1d)
    qm = sample_soliton(gs13, y - eps, grid1d)
    fd = (qp.values - qm.values) / (2.0 * eps)
    assert np.max(np.abs(d.values - fd)) < 1e-7


def test_grid_size_guard(gs13):
    small = TorusGrid(1, 40.0, 256)
    cfg = SolitonConfig(gs13.params, np.array([[-6.0], [6.0]]))
    with pytest.raises(GridTooSmall):
        sample_soliton_sum(gs13, cfg, small)
    # the same call succeeds with the strict check disabled
    sample_soliton_sum(gs13, cfg, small, strict=False)


def test_config_validation(gs13):
    with pytest.raises(ValueError):
        SolitonConfig(gs13.params, np.array([[0.0], [0.0]]))  # coincident
    with pytest.raises(ValueError):
        SolitonConfig(gs13.params, np.array([[0.0]]),
                      phases=np.array([2.0 + 0.0j]))  # non-unit phase
    cfg = SolitonConfig(gs13.params, np.array([[-5.0], [7.0]]))
    assert cfg.R == 12.0
    assert cfg.is_real()
    cfg2 = SolitonConfig(gs13.params, np.array([[0.0]]),
                         phases=np.array([1.0j]))
    assert not cfg2.is_real()


def test_grid_validation():
    with pytest.raises(ValueError):
        TorusGrid(1, 100.0, 100)  # not a power of two
    with pytest.raises(ValueError):
        TorusGrid(1, -1.0, 128)


def test_save_load_roundtrip(tmp_path, grid1d, gs13):
    f = sample_soliton(gs13, np.array([2.0]), grid1d)
    path = str(tmp_path / "field.bin")
    save_field(f, path)
    g = load_field(path)
    assert g.grid == f.grid
    assert np.array_equal(g.values, f.values)


@given(st.floats(min_value=-3.0, max_value=3.0),
       st.floats(min_value=-3.0, max_value=3.0))
@settings(max_examples=40, deadline=None)
def test_triangle_inequality_property(a, b):
    grid = TorusGrid(1, 50.0, 256)
    f = plane_wave(grid, 3, a)
    g = plane_wave(grid, 5, b)
    for which in ("L2", "H1", "Hm1"):
        assert norm(f + g, which) <= norm(f, which) + norm(g, which) + 1e-12
