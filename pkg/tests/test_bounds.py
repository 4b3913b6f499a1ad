import math

import numpy as np
import pytest
from scipy import integrate

from src.bounds import (
    BoundsError,
    TabulatedSymbol,
    counting_bound,
    counting_bound_general,
    excess_constant,
    lower_bound_two_term,
    optimal_tau,
    radial_excess_constant,
    riesz_counting_bound,
    second_term_coefficient,
    second_term_ratio,
    symbol_excess_integral,
    tau_scan,
    trusted_floor,
    trusted_lambda_grid,
    upper_bound_general,
    upper_bound_homogeneous,
)
from src.geometry import Ball, Box, expansion
from src.kernels import custom_kernel, helmholtz_symbol, lower_symbol, riesz_kernel
from src.spectral import assemble, build_mesh, counting, eigenvalues, riesz_mean


def test_alpha_two_in_three_dimensions():
    value = upper_bound_homogeneous(riesz_kernel(3, 2.0), 1.0, 1.0)
    assert value == pytest.approx(1.0 / (3.0 * math.pi ** 2), rel=1e-12)
    assert value == pytest.approx(4.0 * math.pi / (12.0 * math.pi ** 3), rel=1e-12)


@pytest.mark.parametrize("d, alpha", [(2, 0.5), (3, 1.0), (3, 2.0)])
def test_excess_integral_matches_closed_form(d, alpha):
    k = riesz_kernel(d, alpha)
    assert symbol_excess_integral(k) == pytest.approx(radial_excess_constant(d, alpha), rel=1e-6)


def test_excess_integral_by_cartesian_quadrature():
    # d=2, α=0.5, λ=0.1：∫(|ξ|^{-1/2} - 0.1)₊ dξ，支集半径 100
    lam = 0.1
    radius = lam ** -2.0

    def inner(x):
        top = math.sqrt(radius * radius - x * x)
        value, _ = integrate.quad(lambda y: (x * x + y * y) ** -0.25 - lam, 0.0, top,
                                  epsabs=0.0, epsrel=1e-11, limit=200)
        return value

    quarter, _ = integrate.quad(inner, 0.0, radius, epsabs=0.0, epsrel=1e-10, limit=200, points=[1.0])
    k = riesz_kernel(2, 0.5)
    assert 4.0 * quarter == pytest.approx(symbol_excess_integral(k, lam), rel=1e-6)
    expected = (2.0 * math.pi) ** -2 * math.pi * 4.0 * quarter
    assert upper_bound_homogeneous(k, math.pi, lam) == pytest.approx(expected, rel=1e-6)


def test_anisotropic_excess_constant():
    f = [1.5, 1.0, 0.5, 1.0, 1.5, 1.0, 0.5, 1.0]
    k = custom_kernel(2, 0.6, 0.1, f)
    assert excess_constant(k) == pytest.approx(symbol_excess_integral(k), rel=1e-8)
    # 比球对称情形大：|f|^{d/α} 的平均 > 1
    assert excess_constant(k) > radial_excess_constant(2, 0.6)


def test_upper_bound_homogeneous_scaling():
    k = riesz_kernel(2, 0.6)
    lam = np.array([0.01, 0.1, 1.0])
    values = upper_bound_homogeneous(k, math.pi, lam)
    assert values.shape == lam.shape
    assert values[0] / values[1] == pytest.approx(10.0 ** (2.0 / 0.6 - 1.0), rel=1e-12)
    with pytest.raises(BoundsError):
        upper_bound_homogeneous(k, math.pi, 0.0)


def test_helmholtz_upper_bound_closed_form():
    value = upper_bound_general(helmholtz_symbol(3, 1.0), 1.0, 0.25)
    radial = 0.75 * math.sqrt(3.0) - math.pi / 3.0
    assert value == pytest.approx((2.0 * math.pi) ** -3 * 4.0 * math.pi * radial, rel=1e-8)


def test_helmholtz_upper_bound_vanishes_above_supremum():
    assert upper_bound_general(helmholtz_symbol(2, 2.0), 1.0, 0.25) == 0.0
    assert upper_bound_general(helmholtz_symbol(2, 2.0), 1.0, 1.0) == 0.0


def test_helmholtz_zero_kappa_matches_homogeneous_bound():
    general = upper_bound_general(helmholtz_symbol(3, 0.0), 2.0, 0.3)
    homogeneous = upper_bound_homogeneous(riesz_kernel(3, 2.0), 2.0, 0.3)
    assert general == pytest.approx(homogeneous, rel=1e-9)
    with pytest.raises(BoundsError):
        upper_bound_general(helmholtz_symbol(2, 0.0), 1.0, 0.3)


def test_tabulated_symbol_bound_matches_helmholtz():
    h = helmholtz_symbol(3, 1.0)
    radii = np.linspace(0.0, 20.0, 401)
    table = TabulatedSymbol(3, radii, h.radial(radii))
    assert table.level_crossing(0.25) == pytest.approx(math.sqrt(3.0), rel=1e-3)
    tabulated = upper_bound_general(table, 1.0, 0.25, epsrel=1e-7)
    assert tabulated == pytest.approx(upper_bound_general(h, 1.0, 0.25), rel=1e-3)
    with pytest.raises(BoundsError):
        TabulatedSymbol(3, np.array([0.0, 1.0]), np.array([0.5, 1.0]))


def test_counting_bound_closed_form_matches_tau_optimum():
    k = riesz_kernel(2, 0.6)
    lam = np.array([0.05, 0.2])
    closed = counting_bound(k, math.pi, lam)
    general = riesz_counting_bound(k, math.pi, lam, optimal_tau(k, lam))
    assert np.allclose(closed, general, rtol=1e-12)


def test_tau_grid_minimum_is_at_optimal_tau():
    k = riesz_kernel(2, 0.6)
    lam = 0.3
    taus, values = tau_scan(k, math.pi, lam, points=400)
    best = taus[int(np.argmin(values))]
    assert abs(best - optimal_tau(k, lam)) <= taus[1] - taus[0]


def test_riesz_counting_bound_rejects_bad_tau():
    k = riesz_kernel(2, 0.6)
    with pytest.raises(BoundsError):
        riesz_counting_bound(k, math.pi, 0.3, 0.3)
    with pytest.raises(BoundsError):
        counting_bound(k, math.pi, -1.0)


def test_general_counting_bound_for_helmholtz():
    h = helmholtz_symbol(3, 0.0)
    bound, tau = counting_bound_general(h, 1.0, 0.2)
    assert 0.0 < tau < 0.2
    # κ=0 即 α=2 的齐次符号，最优 τ = λ(1 - α/d)
    assert tau == pytest.approx(0.2 / 3.0, rel=1e-4)
    assert bound == pytest.approx(counting_bound(riesz_kernel(3, 2.0), 1.0, 0.2), rel=1e-8)


def test_trusted_lambda_grid():
    grid = trusted_lambda_grid(2.0, points=30)
    assert grid.size == 30
    assert grid[0] == pytest.approx(0.01)
    assert grid[-1] == pytest.approx(1.0)
    assert np.all(np.diff(grid) > 0)
    with pytest.raises(BoundsError):
        trusted_lambda_grid(0.0)
    with pytest.raises(BoundsError):
        trusted_lambda_grid(1.0, low_ratio=0.5, high_ratio=0.1)


def test_second_term_coefficient_for_unit_ball():
    # d=3, α=1：γ = -6，系数 = (4π/3)/(2π)³·(-6)/1
    coef = second_term_coefficient(3, 1.0, 4.0 * math.pi / 3.0, -6.0)
    assert coef == pytest.approx(-1.0 / math.pi ** 2, rel=1e-12)
    with pytest.raises(BoundsError):
        second_term_coefficient(3, 2.0, 1.0, -1.0)


def test_lower_bound_two_term():
    k = riesz_kernel(3, 1.0)
    ball = Ball(3)
    ls = lower_symbol(k, expansion(ball, method="closed_form"))
    lam = np.array([1e-3, 1e-2])
    leading, second = lower_bound_two_term(k, ball, ls, lam)
    assert np.allclose(leading, upper_bound_homogeneous(k, ball.measure, lam), rtol=1e-14)
    # 1 - (d-1)/α = -1
    assert np.allclose(second, -1.0 / math.pi ** 2 / lam, rtol=1e-10)
    assert np.all(second < 0)
    assert np.allclose(second_term_ratio(leading + second, leading, lam, 3, 1.0), -1.0 / math.pi ** 2)


def test_lower_bound_requires_smooth_domain():
    k = riesz_kernel(2, 0.6)
    ls = lower_symbol(k, expansion(Ball(2), method="closed_form"))
    with pytest.raises(BoundsError):
        lower_bound_two_term(k, Box([1.0, 1.0]), ls, 0.1)


def test_empirical_means_respect_upper_and_counting_bounds(disk_spectrum):
    kernel, mesh, _, spec = disk_spectrum
    lam = trusted_lambda_grid(spec.max_abs, 30)
    assert np.all(riesz_mean(spec, lam) <= upper_bound_homogeneous(kernel, math.pi, lam))
    assert np.all(counting(spec, lam) <= counting_bound(kernel, math.pi, lam))


def test_trusted_floor_keeps_counts_at_the_top_of_the_spectrum():
    values = np.array([-0.5, 4.0, 3.0, 2.0, 1.0, 0.25] + [0.01] * 194)
    # N=200，1% 对应前两个特征值
    floor = trusted_floor(values, 0.01)
    assert floor == 2.0
    assert np.count_nonzero(np.abs(values) > floor) <= 2
    assert trusted_floor(values, 0.0) == 0.0
    assert trusted_floor(values[:50], 0.01) == 4.0
    with pytest.raises(BoundsError):
        trusted_floor(values, 1.0)


def test_trusted_grid_starts_at_the_floor():
    grid = trusted_lambda_grid(2.0, points=10, floor=0.2)
    assert grid[0] == pytest.approx(0.2)
    assert grid[-1] == pytest.approx(1.0)
    # floor 低于 low_ratio 端点时不起作用
    assert trusted_lambda_grid(2.0, points=10, floor=1e-4)[0] == pytest.approx(0.01)
    # floor 越过上端时退回到上端的一半
    assert trusted_lambda_grid(2.0, points=10, floor=1.5)[0] == pytest.approx(0.5)
    with pytest.raises(BoundsError):
        trusted_lambda_grid(2.0, floor=-1.0)


def _disk_spectrum(cells: int):
    kernel = riesz_kernel(2, 0.6)
    mesh = build_mesh(Ball(2), cells)
    matrix = assemble(mesh, kernel, workers=4)
    return kernel, eigenvalues(matrix, mesh.metadata(), kernel.descriptor())


@pytest.mark.slow
def test_second_term_ratio_on_fine_disk_mesh():
    kernel, spec = _disk_spectrum(3000)
    disk = Ball(2)
    lam = trusted_lambda_grid(spec.max_abs, 30, floor=trusted_floor(spec.retained))[:5]
    assert counting(spec, lam[0]) <= 0.01 * spec.eigenvalues.size

    ls = lower_symbol(kernel, expansion(disk, method="closed_form"))
    leading, second = lower_bound_two_term(kernel, disk, ls, lam)
    empirical = riesz_mean(spec, lam)
    ratio = second_term_ratio(empirical, leading, lam, 2, 0.6)
    predicted = second_term_coefficient(2, 0.6, math.pi, ls.gamma)
    assert np.all(ratio < 0)
    assert np.all((ratio / predicted >= 0.5) & (ratio / predicted <= 2.0))
    assert np.all(leading + second <= empirical)


@pytest.mark.slow
def test_dominance_on_2000_cell_disk():
    kernel, spec = _disk_spectrum(2000)
    lam = trusted_lambda_grid(spec.max_abs, 30)
    assert np.all(riesz_mean(spec, lam) <= upper_bound_homogeneous(kernel, math.pi, lam))
    assert np.all(counting(spec, lam) <= counting_bound(kernel, math.pi, lam))
