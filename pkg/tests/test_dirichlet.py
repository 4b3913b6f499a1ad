import math

import numpy as np
import pytest

from src.bounds import counting_bound
from src.dirichlet import (
    DirichletError,
    DirichletSpectrum,
    berezin_bound,
    box_spectrum,
    counting_function,
    pl_bound,
    polya_bound,
    riesz_mean,
    semiclassical_bound,
)
from src.kernels import riesz_kernel

NU = np.linspace(3.0 * math.pi ** 2, 500.0, 50)


@pytest.fixture(scope="module")
def cube():
    return box_spectrum((1.0, 1.0, 1.0), 500.0)


def test_first_eigenvalues_of_unit_cube(cube):
    first = 3.0 * math.pi ** 2
    assert cube.eigenvalues[0] == pytest.approx(first, rel=1e-14)
    # (2,1,1) 的三个排列
    assert np.allclose(cube.eigenvalues[1:4], 6.0 * math.pi ** 2, rtol=1e-14)
    assert cube.eigenvalues[4] > 6.0 * math.pi ** 2 * (1.0 + 1e-12)
    assert np.all(cube.eigenvalues <= 500.0)


def test_counting_is_strict(cube):
    first = float(cube.eigenvalues[0])
    assert counting_function(cube, first) == 0
    assert counting_function(cube, np.nextafter(first, np.inf)) == 1
    assert counting_function(cube, 6.0 * math.pi ** 2 + 1e-9) == 4


def test_rectangle_spectrum_against_brute_force():
    sides = (1.0, 2.0)
    spec = box_spectrum(sides, 200.0)
    brute = sorted(math.pi ** 2 * ((m / 1.0) ** 2 + (n / 2.0) ** 2)
                   for m in range(1, 10) for n in range(1, 20)
                   if math.pi ** 2 * ((m / 1.0) ** 2 + (n / 2.0) ** 2) <= 200.0)
    assert np.allclose(spec.eigenvalues, brute, rtol=1e-14)
    assert spec.measure == 2.0


def test_enumeration_guards():
    with pytest.raises(DirichletError):
        box_spectrum((1.0, 1.0), 10.0)
    with pytest.raises(DirichletError):
        box_spectrum((1.0, -1.0), 100.0)
    with pytest.raises(DirichletError):
        box_spectrum((1.0, 1.0, 1.0), 1e5, max_modes=1000)
    spec = box_spectrum((1.0, 1.0), 100.0)
    with pytest.raises(DirichletError):
        counting_function(spec, 150.0)


@pytest.mark.parametrize("sides, nu_max", [
    ((1.0, 1.0), 26.0 * math.pi ** 2),
    ((1.0, 2.0, 0.5), math.pi ** 2 * (9.0 + 0.25 + 4.0)),
    ((1.0, 1.0, 1.0), 27.0 * math.pi ** 2),
])
def test_spectrum_is_complete_at_exact_mode_boundaries(sides, nu_max):
    spec = box_spectrum(sides, nu_max)
    assert spec.complete
    top = [int(s * math.sqrt(nu_max) / math.pi) + 2 for s in sides]
    brute = sorted(
        v for v in (math.pi ** 2 * sum((m / s) ** 2 for m, s in zip(modes, sides))
                    for modes in np.ndindex(*top) if min(modes) > 0)
        if v <= nu_max * (1.0 + 1e-12))
    assert spec.eigenvalues.size == len(brute)
    assert np.allclose(spec.eigenvalues, brute, rtol=1e-14)
    # 恰好落在上限上的特征值被保留
    assert spec.eigenvalues[-1] == pytest.approx(nu_max, rel=1e-12)


def test_incomplete_spectrum_refuses_counting():
    full = box_spectrum((1.0, 1.0), 100.0)
    partial = DirichletSpectrum(sides=full.sides, nu_max=full.nu_max,
                                eigenvalues=full.eigenvalues[:-1], complete=False)
    with pytest.raises(DirichletError):
        counting_function(partial, 50.0)
    with pytest.raises(DirichletError):
        riesz_mean(partial, 50.0)


def test_counting_bounds_dominate(cube):
    counts = counting_function(cube, NU)
    assert np.all(counts <= polya_bound(3, 1.0, NU))
    assert np.all(counts <= semiclassical_bound(3, 1.0, NU))
    assert np.all(counts <= pl_bound(3, 1.0, NU))


def test_pl_to_semiclassical_ratio():
    ratio = pl_bound(3, 1.0, NU) / semiclassical_bound(3, 1.0, NU)
    assert np.allclose(ratio, (9.0 / 5.0) ** 1.5, rtol=1e-12, atol=0.0)


def test_pl_bound_is_counting_bound_of_resolvent():
    k = riesz_kernel(3, 2.0)
    for nu in (30.0, 123.4, 500.0):
        assert pl_bound(3, 1.0, nu) == pytest.approx(counting_bound(k, 1.0, 1.0 / nu), rel=1e-12)
    assert pl_bound(4, 1.0, 1.0) == pytest.approx(1.0 / (8.0 * math.pi ** 2), rel=1e-12)
    with pytest.raises(DirichletError):
        pl_bound(2, 1.0, 100.0)


def test_weyl_ratio_at_top_of_range(cube):
    ratio = counting_function(cube, 500.0) / polya_bound(3, 1.0, 500.0)
    assert 0.7 <= ratio <= 1.0


def test_berezin_bound_dominates_riesz_means(cube):
    assert np.all(riesz_mean(cube, NU) <= berezin_bound(3, 1.0, NU))
    assert riesz_mean(cube, 3.0 * math.pi ** 2) == 0.0
    assert riesz_mean(cube, 40.0) == pytest.approx(40.0 - 3.0 * math.pi ** 2, rel=1e-14)


def test_polya_bound_in_two_dimensions():
    # d=2：|Ω|ν/(4π)
    assert polya_bound(2, 2.0, 10.0) == pytest.approx(20.0 / (4.0 * math.pi), rel=1e-14)
