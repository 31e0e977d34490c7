"""Stochastic extension layer: tail rates of coordinate truncations, cylinder
approximation along subspace filtrations, and projected covariances."""

import math

import numpy as np
import pytest

from gaussweyl.stochproj import (
    DirectionVector,
    covariance_and_bound,
    coordinate_frame,
    cylinder_extension_check,
    exact_conv_rate,
    finite_direction,
    geometric_direction,
    mc_conv_rate,
    power_direction,
    random_frame,
    rotated_frame,
    write_rate_csv,
)

TRIGAMMA_5 = 0.22132295573711533  # sum_{j>4} j^{-2}


def test_geometric_direction_tails():
    a = geometric_direction()
    assert a.norm_sq == 1.0
    assert a.tail_sq(0) == 1.0
    assert a.tail_sq(4) == 0.0625
    assert a.coord(1) == pytest.approx(2.0**-0.5, rel=1e-15)
    assert np.allclose(a.coords(3), [2.0**-0.5, 0.5, 2.0**-1.5])
    with pytest.raises(ValueError):
        a.coord(0)
    with pytest.raises(ValueError):
        a.tail_sq(-1)


def test_power_direction_tails():
    a = power_direction()
    assert abs(a.norm_sq - math.pi**2 / 6.0) <= 1e-15
    assert abs(a.tail_sq(0) - a.norm_sq) <= 1e-14
    assert abs(a.tail_sq(4) - TRIGAMMA_5) <= 1e-15
    assert a.coord(3) == pytest.approx(1.0 / 3.0, rel=1e-15)
    assert a.tail_norm(4) == math.sqrt(a.tail_sq(4))


def test_finite_direction():
    a = finite_direction([3.0, 4.0])
    assert a.norm_sq == 25.0
    assert a.tail_sq(1) == 16.0
    assert a.tail_sq(2) == 0.0
    assert a.coord(5) == 0.0
    with pytest.raises(ValueError):
        finite_direction([1.0, math.inf])
    with pytest.raises(ValueError):
        DirectionVector("bad", math.inf, lambda j: 0.0, lambda n: 0.0)


FROZEN_RATES = [
    (2.0, 0.25),
    (1.0, 0.19947114020071635),
    (4.0, 0.3290185032381232),
]


@pytest.mark.parametrize("p,want", FROZEN_RATES)
def test_exact_rate_geometric_frozen(p, want):
    assert abs(exact_conv_rate(geometric_direction(), 4, p, 1.0) - want) <= 1e-15


def test_exact_rate_guards():
    a = geometric_direction()
    with pytest.raises(ValueError):
        exact_conv_rate(a, 4, 0.5, 1.0)
    with pytest.raises(ValueError):
        exact_conv_rate(a, 4, 2.0, 0.0)


@pytest.mark.parametrize("p", [1.0, 2.0, 4.0])
def test_mc_rate_brackets_exact(p):
    a = geometric_direction()
    est, se = mc_conv_rate(a, 4, p, 1.0, 20000, seed=7)
    assert se > 0.0
    assert abs(est - exact_conv_rate(a, 4, p, 1.0)) <= 3.0 * se


def test_mc_rate_power_direction():
    a = power_direction()
    est, se = mc_conv_rate(a, 4, 2.0, 1.0, 20000, seed=11)
    assert abs(est - exact_conv_rate(a, 4, 2.0, 1.0)) <= 3.0 * se


@pytest.mark.parametrize("p", [1.0, 2.0, 4.0])
def test_mc_rate_scales_like_sqrt_s(p):
    a = geometric_direction()
    e1, _ = mc_conv_rate(a, 4, p, 1.0, 5000, seed=3)
    e4, _ = mc_conv_rate(a, 4, p, 4.0, 5000, seed=3)
    assert e4 == pytest.approx(2.0 * e1, rel=1e-12)


def test_mc_rate_zero_tail_and_guards():
    a = finite_direction([1.0, 0.5])
    assert mc_conv_rate(a, 2, 2.0, 1.0, 2000) == (0.0, 0.0)
    g = geometric_direction()
    with pytest.raises(ValueError):
        mc_conv_rate(g, 4, 2.0, 1.0, 999)
    with pytest.raises(ValueError):
        mc_conv_rate(g, 4, 0.5, 1.0, 2000)
    with pytest.raises(ValueError):
        mc_conv_rate(g, 4, 2.0, -1.0, 2000)


def _phi3(coords):
    return coords[:, 0] + coords[:, 1] ** 2 + np.sin(coords[:, 2])


def test_cylinder_extension_nested_filtration():
    E = coordinate_frame(3, 6)
    frames = [coordinate_frame(k, 6) for k in (1, 2, 3, 4)]
    rows, nonincreasing = cylinder_extension_check(_phi3, E, frames, 2.0, 1.0, 4000, seed=5)
    assert nonincreasing
    assert [r[1] for r in rows] == [1, 2, 3, 4]
    ests = [r[2] for r in rows]
    assert ests[0] > ests[1] > 0.0
    # once E_n contains the cylinder base the error vanishes identically
    assert ests[2] == 0.0 and ests[3] == 0.0


def test_cylinder_extension_detects_increase():
    E = coordinate_frame(3, 6)
    frames = [coordinate_frame(k, 6) for k in (2, 1)]
    _, nonincreasing = cylinder_extension_check(_phi3, E, frames, 2.0, 1.0, 4000, seed=5)
    assert not nonincreasing


def test_cylinder_extension_guards():
    E = coordinate_frame(2, 4)
    ok = [coordinate_frame(2, 4)]
    phi = lambda c: c[:, 0] * c[:, 1]
    with pytest.raises(ValueError):
        cylinder_extension_check(phi, E, ok, 2.0, 1.0, 10)
    with pytest.raises(ValueError):
        cylinder_extension_check(phi, np.array([[1.0, 1.0, 0.0, 0.0]]), ok, 2.0, 1.0, 2000)
    with pytest.raises(ValueError):
        cylinder_extension_check(phi, E, [np.array([[1.0, 0.0], [0.0, 1.0]])], 2.0, 1.0, 2000)
    with pytest.raises(ValueError):
        cylinder_extension_check(lambda c: c, E, ok, 2.0, 1.0, 2000)


def test_covariance_rotated_line():
    B = rotated_frame(1, 2, math.pi / 4.0)
    cov = covariance_and_bound(B, 2, 1.0)
    assert np.max(np.abs(cov.K - 0.5 * np.ones((2, 2)))) <= 1e-12
    assert cov.eigenvalues[0] == pytest.approx(0.0, abs=1e-12)
    assert cov.eigenvalues[-1] == pytest.approx(1.0, rel=1e-12)
    assert cov.lambda_max <= cov.s + 1e-10
    assert abs(cov.det) <= 1e-12
    assert "1 rows" in cov.provenance


def test_covariance_full_frame_inverse_path():
    cov = covariance_and_bound(coordinate_frame(2, 2), 2, 3.0)
    assert np.allclose(cov.K, 3.0 * np.eye(2))
    assert cov.det == pytest.approx(9.0, rel=1e-12)
    assert cov.lambda_max == pytest.approx(3.0, rel=1e-12)


def test_covariance_random_frames_spectral_bound():
    s = 0.7
    for seed in range(20):
        B = random_frame(3, 6, seed)
        cov = covariance_and_bound(B, 4, s)
        assert cov.eigenvalues[0] >= -1e-10
        assert cov.lambda_max <= s + 1e-10


def test_covariance_guards():
    with pytest.raises(ValueError):
        covariance_and_bound(np.array([[1.0, 0.0], [1.0, 0.0]]), 2, 1.0)
    with pytest.raises(ValueError):
        covariance_and_bound(coordinate_frame(1, 2), 2, 0.0)
    with pytest.raises(ValueError):
        covariance_and_bound(coordinate_frame(1, 2), 3, 1.0)
    with pytest.raises(ValueError):
        rotated_frame(1, 1, 0.3)
    with pytest.raises(ValueError):
        random_frame(0, 3, 1)


def test_write_rate_csv(tmp_path):
    path = tmp_path / "rates.csv"
    write_rate_csv(path, [(4, 0.25, 0.2501, 0.003)])
    lines = path.read_text().splitlines()
    assert lines[0] == "n,exact,mc_estimate,std_error"
    n, exact, est, se = lines[1].split(",")
    assert n == "4"
    assert float(exact) == 0.25 and float(est) == 0.2501 and float(se) == 0.003
