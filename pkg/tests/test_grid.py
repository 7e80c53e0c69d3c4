import math

import numpy as np
import pytest

from spslater.errors import GridMismatchError, TruncationWarning
from spslater.grid import (
    RadialFunction,
    dirichlet_energy,
    from_profile,
    gaussian,
    lp_norm_pow,
    make_grid,
    read_radial_csv,
    resample_dilation,
    sphere_area,
    write_radial_csv,
)
from spslater import oracles

from conftest import get_grid


def test_make_grid_validation():
    with pytest.raises(ValueError):
        make_grid(3, R_max=-1.0)
    with pytest.raises(ValueError):
        make_grid(3, M=8)
    with pytest.raises(ValueError):
        make_grid(3, gamma=0.5)


def test_weights_positive_and_sum_exact():
    for N, gamma in [(3, 2.0), (4, 2.0), (3, 3.0), (6, 1.0)]:
        g = make_grid(N, R_max=17.0, M=300, gamma=gamma)
        assert np.all(np.diff(g.nodes) > 0)
        assert np.all(g.quad_weights > 0)
        exact = sphere_area(N) * g.R_max ** N / N
        assert abs(g.quad_weights.sum() - exact) / exact < 1e-10


def test_ball_volumes_and_monomial():
    g3 = make_grid(3, R_max=1.0, M=2048)
    ones = np.ones(g3.M)
    assert g3.integrate(ones) == pytest.approx(4 * math.pi / 3, rel=1e-8)
    # f(r) = r against r^2 dr: 4 pi / 4 = pi
    assert g3.integrate(g3.nodes) == pytest.approx(math.pi, rel=1e-12)

    g4 = make_grid(4, R_max=1.0, M=2048)
    assert g4.integrate(np.ones(g4.M)) == pytest.approx(math.pi ** 2 / 2, rel=1e-8)


def test_degree_one_exactness():
    # the rule integrates 1 and r against r^(N-1) exactly (linear contract)
    g = make_grid(5, R_max=3.0, M=64, gamma=2.0)
    exact0 = sphere_area(5) * 3.0 ** 5 / 5
    exact1 = sphere_area(5) * 3.0 ** 6 / 6
    assert g.integrate(np.ones(g.M)) == pytest.approx(exact0, rel=1e-13)
    assert g.integrate(g.nodes) == pytest.approx(exact1, rel=1e-13)


def test_refinement_reduces_error():
    vals = {}
    for M in (512, 1024):
        g = make_grid(3, R_max=12.0, M=M)
        u = gaussian(g)
        exact = oracles.gaussian_lp_integral(3, 1.0, 2.0)
        vals[M] = abs(lp_norm_pow(u, 2.0) - exact)
    assert vals[512] / vals[1024] >= 3.0


def test_gaussian_l2():
    g = get_grid(3, 40.0, 2048)
    u = gaussian(g)
    exact = oracles.gaussian_lp_integral(3, 1.0, 2.0)
    assert lp_norm_pow(u, 2.0) == pytest.approx(exact, rel=1e-6)
    assert lp_norm_pow(u.with_values(np.zeros(g.M)), 3.0) == 0.0
    with pytest.raises(ValueError):
        lp_norm_pow(u, 0.5)


def test_dirichlet_energy_gaussian():
    g = make_grid(3, R_max=12.0, M=4096)
    exact = oracles.gaussian_dirichlet(3, 1.0)
    u = gaussian(g)
    assert dirichlet_energy(u) == pytest.approx(exact, rel=1e-6)  # analytic path
    u_fd = u.with_values(u.values)
    assert dirichlet_energy(u_fd) == pytest.approx(exact, rel=1e-4)  # sampled path
    assert dirichlet_energy(u.with_values(np.zeros(g.M))) == 0.0


def test_dirichlet_scaling():
    # u(2r) multiplies the energy by 2^(2-N)
    g = make_grid(3, R_max=12.0, M=2048)
    u1 = gaussian(g, a=1.0)
    u2 = from_profile(g, lambda r: np.exp(-(2 * r) ** 2),
                      lambda r: -8 * r * np.exp(-(2 * r) ** 2))
    ratio = dirichlet_energy(u2) / dirichlet_energy(u1)
    assert ratio == pytest.approx(2.0 ** (2 - 3), rel=1e-8)


def test_resample_identity_and_analytic():
    g = get_grid(3, 40.0, 2048)
    u = gaussian(g)
    same = resample_dilation(u, 1.0, sigma=2.0)
    assert np.allclose(same.values, u.values, rtol=0, atol=1e-15)

    ut = resample_dilation(u, 2.0, sigma=2.0)
    expected = 4.0 * np.exp(-4.0 * g.nodes ** 2)
    assert np.max(np.abs(ut.values - expected)) < 1e-8


def test_resample_interpolation_composition():
    g = get_grid(3, 40.0, 2048)
    u = gaussian(g).with_values(np.exp(-g.nodes ** 2))  # untagged
    a = resample_dilation(resample_dilation(u, 1.3, 2.0), 1.1, 2.0)
    b = resample_dilation(u, 1.3 * 1.1, 2.0)
    scale = np.max(np.abs(b.values))
    assert np.max(np.abs(a.values - b.values)) / scale < 1e-6


def test_resample_truncation_warning():
    g = make_grid(3, R_max=10.0, M=256)
    u = from_profile(g, lambda r: 1.0 / (1.0 + r ** 2)).with_values(
        1.0 / (1.0 + g.nodes ** 2)
    )
    with pytest.warns(TruncationWarning):
        resample_dilation(u, 0.3, sigma=2.0)


def test_radial_function_validation():
    g = make_grid(3, R_max=5.0, M=64)
    with pytest.raises(GridMismatchError):
        RadialFunction(grid=g, values=np.ones(32))
    with pytest.raises(ValueError):
        RadialFunction(grid=g, values=np.full(64, np.nan))


def test_csv_round_trip(tmp_path):
    g = make_grid(3, R_max=7.5, M=128, gamma=2.0)
    u = gaussian(g).with_values(np.exp(-g.nodes ** 2))
    path = tmp_path / "profile.csv"
    write_radial_csv(u, path)
    back = read_radial_csv(path)
    assert back.grid.key() == g.key()
    assert np.array_equal(back.values, u.values)
