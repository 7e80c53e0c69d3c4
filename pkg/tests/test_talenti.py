import numpy as np
import pytest

from spslater import oracles
from spslater.fiber import t0_and_cstar
from spslater.grid import lp_norm_pow
from spslater.params import ProblemParams, derive_exponents
from spslater.talenti import (
    TalentiParams,
    coulomb_asymptotics,
    lambda_sign_probe,
    make_u_eps,
    make_v_eps,
    norm_asymptotics,
    sobolev_estimate,
)

from conftest import get_grid, get_kernel

P45 = ProblemParams(3, 2.0, 2.0, 4.5)
E45 = derive_exponents(P45)


def test_v_eps_normalization():
    grid = get_grid(3, 40.0, 2048)
    for eps in (0.4, 0.05):
        v = make_v_eps(TalentiParams(eps=eps, rho=10.0), grid)
        assert lp_norm_pow(v, 6.0) == pytest.approx(1.0, abs=1e-8)


def test_cutoff_support():
    grid = get_grid(3, 40.0, 2048)
    u = make_u_eps(TalentiParams(eps=0.2, rho=10.0), grid)
    r = grid.nodes
    assert np.all(u.values[r >= 10.0] == 0.0)
    core = u.values[r <= 5.0] * (0.2 ** 2 + r[r <= 5.0] ** 2) ** 0.5 / 0.2 ** 0.5
    assert np.allclose(core, 1.0, rtol=1e-12)  # theta = 1 inside rho/2


def test_eps_resolution_warning():
    grid = get_grid(3, 40.0, 256)
    with pytest.warns(UserWarning, match="fewer than 8"):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("always")
            make_v_eps(TalentiParams(eps=1e-4, rho=10.0), grid)


def test_sobolev_estimate_and_deficit_slope():
    grid = get_grid(3, 40.0, 2048)
    fit = sobolev_estimate(grid)
    S_exact = oracles.sobolev_constant(3)
    assert fit.S == pytest.approx(S_exact, rel=1e-2)
    # gradient-energy deficit decays like eps^(N-2) = eps
    assert fit.deficit_slope == pytest.approx(1.0, rel=0.15)
    # quotients approach S from above
    assert np.all(fit.rayleigh > fit.S)


def test_norm_slopes_three_branches():
    grid = get_grid(3, 40.0, 2048)
    rep = norm_asymptotics(grid, 4.0)
    assert rep.branch == "above"
    assert rep.fitted == pytest.approx(rep.expected, rel=0.10)

    rep = norm_asymptotics(grid, 2.5)
    assert rep.branch == "below"
    assert rep.fitted == pytest.approx(rep.expected, rel=0.10)

    grid4 = get_grid(4, 40.0, 2048)
    rep = norm_asymptotics(grid4, 2.0)
    assert rep.branch == "log"
    assert rep.expected == 2.0
    assert rep.fitted == pytest.approx(rep.expected, rel=0.10)


def test_norm_lower_bound_two_sided():
    # above N/(N-2) the epsilon power is sharp (two-sided)
    grid = get_grid(3, 40.0, 2048)
    for ell in (3.5, 4.5, 5.0):
        rep = norm_asymptotics(grid, ell)
        assert rep.fitted == pytest.approx(rep.expected, rel=0.10)


def test_coulomb_slopes():
    grid = get_grid(3, 40.0, 2048)
    kernel = get_kernel(3, 2.0, 40.0, 2048)
    rep = coulomb_asymptotics(grid, kernel, 2.0)
    assert rep.branch == "below" and rep.bound_exponent == 2.0
    assert rep.fitted >= 1.8
    assert rep.fitted <= rep.bound_exponent * 1.1

    rep = coulomb_asymptotics(grid, kernel, 2.6)
    assert rep.branch == "above"
    assert rep.bound_exponent == pytest.approx(3 + 2 - 1 * 2.6)
    assert rep.fitted <= rep.bound_exponent * 1.1
    # decay is monotone along the sweep
    assert np.all(np.diff(rep.values) > 0)


def test_sign_probe_below_threshold():
    grid = get_grid(3, 40.0, 2048)
    kernel = get_kernel(3, 2.0, 40.0, 2048)
    S = sobolev_estimate(grid).S
    c_star = t0_and_cstar(E45, S).c_star
    probe = lambda_sign_probe(0.5 * c_star, grid, kernel, P45)
    assert np.all(probe.lambda_values > 0)
    # Lemma-style lower bound with the self-consistent S
    for lam, eps in zip(probe.lambda_values, probe.eps_list):
        v = make_v_eps(TalentiParams(eps=eps, rho=10.0), grid)
        F = lp_norm_pow(v, 4.5) / 4.5
        t0 = t0_and_cstar(E45, S, 1.0).t_0
        assert lam >= t0 ** (-E45.s_r) * (c_star - 0.5 * c_star) / F * (1 - 1e-6)


def test_sign_probe_at_and_beyond_threshold():
    grid = get_grid(3, 40.0, 2048)
    kernel = get_kernel(3, 2.0, 40.0, 2048)
    S = sobolev_estimate(grid).S
    c_star = t0_and_cstar(E45, S).c_star
    eps_deep = np.geomspace(0.4, 0.004, 12)

    at = lambda_sign_probe(c_star, grid, kernel, P45, eps_list=eps_deep)
    assert np.all(np.diff(at.lambda_values) > 0)      # decreasing toward eps -> 0
    assert at.min_value < 0.05 * at.first_value        # tends to zero from above
    lo, hi = at.t_c_bracket
    assert 0.1 < lo <= hi < 10.0                       # fiber parameter stays bounded

    beyond = lambda_sign_probe(1.5 * c_star, grid, kernel, P45, eps_list=eps_deep)
    assert beyond.min_value < 0.0                      # negative value exhibited
