import math

import numpy as np
import pytest

from spslater import oracles
from spslater.errors import ParameterError
from spslater.functionals import (
    FunctionalRecord,
    dilate_record,
    evaluate,
    evaluate_with_potential,
    gradients,
    h1_factorization,
    h1_solve,
    lambda_c,
    nehari_H,
    phi_lambda,
    pohozaev,
    rescale_record,
)
from spslater.grid import RadialFunction, gaussian
from spslater.params import ProblemParams, derive_exponents
from spslater.solver import random_smooth_directions

from conftest import get_grid, get_kernel

P32 = ProblemParams(3, 2.0, 2.0, 4.0)
E32 = derive_exponents(P32)


def setup_small():
    grid = get_grid(3, 8.0, 512)
    kernel = get_kernel(3, 2.0, 8.0, 512)
    return grid, kernel


def test_zero_profile():
    grid, kernel = setup_small()
    rec = evaluate(RadialFunction(grid=grid, values=np.zeros(grid.M)), kernel, P32, E32)
    assert rec.I_val == rec.F_val == rec.G_val == rec.dirichlet == rec.coulomb == 0.0


def test_gaussian_record_against_oracles():
    grid, kernel = setup_small()
    rec = evaluate(gaussian(grid), kernel, P32, E32)
    assert rec.dirichlet == pytest.approx(oracles.gaussian_dirichlet(3, 1.0), rel=1e-7)
    assert rec.coulomb == pytest.approx(oracles.gaussian_coulomb(3, 2.0, 2.0), rel=1e-4)
    assert rec.F_val == pytest.approx(oracles.gaussian_lp_integral(3, 1.0, 4.0) / 4.0, rel=1e-6)
    assert rec.G_val == pytest.approx(oracles.gaussian_lp_integral(3, 1.0, 6.0) / 6.0, rel=1e-6)
    assert rec.I_val == pytest.approx(rec.dirichlet / 2 + rec.coulomb / 4, rel=1e-14)
    assert rec.e_norm == pytest.approx(math.sqrt(rec.dirichlet + rec.coulomb ** 0.5), rel=1e-14)


def test_amplitude_homogeneity():
    grid, kernel = setup_small()
    u = gaussian(grid).with_values(gaussian(grid).values)  # untagged: one path
    rec1 = evaluate(u, kernel, P32, E32)
    rec2 = evaluate(u.with_values(2.0 * u.values), kernel, P32, E32)
    assert rec2.dirichlet == pytest.approx(4 * rec1.dirichlet, rel=1e-10)
    assert rec2.coulomb == pytest.approx(2 ** (2 * P32.p) * rec1.coulomb, rel=1e-12)
    assert 4.0 * rec2.F_val == pytest.approx(2 ** 4.0 * 4.0 * rec1.F_val, rel=1e-12)
    assert 6.0 * rec2.G_val == pytest.approx(2 ** 6.0 * 6.0 * rec1.G_val, rel=1e-12)
    # rescale_record reproduces the directly evaluated record
    rs = rescale_record(rec1, 2.0, P32.p, P32.r, E32.two_star)
    assert rs.I_val == pytest.approx(rec2.I_val, rel=1e-10)
    assert rs.F_val == pytest.approx(rec2.F_val, rel=1e-12)


def test_lambda_c_arithmetic():
    rec = FunctionalRecord(I_val=2.0, F_val=1.0, G_val=0.5, dirichlet=0, coulomb=0, e_norm=0)
    assert lambda_c(rec, 1.0) == pytest.approx(0.5)
    assert lambda_c(rec, 2.0 - 0.5) == pytest.approx(0.0)
    # consistency: lambda_c = (Phi_lambda - c)/F + lambda for any lambda
    for lam in (-1.0, 0.0, 0.7, 3.0):
        lhs = lambda_c(rec, 1.0)
        rhs = (phi_lambda(rec, lam) - 1.0) / rec.F_val + lam
        assert lhs == pytest.approx(rhs, rel=1e-14)
    with pytest.raises(ParameterError):
        lambda_c(FunctionalRecord(1, 0.0, 1, 0, 0, 0), 1.0)


def test_nehari_H():
    # r = q: first term vanishes
    e_q = derive_exponents(ProblemParams(3, 2.0, 2.0, 3.0))
    rec = FunctionalRecord(I_val=1.0, F_val=1.0, G_val=0.5, dirichlet=0, coulomb=0, e_norm=0)
    assert nehari_H(rec, e_q) == pytest.approx((e_q.s_2star - e_q.s_q) * 0.5)

    # plain arithmetic: s_r-s_q = 2, s_2*-s_r = 4, I = 1, G = 0.5 -> H = 4
    class FakeExps:
        s_q, s_r, s_2star = 1.0, 3.0, 7.0
    assert nehari_H(rec, FakeExps) == pytest.approx(2 * 1.0 + 4 * 0.5)


def test_nehari_membership_via_dilation():
    # H(u_t) = s_r c defines membership; check through the exact record dilation
    grid, kernel = setup_small()
    rec = evaluate(gaussian(grid), kernel, P32, E32)
    from spslater.fiber import tc_of_record

    c = 0.9
    t = tc_of_record(c, rec, E32).t_c
    rec_t = dilate_record(rec, t, P32, E32)
    assert nehari_H(rec_t, E32) == pytest.approx(E32.s_r * c, rel=1e-10)


def test_pohozaev_identities():
    grid, kernel = setup_small()
    zero = RadialFunction(grid=grid, values=np.zeros(grid.M))
    P_, Ps = pohozaev(evaluate(zero, kernel, P32, E32), 1.0, P32, E32)
    assert P_ == 0.0 and Ps == 0.0

    # linear-combination identity: P_scaled = sigma*<Phi'(u),u> - P on any record
    rec = evaluate(gaussian(grid), kernel, P32, E32)
    lam = 0.83
    P_, Ps = pohozaev(rec, lam, P32, E32)
    pairing = (
        rec.dirichlet + rec.coulomb - lam * P32.r * rec.F_val
        - E32.two_star * rec.G_val
    )
    assert Ps == pytest.approx(E32.sigma * pairing - P_, rel=1e-12, abs=1e-12)


def test_gradient_finite_differences():
    grid, kernel = setup_small()
    u = RadialFunction(grid=grid, values=gaussian(grid).values)
    rec, pot = evaluate_with_potential(u, kernel, P32, E32)
    gr = gradients(u, kernel, P32, E32, 1.0, pot=pot, rec=rec)
    dirs = random_smooth_directions(grid, 10, seed=11)
    h = 1e-5
    for v in dirs:
        up = RadialFunction(grid=grid, values=u.values + h * v)
        um = RadialFunction(grid=grid, values=u.values - h * v)
        rp, rm = evaluate(up, kernel, P32, E32), evaluate(um, kernel, P32, E32)
        for cov, f in (
            (gr.gI, lambda rr: rr.I_val),
            (gr.gF, lambda rr: rr.F_val),
            (gr.gG, lambda rr: rr.G_val),
            (gr.g_lambda_c, lambda rr: lambda_c(rr, 1.0)),
        ):
            fd = (f(rp) - f(rm)) / (2 * h)
            assert fd == pytest.approx(float(cov @ v), rel=1e-4, abs=1e-10)


def test_gradient_pairings():
    grid, kernel = setup_small()
    u = RadialFunction(grid=grid, values=gaussian(grid).values)
    rec, pot = evaluate_with_potential(u, kernel, P32, E32)
    gr = gradients(u, kernel, P32, E32, 1.0, pot=pot, rec=rec)
    # degree-2 and degree-2p homogeneity: <gI, u> = dirichlet + coulomb
    assert float(gr.gI @ u.values) == pytest.approx(rec.dirichlet + rec.coulomb, rel=1e-13)
    # for u >= 0 the F-gradient is pointwise weights * u^(r-1)
    expected = grid.quad_weights * u.values ** (P32.r - 1)
    assert np.allclose(gr.gF, expected, rtol=1e-13, atol=0)
    # gF, gG vanish where u vanishes
    mask = u.values == 0.0
    assert np.all(gr.gF[mask] == 0.0) and np.all(gr.gG[mask] == 0.0)


def test_scaling_suite():
    # dilation laws along the fiber at 1e-5, via analytic dilation of a Gaussian
    grid = get_grid(3, 40.0, 2048)
    kernel = get_kernel(3, 2.0, 40.0, 2048)
    from spslater.grid import resample_dilation

    u = gaussian(grid)
    base = evaluate(u, kernel, P32, E32)
    for t in (0.5, 0.8, 1.25, 2.0):
        ut = resample_dilation(u, t, E32.sigma)
        rec = evaluate(ut, kernel, P32, E32)
        assert rec.I_val / base.I_val == pytest.approx(t ** E32.s_q, rel=1e-5)
        assert rec.F_val / base.F_val == pytest.approx(t ** E32.s_r, rel=1e-5)
        assert rec.G_val / base.G_val == pytest.approx(t ** E32.s_2star, rel=1e-5)


def test_H_nonnegative():
    grid, kernel = setup_small()
    rng = np.random.default_rng(5)
    for _ in range(10):
        vals = rng.normal(size=grid.M) * np.exp(-grid.nodes)
        rec = evaluate(RadialFunction(grid=grid, values=vals), kernel, P32, E32)
        assert nehari_H(rec, E32) >= 0.0


def test_h1_preconditioner_solves():
    grid, _ = setup_small()
    factor = h1_factorization(grid)
    rng = np.random.default_rng(2)
    cov = rng.normal(size=grid.M)
    z = h1_solve(factor, cov)
    T = grid.stiffness
    resid = T @ z + grid.quad_weights * z - cov
    assert np.max(np.abs(resid)) < 1e-10 * np.max(np.abs(cov))
