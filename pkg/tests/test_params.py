import math

import numpy as np
import pytest

from spslater.errors import ParameterError
from spslater.params import (
    ProblemParams,
    classify_regime,
    derive_exponents,
    params_json_dict,
    riesz_constant,
)


def random_valid_params(rng, with_r=True):
    N = int(rng.integers(3, 11))
    alpha = float(rng.uniform(0.05, N - 0.05))
    p_hi = (N + alpha) / (N - 2)
    p = float(rng.uniform(1.0 + 0.02 * (p_hi - 1.0), p_hi - 0.02 * (p_hi - 1.0)))
    if not with_r:
        return N, alpha, p
    q = 2 * (2 * p + alpha) / (2 + alpha)
    two_star = 2 * N / (N - 2)
    r = float(rng.uniform(q + 0.02 * (two_star - q), two_star - 0.02 * (two_star - q)))
    return ProblemParams(N=N, alpha=alpha, p=p, r=r)


def test_exponent_examples():
    e = derive_exponents(ProblemParams(3, 2.0, 2.0, 3.0))
    assert (e.sigma, e.q, e.two_star) == (2.0, 3.0, 6.0)
    assert (e.s_q, e.s_r, e.s_2star) == (3.0, 3.0, 9.0)

    e = derive_exponents(ProblemParams(4, 2.0, 2.0, 3.0))
    assert (e.sigma, e.q, e.two_star) == (2.0, 3.0, 4.0)
    assert (e.s_q, e.s_r, e.s_2star) == (2.0, 2.0, 4.0)

    e = derive_exponents(ProblemParams(3, 2.0, 2.0, 4.0))
    assert e.s_r == pytest.approx(2 * 4 - 3, abs=1e-14)


def test_exponent_identities_random():
    rng = np.random.default_rng(42)
    for _ in range(1000):
        params = random_valid_params(rng)
        e = derive_exponents(params)
        assert abs(e.s_q - (e.sigma * e.q - params.N)) < 1e-12
        assert abs(e.s_2star - (e.sigma * e.two_star - params.N)) < 1e-12
        assert e.s_q > 0
        assert e.s_r >= e.s_q - 1e-12
        assert e.s_2star > e.s_r


def test_s_r_difference_scales_with_sigma():
    rng = np.random.default_rng(7)
    for _ in range(200):
        N, alpha, p = random_valid_params(rng, with_r=False)
        q = 2 * (2 * p + alpha) / (2 + alpha)
        two_star = 2 * N / (N - 2)
        r1, r2 = sorted(rng.uniform(q, two_star, size=2))
        sigma = (2 + alpha) / (2 * (p - 1))
        s1 = sigma * r1 - N
        s2 = sigma * r2 - N
        assert abs((s2 - s1) - sigma * (r2 - r1)) < 1e-12 * max(1.0, abs(s2))


def test_riesz_constant_values():
    assert riesz_constant(3, 2.0) == pytest.approx(1.0 / (4 * math.pi), rel=1e-14)
    assert riesz_constant(4, 2.0) == pytest.approx(1.0 / (4 * math.pi ** 2), rel=1e-14)
    val = riesz_constant(3, 1.5)
    assert val > 0 and math.isfinite(val)
    # continuity in alpha around 1.5
    assert riesz_constant(3, 1.5) == pytest.approx(riesz_constant(3, 1.5 + 1e-9), rel=1e-6)
    with pytest.raises(ParameterError):
        riesz_constant(3, 3.5)


def test_regime_examples():
    # 2Np/(N+alpha) = 2.4 < 3 and (N-2)r - 4 = 0.5 > 0: fifth branch
    reg = classify_regime(ProblemParams(3, 2.0, 2.0, 4.5))
    assert reg.case_id == 5 and reg.lambda_tilde1_zero

    # boundary (N-2)r - 4 = 0 is not > 0: no branch
    reg = classify_regime(ProblemParams(3, 2.0, 2.0, 4.0))
    assert reg.case_id == 0 and not reg.lambda_tilde1_zero

    # N=5, alpha=4, p=2, r=q: evaluated by substitution
    p = ProblemParams(5, 4.0, 2.0, r=2 * (2 * 2.0 + 4.0) / (2 + 4.0))
    # 2Np/(N+alpha) = 20/9 > 5/3; N+alpha-(N-2)(p+1) = 0 >= 0; (N-2)r-4 = 4
    assert classify_regime(p).case_id == 1


def test_regime_branches_mutually_exclusive():
    rng = np.random.default_rng(3)
    tol = 1e-12
    for _ in range(500):
        params = random_valid_params(rng)
        N, alpha, p, r = params.N, params.alpha, params.p, params.r
        lhs = 2 * N * p / (N + alpha)
        rhs = N / (N - 2)
        scale = max(lhs, rhs)
        branches = [
            lhs > rhs + tol * scale and N + alpha - (N - 2) * (p + 1) >= -tol
            and (N - 2) * r - 4 > tol,
            lhs > rhs + tol * scale and N + alpha - (N - 2) * (p + 1) < -tol
            and 2 * alpha + (N - 2) * (r - 2 * p) > tol,
            abs(lhs - rhs) <= tol * scale and 4 + alpha - N > tol
            and (N - 2) * r - 4 > tol,
            abs(lhs - rhs) <= tol * scale and 4 + alpha - N <= tol
            and alpha - N + (N - 2) * r > tol,
            lhs < rhs - tol * scale and (N - 2) * r - 4 > tol,
        ]
        assert sum(branches) <= 1
        case = classify_regime(params).case_id
        if case:
            assert branches[case - 1]
        else:
            assert not any(branches)


def test_validation_messages():
    with pytest.raises(ParameterError, match="N >= 3"):
        ProblemParams(2, 1.0, 1.5, 2.0)
    with pytest.raises(ParameterError, match="alpha"):
        ProblemParams(3, 0.0, 2.0, 3.0)
    with pytest.raises(ParameterError, match="p must lie"):
        ProblemParams(3, 2.0, 5.0, 3.0)
    with pytest.raises(ParameterError, match=r"r must lie"):
        ProblemParams(3, 2.0, 2.0, 6.0)  # r = 2* rejected
    with pytest.raises(ParameterError, match=r"\(H1\)"):
        # r = q = 3.6 with alpha = 0.5 <= 1
        ProblemParams(3, 0.5, 2.0, 3.6)
    # r = q with alpha > 1 is fine
    ProblemParams(3, 2.0, 2.0, 3.0)


def test_json_record_keys():
    record = params_json_dict(ProblemParams(3, 2.0, 2.0, 4.5))
    assert set(record) == {
        "N", "alpha", "p", "r", "sigma", "q", "two_star", "s_q", "s_r",
        "s_2star", "A_alpha", "regime_case", "lambda_tilde1_zero",
    }
    assert record["regime_case"] == 5
    assert record["lambda_tilde1_zero"] is True
