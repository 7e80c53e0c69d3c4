"""Problem parameters, derived exponents, and regime classification.

The model couples a Riesz-potential (Coulomb) nonlinearity of order alpha
and power p with a subcritical power r and the critical Sobolev power
2* = 2N/(N-2).  Everything downstream is controlled by the dilation
exponents derived here:

    sigma  = (2+alpha)/(2(p-1))        amplitude exponent of u_t = t^sigma u(t.)
    q      = 2(2p+alpha)/(2+alpha)     lowest Lebesgue exponent of the embedding
    s_q    = sigma*q - N               homogeneity degree of the quadratic part
    s_r    = sigma*r - N               homogeneity degree of the r-power term
    s_2star = sigma*2* - N             homogeneity degree of the critical term
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ParameterError

# Strict inequalities are enforced with this margin; boundary values are
# rejected rather than silently rounded into range.
_TOL = 1e-12


@dataclass(frozen=True)
class ProblemParams:
    """Admissible parameter set (N, alpha, p, r) with optional coupling."""

    N: int
    alpha: float
    p: float
    r: float
    lam: float | None = None

    def __post_init__(self):
        validate_params(self.N, self.alpha, self.p, self.r)


@dataclass(frozen=True)
class DerivedExponents:
    sigma: float
    q: float
    two_star: float
    s_q: float
    s_r: float
    s_2star: float
    A_alpha: float


@dataclass(frozen=True)
class RegimeCase:
    """Branch of the parameter table on which the limiting coupling vanishes.

    case_id is 1..5 for a matching branch, 0 when no branch matches.
    """

    case_id: int
    lambda_tilde1_zero: bool


def validate_params(N: int, alpha: float, p: float, r: float) -> None:
    """Raise ParameterError naming the violated inequality, if any."""
    if int(N) != N or N < 3:
        raise ParameterError(f"dimension must satisfy N >= 3 (got N={N})")
    if not (alpha > _TOL and alpha < N - _TOL):
        raise ParameterError(f"alpha must lie in (0, N)=(0, {N}) (got alpha={alpha})")
    p_max = (N + alpha) / (N - 2)
    if not (p > 1 + _TOL and p < p_max - _TOL):
        raise ParameterError(
            f"p must lie in (1, (N+alpha)/(N-2))=(1, {p_max:.12g}) (got p={p})"
        )
    q = 2 * (2 * p + alpha) / (2 + alpha)
    two_star = 2 * N / (N - 2)
    if r < q - _TOL or r >= two_star - _TOL:
        raise ParameterError(
            f"r must lie in [q, 2*)=[{q:.12g}, {two_star:.12g}) (got r={r})"
        )
    if abs(r - q) <= _TOL * max(1.0, q) and alpha <= 1 + _TOL:
        raise ParameterError(f"(H1): r=q requires alpha>1 (got alpha={alpha})")


def riesz_constant(N: int, alpha: float) -> float:
    """Normalization A_alpha of the Riesz kernel A_alpha |x|^(alpha-N).

    Evaluated through log-Gamma so large N does not overflow.
    """
    if not (0 < alpha < N):
        raise ParameterError(f"alpha must lie in (0, N)=(0, {N}) (got alpha={alpha})")
    log_a = (
        gammaln((N - alpha) / 2.0)
        - gammaln(alpha / 2.0)
        - (N / 2.0) * np.log(np.pi)
        - alpha * np.log(2.0)
    )
    return float(np.exp(log_a))


def derive_exponents(params: ProblemParams) -> DerivedExponents:
    """Compute all dilation exponents for an admissible parameter set."""
    N, alpha, p, r = params.N, params.alpha, params.p, params.r
    sigma = (2 + alpha) / (2 * (p - 1))
    q = 2 * (2 * p + alpha) / (2 + alpha)
    two_star = 2 * N / (N - 2)
    s_q = (p * (2 - N) + alpha + N) / (p - 1)
    s_r = sigma * r - N
    s_2star = sigma * two_star - N
    return DerivedExponents(
        sigma=sigma,
        q=q,
        two_star=two_star,
        s_q=s_q,
        s_r=s_r,
        s_2star=s_2star,
        A_alpha=riesz_constant(N, alpha),
    )


def classify_regime(params: ProblemParams) -> RegimeCase:
    """Identify which branch (if any) forces the limiting coupling to zero.

    The three top-level comparisons of 2Np/(N+alpha) with N/(N-2) partition
    the parameter space; sub-branches partition within each.  The final
    inequality in each chain decides matched vs. unmatched, so the five
    branches are mutually exclusive and "none" (case 0) is possible.
    """
    N, alpha, p, r = params.N, params.alpha, params.p, params.r
    lhs = 2 * N * p / (N + alpha)
    rhs = N / (N - 2)
    scale = max(abs(lhs), abs(rhs), 1.0)
    case = 0
    if lhs > rhs + _TOL * scale:
        if N + alpha - (N - 2) * (p + 1) >= -_TOL:
            if (N - 2) * r - 4 > _TOL:
                case = 1
        else:
            if 2 * alpha + (N - 2) * (r - 2 * p) > _TOL:
                case = 2
    elif abs(lhs - rhs) <= _TOL * scale:
        if 4 + alpha - N > _TOL:
            if (N - 2) * r - 4 > _TOL:
                case = 3
        else:
            if alpha - N + (N - 2) * r > _TOL:
                case = 4
    else:
        if (N - 2) * r - 4 > _TOL:
            case = 5
    return RegimeCase(case_id=case, lambda_tilde1_zero=case != 0)


def params_json_dict(params: ProblemParams) -> dict:
    """Flat JSON-ready record of parameters, exponents, and regime."""
    exps = derive_exponents(params)
    regime = classify_regime(params)
    return {
        "N": params.N,
        "alpha": params.alpha,
        "p": params.p,
        "r": params.r,
        "sigma": exps.sigma,
        "q": exps.q,
        "two_star": exps.two_star,
        "s_q": exps.s_q,
        "s_r": exps.s_r,
        "s_2star": exps.s_2star,
        "A_alpha": exps.A_alpha,
        "regime_case": regime.case_id,
        "lambda_tilde1_zero": regime.lambda_tilde1_zero,
    }
