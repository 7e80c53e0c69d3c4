"""Energy functionals, their gradients, and the Pohozaev residuals.

For a profile u on the grid, with g = |u|^p:

    I(u)   = 1/2 int |grad u|^2 + 1/(2p) int g (I_alpha * g)
    F(u)   = 1/r int |u|^r
    G(u)   = 1/2* int |u|^{2*}
    Phi_lambda(u) = I - lambda F - G
    lambda_c(u)   = (I - G - c)/F        (unique coupling with energy c)

Gradients are returned as covectors against the grid basis (quadrature
weights folded in), so directional derivatives are plain dot products
and finite-difference checks of the *discrete* functionals are exact to
truncation in the step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cholesky_banded, cho_solve_banded

from .errors import ParameterError
from .grid import RadialFunction, RadialGrid, dirichlet_energy
from .params import DerivedExponents, ProblemParams
from .riesz import RieszKernel, potential_values


@dataclass(frozen=True)
class FunctionalRecord:
    I_val: float
    F_val: float
    G_val: float
    dirichlet: float
    coulomb: float
    e_norm: float

    def to_json_dict(self) -> dict:
        return {
            "I": self.I_val,
            "F": self.F_val,
            "G": self.G_val,
            "dirichlet": self.dirichlet,
            "coulomb": self.coulomb,
            "e_norm": self.e_norm,
        }


@dataclass(frozen=True)
class GradientRecord:
    gI: np.ndarray = field(repr=False)
    gF: np.ndarray = field(repr=False)
    gG: np.ndarray = field(repr=False)
    g_lambda_c: np.ndarray = field(repr=False)


def _record(dirichlet: float, coulomb: float, int_r: float, int_2star: float,
            p: float, r: float, two_star: float) -> FunctionalRecord:
    I_val = 0.5 * dirichlet + coulomb / (2.0 * p)
    return FunctionalRecord(
        I_val=I_val,
        F_val=int_r / r,
        G_val=int_2star / two_star,
        dirichlet=dirichlet,
        coulomb=coulomb,
        e_norm=float(np.sqrt(dirichlet + max(coulomb, 0.0) ** (1.0 / p))),
    )


def evaluate_with_potential(
    u: RadialFunction, kernel: RieszKernel, params: ProblemParams, exps: DerivedExponents
) -> tuple[FunctionalRecord, np.ndarray]:
    """FunctionalRecord plus (I_alpha * |u|^p) at the nodes (reused by gradients)."""
    p, r, two_star = params.p, params.r, exps.two_star
    g = u.grid
    absu = np.abs(u.values)
    gp = absu ** p
    pot = potential_values(kernel, gp)
    coulomb = float(g.quad_weights @ (gp * pot))
    rec = _record(
        dirichlet=dirichlet_energy(u),
        coulomb=coulomb,
        int_r=float(g.quad_weights @ absu ** r),
        int_2star=float(g.quad_weights @ absu ** two_star),
        p=p, r=r, two_star=two_star,
    )
    return rec, pot


def evaluate(
    u: RadialFunction, kernel: RieszKernel, params: ProblemParams, exps: DerivedExponents
) -> FunctionalRecord:
    rec, _ = evaluate_with_potential(u, kernel, params, exps)
    return rec


def rescale_record(rec: FunctionalRecord, a: float, p: float, r: float,
                   two_star: float) -> FunctionalRecord:
    """Record of a*u from the record of u, by amplitude homogeneity (exact)."""
    return _record(
        dirichlet=a ** 2 * rec.dirichlet,
        coulomb=a ** (2.0 * p) * rec.coulomb,
        int_r=a ** r * (r * rec.F_val),
        int_2star=a ** two_star * (two_star * rec.G_val),
        p=p, r=r, two_star=two_star,
    )


def dilate_record(rec: FunctionalRecord, t: float, params: ProblemParams,
                  exps: DerivedExponents) -> FunctionalRecord:
    """Record of u_t from the record of u, by dilation homogeneity (exact).

    Both pieces of I scale with t^s_q individually (that is what makes I
    homogeneous of degree s_q along the fiber).
    """
    p, r, two_star = params.p, params.r, exps.two_star
    return _record(
        dirichlet=t ** exps.s_q * rec.dirichlet,
        coulomb=t ** exps.s_q * rec.coulomb,
        int_r=t ** exps.s_r * (r * rec.F_val),
        int_2star=t ** exps.s_2star * (two_star * rec.G_val),
        p=p, r=r, two_star=two_star,
    )


def lambda_c(rec: FunctionalRecord, c: float) -> float:
    """Coupling that prescribes energy c: (I - G - c)/F."""
    if rec.F_val < 1e-300:
        raise ParameterError("lambda_c undefined: F(u) vanishes (u = 0?)")
    return (rec.I_val - rec.G_val - c) / rec.F_val


def phi_lambda(rec: FunctionalRecord, lam: float) -> float:
    return rec.I_val - lam * rec.F_val - rec.G_val


def nehari_H(rec: FunctionalRecord, exps: DerivedExponents) -> float:
    """Constraint functional H(u) = (s_r - s_q) I(u) + (s_2* - s_r) G(u).

    Membership in the scaled constraint set at level c is H(u) = s_r c.
    """
    return (exps.s_r - exps.s_q) * rec.I_val + (exps.s_2star - exps.s_r) * rec.G_val


def nehari_residual(rec: FunctionalRecord, exps: DerivedExponents, c: float) -> float:
    return abs(nehari_H(rec, exps) - exps.s_r * c) / abs(exps.s_r * c)


def pohozaev(rec: FunctionalRecord, lam: float, params: ProblemParams,
             exps: DerivedExponents) -> tuple[float, float]:
    """Dilation identities evaluated on a record; both vanish at solutions.

    P        = (N-2)/2 dir + (N+alpha)/(2p) coul - N lam/r int|u|^r - N/2* int|u|^{2*}
    P_scaled = s_q/2 dir + s_q/(2p) coul - s_r lam/r int|u|^r - s_2*/2* int|u|^{2*}
             = sigma <Phi_lambda'(u), u> - P   (same record, pure algebra)
    """
    N, alpha, p, r = params.N, params.alpha, params.p, params.r
    int_r = r * rec.F_val
    int_2star = exps.two_star * rec.G_val
    P = (
        0.5 * (N - 2) * rec.dirichlet
        + (N + alpha) / (2.0 * p) * rec.coulomb
        - N * lam / r * int_r
        - N / exps.two_star * int_2star
    )
    P_scaled = (
        0.5 * exps.s_q * rec.dirichlet
        + exps.s_q / (2.0 * p) * rec.coulomb
        - exps.s_r * lam / r * int_r
        - exps.s_2star / exps.two_star * int_2star
    )
    return P, P_scaled


def gradients(
    u: RadialFunction,
    kernel: RieszKernel,
    params: ProblemParams,
    exps: DerivedExponents,
    c: float,
    pot: np.ndarray | None = None,
    rec: FunctionalRecord | None = None,
) -> GradientRecord:
    """Weak-form gradient covectors of I, F, G and lambda_c at u.

    |u|^(p-2) u is continuously extended by 0 where u vanishes (matters
    for p < 2 on compactly supported iterates).
    """
    p, r, two_star = params.p, params.r, exps.two_star
    g = u.grid
    w = g.quad_weights
    vals = u.values
    absu = np.abs(vals)
    if pot is None or rec is None:
        rec, pot = evaluate_with_potential(u, kernel, params, exps)

    def signed_power(expo: float) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = absu ** (expo - 1.0) * np.sign(vals)
        if expo < 1.0:
            out[absu == 0.0] = 0.0
        return out

    gI = (g.stiffness @ vals) + w * pot * signed_power(p)
    gF = w * signed_power(r)
    gG = w * signed_power(two_star)
    lam = lambda_c(rec, c)
    g_lambda = (gI - gG - lam * gF) / rec.F_val
    return GradientRecord(gI=gI, gF=gF, gG=gG, g_lambda_c=g_lambda)


# ----------------------------------------------------------------------
# Sobolev-gradient preconditioner
# ----------------------------------------------------------------------

def h1_factorization(grid: RadialGrid):
    """Banded Cholesky factor of the discrete (-Laplace + 1) operator.

    Exactly the Dirichlet stiffness used by the energy plus the lumped
    mass (quadrature weights); turns covectors into descent directions
    with mesh-independent scaling.
    """
    T = grid.stiffness
    ab = np.zeros((2, grid.M))
    ab[0, 1:] = T.diagonal(1)
    ab[1, :] = T.diagonal(0) + grid.quad_weights
    return cholesky_banded(ab, lower=False)


def h1_solve(factor, covector: np.ndarray) -> np.ndarray:
    return cho_solve_banded((factor, False), covector)
