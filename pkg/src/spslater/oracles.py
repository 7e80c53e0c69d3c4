"""Independent reference implementations used by the test suite.

Everything here deliberately avoids the main code paths: the Coulomb
reference uses plain linear-interpolant radial weights and a uniform
midpoint angular rule, the fiber reference uses bisection instead of
Newton, and the comparison maximizer is golden-section.  Closed forms
(Newtonian potentials, Gaussian integrals, best Sobolev constant) are
classical results re-derivable by hand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .grid import RadialFunction, sphere_area
from .params import DerivedExponents, riesz_constant


@dataclass(frozen=True)
class OracleReport:
    name: str
    reference_value: float
    artifact_value: float
    rel_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.rel_error <= self.tolerance


def compare(name: str, reference: float, artifact: float, tolerance: float) -> OracleReport:
    denom = max(abs(reference), 1e-300)
    return OracleReport(
        name=name,
        reference_value=float(reference),
        artifact_value=float(artifact),
        rel_error=abs(artifact - reference) / denom,
        tolerance=tolerance,
    )


# ----------------------------------------------------------------------
# closed forms
# ----------------------------------------------------------------------

def newtonian_kernel(r, s):
    """Spherically averaged kernel for N=3, alpha=2: 1/max(r, s)."""
    return 1.0 / np.maximum(r, s)


def ball_potential_n3(r, R0: float = 1.0):
    """(I_2 * indicator of B_R0)(r) in R^3: (3R0^2 - r^2)/6 inside, R0^3/(3r) outside."""
    r = np.asarray(r, dtype=float)
    inside = (3.0 * R0 ** 2 - r ** 2) / 6.0
    outside = R0 ** 3 / (3.0 * r)
    return np.where(r <= R0, inside, outside)


def ball_coulomb_n3(R0: float = 1.0) -> float:
    """int f (I_2 * f) for f = indicator of B_R0 in R^3.

    Integrating the inside potential: 4 pi int_0^R0 (3R0^2-r^2)/6 r^2 dr
    = 8 pi R0^5 / 15.  The classical half-normalized self-energy
    (1/2) iint f f / |x-y| equals this divided by 2 A_2 = 1/(2 pi).
    """
    return 8.0 * math.pi * R0 ** 5 / 15.0


def gaussian_lp_integral(N: int, a: float, ell: float, amplitude: float = 1.0) -> float:
    """int |A e^{-a r^2}|^ell over R^N = A^ell (pi/(ell a))^(N/2)."""
    return amplitude ** ell * (math.pi / (ell * a)) ** (N / 2.0)


def gaussian_dirichlet(N: int, a: float, amplitude: float = 1.0) -> float:
    """int |grad(A e^{-a r^2})|^2 over R^N = A^2 N a (pi/(2a))^(N/2)."""
    return amplitude ** 2 * N * a * (math.pi / (2.0 * a)) ** (N / 2.0)


def gaussian_coulomb(N: int, alpha: float, b: float, amplitude: float = 1.0) -> float:
    """int f (I_alpha * f) for f = A e^{-b r^2} on R^N.

    Rotating to sum/difference coordinates factorizes the double integral:
    A_alpha iint e^{-b(|x|^2+|y|^2)} |x-y|^(alpha-N)
      = A_alpha (pi/b)^(N/2) 2^((alpha-N)/2) omega_{N-1} Gamma(alpha/2)/(2 b^(alpha/2)),
    which simplifies to the expression below.
    """
    logv = gammaln((N - alpha) / 2.0) - gammaln(N / 2.0)
    return (
        amplitude ** 2
        * math.exp(logv)
        * (math.pi / (2.0 * b)) ** (N / 2.0)
        * (2.0 * b) ** (-alpha / 2.0)
    )


def sobolev_constant(N: int) -> float:
    """Best constant S in S ||u||_{2*}^2 <= ||grad u||_2^2 on R^N.

    S = N(N-2) pi (Gamma(N/2)/Gamma(N))^(2/N); for N=3 this equals
    3 (pi/2)^(4/3) ~ 5.4779.
    """
    return N * (N - 2) * math.pi * math.exp(
        (2.0 / N) * (gammaln(N / 2.0) - gammaln(float(N)))
    )


# ----------------------------------------------------------------------
# brute-force Coulomb energy
# ----------------------------------------------------------------------

def _trapezoid_weights(nodes: np.ndarray, N: int) -> np.ndarray:
    """Linear-interpolant product weights (the reference radial rule)."""
    r = nodes
    w = np.zeros(len(r))
    w[0] += r[0] ** N / N
    a, b = r[:-1], r[1:]
    m0 = (b ** N - a ** N) / N
    m1 = (b ** (N + 1) - a ** (N + 1)) / (N + 1)
    w[:-1] += (b * m0 - m1) / (b - a)
    w[1:] += (m1 - a * m0) / (b - a)
    return sphere_area(N) * w


def coulomb_bruteforce(f: RadialFunction, N: int, alpha: float, n_theta: int = 4096) -> float:
    """Direct (r, s, theta) double quadrature of int f (I_alpha * f).

    Uniform midpoint sampling in theta (no grading, no closed-form
    diagonal) and linear-interpolant radial weights.  Small grids only.
    """
    grid = f.grid
    if grid.M > 256:
        raise ValueError(f"brute-force oracle is limited to M <= 256 (got M={grid.M})")
    r = grid.nodes
    th = (np.arange(n_theta) + 0.5) * math.pi / n_theta
    dth = math.pi / n_theta
    cos_t = np.cos(th)
    sin_pow = np.sin(th) ** (N - 2)
    A = riesz_constant(N, alpha)
    om2 = sphere_area(N - 1)
    g = _trapezoid_weights(r, N) * f.values
    e = (alpha - N) / 2.0
    total = 0.0
    for i in range(grid.M):
        d2 = r[i] ** 2 + r[:, None] ** 2 - 2.0 * r[i] * r[:, None] * cos_t[None, :]
        row = A * om2 * dth * ((d2 ** e) * sin_pow[None, :]).sum(axis=1)
        total += g[i] * float(row @ g)
    return total / sphere_area(N)


# ----------------------------------------------------------------------
# scalar references: bisection root, golden-section maximizer
# ----------------------------------------------------------------------

def tc_bisection(c: float, I: float, G: float, exps: DerivedExponents,
                 lo: float = 1e-8, hi: float = 1e8, tol: float = 1e-12) -> float:
    """Reference root of (s_r-s_q) t^s_q I + (s_2*-s_r) t^s_2* G = s_r c."""
    if c <= 0:
        raise ValueError("constraint set is empty unless c > 0")
    s_q, s_r, s_2 = exps.s_q, exps.s_r, exps.s_2star

    def h(t):
        return (s_r - s_q) * t ** s_q * I + (s_2 - s_r) * t ** s_2 * G - s_r * c

    a, b = lo, hi
    fa, fb = h(a), h(b)
    if fa > 0 or fb < 0:
        raise ValueError(f"bracket [{lo}, {hi}] does not contain the root")
    while (b - a) > tol * b:
        m = 0.5 * (a + b)
        if h(m) <= 0:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def golden_maximize(fun, lo: float, hi: float, tol: float = 1e-13) -> tuple[float, float]:
    """Golden-section maximum of a unimodal function on [lo, hi] (log scale)."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = math.log(lo), math.log(hi)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(math.exp(c)), fun(math.exp(d))
    while (b - a) > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(math.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(math.exp(d))
    t = math.exp(0.5 * (a + b))
    return t, fun(t)
