"""Scalar fibering algebra along the dilation path u_t = t^sigma u(t.).

Because I, F, G are homogeneous of degrees s_q, s_r, s_2* along the
fiber, everything here works on the scalars (I, F, G) and never touches
the grid:

    phi_{c,u}(t) = (t^(s_q-s_r) I - t^(s_2*-s_r) G - t^(-s_r) c) / F

has a unique global maximum at t_c(u) > 0 whenever c > 0, found as the
unique root of the strictly increasing constraint

    (s_r - s_q) t^s_q I + (s_2* - s_r) t^s_2* G = s_r c.

The comparison function z_u(t) = (S/2)(int|u|^{2*})^{2/2*} t^s_q
- (1/2*)(int|u|^{2*}) t^s_2* yields the threshold energy c* = max z_u,
which is independent of u because s_2* = (2*/2) s_q identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoRootError
from .functionals import FunctionalRecord
from .grid import RadialFunction, resample_dilation
from .params import DerivedExponents, ProblemParams

_LOG_LO, _LOG_HI = math.log(1e-12), math.log(1e12)


@dataclass(frozen=True)
class FiberResult:
    t_c: float
    phi_at_tc: float
    newton_iters: int
    residual: float


@dataclass(frozen=True)
class CriticalConstants:
    S: float
    c_star: float
    t_0: float
    z_at_t0: float
    z_max_gridscan: float


def phi(c: float, rec: FunctionalRecord, exps: DerivedExponents, t) -> float | np.ndarray:
    """Value of lambda_c along the fiber, phi_{c,u}(t), in the scalar algebra."""
    t = np.asarray(t, dtype=float)
    s_q, s_r, s_2 = exps.s_q, exps.s_r, exps.s_2star
    out = (
        t ** (s_q - s_r) * rec.I_val - t ** (s_2 - s_r) * rec.G_val - t ** (-s_r) * c
    ) / rec.F_val
    return float(out) if out.ndim == 0 else out


def phi_prime(c: float, rec: FunctionalRecord, exps: DerivedExponents, t) -> float | np.ndarray:
    t = np.asarray(t, dtype=float)
    s_q, s_r, s_2 = exps.s_q, exps.s_r, exps.s_2star
    out = (
        (s_q - s_r) * t ** (s_q - s_r - 1) * rec.I_val
        - (s_2 - s_r) * t ** (s_2 - s_r - 1) * rec.G_val
        + s_r * t ** (-s_r - 1) * c
    ) / rec.F_val
    return float(out) if out.ndim == 0 else out


def solve_tc(c: float, I: float, G: float, exps: DerivedExponents,
             F: float = 1.0) -> FiberResult:
    """Unique fiber maximizer t_c from the scalars (I, G, c).

    Safeguarded Newton in log t on the monotone constraint; for r = q the
    closed form t = (s_q c / ((s_2* - s_q) G))^(1/s_2*) is returned directly.
    phi_at_tc is evaluated with the supplied F.
    """
    if c <= 0.0:
        raise NoRootError(
            f"the scaled constraint set is nonempty only for c > 0 (got c={c})"
        )
    s_q, s_r, s_2 = exps.s_q, exps.s_r, exps.s_2star
    a1 = (s_r - s_q) * I
    a2 = (s_2 - s_r) * G
    rhs = s_r * c
    rec = FunctionalRecord(I_val=I, F_val=F, G_val=G, dirichlet=0.0, coulomb=0.0, e_norm=0.0)

    if a1 <= 0.0 and a2 <= 0.0:
        raise NoRootError(
            "fiber constraint is degenerate: needs I > 0 with r > q, or G > 0"
        )
    if a1 <= 0.0 or a2 <= 0.0:  # single-power closed form (r = q, or G = 0)
        if a2 > 0.0:
            t = (rhs / a2) ** (1.0 / s_2)
        else:
            t = (rhs / a1) ** (1.0 / s_q)
        return FiberResult(t_c=t, phi_at_tc=phi(c, rec, exps, t), newton_iters=0,
                           residual=0.0)

    # Newton on the log of the exponential sum: g(tau) = log(a1 e^{s_q tau}
    # + a2 e^{s_2 tau}) - log(rhs) is convex and increasing with slope in
    # [s_q, s_2], and the root lies within log(2)/s_q of the smaller
    # single-term root, so convergence is a handful of quadratic steps.
    la1, la2 = math.log(a1), math.log(a2)
    lrhs = math.log(rhs)

    def g_and_dg(tau: float) -> tuple[float, float]:
        e1 = la1 + s_q * tau
        e2 = la2 + s_2 * tau
        m = max(e1, e2)
        w1 = math.exp(e1 - m)
        w2 = math.exp(e2 - m)
        g = m + math.log(w1 + w2) - lrhs
        dg = (s_q * w1 + s_2 * w2) / (w1 + w2)
        return g, dg

    lo, hi = _LOG_LO, _LOG_HI
    tau = min((lrhs - la1) / s_q, (lrhs - la2) / s_2)  # g(tau) >= 0 here
    if tau < lo or tau - math.log(2.0) / s_q > hi:
        raise NoRootError("fiber root escaped the bracket [1e-12, 1e12]")
    iters = 0
    for iters in range(1, 101):
        val, dval = g_and_dg(tau)
        if abs(val) < 1e-14:
            break
        if val <= 0:
            lo = max(lo, tau)
        else:
            hi = min(hi, tau)
        tau_new = tau - val / dval
        if not (lo <= tau_new <= hi):
            tau_new = 0.5 * (lo + hi)
        if abs(tau_new - tau) < 1e-16 * max(1.0, abs(tau)):
            tau = tau_new
            break
        tau = tau_new
    t = math.exp(tau)
    residual = abs(math.expm1(g_and_dg(tau)[0]))
    return FiberResult(t_c=t, phi_at_tc=phi(c, rec, exps, t), newton_iters=iters,
                       residual=residual)


def tc_of_record(c: float, rec: FunctionalRecord, exps: DerivedExponents) -> FiberResult:
    return solve_tc(c, rec.I_val, rec.G_val, exps, F=rec.F_val)


def lambda_tilde(c: float, rec: FunctionalRecord, exps: DerivedExponents) -> float:
    """Fiber-maximal value of lambda_c through u (dilation-invariant)."""
    return tc_of_record(c, rec, exps).phi_at_tc


# ----------------------------------------------------------------------
# projections
# ----------------------------------------------------------------------

def amplitude_to_nehari(rec: FunctionalRecord, params: ProblemParams,
                        exps: DerivedExponents, c: float) -> float:
    """Amplitude a > 0 with H(a u) = s_r c, by Newton on the monotone scalar.

    H(a u) = (s_r-s_q)(a^2 dir/2 + a^2p coul/2p) + (s_2*-s_r) a^2* G is
    strictly increasing in a, so the root is unique.
    """
    if c <= 0.0:
        raise NoRootError(f"constraint level must be positive (got c={c})")
    p, r, two_star = params.p, params.r, exps.two_star
    s_q, s_r, s_2 = exps.s_q, exps.s_r, exps.s_2star
    b_dir = (s_r - s_q) * 0.5 * rec.dirichlet
    b_cou = (s_r - s_q) * rec.coulomb / (2.0 * p)
    b_g = (s_2 - s_r) * rec.G_val
    rhs = s_r * c
    if b_dir + b_cou + b_g <= 0.0:
        raise NoRootError("cannot project the zero profile onto the constraint set")

    def h_and_dh(la: float) -> tuple[float, float]:
        e2 = b_dir * math.exp(2.0 * la) + 0.0
        e2p = b_cou * math.exp(2.0 * p * la)
        e2s = b_g * math.exp(two_star * la)
        return (
            e2 + e2p + e2s - rhs,
            2.0 * e2 + 2.0 * p * e2p + two_star * e2s,
        )

    la = 0.0
    lo, hi = -700.0 / two_star, 700.0 / two_star
    for _ in range(200):
        val, dval = h_and_dh(la)
        if abs(val) <= 1e-13 * rhs:
            break
        if val <= 0:
            lo = max(lo, la)
        else:
            hi = min(hi, la)
        la_new = la - val / dval
        if not (lo < la_new < hi):
            la_new = 0.5 * (lo + hi)
        la = la_new
    return math.exp(la)


def amplitude_to_sphere(rec: FunctionalRecord, p: float) -> float:
    """Amplitude a > 0 with I(a u) = 1 (Newton on the monotone scalar)."""
    b2 = 0.5 * rec.dirichlet
    b2p = rec.coulomb / (2.0 * p)
    if b2 + b2p <= 0.0:
        raise NoRootError("cannot normalize the zero profile to I = 1")
    la = 0.0
    for _ in range(200):
        e2 = b2 * math.exp(2.0 * la)
        e2p = b2p * math.exp(2.0 * p * la)
        val = e2 + e2p - 1.0
        if abs(val) <= 1e-14:
            break
        la -= val / (2.0 * e2 + 2.0 * p * e2p)
    return math.exp(la)


def project_to_M(u: RadialFunction, kernel, params: ProblemParams,
                 exps: DerivedExponents) -> RadialFunction:
    """Fiber projection onto the unit level set of I: u -> u_t, t = I(u)^(-1/s_q).

    The dilation is materialized on the grid (exact for tagged profiles),
    then a final amplitude correction absorbs the interpolation error so
    the discrete I equals 1 to ~1e-9.
    """
    from .functionals import evaluate  # local import to avoid cycle

    rec = evaluate(u, kernel, params, exps)
    t = rec.I_val ** (-1.0 / exps.s_q)
    dilated = resample_dilation(u, t, exps.sigma)
    # amplitude correction in the sampled (tag-free) path, so the returned
    # profile satisfies the discrete I = 1 exactly
    v = dilated.with_values(dilated.values)
    rec_v = evaluate(v, kernel, params, exps)
    a = amplitude_to_sphere(rec_v, params.p)
    return v.with_values(a * v.values)


def project_to_nehari(u: RadialFunction, kernel, params: ProblemParams,
                      exps: DerivedExponents, c: float) -> RadialFunction:
    """Fiber projection onto the constraint set at level c: u -> u_{t_c(u)}.

    Grid dilation followed by an exact amplitude correction restoring
    H = s_r c to roundoff.
    """
    from .functionals import evaluate

    rec = evaluate(u, kernel, params, exps)
    t = tc_of_record(c, rec, exps).t_c
    dilated = resample_dilation(u, t, exps.sigma)
    v = dilated.with_values(dilated.values)
    rec_v = evaluate(v, kernel, params, exps)
    a = amplitude_to_nehari(rec_v, params, exps, c)
    return v.with_values(a * v.values)


# ----------------------------------------------------------------------
# threshold energy
# ----------------------------------------------------------------------

def z_comparison(t, S: float, l2star_integral: float, exps: DerivedExponents):
    """z_u(t) = (S/2) (int|u|^{2*})^{2/2*} t^s_q - (1/2*)(int|u|^{2*}) t^s_2*."""
    t = np.asarray(t, dtype=float)
    A = 0.5 * S * l2star_integral ** (2.0 / exps.two_star)
    B = l2star_integral / exps.two_star
    out = A * t ** exps.s_q - B * t ** exps.s_2star
    return float(out) if out.ndim == 0 else out


def t0_and_cstar(exps: DerivedExponents, S: float,
                 l2star_integral: float = 1.0) -> CriticalConstants:
    """Maximizer t_0 of the comparison function and the threshold c* = z(t_0).

    c* = 1/2 (s_2*-s_q)/s_2* ((2*/2)(s_q/s_2*))^(s_q/(s_2*-s_q)) S^(s_2*/(s_2*-s_q))
    does not depend on u; a coarse log-grid scan of z is returned as a
    numeric cross-check alongside the closed forms.
    """
    s_q, s_2, two_star = exps.s_q, exps.s_2star, exps.two_star
    gap = s_2 - s_q
    base = (two_star / 2.0) * (s_q / s_2)
    t0 = (base * S / l2star_integral ** (2.0 / _dim_from(exps))) ** (1.0 / gap)
    c_star = 0.5 * (gap / s_2) * base ** (s_q / gap) * S ** (s_2 / gap)
    tgrid = np.exp(np.linspace(math.log(t0) - 3, math.log(t0) + 3, 4001))
    zvals = z_comparison(tgrid, S, l2star_integral, exps)
    return CriticalConstants(
        S=S,
        c_star=c_star,
        t_0=t0,
        z_at_t0=float(z_comparison(t0, S, l2star_integral, exps)),
        z_max_gridscan=float(zvals.max()),
    )


def _dim_from(exps: DerivedExponents) -> float:
    """Recover N from 2* = 2N/(N-2)."""
    return 2.0 * exps.two_star / (exps.two_star - 2.0)
