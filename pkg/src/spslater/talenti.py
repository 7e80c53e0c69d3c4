"""Cutoff Talenti family, Sobolev-constant estimation, and sign probes.

The building block is

    u_eps(r) = theta(r) eps^((N-2)/2) / (eps^2 + r^2)^((N-2)/2),
    v_eps    = u_eps / ||u_eps||_{2*},

with a C^2 quintic-smoothstep cutoff theta supported in [0, rho], equal
to 1 on [0, rho/2].  As eps -> 0 the gradient energy of v_eps drops to
the best Sobolev constant S at rate eps^(N-2), the Lebesgue norms follow
the classical three-branch epsilon powers, and the Coulomb term obeys
the Hardy-Littlewood-Sobolev branch bounds.  Slope fits discard the two
largest eps (pre-asymptotic) and the downstream S is the Richardson
extrapolate of the Rayleigh quotient, keeping the discrete threshold
energy self-consistent with the discrete functionals.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .fiber import tc_of_record
from .functionals import evaluate
from .grid import RadialFunction, RadialGrid, dirichlet_energy, from_profile, lp_norm_pow
from .params import ProblemParams, derive_exponents
from .riesz import RieszKernel, coulomb_energy_values


@dataclass(frozen=True)
class TalentiParams:
    eps: float
    rho: float

    def __post_init__(self):
        if self.eps <= 0 or self.rho <= 0:
            raise ValueError("eps and rho must be positive")


def _smoothstep_down(y: np.ndarray) -> np.ndarray:
    """C^2 transition from 1 at y=0 to 0 at y=1 (quintic smoothstep)."""
    y = np.clip(y, 0.0, 1.0)
    return 1.0 - y ** 3 * (10.0 - 15.0 * y + 6.0 * y ** 2)


def _dsmoothstep_down(y: np.ndarray) -> np.ndarray:
    y = np.clip(y, 0.0, 1.0)
    return -30.0 * y ** 2 * (1.0 - y) ** 2


def cutoff(r: np.ndarray, rho: float) -> np.ndarray:
    return _smoothstep_down((r - rho / 2.0) / (rho / 2.0))


def make_u_eps(tp: TalentiParams, grid: RadialGrid) -> RadialFunction:
    """Cutoff Talenti bubble, tagged with its closed form and derivative."""
    N = grid.N
    eps, rho = tp.eps, tp.rho
    half = (N - 2) / 2.0

    def fn(r):
        r = np.asarray(r, dtype=float)
        return cutoff(r, rho) * eps ** half / (eps ** 2 + r ** 2) ** half

    def dfn(r):
        r = np.asarray(r, dtype=float)
        core = eps ** half / (eps ** 2 + r ** 2) ** half
        dcore = core * (-(N - 2.0) * r / (eps ** 2 + r ** 2))
        y = (r - rho / 2.0) / (rho / 2.0)
        dtheta = _dsmoothstep_down(y) / (rho / 2.0)
        return cutoff(r, rho) * dcore + dtheta * core

    return from_profile(grid, fn, dfn)


def make_v_eps(tp: TalentiParams, grid: RadialGrid, warn_resolution: bool = True) -> RadialFunction:
    """Critically normalized bubble: ||v_eps||_{2*} = 1 under the grid quadrature."""
    import warnings

    if warn_resolution and int(np.sum(grid.nodes < tp.eps)) < 8:
        warnings.warn(
            f"fewer than 8 grid nodes resolve r < eps = {tp.eps}; "
            "bubble quadratures will be inaccurate",
            stacklevel=2,
        )
    u = make_u_eps(tp, grid)
    two_star = 2.0 * grid.N / (grid.N - 2.0)
    norm = lp_norm_pow(u, two_star) ** (1.0 / two_star)
    prof, dprof = u.profile, u.dprofile

    def fn(r, _s=1.0 / norm):
        return _s * prof(r)

    def dfn(r, _s=1.0 / norm):
        return _s * dprof(r)

    return from_profile(grid, fn, dfn)


def _default_eps_list(grid: RadialGrid, n: int = 9) -> np.ndarray:
    # geometric sweep chosen so the smallest bubble still holds >= 8 nodes
    eps_min = max(0.02, grid.R_max * (12.0 / grid.M) ** grid.gamma)
    return np.geomspace(0.4, eps_min, n)


@dataclass(frozen=True)
class SobolevFit:
    S: float
    eps_list: np.ndarray = field(repr=False)
    rayleigh: np.ndarray = field(repr=False)
    deficit_slope: float
    rho: float


def sobolev_estimate(grid: RadialGrid, eps_list=None, rho: float | None = None,
                     jobs: int = 1) -> SobolevFit:
    """Best-Sobolev-constant estimate from the bubble Rayleigh quotients.

    ||v_eps||_{2*} = 1 by construction, so the quotient is the plain
    gradient energy; S is the intercept of a least-squares fit of
    S_eps against eps^(N-2) over the three smallest eps (Richardson),
    and deficit_slope is the log-log rate of S_eps - S (two largest
    eps discarded), expected close to N-2.
    """
    rho = rho if rho is not None else grid.R_max / 4.0
    eps_arr = np.sort(np.asarray(eps_list if eps_list is not None else _default_eps_list(grid), dtype=float))

    def rayleigh(eps: float) -> float:
        return dirichlet_energy(make_v_eps(TalentiParams(eps=eps, rho=rho), grid))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            vals = np.array(list(ex.map(rayleigh, eps_arr)))
    else:
        vals = np.array([rayleigh(e) for e in eps_arr])

    x = eps_arr[:3] ** (grid.N - 2)
    y = vals[:3]
    slope_r, intercept = np.polyfit(x, y, 1)
    S = float(intercept)

    deficits = vals - S
    mask = np.ones(len(eps_arr), dtype=bool)
    mask[-2:] = False  # pre-asymptotic
    mask &= deficits > 0
    if mask.sum() >= 2:
        slope = float(np.polyfit(np.log(eps_arr[mask]), np.log(deficits[mask]), 1)[0])
    else:
        slope = float("nan")
    return SobolevFit(S=S, eps_list=eps_arr, rayleigh=vals, deficit_slope=slope, rho=rho)


@dataclass(frozen=True)
class NormSlopeReport:
    ell: float
    branch: str
    expected: float
    fitted: float
    eps_list: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)


def norm_asymptotics(grid: RadialGrid, ell: float, eps_list=None, rho: float | None = None,
                     jobs: int = 1) -> NormSlopeReport:
    """Fitted epsilon-rate of ||v_eps||_ell^ell against the branch table.

    Branches split at ell = N/(N-2): above it the rate is (2N-(N-2)ell)/2,
    below it (N-2)ell/2, and exactly at it eps^(N/2)|log eps| (the fit then
    regresses log(value/|log eps|)).
    """
    N = grid.N
    rho = rho if rho is not None else grid.R_max / 4.0
    eps_arr = np.sort(np.asarray(eps_list if eps_list is not None else _default_eps_list(grid), dtype=float))

    def norm_pow(eps: float) -> float:
        return lp_norm_pow(make_v_eps(TalentiParams(eps=eps, rho=rho), grid), ell)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            vals = np.array(list(ex.map(norm_pow, eps_arr)))
    else:
        vals = np.array([norm_pow(e) for e in eps_arr])

    crit = N / (N - 2.0)
    sel = slice(0, len(eps_arr) - 2)  # discard two largest
    logeps = np.log(eps_arr[sel])
    if abs(ell - crit) <= 1e-9:
        branch = "log"
        expected = N / 2.0
        y = np.log(vals[sel] / np.abs(np.log(eps_arr[sel])))
    elif ell > crit:
        branch = "above"
        expected = (2.0 * N - (N - 2.0) * ell) / 2.0
        y = np.log(vals[sel])
    else:
        branch = "below"
        expected = (N - 2.0) * ell / 2.0
        y = np.log(vals[sel])
    fitted = float(np.polyfit(logeps, y, 1)[0])
    return NormSlopeReport(ell=ell, branch=branch, expected=expected, fitted=fitted,
                           eps_list=eps_arr, values=vals)


@dataclass(frozen=True)
class CoulombSlopeReport:
    p: float
    alpha: float
    branch: str
    bound_exponent: float
    fitted: float
    eps_list: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)


def coulomb_asymptotics(grid: RadialGrid, kernel: RieszKernel, p: float, eps_list=None,
                        rho: float | None = None, jobs: int = 1) -> CoulombSlopeReport:
    """Fitted epsilon-rate of the bubble Coulomb term vs. its branch bound.

    The bounds come one-sided from convolution inequalities, keyed on
    2Np/(N+alpha) against N/(N-2); a decay at least as fast as the bound
    exponent is the expected outcome.
    """
    N = grid.N
    alpha = kernel.alpha
    rho = rho if rho is not None else grid.R_max / 4.0
    eps_arr = np.sort(np.asarray(eps_list if eps_list is not None else _default_eps_list(grid), dtype=float))

    def coul(eps: float) -> float:
        v = make_v_eps(TalentiParams(eps=eps, rho=rho), grid)
        return coulomb_energy_values(kernel, np.abs(v.values) ** p)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            vals = np.array(list(ex.map(coul, eps_arr)))
    else:
        vals = np.array([coul(e) for e in eps_arr])

    lhs = 2.0 * N * p / (N + alpha)
    rhs = N / (N - 2.0)
    sel = slice(0, len(eps_arr) - 2)
    logeps = np.log(eps_arr[sel])
    if abs(lhs - rhs) <= 1e-9 * max(lhs, rhs):
        branch = "equal"
        bound = (N + alpha) / 2.0
        y = np.log(vals[sel] / np.abs(np.log(eps_arr[sel])) ** ((N + alpha) / N))
    elif lhs > rhs:
        branch = "above"
        bound = N + alpha - (N - 2.0) * p
        y = np.log(vals[sel])
    else:
        branch = "below"
        bound = (N - 2.0) * p
        y = np.log(vals[sel])
    fitted = float(np.polyfit(logeps, y, 1)[0])
    return CoulombSlopeReport(p=p, alpha=alpha, branch=branch, bound_exponent=bound,
                              fitted=fitted, eps_list=eps_arr, values=vals)


@dataclass(frozen=True)
class SignProbeReport:
    c: float
    eps_list: np.ndarray = field(repr=False)
    lambda_values: np.ndarray = field(repr=False)
    t_c_values: np.ndarray = field(repr=False)
    grad_sq: np.ndarray = field(repr=False)
    coulomb: np.ndarray = field(repr=False)

    @property
    def first_value(self) -> float:
        return float(self.lambda_values[-1])  # largest eps

    @property
    def min_value(self) -> float:
        return float(self.lambda_values.min())

    @property
    def t_c_bracket(self) -> tuple[float, float]:
        return float(self.t_c_values.min()), float(self.t_c_values.max())


def lambda_sign_probe(c: float, grid: RadialGrid, kernel: RieszKernel,
                      params: ProblemParams, eps_list=None, rho: float | None = None,
                      jobs: int = 1) -> SignProbeReport:
    """Fiber-maximal coupling along the bubble family at energy level c.

    Evaluates Lambda_c((v_eps)_{t_c(v_eps)}) = phi_{c, v_eps}(t_c) in the
    scalar algebra for each eps; the sequence drives the sign analysis of
    the constrained infimum at and beyond the threshold energy.
    """
    exps = derive_exponents(params)
    rho = rho if rho is not None else grid.R_max / 4.0
    eps_arr = np.sort(np.asarray(eps_list if eps_list is not None else _default_eps_list(grid), dtype=float))

    def probe(eps: float) -> tuple[float, float, float, float]:
        v = make_v_eps(TalentiParams(eps=eps, rho=rho), grid)
        rec = evaluate(v, kernel, params, exps)
        fr = tc_of_record(c, rec, exps)
        return fr.phi_at_tc, fr.t_c, rec.dirichlet, rec.coulomb

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(probe, eps_arr))
    else:
        rows = [probe(e) for e in eps_arr]
    lam = np.array([row[0] for row in rows])
    tcs = np.array([row[1] for row in rows])
    gsq = np.array([row[2] for row in rows])
    cou = np.array([row[3] for row in rows])
    return SignProbeReport(c=c, eps_list=eps_arr, lambda_values=lam, t_c_values=tcs,
                           grad_sq=gsq, coulomb=cou)
