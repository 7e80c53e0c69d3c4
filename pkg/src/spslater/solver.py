"""Constrained minimization of the prescribed-energy coupling.

minimize_Lambda_c descends lambda_c restricted to the scaled constraint
set {H(u) = s_r c}: at each iterate the gradient covector is turned into
a Sobolev-gradient direction, projected against the constraint covector,
and the trial point is retracted back onto the constraint by an *exact*
amplitude renormalization (scalar Newton on homogeneous quantities), so
iterates satisfy the membership identity to roundoff and the inner loop
never resamples the grid.  The fiber dilation is still used to build the
initial iterate and to interpret results.

eigen_lambda1 runs the same machinery uphill on F over the unit level
set of I, which yields the first scaled eigenvalue lambda_1 = 1/F(max)
of the homogeneous eigenproblem I'(u) = lambda F'(u) (r = q only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoRootError, ParameterError
from .fiber import (
    amplitude_to_nehari,
    amplitude_to_sphere,
    project_to_M,
    project_to_nehari,
)
from .functionals import (
    FunctionalRecord,
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
from .grid import RadialFunction, RadialGrid, gaussian, read_radial_csv
from .params import ProblemParams, derive_exponents
from .riesz import RieszKernel


@dataclass(frozen=True)
class SolveConfig:
    max_iters: int = 2000
    # stationarity tolerance on the projected gradient, measured in the
    # Sobolev dual norm and normalized by max(1, |objective|)
    grad_tol: float = 1e-6
    armijo_init: float = 1.0
    armijo_backtrack: float = 0.5
    armijo_c1: float = 1e-4
    armijo_max_backtracks: int = 40
    precondition: bool = True
    init: str = "gaussian"  # "gaussian" | "talenti:<eps>" | "file:<path>"
    cstar_hint: float | None = None  # enables near-threshold safeguards
    stagnation_iters: int = 30  # exit when the objective stops moving

    def __post_init__(self):
        if self.grad_tol <= 0 or self.max_iters <= 0:
            raise ParameterError("tolerances and iteration caps must be positive")
        if not (0 < self.armijo_c1 < 1 and 0 < self.armijo_backtrack < 1):
            raise ParameterError("Armijo constants must lie in (0, 1)")


@dataclass(frozen=True)
class SolveResult:
    u_star: RadialFunction
    lambda_star: float
    grad_norm: float
    uncon_grad_norm: float
    pohozaev_rel: float
    H_residual: float
    iterations: int
    converged: bool
    record: FunctionalRecord
    # fiber coordinates of the minimizer as seen from the I = 1 sphere:
    # the sphere representative is u_t with t = I(u*)^(-1/s_q), so the
    # minimizer sits at fiber parameter t_c = I(u*)^(1/s_q) with
    # F(sphere rep.) = I(u*)^(-s_r/s_q) F(u*).
    t_c_sphere: float = float("nan")
    F_sphere: float = float("nan")
    flags: tuple[str, ...] = ()


def _init_profile(cfg: SolveConfig, grid: RadialGrid) -> RadialFunction:
    spec = cfg.init
    if spec == "gaussian":
        return gaussian(grid)
    if spec.startswith("talenti"):
        from .talenti import TalentiParams, make_v_eps

        eps = float(spec.split(":", 1)[1]) if ":" in spec else 0.5
        return make_v_eps(TalentiParams(eps=eps, rho=grid.R_max / 4.0), grid)
    if spec.startswith("file:"):
        return read_radial_csv(spec.split(":", 1)[1])
    raise ParameterError(f"unknown init '{spec}' (expected gaussian, talenti:<eps>, file:<path>)")


def random_smooth_directions(grid: RadialGrid, n: int = 20, seed: int = 0) -> np.ndarray:
    """Deterministic bank of smooth radial bumps used as test directions."""
    rng = np.random.default_rng(seed)
    r = grid.nodes
    dirs = np.empty((n, grid.M))
    span = min(8.0, grid.R_max / 3.0)
    for k in range(n):
        center = rng.uniform(0.0, span)
        width = rng.uniform(0.5, 2.0)
        sign = rng.choice([-1.0, 1.0])
        dirs[k] = sign * np.exp(-((r - center) / width) ** 2)
    return dirs


def _dual_norm(cov: np.ndarray, w: np.ndarray) -> float:
    return float(np.sqrt(np.sum(cov * cov / w)))


class _TwoLoopMemory:
    """Limited-memory quasi-Newton direction seeded with the Sobolev metric.

    Steps s live in point space, gradient differences y are covectors, so
    all pairings are metric-free dot products and the base inverse Hessian
    is the (-Laplace + 1)^(-1) solve.  Pairs failing the curvature check
    are dropped, which keeps the implied operator positive definite.
    """

    def __init__(self, factor, w: np.ndarray, m: int = 20):
        self.factor = factor
        self.w = w
        self.m = m
        self.pairs: list[tuple[np.ndarray, np.ndarray, float]] = []

    def base_solve(self, cov: np.ndarray) -> np.ndarray:
        if self.factor is not None:
            return h1_solve(self.factor, cov)
        return cov / self.w

    def push(self, s: np.ndarray, y: np.ndarray) -> None:
        sy = float(s @ y)
        if sy > 1e-12 * math.sqrt(float(s @ s)) * math.sqrt(float(y @ y)):
            self.pairs.append((s, y, 1.0 / sy))
            if len(self.pairs) > self.m:
                self.pairs.pop(0)

    def reset(self) -> None:
        self.pairs.clear()

    def direction(self, g: np.ndarray) -> np.ndarray:
        q = g.copy()
        alphas = []
        for s, y, rho in reversed(self.pairs):
            a = rho * float(s @ q)
            alphas.append(a)
            q = q - a * y
        z = self.base_solve(q)
        for (s, y, rho), a in zip(self.pairs, reversed(alphas)):
            b = rho * float(y @ z)
            z = z + (a - b) * s
        return -z


def minimize_Lambda_c(
    c: float,
    params: ProblemParams,
    grid: RadialGrid,
    kernel: RieszKernel,
    cfg: SolveConfig | None = None,
    u0: RadialFunction | None = None,
) -> SolveResult:
    """Projected descent for the lowest prescribed-energy coupling at level c.

    Raises NoRootError for c <= 0 (empty constraint set).  Non-convergence
    is reported through converged=False and flags, not an exception.
    """
    cfg = cfg or SolveConfig()
    exps = derive_exponents(params)
    if c <= 0.0:
        raise NoRootError(f"the scaled constraint set is nonempty only for c > 0 (got c={c})")

    max_iters = cfg.max_iters
    flags: list[str] = []
    near_threshold = cfg.cstar_hint is not None and c > 0.98 * cfg.cstar_hint
    if near_threshold:
        max_iters = min(max_iters, 600)
        flags.append("near_threshold_iteration_cap")

    start = u0 if u0 is not None else _init_profile(cfg, grid)
    u = project_to_nehari(start, kernel, params, exps, c)
    w = grid.quad_weights
    factor = h1_factorization(grid) if cfg.precondition else None

    rec, pot = evaluate_with_potential(u, kernel, params, exps)
    F_init = rec.F_val
    lam = lambda_c(rec, c)
    grad_norm = math.inf
    uncon_norm = math.inf
    converged = False
    iters = 0
    memory = _TwoLoopMemory(factor, w)
    prev_point: np.ndarray | None = None
    prev_grad: np.ndarray | None = None
    best_lam = lam
    since_progress = 0
    stagnation_resets = 0

    for iters in range(1, max_iters + 1):
        gr = gradients(u, kernel, params, exps, c, pot=pot, rec=rec)
        g = gr.g_lambda_c
        gh = (exps.s_r - exps.s_q) * gr.gI + (exps.s_2star - exps.s_r) * gr.gG

        pg0 = memory.base_solve(g)
        pgh = memory.base_solve(gh)
        ghn = float(gh @ pgh)
        scale = max(1.0, abs(lam))
        # stationarity in the Sobolev dual norm (the metric descent uses):
        # ||proj g||^2 = g.P g - (g.P gh)^2/(gh.P gh)
        gp = float(g @ pg0)
        cross = float(g @ pgh)
        grad_norm = math.sqrt(max(gp - cross * cross / ghn, 0.0)) / scale
        uncon_norm = math.sqrt(max(gp, 0.0)) / scale
        if grad_norm < cfg.grad_tol:
            converged = True
            break

        if prev_point is not None:
            memory.push(u.values - prev_point, g - prev_grad)
        prev_point = u.values.copy()
        prev_grad = g.copy()

        accepted = False
        used_fallback = False
        while True:
            d = memory.direction(g)
            d = d - (float(gh @ d) / ghn) * pgh
            slope = float(g @ d)
            if slope >= 0.0:
                if used_fallback:
                    break
                memory.reset()
                used_fallback = True
                continue
            eta = cfg.armijo_init
            slack = 4.0 * np.finfo(float).eps * abs(lam)
            for _ in range(cfg.armijo_max_backtracks + 1):
                v_vals = u.values + eta * d
                v = RadialFunction(grid=grid, values=v_vals)
                rec_v, pot_v = evaluate_with_potential(v, kernel, params, exps)
                try:
                    a = amplitude_to_nehari(rec_v, params, exps, c)
                except NoRootError:
                    eta *= cfg.armijo_backtrack
                    continue
                rec_t = rescale_record(rec_v, a, params.p, params.r, exps.two_star)
                lam_t = lambda_c(rec_t, c)
                if lam_t <= lam + cfg.armijo_c1 * eta * slope + slack:
                    u = v.with_values(a * v_vals)
                    rec = rec_t
                    pot = a ** params.p * pot_v
                    lam = lam_t
                    accepted = True
                    break
                eta *= cfg.armijo_backtrack
            if accepted or used_fallback:
                break
            # quasi-Newton step rejected end to end: restart from the metric
            memory.reset()
            used_fallback = True
        if not accepted:
            flags.append("line_search_stalled")
            break

        if best_lam - lam > 1e-13 * max(1.0, abs(best_lam)):
            best_lam = lam
            since_progress = 0
        else:
            since_progress += 1
            if since_progress >= cfg.stagnation_iters:
                if stagnation_resets == 0:
                    # a fresh quasi-Newton memory often escapes the plateau
                    memory.reset()
                    prev_point = prev_grad = None
                    stagnation_resets = 1
                    since_progress = 0
                else:
                    flags.append("objective_stagnated")
                    break

        if rec.F_val < 1e-14 * max(F_init, 1.0) or abs(lam) > 1e12:
            flags.append("degenerate_collapse_F_to_0")
            break

    # report stationarity at the final iterate (the loop's norms lag one step)
    gr = gradients(u, kernel, params, exps, c, pot=pot, rec=rec)
    g = gr.g_lambda_c
    gh = (exps.s_r - exps.s_q) * gr.gI + (exps.s_2star - exps.s_r) * gr.gG
    pg0 = memory.base_solve(g)
    pgh = memory.base_solve(gh)
    scale = max(1.0, abs(lam))
    gp = float(g @ pg0)
    cross = float(g @ pgh)
    grad_norm = math.sqrt(max(gp - cross * cross / float(gh @ pgh), 0.0)) / scale
    uncon_norm = math.sqrt(max(gp, 0.0)) / scale
    converged = converged or grad_norm < cfg.grad_tol

    if near_threshold:
        r_cut = 10.0 * grid.R_max / grid.M
        dens = np.abs(u.values) ** exps.two_star
        frac = float(w[grid.nodes < r_cut] @ dens[grid.nodes < r_cut] / max(w @ dens, 1e-300))
        if frac > 0.5:
            flags.append("possible_concentration")

    _, p_scaled = pohozaev(rec, lam, params, exps)
    return SolveResult(
        u_star=u,
        lambda_star=lam,
        grad_norm=grad_norm,
        uncon_grad_norm=uncon_norm,
        pohozaev_rel=abs(p_scaled) / (exps.s_q * rec.I_val),
        H_residual=abs(nehari_H(rec, exps) - exps.s_r * c) / (exps.s_r * c),
        iterations=iters,
        converged=converged,
        record=rec,
        t_c_sphere=rec.I_val ** (1.0 / exps.s_q),
        F_sphere=rec.I_val ** (-exps.s_r / exps.s_q) * rec.F_val,
        flags=tuple(flags),
    )


@dataclass(frozen=True)
class VerificationCheck:
    name: str
    value: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[VerificationCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(ch.passed for ch in self.checks)

    def failed(self) -> list[str]:
        return [ch.name for ch in self.checks if not ch.passed]


def verify_solution(
    res: SolveResult,
    c: float,
    params: ProblemParams,
    grid: RadialGrid,
    kernel: RieszKernel,
    n_directions: int = 20,
    seed: int = 0,
) -> VerificationReport:
    """Certify a converged pair (lambda, u) by three independent identities.

    (i) prescribed energy Phi_lambda(u) = c; (ii) weak-form residual of the
    Euler-Lagrange equation against smooth test directions; (iii) the scaled
    dilation (Pohozaev) residual.
    """
    exps = derive_exponents(params)
    u = res.u_star
    rec, pot = evaluate_with_potential(u, kernel, params, exps)
    lam = res.lambda_star

    energy_rel = abs(phi_lambda(rec, lam) - c) / abs(c)

    gr = gradients(u, kernel, params, exps, c, pot=pot, rec=rec)
    resid_cov = gr.gI - lam * gr.gF - gr.gG
    w = grid.quad_weights
    # equation strength: sum of the term magnitudes in the dual norm, so a
    # test direction with little overlap cannot manufacture a 0/0 ratio
    strength = _dual_norm(gr.gI, w) + abs(lam) * _dual_norm(gr.gF, w) + _dual_norm(gr.gG, w)
    dirs = random_smooth_directions(grid, n_directions, seed)
    weak_rel = 0.0
    for v in dirs:
        vnorm = float(np.sqrt(w @ (v * v)))
        weak_rel = max(weak_rel, abs(resid_cov @ v) / (strength * vnorm))

    _, p_scaled = pohozaev(rec, lam, params, exps)
    poho_rel = abs(p_scaled) / (exps.s_q * rec.I_val)

    checks = (
        VerificationCheck("prescribed_energy", energy_rel, 1e-6, energy_rel < 1e-6),
        VerificationCheck("weak_form_residual", weak_rel, 1e-4, weak_rel < 1e-4),
        VerificationCheck("pohozaev_residual", poho_rel, 1e-3, poho_rel < 1e-3),
    )
    return VerificationReport(checks=checks)


@dataclass(frozen=True)
class EigenResult:
    lambda_1: float
    u_star: RadialFunction
    F_max: float
    eigen_residual: float
    grad_norm: float
    iterations: int
    converged: bool


def eigen_lambda1(
    params: ProblemParams,
    grid: RadialGrid,
    kernel: RieszKernel,
    cfg: SolveConfig | None = None,
    u0: RadialFunction | None = None,
) -> EigenResult:
    """First scaled eigenvalue lambda_1 = 1/max{F : I(u) = 1} (requires r = q).

    Projected ascent on F over the unit level set of I with the amplitude
    retraction; at the maximizer the proportionality I'(u) = lambda_1 F'(u)
    is checked weakly against smooth directions.
    """
    cfg = cfg or SolveConfig()
    exps = derive_exponents(params)
    if abs(params.r - exps.q) > 1e-9 * max(1.0, exps.q):
        raise ParameterError(f"eigenvalue problem requires r = q (r={params.r}, q={exps.q})")
    if params.alpha <= 1.0:
        raise ParameterError(f"(H1): r=q requires alpha>1 (got alpha={params.alpha})")

    start = u0 if u0 is not None else _init_profile(cfg, grid)
    u = project_to_M(start, kernel, params, exps)
    w = grid.quad_weights
    factor = h1_factorization(grid) if cfg.precondition else None

    rec, pot = evaluate_with_potential(u, kernel, params, exps)
    converged = False
    grad_norm = math.inf
    iters = 0
    # ascent on F == descent on -F; reuse the quasi-Newton machinery
    memory = _TwoLoopMemory(factor, w)
    prev_point: np.ndarray | None = None
    prev_grad: np.ndarray | None = None
    best_F = rec.F_val
    since_progress = 0
    for iters in range(1, cfg.max_iters + 1):
        gr = gradients(u, kernel, params, exps, 1.0, pot=pot, rec=rec)
        g = -gr.gF
        gI = gr.gI
        pg0 = memory.base_solve(g)
        pgi = memory.base_solve(gI)
        gin = float(gI @ pgi)
        gp = float(g @ pg0)
        cross = float(g @ pgi)
        grad_norm = math.sqrt(max(gp - cross * cross / gin, 0.0)) / max(1.0, rec.F_val)
        if grad_norm < cfg.grad_tol:
            converged = True
            break
        if prev_point is not None:
            memory.push(u.values - prev_point, g - prev_grad)
        prev_point = u.values.copy()
        prev_grad = g.copy()

        accepted = False
        used_fallback = False
        while True:
            d = memory.direction(g)
            d = d - (float(gI @ d) / gin) * pgi
            slope = float(g @ d)
            if slope >= 0.0:
                if used_fallback:
                    break
                memory.reset()
                used_fallback = True
                continue
            eta = cfg.armijo_init
            slack = 4.0 * np.finfo(float).eps * rec.F_val
            for _ in range(cfg.armijo_max_backtracks + 1):
                v_vals = u.values + eta * d
                v = RadialFunction(grid=grid, values=v_vals)
                rec_v, pot_v = evaluate_with_potential(v, kernel, params, exps)
                try:
                    a = amplitude_to_sphere(rec_v, params.p)
                except NoRootError:
                    eta *= cfg.armijo_backtrack
                    continue
                rec_t = rescale_record(rec_v, a, params.p, params.r, exps.two_star)
                if rec_t.F_val >= rec.F_val + cfg.armijo_c1 * eta * (-slope) - slack:
                    u = v.with_values(a * v_vals)
                    rec = rec_t
                    pot = a ** params.p * pot_v
                    accepted = True
                    break
                eta *= cfg.armijo_backtrack
            if accepted or used_fallback:
                break
            memory.reset()
            used_fallback = True
        if not accepted:
            break
        if rec.F_val - best_F > 1e-14 * max(1.0, best_F):
            best_F = rec.F_val
            since_progress = 0
        else:
            since_progress += 1
            if since_progress >= cfg.stagnation_iters:
                break

    lam1 = 1.0 / rec.F_val
    gr = gradients(u, kernel, params, exps, 1.0, pot=pot, rec=rec)
    g = -gr.gF
    pg0 = memory.base_solve(g)
    pgi = memory.base_solve(gr.gI)
    gp = float(g @ pg0)
    cross = float(g @ pgi)
    grad_norm = math.sqrt(
        max(gp - cross * cross / float(gr.gI @ pgi), 0.0)
    ) / max(1.0, rec.F_val)
    converged = converged or grad_norm < cfg.grad_tol
    resid = gr.gI - lam1 * gr.gF
    strength = _dual_norm(gr.gI, w) + lam1 * _dual_norm(gr.gF, w)
    dirs = random_smooth_directions(grid, 20, seed=0)
    eigen_rel = 0.0
    for v in dirs:
        vnorm = float(np.sqrt(w @ (v * v)))
        eigen_rel = max(eigen_rel, abs(resid @ v) / (strength * vnorm))

    return EigenResult(
        lambda_1=lam1,
        u_star=u,
        F_max=rec.F_val,
        eigen_residual=eigen_rel,
        grad_norm=grad_norm,
        iterations=iters,
        converged=converged,
    )
