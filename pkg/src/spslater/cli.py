"""Command-line interface.

Subcommands: exponents, sobolev, fiber, solve, eigen, talenti, curve.
A flat `key = value` config file can seed any long option; explicit
flags win.  The effective configuration is echoed as JSON ahead of the
results (suppress with --quiet) so every run is reproducible from its
own output.  Exit codes: 0 success, 1 invalid parameters, 2 solver
non-convergence, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .curves import default_c_grid, limit_c_to_cstar, trace_curve, write_curve_csv
from .errors import NoRootError, ParameterError
from .fiber import phi, t0_and_cstar, tc_of_record
from .functionals import evaluate
from .grid import make_grid, write_radial_csv
from .params import ProblemParams, derive_exponents, params_json_dict
from .riesz import load_or_build
from .solver import SolveConfig, eigen_lambda1, minimize_Lambda_c, verify_solution
from .talenti import (
    TalentiParams,
    coulomb_asymptotics,
    lambda_sign_probe,
    make_v_eps,
    norm_asymptotics,
    sobolev_estimate,
)

_EXIT_OK, _EXIT_PARAMS, _EXIT_NOCONV, _EXIT_IO = 0, 1, 2, 3


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    if isinstance(x, str):
        return json.dumps(x)
    if x is None:
        return "null"
    if isinstance(x, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    if isinstance(x, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_fmt(v)}" for k, v in x.items()) + "}"
    return json.dumps(x)


def dumps_json(obj: dict, indent: int = 2) -> str:
    """JSON with floats at 17 significant digits (lossless round-trip)."""
    pad = " " * indent
    lines = ["{"]
    items = list(obj.items())
    for i, (k, v) in enumerate(items):
        tail = "," if i + 1 < len(items) else ""
        lines.append(f"{pad}{json.dumps(k)}: {_fmt(v)}{tail}")
    lines.append("}")
    return "\n".join(lines)


def read_config(path) -> dict:
    """Flat `key = value` lines, # comments, UTF-8."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"config line is not 'key = value': {raw.rstrip()}")
            key, _, val = line.partition("=")
            out[key.strip()] = val.strip()
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spslater",
        description="Radial prescribed-energy solver for Schrodinger-Poisson-Slater "
                    "equations with critical exponent",
    )
    parser.add_argument("--version", action="version", version=f"spslater {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, grid=True, solver=False):
        sp.add_argument("--config", default=None, help="flat key=value config file")
        sp.add_argument("--quiet", action="store_true", default=None,
                        help="suppress the effective-config echo")
        sp.add_argument("--out", default=None, help="output path prefix")
        sp.add_argument("--jobs", type=int, default=None, help="worker threads for sweeps")
        sp.add_argument("--N", type=int, default=None)
        sp.add_argument("--alpha", type=float, default=None)
        sp.add_argument("--p", type=float, default=None)
        sp.add_argument("--r", type=float, default=None)
        if grid:
            sp.add_argument("--gridM", type=int, default=None)
            sp.add_argument("--Rmax", type=float, default=None)
            sp.add_argument("--gamma", type=float, default=None)
            sp.add_argument("--kernel-cache", dest="kernel_cache", default=None,
                            help="directory for cached kernel matrices")
        if solver:
            sp.add_argument("--tol", type=float, default=None, help="projected-gradient tolerance")
            sp.add_argument("--max-iters", dest="max_iters", type=int, default=None)
            sp.add_argument("--init", default=None,
                            help="gaussian | talenti:<eps> | file:<path>")

    sp = sub.add_parser("exponents", help="derived exponents and regime classification")
    add_common(sp, grid=False)

    sp = sub.add_parser("sobolev", help="best Sobolev constant from the bubble sweep")
    add_common(sp)
    sp.add_argument("--eps-lo", type=float, default=None)
    sp.add_argument("--eps-hi", type=float, default=None)
    sp.add_argument("--eps-count", type=int, default=None)
    sp.add_argument("--rho", type=float, default=None)

    sp = sub.add_parser("fiber", help="fiber map values and maximizer at energy level c")
    add_common(sp)
    sp.add_argument("--c", type=float, default=None, required=False)
    sp.add_argument("--I", type=float, default=None, help="bypass the grid: value of I(u)")
    sp.add_argument("--G", type=float, default=None)
    sp.add_argument("--F", type=float, default=None)
    sp.add_argument("--profile", default=None, help="gaussian | talenti:<eps>")
    sp.add_argument("--t-lo", type=float, default=None)
    sp.add_argument("--t-hi", type=float, default=None)
    sp.add_argument("--t-count", type=int, default=None)

    sp = sub.add_parser("solve", help="prescribed-energy pair at level c")
    add_common(sp, solver=True)
    sp.add_argument("--c", type=float, default=None)

    sp = sub.add_parser("eigen", help="first scaled eigenvalue (r = q)")
    add_common(sp, solver=True)

    sp = sub.add_parser("talenti", help="bubble sweep: norms, Coulomb, sign probe")
    add_common(sp)
    sp.add_argument("--c", type=float, default=None,
                    help="probe energy level (default: the threshold c*)")
    sp.add_argument("--ells", default=None, help="comma-separated Lebesgue exponents")
    sp.add_argument("--eps-lo", type=float, default=None)
    sp.add_argument("--eps-hi", type=float, default=None)
    sp.add_argument("--eps-count", type=int, default=None)
    sp.add_argument("--rho", type=float, default=None)

    sp = sub.add_parser("curve", help="trace c -> lambda(c) on (0, c*)")
    add_common(sp, solver=True)
    sp.add_argument("--c-lo", type=float, default=None, help="lowest level as a fraction of c*")
    sp.add_argument("--c-hi", type=float, default=None)
    sp.add_argument("--c-count", type=int, default=None)
    sp.add_argument("--cold", action="store_true", default=None,
                    help="independent solves instead of warm starts")
    return parser


_DEFAULTS = {
    "quiet": False,
    "jobs": 1,
    "N": 3,
    "alpha": 2.0,
    "p": 2.0,
    "gridM": 2048,
    "Rmax": 40.0,
    "gamma": 2.0,
    "tol": 1e-6,
    "max_iters": 2000,
    "init": "gaussian",
    "eps_lo": 0.02,
    "eps_hi": 0.4,
    "eps_count": 9,
    "t_lo": 1e-3,
    "t_hi": 1e3,
    "t_count": 400,
    "c_lo": 0.02,
    "c_hi": 0.98,
    "c_count": 24,
    "cold": False,
    "out": "spslater_out",
}

_CONFIG_TYPES = {
    "N": int, "gridM": int, "eps_count": int, "t_count": int, "c_count": int,
    "max_iters": int, "jobs": int,
    "quiet": lambda s: s.lower() in ("1", "true", "yes"),
    "cold": lambda s: s.lower() in ("1", "true", "yes"),
    "init": str, "out": str, "kernel_cache": str, "config": str,
    "profile": str, "ells": str, "command": str,
}


def _merge_options(args: argparse.Namespace) -> dict:
    opts = vars(args).copy()
    if opts.get("config"):
        fileconf = read_config(opts["config"])
        for key, val in fileconf.items():
            dest = key.replace("-", "_")
            if dest not in opts:
                raise ParameterError(f"unknown config key '{key}'")
            if opts[dest] is None:  # flags override config
                conv = _CONFIG_TYPES.get(dest, float)
                opts[dest] = conv(val)
    for key, val in _DEFAULTS.items():
        if key in opts and opts[key] is None:
            opts[key] = val
    return opts


def _echo(opts: dict) -> None:
    if not opts.get("quiet"):
        shown = {k: v for k, v in opts.items() if v is not None}
        print(dumps_json(shown))


def _problem(opts: dict, default_r=None) -> ProblemParams:
    r = opts.get("r")
    if r is None:
        r = default_r
    if r is None:
        raise ParameterError("missing exponent: supply --r")
    return ProblemParams(N=opts["N"], alpha=opts["alpha"], p=opts["p"], r=float(r))


def _grid_and_kernel(opts: dict):
    grid = make_grid(opts["N"], R_max=opts["Rmax"], M=opts["gridM"], gamma=opts["gamma"])
    if opts["alpha"] <= 1.0:
        print("warning: kernel accuracy degrades for alpha <= 1 "
              "(diagonal entries are truncated)", file=sys.stderr)
    kernel = load_or_build(grid, opts["alpha"], cache_dir=opts.get("kernel_cache"))
    return grid, kernel


def _solver_cfg(opts: dict, cstar_hint=None) -> SolveConfig:
    return SolveConfig(
        max_iters=opts["max_iters"],
        grad_tol=opts["tol"],
        init=opts["init"],
        cstar_hint=cstar_hint,
    )


def _eps_list(opts: dict) -> np.ndarray:
    return np.geomspace(opts["eps_hi"], opts["eps_lo"], opts["eps_count"])


def _estimate_S(opts: dict, grid) -> float:
    return sobolev_estimate(grid, eps_list=_eps_list(opts), rho=opts.get("rho"),
                            jobs=opts["jobs"]).S


def _cmd_exponents(opts: dict) -> int:
    record = params_json_dict(_problem(opts))
    text = dumps_json(record)
    print(text)
    if opts.get("out") and opts["out"] != _DEFAULTS["out"]:
        with open(opts["out"] + ".json", "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return _EXIT_OK


def _cmd_sobolev(opts: dict) -> int:
    grid = make_grid(opts["N"], R_max=opts["Rmax"], M=opts["gridM"], gamma=opts["gamma"])
    fit = sobolev_estimate(grid, eps_list=_eps_list(opts), rho=opts.get("rho"),
                           jobs=opts["jobs"])
    record = {
        "S": fit.S,
        "deficit_slope": fit.deficit_slope,
        "rho": fit.rho,
        "eps": list(fit.eps_list),
        "rayleigh": list(fit.rayleigh),
    }
    if opts.get("r") is not None:
        exps = derive_exponents(_problem(opts))
        record["c_star"] = t0_and_cstar(exps, fit.S).c_star
    print(dumps_json(record))
    with open(opts["out"] + ".json", "w", encoding="utf-8") as fh:
        fh.write(dumps_json(record) + "\n")
    return _EXIT_OK


def _cmd_fiber(opts: dict) -> int:
    if opts.get("c") is None:
        raise ParameterError("missing energy level: supply --c")
    c = opts["c"]
    params = _problem(opts)
    exps = derive_exponents(params)
    if opts.get("I") is not None and opts.get("G") is not None:
        from .functionals import FunctionalRecord

        F = opts.get("F") or 1.0
        rec = FunctionalRecord(I_val=opts["I"], F_val=F, G_val=opts["G"],
                               dirichlet=0.0, coulomb=0.0, e_norm=0.0)
    else:
        grid, kernel = _grid_and_kernel(opts)
        prof = opts.get("profile") or "gaussian"
        if prof.startswith("talenti"):
            eps = float(prof.split(":", 1)[1]) if ":" in prof else 0.5
            u = make_v_eps(TalentiParams(eps=eps, rho=grid.R_max / 4.0), grid)
        else:
            from .grid import gaussian

            u = gaussian(grid)
        rec = evaluate(u, kernel, params, exps)
    fr = tc_of_record(c, rec, exps)
    tgrid = np.geomspace(opts["t_lo"], opts["t_hi"], opts["t_count"])
    values = phi(c, rec, exps, tgrid)
    csv_path = opts["out"] + "_fiber.csv"
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("t,phi_c_u_t\n")
        for t, v in zip(tgrid, values):
            fh.write(f"{t:.17g},{v:.17g}\n")
    sidecar = {"t_c": fr.t_c, "phi_at_tc": fr.phi_at_tc, "residual": fr.residual}
    print(dumps_json(sidecar))
    with open(opts["out"] + "_fiber.json", "w", encoding="utf-8") as fh:
        fh.write(dumps_json(sidecar) + "\n")
    return _EXIT_OK


def _solve_record(res, c) -> dict:
    return {
        "c": c,
        "lambda": res.lambda_star,
        "converged": res.converged,
        "iterations": res.iterations,
        "grad_norm": res.grad_norm,
        "uncon_grad_norm": res.uncon_grad_norm,
        "pohozaev_rel": res.pohozaev_rel,
        "H_residual": res.H_residual,
        "t_c_sphere": res.t_c_sphere,
        "F_sphere": res.F_sphere,
        "flags": list(res.flags),
        "functionals": res.record.to_json_dict(),
    }


def _cmd_solve(opts: dict) -> int:
    if opts.get("c") is None:
        raise ParameterError("missing energy level: supply --c")
    params = _problem(opts)
    grid, kernel = _grid_and_kernel(opts)
    res = minimize_Lambda_c(opts["c"], params, grid, kernel, _solver_cfg(opts))
    record = _solve_record(res, opts["c"])
    report = verify_solution(res, opts["c"], params, grid, kernel)
    record["verification"] = {ch.name: ch.value for ch in report.checks}
    record["verification_passed"] = report.all_passed
    print(dumps_json(record))
    write_radial_csv(res.u_star, opts["out"] + "_u.csv")
    with open(opts["out"] + ".json", "w", encoding="utf-8") as fh:
        fh.write(dumps_json(record) + "\n")
    return _EXIT_OK if res.converged else _EXIT_NOCONV


def _cmd_eigen(opts: dict) -> int:
    # r defaults to q, where the eigenvalue problem lives
    probe = ProblemParams(N=opts["N"], alpha=opts["alpha"], p=opts["p"],
                          r=2.0 * (2.0 * opts["p"] + opts["alpha"]) / (2.0 + opts["alpha"])) \
        if opts.get("r") is None else _problem(opts)
    grid, kernel = _grid_and_kernel(opts)
    res = eigen_lambda1(probe, grid, kernel, _solver_cfg(opts))
    record = {
        "lambda_1": res.lambda_1,
        "F_max": res.F_max,
        "eigen_residual": res.eigen_residual,
        "grad_norm": res.grad_norm,
        "iterations": res.iterations,
        "converged": res.converged,
    }
    print(dumps_json(record))
    write_radial_csv(res.u_star, opts["out"] + "_u.csv")
    with open(opts["out"] + ".json", "w", encoding="utf-8") as fh:
        fh.write(dumps_json(record) + "\n")
    return _EXIT_OK if res.converged else _EXIT_NOCONV


def _cmd_talenti(opts: dict) -> int:
    params = _problem(opts)
    exps = derive_exponents(params)
    grid, kernel = _grid_and_kernel(opts)
    eps_list = _eps_list(opts)
    rho = opts.get("rho") or grid.R_max / 4.0
    fit = sobolev_estimate(grid, eps_list=eps_list, rho=rho, jobs=opts["jobs"])
    c = opts.get("c")
    if c is None:
        c = t0_and_cstar(exps, fit.S).c_star
    ells = [float(s) for s in opts["ells"].split(",")] if opts.get("ells") else [params.r]

    probe = lambda_sign_probe(c, grid, kernel, params, eps_list=eps_list, rho=rho,
                              jobs=opts["jobs"])
    norm_reports = [norm_asymptotics(grid, ell, eps_list=eps_list, rho=rho,
                                     jobs=opts["jobs"]) for ell in ells]
    coul_report = coulomb_asymptotics(grid, kernel, params.p, eps_list=eps_list, rho=rho,
                                      jobs=opts["jobs"])

    csv_path = opts["out"] + "_talenti.csv"
    with open(csv_path, "w", encoding="utf-8") as fh:
        cols = ["eps", "grad_sq"] + [f"lp_norm_{ell:g}" for ell in ells] + \
               ["coulomb", "t_c", "Lambda_c"]
        fh.write(",".join(cols) + "\n")
        for i, eps in enumerate(probe.eps_list):
            row = [eps, fit.rayleigh[list(fit.eps_list).index(eps)]]
            row += [rep.values[i] for rep in norm_reports]
            row += [coul_report.values[i], probe.t_c_values[i], probe.lambda_values[i]]
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")

    record = {
        "c": c,
        "S": fit.S,
        "gradient_deficit_slope": fit.deficit_slope,
        "norm_slopes": {f"{rep.ell:g}": {"branch": rep.branch, "expected": rep.expected,
                                         "fitted": rep.fitted} for rep in norm_reports},
        "coulomb_slope": {"branch": coul_report.branch,
                          "bound_exponent": coul_report.bound_exponent,
                          "fitted": coul_report.fitted},
        "probe_min": probe.min_value,
        "probe_first": probe.first_value,
        "t_c_bracket": list(probe.t_c_bracket),
    }
    print(dumps_json(record))
    with open(opts["out"] + "_talenti.json", "w", encoding="utf-8") as fh:
        fh.write(dumps_json(record) + "\n")
    return _EXIT_OK


def _cmd_curve(opts: dict) -> int:
    params = _problem(opts)
    exps = derive_exponents(params)
    grid, kernel = _grid_and_kernel(opts)
    S = _estimate_S({**opts, "eps_lo": 0.02, "eps_hi": 0.4, "eps_count": 9}, grid)
    c_star = t0_and_cstar(exps, S).c_star
    c_grid = default_c_grid(c_star, n=opts["c_count"], lo=opts["c_lo"], hi=opts["c_hi"])
    cfg = _solver_cfg(opts, cstar_hint=c_star)
    trace = trace_curve(c_grid, params, grid, kernel, cfg,
                        warm_start=not opts["cold"], jobs=opts["jobs"])
    csv_path = opts["out"] + "_curve.csv"
    write_curve_csv(trace.points, csv_path)
    limit = limit_c_to_cstar(params, grid, kernel, c_star, cfg)
    record = {
        "c_star": c_star,
        "S": S,
        "monotone_decreasing": trace.monotone_decreasing,
        "lambda_tilde_1": limit.lambda_tilde_1,
        "lambda_at_half_cstar": limit.lambda_at_half,
        "regime_case": limit.regime_case,
        "zero_limit_expected": limit.zero_asserted,
        "points_converged": sum(pt.converged for pt in trace.points),
        "points_total": len(trace.points),
    }
    print(dumps_json(record))
    with open(opts["out"] + "_curve.json", "w", encoding="utf-8") as fh:
        fh.write(dumps_json(record) + "\n")
    all_conv = all(pt.converged for pt in trace.points)
    return _EXIT_OK if all_conv else _EXIT_NOCONV


_COMMANDS = {
    "exponents": _cmd_exponents,
    "sobolev": _cmd_sobolev,
    "fiber": _cmd_fiber,
    "solve": _cmd_solve,
    "eigen": _cmd_eigen,
    "talenti": _cmd_talenti,
    "curve": _cmd_curve,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _merge_options(args)
        _echo(opts)
        return _COMMANDS[args.command](opts)
    except (ParameterError, NoRootError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_PARAMS
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return _EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
