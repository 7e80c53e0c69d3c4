"""Tracing the energy curve c -> lambda(c) on (0, c*).

The curve is continuous and strictly decreasing, diverges as c -> 0+
(for r > q), and its derivative is exactly -1/F at the minimizer.  The
CSV written here is the contract consumed by the plotting frontend."""

from spslater import (
    ProblemParams,
    SolveConfig,
    build_kernel,
    default_c_grid,
    derive_exponents,
    envelope_slope,
    make_grid,
    t0_and_cstar,
    trace_curve,
    write_curve_csv,
)
from spslater.talenti import sobolev_estimate

params = ProblemParams(3, 2.0, 2.0, 4.0)
exps = derive_exponents(params)
grid = make_grid(3, R_max=40.0, M=512)
kernel = build_kernel(grid, alpha=2.0)
S = sobolev_estimate(grid).S
c_star = t0_and_cstar(exps, S).c_star

trace = trace_curve(default_c_grid(c_star, n=10, lo=0.05, hi=0.95),
                    params, grid, kernel, SolveConfig(grad_tol=3e-6))
print(f" c/c*      lambda     dlambda/dc (envelope)")
for pt in trace.points:
    print(f" {pt.c / c_star:5.3f}   {pt.lam:10.5f}   {envelope_slope(pt, exps.s_r):10.5f}")
print(f"strictly decreasing: {trace.monotone_decreasing}")

write_curve_csv(trace.points, "demo_curve.csv")
print("curve written to demo_curve.csv  (columns: "
      "c,lambda,converged,grad_norm,pohozaev_res,t_c,F_at_min)")
