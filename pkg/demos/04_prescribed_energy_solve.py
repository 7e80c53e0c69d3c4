"""A full prescribed-energy solve with certification.

We minimize the coupling over the scaled constraint set at c = 0.5 c*,
then certify the returned pair (lambda, u): prescribed energy holds,
the weak-form residual of the Euler-Lagrange equation is small against
random smooth directions, and the dilation (Pohozaev-type) identity is
satisfied."""

from spslater import (
    ProblemParams,
    SolveConfig,
    build_kernel,
    derive_exponents,
    make_grid,
    minimize_Lambda_c,
    t0_and_cstar,
    verify_solution,
    write_radial_csv,
)
from spslater.talenti import sobolev_estimate

params = ProblemParams(3, 2.0, 2.0, 4.0)
exps = derive_exponents(params)
grid = make_grid(3, R_max=40.0, M=1024)
kernel = build_kernel(grid, alpha=2.0)

S = sobolev_estimate(grid).S
c_star = t0_and_cstar(exps, S).c_star
c = 0.5 * c_star
print(f"S ~ {S:.5f}, threshold energy c* ~ {c_star:.5f}; solving at c = {c:.5f}")

res = minimize_Lambda_c(c, params, grid, kernel, SolveConfig())
print(f"lambda = {res.lambda_star:.8f}  ({res.iterations} iterations, "
      f"converged={res.converged})")
print(f"constraint residual {res.H_residual:.1e}, "
      f"dilation-identity residual {res.pohozaev_rel:.1e}")

report = verify_solution(res, c, params, grid, kernel)
for check in report.checks:
    print(f"  {check.name:22s} {check.value:.3e}  (tol {check.tolerance:g})  "
          f"{'ok' if check.passed else 'FAILED'}")

write_radial_csv(res.u_star, "demo_minimizer.csv")
print("minimizer profile written to demo_minimizer.csv")
