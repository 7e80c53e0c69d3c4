"""The scalar fiber map t -> phi_{c,u}(t) and its unique maximum.

Along the dilation path the coupling with prescribed energy c is a
three-power function of t with a single interior maximum t_c(u); the
maximal value is invariant under dilations of u, which is what makes
the constrained minimization well posed."""

import numpy as np

from spslater import ProblemParams, build_kernel, derive_exponents, evaluate, gaussian, make_grid
from spslater.fiber import phi, tc_of_record
from spslater.functionals import FunctionalRecord

params = ProblemParams(3, 2.0, 2.0, 4.0)
exps = derive_exponents(params)
grid = make_grid(3, R_max=30.0, M=512)
kernel = build_kernel(grid, alpha=2.0)
rec = evaluate(gaussian(grid), kernel, params, exps)
c = 1.0

fr = tc_of_record(c, rec, exps)
print(f"I={rec.I_val:.5f} F={rec.F_val:.5f} G={rec.G_val:.5f}  c={c}")
print(f"fiber maximizer t_c = {fr.t_c:.8f} (residual {fr.residual:.1e}, "
      f"{fr.newton_iters} newton steps)")
print(f"maximal coupling    = {fr.phi_at_tc:.8f}")

print("\n   t        phi_{c,u}(t)")
for t in np.geomspace(0.1, 10.0, 11):
    print(f"  {t:7.3f}   {phi(c, rec, exps, t):12.6f}")

print("\ndilation invariance of the maximal value (scalar algebra):")
for s in (0.5, 2.0):
    drec = FunctionalRecord(
        I_val=s ** exps.s_q * rec.I_val,
        F_val=s ** exps.s_r * rec.F_val,
        G_val=s ** exps.s_2star * rec.G_val,
        dirichlet=0, coulomb=0, e_norm=0,
    )
    print(f"  u -> u_{s}: max value {tc_of_record(c, drec, exps).phi_at_tc:.12f}")
