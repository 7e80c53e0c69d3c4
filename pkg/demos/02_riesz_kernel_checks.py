"""The radial Riesz kernel against classical closed forms.

For N = 3, alpha = 2 the spherically averaged kernel is Newton's
1/max(r, s), the potential of the unit ball is (3 - r^2)/6 inside and
1/(3r) outside, and the Gaussian Coulomb energy has a Gamma-function
closed form.  All three are reproduced by the quadrature kernel."""

import numpy as np

from spslater import build_kernel, coulomb_energy, gaussian, make_grid, potential
from spslater.grid import RadialFunction
from spslater import oracles

grid = make_grid(3, R_max=30.0, M=1024)
kernel = build_kernel(grid, alpha=2.0)

exact = 1.0 / np.maximum.outer(grid.nodes, grid.nodes)
print(f"kernel vs 1/max(r,s):   max rel err {np.max(np.abs(kernel.K / exact - 1)):.2e}")

ball = (grid.nodes < 1.0).astype(float)
pot = potential(kernel, RadialFunction(grid=grid, values=ball))
print(f"ball potential at r~0:  {pot.values[0]:.6f}   (exact 0.5)")
print(f"ball potential at r=2:  {np.interp(2.0, grid.nodes, pot.values):.6f}   (exact {1/6:.6f})")

u = gaussian(grid)
E = coulomb_energy(kernel, u.with_values(np.abs(u.values) ** 2))
exact_E = oracles.gaussian_coulomb(3, 2.0, 2.0)
print(f"gaussian coulomb:       {E:.8f} vs closed form {exact_E:.8f} "
      f"(rel {abs(E - exact_E) / exact_E:.1e})")

coarse = make_grid(3, R_max=6.0, M=256)
ref = oracles.coulomb_bruteforce(gaussian(coarse), 3, 2.0)
exact_ref = oracles.gaussian_coulomb(3, 2.0, 1.0)
print(f"brute-force reference (f = e^(-r^2), coarse grid): {ref:.8f} vs "
      f"closed form {exact_ref:.8f} (rel {abs(ref - exact_ref) / exact_ref:.1e})")
