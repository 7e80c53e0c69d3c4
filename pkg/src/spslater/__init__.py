"""Radial variational solver for Schrodinger-Poisson-Slater equations
with a critical-exponent perturbation.

Computes prescribed-energy pairs (lambda, u) by minimizing the coupling
over a scaled constraint manifold, the threshold energy c* below which
the minimal coupling stays positive, bubble (Talenti-function)
asymptotics, first scaled eigenvalues, and the energy curves
c -> lambda(c).
"""

__version__ = "0.1.0"

from .errors import (
    GridMismatchError,
    KernelAccuracyError,
    NoRootError,
    ParameterError,
    TruncationWarning,
)
from .params import (
    DerivedExponents,
    ProblemParams,
    RegimeCase,
    classify_regime,
    derive_exponents,
    params_json_dict,
    riesz_constant,
)
from .grid import (
    RadialFunction,
    RadialGrid,
    dirichlet_energy,
    from_profile,
    gaussian,
    lp_norm_pow,
    make_grid,
    read_radial_csv,
    resample_dilation,
    sphere_area,
    write_radial_csv,
)
from .riesz import (
    RieszKernel,
    build_kernel,
    coulomb_energy,
    load_or_build,
    potential,
)
from .functionals import (
    FunctionalRecord,
    GradientRecord,
    evaluate,
    gradients,
    lambda_c,
    nehari_H,
    phi_lambda,
    pohozaev,
)
from .fiber import (
    CriticalConstants,
    FiberResult,
    phi,
    project_to_M,
    project_to_nehari,
    solve_tc,
    t0_and_cstar,
    tc_of_record,
)
from .solver import (
    EigenResult,
    SolveConfig,
    SolveResult,
    VerificationReport,
    eigen_lambda1,
    minimize_Lambda_c,
    verify_solution,
)
from .talenti import (
    TalentiParams,
    coulomb_asymptotics,
    lambda_sign_probe,
    make_u_eps,
    make_v_eps,
    norm_asymptotics,
    sobolev_estimate,
)
from .curves import (
    CurvePoint,
    CurveTrace,
    default_c_grid,
    envelope_slope,
    limit_c_to_cstar,
    limit_c_to_zero,
    trace_curve,
    write_curve_csv,
)
