"""Dilation exponents and regime classification.

Every admissible parameter set (N, alpha, p, r) determines the exponents
that govern how the energy pieces scale along u_t(x) = t^sigma u(tx).
The five-branch classification tells us when the limiting coupling at
the threshold energy vanishes."""

from spslater import ProblemParams, classify_regime, derive_exponents, params_json_dict

for label, params in [
    ("reference 3-d Coulomb case, r = q", ProblemParams(3, 2.0, 2.0, 3.0)),
    ("subcritical r = 4", ProblemParams(3, 2.0, 2.0, 4.0)),
    ("near-critical r = 4.5", ProblemParams(3, 2.0, 2.0, 4.5)),
    ("four dimensions", ProblemParams(4, 2.0, 2.0, 3.0)),
]:
    exps = derive_exponents(params)
    regime = classify_regime(params)
    print(f"--- {label}: N={params.N}, alpha={params.alpha}, p={params.p}, r={params.r}")
    print(f"    sigma={exps.sigma:g} q={exps.q:g} 2*={exps.two_star:g}")
    print(f"    s_q={exps.s_q:g} s_r={exps.s_r:g} s_2*={exps.s_2star:g}")
    print(f"    regime case {regime.case_id} "
          f"(threshold coupling vanishes: {regime.lambda_tilde1_zero})")

print("\nfull JSON record for the r = 4.5 case:")
for key, val in params_json_dict(ProblemParams(3, 2.0, 2.0, 4.5)).items():
    print(f"  {key} = {val}")
