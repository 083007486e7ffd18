"""Numerical checks of the controller's structural properties.

Random points in a box test that V scales with the dilation, that the sign
controller is dilation invariant, that u0 never pushes V up through z3, and
that the closed-form V agrees with a direct quadrature of its integrals.
"""
import json

from barrier_hosm import HongParams, make_profile, verify_assumptions

params = HongParams(make_profile(3, -1 / 3), (1.0, 2.0, 5.0))
report = verify_assumptions(params, sample_count=2000, seed=11, quad_samples=200)
print(json.dumps(report, indent=2))

# an interior degree gives a continuous controller with the same checks
smooth = HongParams(make_profile(3, -0.1), (1.0, 2.0, 5.0))
print("kappa=-0.1 ok:", verify_assumptions(smooth, sample_count=2000, seed=11, quad_samples=0)["ok"])
