"""
HP^1 is a round sphere
======================

HP^1 is isometric to a round 4-sphere, where the first invariant
eigenfunction is odd about the equator.  The cubic moment that drives the
initial slope of the branch vanishes, both half-branches are mirror images,
and lambda only increases: no fold appears below the first bifurcation
value.  This is consistent with uniqueness of positive solutions on round
spheres for small lambda.
"""

from yamabe_proj import FoldNotFoundError, SpaceSpec, branch_from, find_degenerate, lambda_prime_zero
from yamabe_proj.continuation import weighted_moment

space, q = SpaceSpec("hp", 1), 3.0
print("I3 =", weighted_moment(space, 1, 3), " lambda'(0) =", lambda_prime_zero(space, q, 1))

# %%
for direction in (1, -1):
    br = branch_from(space, q, 1, steps=100, ds=0.02, direction=direction)
    lam = br.lambdas()
    print(f"direction {direction:+d}: lambda from {lam.min():.6f} to {lam.max():.4f}")

# %%
# find_degenerate reports the failure and hands back what it traced.
try:
    find_degenerate(space, q, steps=100)
except FoldNotFoundError as exc:
    print(exc)
    print("half-branches attached:", len(exc.branch))

# %%
# On HP^2 (q must stay below 8/3) the moment no longer vanishes and the fold
# is back.
d = find_degenerate(SpaceSpec("hp", 2), 2.5)
print(f"HP^2: lambda_* = {d.lam:.6f} < lambda_1 = {d.branch.lambda_k:g}")
