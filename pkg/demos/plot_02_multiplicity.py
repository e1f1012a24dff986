"""
Counting solutions
==================

For lambda between lambda_k and lambda_{k+1} there are at least k
nonconstant invariant solutions.  We look for all of them with a shooting
scan: regular solutions are started at both endpoints and must meet at
r = pi/4 with the same value and slope.
"""

from yamabe_proj import ProblemSpec, SpaceSpec, scan
from yamabe_proj.bvp import ode_residual, theorem_bound

space, q = SpaceSpec("cp", 2), 3.0

# %%
# lambda_1 = 12 and lambda_2 = 32 for CP^2 with q = 3.
for lam in (6.0, 13.0, 33.0):
    res = scan(ProblemSpec(space, q, lam))
    print(f"lambda={lam:g}: found {len(res)}, guaranteed {theorem_bound(space, q, lam)}")
    for s in res:
        print(f"   u(0)={s.a + 1:.6f}  u(pi/2)={s.b + 1:.6f}  zeros of u-1: {s.zero_count}"
              f"  residual {ode_residual(s):.1e}")

# %%
# The scan also reports how much of the shooting box was usable and whether
# any solution sits on its edge.
print(res.diagnostics)

# %%
# The profile of the two-zero solution, coarsely.
prof = [s for s in res if s.zero_count == 2][0]
for r, u in zip(prof.r[::100], prof.u[::100]):
    print(f"r={r:.3f}  u={u:.5f}")
