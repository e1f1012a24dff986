"""
Following a branch to its fold
==============================

The nonconstant solutions near lambda_1 form a curve through the trivial
solution.  Pseudo-arclength continuation in (u(0), u(pi/2), lambda) follows
it.  On CP^2 the curve bends back: lambda has a minimum below lambda_1, and
the solution there is degenerate (its linearization has a kernel).
"""

import numpy as np

from yamabe_proj import SpaceSpec, branch_from, find_degenerate, lambda_prime_zero

space, q = SpaceSpec("cp", 2), 3.0

# %%
# The initial slope dlambda/ds of the branch comes from two weighted
# integrals of the eigenfunction.  It is negative, so lambda first
# decreases on the side where u(0) > 1.
print("lambda'(0) =", lambda_prime_zero(space, q, 1))

# %%
# Trace that half-branch.  Columns: arclength, lambda, sup|u - 1|, and the
# normalized linearized mismatch whose sign flips at a fold.
br = branch_from(space, q, 1, steps=80, ds=0.02)
for p in br.points[::8]:
    print(f"s={p.s:5.2f}  lambda={p.lam:8.4f}  sup={p.sup_norm:7.4f}  lin_miss={p.lin_miss:+.2e}")

# %%
# The fold, refined by bisection on the arclength.
d = find_degenerate(space, q)
print(f"lambda_* = {d.lam:.12f}, u(0) = {d.point.a + 1:.6f}, u(pi/2) = {d.point.b + 1:.6f}")
print(f"dlambda/ds = {d.point.dlam_ds:.1e}, lin_miss = {d.point.lin_miss:.1e}")
print("min over traced branch:", np.min(br.lambdas()))
