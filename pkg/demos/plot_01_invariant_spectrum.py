"""
The invariant spectrum
======================

Functions on CP^n or HP^n that only depend on the distance r to a point
reduce the Laplacian to an ODE on [0, pi/2].  Its eigenfunctions are
polynomials in x = cos^2 r, computed here in exact rational arithmetic.
"""

from yamabe_proj import SpaceSpec, eigenfunction, count_zeros, bifurcation_eigenvalue

# %%
# Eigenvalue gaps and the bifurcation values lambda_k = gap(k) / (q - 2).
q = 3.0
for space in (SpaceSpec("cp", 2), SpaceSpec("hp", 1)):
    print(space, "critical exponent", space.critical_exponent)
    for k in range(1, 5):
        print(f"  k={k}  gap={space.gap(k):4d}  lambda_k={bifurcation_eigenvalue(space, q, k):g}")

# %%
# The polynomials themselves, normalized to p_k(1) = 1 (value 1 at r = 0).
# Coefficients are listed in ascending powers of x.
for family in ("cp", "hp"):
    for k in range(4):
        p = eigenfunction(SpaceSpec(family, 1), k)
        print(family, "n=1 k=%d" % k, [str(c) for c in p.coeffs])

# %%
# Every p_k has exactly k simple zeros in (0, 1); the Sturm sequence count
# is exact, no floating point involved.
p = eigenfunction(SpaceSpec("hp", 3), 7)
print(count_zeros(p))

# %%
# Floating-point evaluation happens only at the very end.
import numpy as np
r = np.linspace(0, np.pi / 2, 7)
print(np.round([p.evaluate(x) for x in r], 6))
