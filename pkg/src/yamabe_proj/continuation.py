"""Branches of nonconstant solutions, folds and degenerate solutions.

Branches are traced in the shooting unknowns X = (a, b, lambda/lambda_k)
by pseudo-arclength continuation.  The Jacobian of the matching map comes
from the variational equations integrated alongside each shot, so the
branch tangent and the degeneracy indicator are available at every point
without finite differences.

Along a branch the tangent is the cross product of the two Jacobian rows.
Its lambda component equals det d(miss)/d(a, b), which vanishes exactly
where the linearized problem has a kernel.  A turning point of lambda is
therefore a degenerate solution.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import _rk, shooting
from .bvp import SolutionProfile, build_profile, miss_jacobian
from .errors import FoldNotFoundError, NoConvergenceError, NumericalError, PositivityError
from .model import ProblemSpec, SpaceSpec, bifurcation_eigenvalue, check_exponent
from .quadrature import half_interval
from .shooting import DEFAULT_CONFIG, LEFT, R_MATCH, RIGHT, IntegratorConfig
from .spectral import eigenfunction

log = logging.getLogger(__name__)

__all__ = [
    "BranchPoint",
    "Branch",
    "DegenerateSolution",
    "linearized_miss",
    "trivial_lin_miss",
    "locate_bifurcations",
    "branch_from",
    "find_degenerate",
    "weighted_moment",
    "lambda_prime_zero",
    "cubic_integral_check",
    "bifurcation_slope",
    "tangency_distance",
]

CORRECTOR_TOL = 1e-9
FOLD_TOL = 1e-6
MAX_HALVINGS = 8


@dataclass(frozen=True)
class BranchPoint:
    s: float
    lam: float
    a: float
    b: float
    sup_norm: float
    zero_count: int
    lin_miss: float
    dlam_ds: float = math.nan
    miss_norm: float = math.nan


@dataclass
class Branch:
    space: SpaceSpec
    q: float
    k: int
    direction: int
    points: list = field(default_factory=list)
    fold: BranchPoint | None = None
    aborted: str | None = None
    # scaled unknowns and unit tangents of the accepted points
    states: list = field(default_factory=list, repr=False)
    tangents: list = field(default_factory=list, repr=False)

    @property
    def lambda_k(self) -> float:
        return bifurcation_eigenvalue(self.space, self.q, self.k)

    def lambdas(self) -> np.ndarray:
        return np.array([p.lam for p in self.points])

    def problem_at(self, i: int) -> ProblemSpec:
        return ProblemSpec(self.space, self.q, self.points[i].lam)

    def profile(self, i: int, **kw) -> SolutionProfile:
        p = self.points[i]
        return build_profile(self.problem_at(i), p.a, p.b, **kw)


@dataclass
class DegenerateSolution:
    point: BranchPoint
    profile: SolutionProfile
    branch: Branch
    lin_miss_before: float
    lin_miss_after: float

    @property
    def lam(self) -> float:
        return self.point.lam

    @property
    def u(self) -> np.ndarray:
        return self.profile.u


# --- degeneracy indicator --------------------------------------------------


def _normalized_det(vl, dvl, vr, dvr) -> float:
    return (vl * dvr - dvl * vr) / (math.hypot(vl, dvl) * math.hypot(vr, dvr))


def linearized_miss(profile: SolutionProfile, cfg: IntegratorConfig = DEFAULT_CONFIG) -> float:
    """Normalized Wronskian at pi/4 of the regular linearized solutions.

    Zero exactly when the linearization about ``profile`` has a nontrivial
    kernel element with v'(0) = v'(pi/2) = 0.
    """
    left = shooting.integrate_linearized(profile.problem, profile, LEFT, cfg)
    right = shooting.integrate_linearized(profile.problem, profile, RIGHT, cfg)
    return _normalized_det(left.phi, left.dphi, right.phi, right.dphi)


def trivial_lin_miss(space: SpaceSpec, q: float, lams, cfg: IntegratorConfig = DEFAULT_CONFIG):
    """:func:`linearized_miss` of the trivial solution w = 0, for many lambda."""
    check_exponent(space, q)
    lams = np.ascontiguousarray(lams, dtype=float)
    A, B = space.drift_constants
    out = np.empty(lams.shape[0])
    status = np.zeros(lams.shape[0], dtype=np.int64)
    _rk.linear_det_batch(lams, 0.0, 0.0, float(q), float(A), float(B), cfg.eps_endpoint,
                         R_MATCH, cfg.rel_tol, cfg.abs_tol, cfg.max_steps, out, status)
    if status.any():
        raise NumericalError("linearized shot failed on the trivial solution")
    return out


def locate_bifurcations(space: SpaceSpec, q: float, lam_max: float, spacing: float = 1e-3,
                        cfg: IntegratorConfig = DEFAULT_CONFIG, xtol: float = 1e-12):
    """Sign changes of the trivial indicator on a lambda grid, refined by Brent.

    The grid is (j - 1/2) * spacing, j = 1, 2, ..., extended one point past
    ``lam_max`` so that a root at lam_max itself is bracketed.  Returns
    (roots, grid, values).
    """
    n = int(math.ceil(lam_max / spacing)) + 1
    grid = (np.arange(1, n + 1) - 0.5) * spacing
    vals = trivial_lin_miss(space, q, grid, cfg)
    idx = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
    f = lambda lam: float(trivial_lin_miss(space, q, [lam], cfg)[0])  # noqa: E731
    roots = [brentq(f, grid[i], grid[i + 1], xtol=xtol, rtol=4 * np.finfo(float).eps)
             for i in idx]
    return np.array(roots), grid, vals


# --- pseudo-arclength continuation -----------------------------------------


class _Corrector:
    """Matching map in scaled unknowns X = (a, b, lambda / lambda_k)."""

    def __init__(self, space, q, lam_k, cfg):
        self.space, self.q, self.lam_k, self.cfg = space, q, lam_k, cfg

    def evaluate(self, X):
        if X[0] <= -1 or X[1] <= -1 or X[2] < 0:
            raise PositivityError("left the admissible region")
        prob = ProblemSpec(self.space, self.q, X[2] * self.lam_k)
        F, J, left, right = miss_jacobian(prob, X[0], X[1], with_lambda=True, cfg=self.cfg)
        J[:, 2] *= self.lam_k
        return F, J, left, right

    def solve(self, X0, T, target, max_iter=15):
        """Newton on miss(X) = 0, T . X = target."""
        X = np.array(X0, dtype=float)
        for _ in range(max_iter):
            F, J, left, right = self.evaluate(X)
            g = float(T @ X - target)
            if np.linalg.norm(F) < CORRECTOR_TOL and abs(g) < CORRECTOR_TOL:
                return X, F, J, left, right
            H = np.vstack([J, T])
            X = X + np.linalg.solve(H, -np.append(F, g))
        F, J, left, right = self.evaluate(X)
        if np.linalg.norm(F) < CORRECTOR_TOL and abs(T @ X - target) < CORRECTOR_TOL:
            return X, F, J, left, right
        raise NoConvergenceError("corrector did not converge")


def _tangent(J, previous):
    t = np.cross(J[0], J[1])
    t /= np.linalg.norm(t)
    return t if t @ previous >= 0 else -t


def _make_point(space, q, lam_k, s, X, F, J, T, left, right, n_samples):
    prob = ProblemSpec(space, q, X[2] * lam_k)
    prof = build_profile(prob, X[0], X[1], n_samples=n_samples, miss_residual=np.linalg.norm(F))
    return BranchPoint(
        s=float(s), lam=float(X[2] * lam_k), a=float(X[0]), b=float(X[1]),
        sup_norm=prof.sup_norm, zero_count=prof.zero_count,
        lin_miss=_normalized_det(left[2], left[3], right[2], right[3]),
        dlam_ds=float(lam_k * T[2]), miss_norm=float(np.linalg.norm(F)),
    )


def branch_from(space: SpaceSpec, q: float, k: int, steps: int = 200, ds: float = 0.02, *,
                direction: int = 1, cfg: IntegratorConfig = DEFAULT_CONFIG,
                lam_max: float | None = None, n_samples: int = 401) -> Branch:
    """Trace the half-branch leaving (0, lambda_k) with a = direction * s > 0.

    The first point is corrected from the seed s0 * (p_k(1), p_k(0)) at
    lambda_k with s0 = ds, on the hyperplane through the seed orthogonal to
    the kernel direction; it is recorded at s = ds.  Subsequent steps are
    pseudo-arclength steps of length ds in the scaled norm, halved on
    corrector failure down to ds / 2**8.
    """
    check_exponent(space, q)
    if k < 1:
        raise ValueError("k must be >= 1")
    if not ds > 0:
        raise ValueError("ds must be positive")
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    lam_k = bifurcation_eigenvalue(space, q, k)
    phi = eigenfunction(space, k)
    kernel = np.array([float(phi(1)), float(phi(0)), 0.0])
    T0 = direction * kernel / np.linalg.norm(kernel)
    corr = _Corrector(space, q, lam_k, cfg)
    branch = Branch(space, float(q), k, direction)

    seed = np.array([0.0, 0.0, 1.0]) + direction * ds * kernel
    try:
        X, F, J, left, right = corr.solve(seed, T0, float(T0 @ seed))
    except (NumericalError, PositivityError, np.linalg.LinAlgError) as exc:
        branch.aborted = f"first point failed: {exc}"
        return branch
    T = _tangent(J, T0)
    s = ds
    branch.points.append(_make_point(space, q, lam_k, s, X, F, J, T, left, right, n_samples))
    branch.states.append(X)
    branch.tangents.append(T)

    h = ds
    while len(branch.points) < steps:
        try:
            Xn, F, J, left, right = corr.solve(X + h * T, T, float(T @ X) + h)
            Tn = _tangent(J, T)
            if Tn @ T < 0.5:
                raise NoConvergenceError("tangent turned too sharply")
        except (NumericalError, PositivityError, np.linalg.LinAlgError) as exc:
            h *= 0.5
            if h < ds / 2 ** MAX_HALVINGS:
                branch.aborted = f"step size underflow at s = {s:.6g}: {exc}"
                break
            continue
        X, T = Xn, Tn
        s += h
        branch.points.append(_make_point(space, q, lam_k, s, X, F, J, T, left, right, n_samples))
        branch.states.append(X)
        branch.tangents.append(T)
        h = min(ds, 2 * h)
        if lam_max is not None and X[2] * lam_k > lam_max:
            break
    return branch


def _fold_index(branch: Branch, below: float | None):
    for i in range(len(branch.points) - 1):
        p, nxt = branch.points[i], branch.points[i + 1]
        if p.dlam_ds * nxt.dlam_ds < 0 and (below is None or min(p.lam, nxt.lam) < below):
            return i
    return None


def _refine_fold(branch: Branch, i: int, cfg, n_samples, max_iter=200):
    """Bisection on the arclength offset from point i for dlambda/ds = 0."""
    space, q = branch.space, branch.q
    lam_k = branch.lambda_k
    corr = _Corrector(space, q, lam_k, cfg)
    X0, T0 = branch.states[i], branch.tangents[i]
    lo, hi = 0.0, float(T0 @ (branch.states[i + 1] - X0))
    sign_lo = math.copysign(1.0, branch.points[i].dlam_ds)
    X = X0
    best = None
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        X, F, J, left, right = corr.solve(X0 + mid * T0, T0, float(T0 @ X0) + mid)
        T = _tangent(J, T0)
        pt = _make_point(space, q, lam_k, branch.points[i].s + mid, X, F, J, T, left, right,
                         n_samples)
        best = pt
        if abs(pt.dlam_ds) < 1e-3 * FOLD_TOL and abs(pt.lin_miss) < 1e-3 * FOLD_TOL:
            break
        if math.copysign(1.0, pt.dlam_ds) == sign_lo:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    return best


def find_degenerate(space: SpaceSpec, q: float, k: int = 1, *, ds: float = 0.02,
                    steps: int = 400, cfg: IntegratorConfig = DEFAULT_CONFIG,
                    n_samples: int = 1001) -> DegenerateSolution:
    """Turning point of lambda below lambda_k on a branch from (0, lambda_k).

    The half-branch along which lambda initially decreases is traced first,
    the opposite half only if the first has no fold.  The first sign change
    of dlambda/ds at lambda < lambda_k is refined by bisection.
    """
    lam_k = bifurcation_eigenvalue(space, q, k)
    slope = lambda_prime_zero(space, q, k)
    if abs(slope) > 1e-8 * lam_k:
        first = -int(math.copysign(1, slope))
    else:
        first = 1
    directions = [first, -first]
    traced = []
    for d in directions:
        br = branch_from(space, q, k, steps, ds, direction=d, cfg=cfg)
        traced.append(br)
        i = _fold_index(br, lam_k)
        if i is None:
            continue
        pt = _refine_fold(br, i, cfg, n_samples)
        if pt.lam >= lam_k:
            continue
        br.fold = pt
        prof = build_profile(ProblemSpec(space, q, pt.lam), pt.a, pt.b, n_samples=n_samples,
                             miss_residual=pt.miss_norm)
        return DegenerateSolution(pt, prof, br, br.points[i].lin_miss, br.points[i + 1].lin_miss)
    lam_min = min((p.lam for b in traced for p in b.points), default=math.nan)
    raise FoldNotFoundError(
        f"no turning point below lambda_{k} = {lam_k:g} on {len(traced)} traced half-branch(es) "
        f"of {space}, q = {q:g}; smallest lambda reached {lam_min:.10g}",
        branch=traced[0] if len(traced) == 1 else traced,
    )


# --- bifurcation slope -------------------------------------------------------


def weighted_moment(space: SpaceSpec, k: int, power: int, tol: float = 1e-12) -> float:
    """Integral over [0, pi/2] of p_k(cos^2 r)^power sin^sigma(r) cos^gamma(r)."""
    coeffs = eigenfunction(space, k).as_floats()
    sigma, gamma = space.weight_exponents

    def f(r):
        x = np.cos(r) ** 2
        return np.polyval(coeffs[::-1], x) ** power * np.sin(r) ** sigma * np.cos(r) ** gamma

    return half_interval(f, tol)


def lambda_prime_zero(space: SpaceSpec, q: float, k: int, tol: float = 1e-12) -> float:
    """d lambda / ds at s = 0 on the branch w(s) = s phi_k + O(s^2).

    Projecting the second-order expansion of the equation onto phi_k gives
    lambda'(0) = -(q - 1) lambda_k I3 / (2 I2), I_j = integral of phi_k^j
    against the orbit volume (the sphere-volume factor cancels).
    """
    check_exponent(space, q)
    if k < 1:
        raise ValueError("k must be >= 1")
    i2 = weighted_moment(space, k, 2, tol)
    if abs(i2) < 1e-14:
        raise NumericalError(f"|I2| = {i2:.3e} is too small; quadrature misuse?")
    i3 = weighted_moment(space, k, 3, tol)
    return -(q - 1.0) * bifurcation_eigenvalue(space, q, k) * i3 / (2.0 * i2)


def cubic_integral_check(n: int, tol: float = 1e-12) -> dict:
    """Compare the CP^n cubic moment of phi_1 against the published closed form.

    Both sides omit the sphere volume and include the 1/n^3 from
    phi_1 = ((n + 1) cos^2 r - 1) / n.
    """
    space = SpaceSpec("cp", n)
    quad = weighted_moment(space, 1, 3, tol)
    quad_half = weighted_moment(space, 1, 3, tol / 2)
    closed = (-7 * n - 2) / (2 * (n + 2) * (n + 3)) / n ** 3
    return {
        "n": n,
        "quadrature": quad,
        "closed_form": closed,
        "agree": abs(quad - closed) <= 1e-10 * max(1.0, abs(closed)),
        "self_validation_delta": abs(quad - quad_half),
    }


def bifurcation_slope(space: SpaceSpec, q: float, k: int, s0: float, *,
                      direction: int = 1, cfg: IntegratorConfig = DEFAULT_CONFIG) -> float:
    """(lambda(s0) - lambda_k) / s0 from the first point of :func:`branch_from`."""
    br = branch_from(space, q, k, steps=1, ds=s0, direction=direction, cfg=cfg)
    if not br.points:
        raise NoConvergenceError(br.aborted or "no branch point")
    lam_k = bifurcation_eigenvalue(space, q, k)
    return (br.points[0].lam - lam_k) / (direction * s0)


def tangency_distance(branch: Branch, i: int = 0, n_samples: int = 401) -> float:
    """sup | w / max|w| - phi_k / max|phi_k| | at branch point i (sign aligned)."""
    prof = branch.profile(i, n_samples=n_samples)
    phi = eigenfunction(branch.space, branch.k)
    ref = np.polyval(phi.as_floats()[::-1], np.cos(prof.r) ** 2)
    ref = ref / np.abs(ref).max()
    w = branch.direction * prof.w
    return float(np.abs(w / np.abs(w).max() - ref).max())
