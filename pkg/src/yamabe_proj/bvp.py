"""Nonconstant invariant solutions by double shooting.

A solution is a pair (a, b) = (w(0), w(pi/2)) for which the regular shots
from both endpoints agree in value and slope at pi/4.  :func:`scan` finds
all such pairs in a box by intersecting the two shot curves
a -> (w_L, w_L')(pi/4) and b -> (w_R, w_R')(pi/4) in the phase plane, then
polishes each crossing with Newton's method.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import shooting
from .errors import ConfigError, NoConvergenceError, NumericalError, PositivityError
from .model import ProblemSpec, SpaceSpec, bifurcation_eigenvalue, check_exponent
from .shooting import DEFAULT_CONFIG, LEFT, R_MATCH, RIGHT, IntegratorConfig

log = logging.getLogger(__name__)

__all__ = [
    "SolutionProfile",
    "ScanResult",
    "MultiplicityResult",
    "miss",
    "miss_jacobian",
    "refine",
    "build_profile",
    "ode_residual",
    "scan",
    "count_multiplicity",
    "theorem_bound",
]

NEWTON_TOL = 1e-9
TRIVIAL_NORM = 1e-7
DEDUP_TOL = 1e-6
DEFAULT_A_RANGE = (-0.95, 20.0)
DEFAULT_GRID = 2000
# u(pi/2) can sit very close to 0 on higher branches, so b is scanned further down
B_MIN = -0.9999
N_SAMPLES = 1001
SAMPLE_RTOL = 1e-13
SAMPLE_ATOL = 1e-15


@dataclass(eq=False)
class SolutionProfile:
    problem: ProblemSpec
    a: float
    b: float
    r: np.ndarray
    w: np.ndarray
    dw: np.ndarray
    zero_count: int
    sup_norm: float
    miss_residual: float

    @property
    def trivial(self) -> bool:
        return self.sup_norm < TRIVIAL_NORM

    @property
    def samples(self) -> np.ndarray:
        """(N, 3) array of (r, w, w')."""
        return np.column_stack([self.r, self.w, self.dw])

    @property
    def u(self) -> np.ndarray:
        return self.w + 1.0


def miss(problem: ProblemSpec, a: float, b: float,
         cfg: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Value and slope mismatch at pi/4 between the shots from 0 and pi/2."""
    left = shooting.shoot(problem, a, LEFT, 2, cfg)
    right = shooting.shoot(problem, b, RIGHT, 2, cfg)
    return left - right


def miss_jacobian(problem: ProblemSpec, a: float, b: float, with_lambda: bool = False,
                  cfg: IntegratorConfig = DEFAULT_CONFIG):
    """Mismatch and its Jacobian from the variational equations.

    Returns (F, J, left, right), J of shape (2, 2), or (2, 3) with a
    d/dlambda column.  ``left``/``right`` are the raw shot states at pi/4
    (w, w', v, v'[, z, z']).
    """
    nvar = 6 if with_lambda else 4
    left = shooting.shoot(problem, a, LEFT, nvar, cfg)
    right = shooting.shoot(problem, b, RIGHT, nvar, cfg)
    F = left[:2] - right[:2]
    cols = [left[2:4], -right[2:4]]
    if with_lambda:
        cols.append(left[4:6] - right[4:6])
    return F, np.column_stack(cols), left, right


def refine(problem: ProblemSpec, a0: float, b0: float, *, tol: float = NEWTON_TOL,
           max_iter: int = 60, cfg: IntegratorConfig = DEFAULT_CONFIG,
           n_samples: int = N_SAMPLES) -> SolutionProfile:
    """Damped Newton on (a, b) until ||miss|| < tol."""
    x = np.array([a0, b0], dtype=float)
    try:
        F, J, _, _ = miss_jacobian(problem, *x, cfg=cfg)
    except (NumericalError, PositivityError) as exc:
        raise NoConvergenceError(f"initial guess ({a0}, {b0}) not admissible: {exc}") from exc
    norm = np.linalg.norm(F)
    for _ in range(max_iter):
        if norm < tol:
            break
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            raise NoConvergenceError("singular Jacobian (degenerate solution?)") from None
        t = 1.0
        while True:
            trial = x + t * step
            if trial.min() > -1:
                try:
                    F_t, J_t, _, _ = miss_jacobian(problem, *trial, cfg=cfg)
                    n_t = np.linalg.norm(F_t)
                    if n_t < (1 - 1e-4 * t) * norm or n_t < tol:
                        break
                except (NumericalError, PositivityError):
                    pass
            t *= 0.5
            if t < 1e-6:
                raise NoConvergenceError(f"line search stalled at (a, b) = {tuple(x)}, |F| = {norm:.3e}")
        x, F, J, norm = trial, F_t, J_t, n_t
    else:
        raise NoConvergenceError(f"no convergence in {max_iter} iterations, |F| = {norm:.3e}")
    return build_profile(problem, x[0], x[1], cfg=cfg, n_samples=n_samples, miss_residual=norm)


def build_profile(problem: ProblemSpec, a: float, b: float, *,
                  cfg: IntegratorConfig = DEFAULT_CONFIG, n_samples: int = N_SAMPLES,
                  miss_residual: float | None = None) -> SolutionProfile:
    """Sample both half-shots on a uniform grid of [eps, pi/2 - eps].

    Sampling runs at a tighter tolerance than the matching shots so that
    the samples can be differenced (see :func:`ode_residual`).
    """
    cfg = replace(cfg, rel_tol=min(cfg.rel_tol, SAMPLE_RTOL), abs_tol=min(cfg.abs_tol, SAMPLE_ATOL))
    if n_samples % 2 == 0:
        n_samples += 1
    eps = cfg.eps_endpoint
    r = np.linspace(eps, math.pi / 2 - eps, n_samples)
    mid = n_samples // 2
    r[mid] = R_MATCH
    left = shooting.sample_shot(problem, a, LEFT, r[: mid + 1], 2, cfg)
    right = shooting.sample_shot(problem, b, RIGHT, r[mid:][::-1], 2, cfg)[::-1]
    w = np.concatenate([left[:, 0], right[1:, 0]])
    dw = np.concatenate([left[:, 1], right[1:, 1]])
    if miss_residual is None:
        miss_residual = float(np.hypot(*(left[-1] - right[0])))
    sup = float(max(np.abs(w).max(), abs(a), abs(b)))
    return SolutionProfile(problem, float(a), float(b), r, w, dw,
                           zero_count=count_sign_changes(w, sup), sup_norm=sup,
                           miss_residual=float(miss_residual))


def count_sign_changes(w: np.ndarray, scale: float = 1.0) -> int:
    s = np.sign(w[np.abs(w) > 1e-12 * max(scale, 1e-300)])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def _fd_weights(offsets, order=1):
    """Finite-difference weights for the derivative of given order at 0."""
    offsets = np.asarray(offsets, dtype=float)
    n = len(offsets)
    V = np.vander(offsets, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(V, rhs)


def _derivative(y: np.ndarray, h: float, width: int = 7) -> np.ndarray:
    """Sixth-order finite-difference derivative on a uniform grid."""
    n = len(y)
    half = width // 2
    out = np.empty(n)
    central = _fd_weights(np.arange(-half, half + 1))
    for i in range(half, n - half):
        out[i] = central @ y[i - half: i + half + 1]
    for i in list(range(half)) + list(range(n - half, n)):
        lo = min(max(i - half, 0), n - width)
        out[i] = _fd_weights(np.arange(lo, lo + width) - i) @ y[lo: lo + width]
    return out / h


def ode_residual(profile: SolutionProfile) -> float:
    """max |w'' + drift w' - G(w)| on the sample grid.

    w'' is obtained by differencing the sampled w'; the drift and G are
    evaluated pointwise from their closed forms.  Independent of the
    integrator apart from the samples themselves.
    """
    r, w, dw = profile.r, profile.w, profile.dw
    mid = len(r) // 2
    A, B = profile.problem.space.drift_constants
    lam, q = profile.problem.lam, profile.problem.q
    res = np.empty_like(r)
    # the sample at pi/4 belongs to the left shot; never difference across shots
    for sl in (slice(0, mid + 1), slice(mid + 1, None)):
        rr = r[sl]
        h = (rr[-1] - rr[0]) / (len(rr) - 1)
        d2 = _derivative(dw[sl], h)
        drift = (A * np.cos(rr) ** 2 - B) / (np.cos(rr) * np.sin(rr))
        u = w[sl] + 1.0
        res[sl] = d2 + drift * dw[sl] - lam * (u - u ** (q - 1.0))
    return float(np.max(np.abs(res)))


# --- exhaustive scan ------------------------------------------------------


def _segment_crossings(P: np.ndarray, Q: np.ndarray):
    """All proper crossings between polylines P (n, 2) and Q (m, 2).

    NaN vertices break a polyline.  Returns a list of (i, t, j, u) with the
    crossing at P[i] + t (P[i+1] - P[i]) = Q[j] + u (Q[j+1] - Q[j]).
    """
    p0, p1 = P[:-1], P[1:]
    q0, q1 = Q[:-1], Q[1:]
    okp = np.isfinite(p0).all(1) & np.isfinite(p1).all(1)
    okq = np.isfinite(q0).all(1) & np.isfinite(q1).all(1)
    ip = np.flatnonzero(okp)
    iq = np.flatnonzero(okq)
    if not len(ip) or not len(iq):
        return []
    p0, p1, q0, q1 = p0[ip], p1[ip], q0[iq], q1[iq]
    rv = p1 - p0
    sv = q1 - q0
    out = []
    chunk = max(1, 2_000_000 // max(len(iq), 1))
    for start in range(0, len(ip), chunk):
        sl = slice(start, start + chunk)
        P0 = p0[sl, None, :]
        R = rv[sl, None, :]
        d = q0[None, :, :] - P0
        denom = R[..., 0] * sv[None, :, 1] - R[..., 1] * sv[None, :, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (d[..., 0] * sv[None, :, 1] - d[..., 1] * sv[None, :, 0]) / denom
            u = (d[..., 0] * R[..., 1] - d[..., 1] * R[..., 0]) / denom
        hit = (denom != 0) & (t >= 0) & (t < 1) & (u >= 0) & (u < 1)
        for i, j in zip(*np.nonzero(hit)):
            out.append((int(ip[start + i]), float(t[i, j]), int(iq[j]), float(u[i, j])))
    return out


@dataclass
class ScanResult:
    problem: ProblemSpec
    solutions: list
    trivial_found: bool
    diagnostics: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.solutions)

    def __iter__(self):
        return iter(self.solutions)

    def __getitem__(self, i):
        return self.solutions[i]


def scan(problem: ProblemSpec, a_range=DEFAULT_A_RANGE, grid_size: int = DEFAULT_GRID, *,
         b_range=None, cfg: IntegratorConfig = DEFAULT_CONFIG,
         dedup_tol: float = DEDUP_TOL, n_samples: int = N_SAMPLES) -> ScanResult:
    """All nonconstant solutions with (a, b) in the scan box, found on a grid.

    ``b_range`` defaults to (B_MIN, a_max) with the same number of grid points.
    """
    lo, hi = map(float, a_range)
    if not -1 < lo < hi:
        raise ConfigError("a_range must satisfy -1 < a_min < a_max")
    if grid_size < 2:
        raise ConfigError("grid_size must be >= 2")
    b_lo, b_hi = map(float, b_range) if b_range is not None else (B_MIN, hi)
    if not -1 < b_lo < b_hi:
        raise ConfigError("b_range must satisfy -1 < b_min < b_max")
    a_grid = np.linspace(lo, hi, grid_size)
    b_grid = np.linspace(b_lo, b_hi, grid_size)
    L, st_l = shooting.shoot_many(problem, a_grid, LEFT, 2, cfg)
    R, st_r = shooting.shoot_many(problem, b_grid, RIGHT, 2, cfg)
    crossings = _segment_crossings(L, R)
    found: list[SolutionProfile] = []
    failures = 0
    trivial_found = False
    for i, t, j, u in crossings:
        a0 = a_grid[i] + t * (a_grid[i + 1] - a_grid[i])
        b0 = b_grid[j] + u * (b_grid[j + 1] - b_grid[j])
        try:
            prof = refine(problem, a0, b0, cfg=cfg, n_samples=n_samples)
        except (NumericalError, PositivityError) as exc:
            failures += 1
            log.info("crossing near (a, b) = (%.6g, %.6g) not refined: %s", a0, b0, exc)
            continue
        if prof.trivial:
            trivial_found = True
            continue
        if any(abs(prof.a - s.a) < dedup_tol and abs(prof.b - s.b) < dedup_tol for s in found):
            continue
        found.append(prof)
    if not trivial_found:
        # curves are tangent at the origin exactly at a bifurcation point
        trivial_found = bool(np.all(np.abs(miss(problem, 0.0, 0.0, cfg)) < NEWTON_TOL))
    found.sort(key=lambda s: (s.a, s.b))
    edge = [
        (s.a, s.b) for s in found
        if min(s.a - lo, hi - s.a, s.b - b_lo, b_hi - s.b) < 2 * max(hi - lo, b_hi - b_lo) / (grid_size - 1)
    ]
    diag = {
        "grid_size": grid_size,
        "a_range": [lo, hi],
        "b_range": [b_lo, b_hi],
        "left_shots_ok": int(np.count_nonzero(st_l == 0)),
        "right_shots_ok": int(np.count_nonzero(st_r == 0)),
        "crossings": len(crossings),
        "refine_failures": failures,
        "boundary_hits": edge,
    }
    return ScanResult(problem, found, trivial_found, diag)


def theorem_bound(space: SpaceSpec, q: float, lam: float) -> int:
    """max{k : lambda > lambda_k}, the guaranteed number of nonconstant solutions."""
    k = 0
    while lam > bifurcation_eigenvalue(space, q, k + 1):
        k += 1
    return k


@dataclass
class MultiplicityResult:
    count: int
    bound: int
    scan: ScanResult

    @property
    def solutions(self):
        return self.scan.solutions


def count_multiplicity(space: SpaceSpec, q: float, lam: float, *, a_range=DEFAULT_A_RANGE,
                       grid_size: int = DEFAULT_GRID,
                       cfg: IntegratorConfig = DEFAULT_CONFIG) -> MultiplicityResult:
    check_exponent(space, q)
    if not lam > 0:
        raise ConfigError("lambda must be positive")
    res = scan(ProblemSpec(space, q, lam), a_range, grid_size, cfg=cfg)
    return MultiplicityResult(len(res), theorem_bound(space, q, lam), res)
