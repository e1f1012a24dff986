"""Shots from the two singular endpoints of the orbit interval.

Both r = 0 and r = pi/2 are regular singular points of the reduced ODE.  A
shot starts a small offset ``eps`` inside the interval from the regular
Taylor expansion and integrates outward with an adaptive Dormand-Prince
5(4) pair.  Integrating *into* r = pi/2 would pick up the singular mode,
so solutions are always assembled from two outward shots matched at pi/4.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _rk
from .errors import ConfigError, IntegrationError, PositivityError
from .model import ProblemSpec

__all__ = [
    "OdeState",
    "IntegratorConfig",
    "R_MATCH",
    "LEFT",
    "RIGHT",
    "taylor_start_zero",
    "taylor_start_pi2",
    "integrate",
    "integrate_linearized",
    "shoot",
    "shoot_many",
    "sample_shot",
]

R_MATCH = math.pi / 4
LEFT, RIGHT = 0, 1


@dataclass(frozen=True)
class OdeState:
    r: float
    phi: float
    dphi: float


@dataclass(frozen=True)
class IntegratorConfig:
    eps_endpoint: float = 1e-6
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 200_000

    def __post_init__(self):
        if not 0 < self.eps_endpoint < math.pi / 4:
            raise ConfigError("eps_endpoint must lie in (0, pi/4)")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ConfigError("tolerances must be positive")
        if self.max_steps < 1:
            raise ConfigError("max_steps must be >= 1")


DEFAULT_CONFIG = IntegratorConfig()


def _consts(problem: ProblemSpec):
    A, B = problem.space.drift_constants
    return float(A), float(B)


def _check_start(value, h, cfg=None):
    if not value > -1:
        raise PositivityError(f"endpoint value must exceed -1, got {value}")
    if not h > 0:
        raise ValueError("offset h must be positive")
    if cfg is not None and h > cfg.eps_endpoint:
        raise ValueError("offset h must not exceed eps_endpoint")


def taylor_start_zero(problem: ProblemSpec, a: float, h: float) -> OdeState:
    """Regular solution with w(0) = a, w'(0) = 0, evaluated at r = h."""
    _check_start(a, h)
    A, B = _consts(problem)
    y = _rk.taylor_start(float(a), float(h), problem.lam, problem.q, A, B, LEFT, 2)
    return OdeState(h, y[0], y[1])


def taylor_start_pi2(problem: ProblemSpec, b: float, h: float) -> OdeState:
    """Regular solution with w(pi/2) = b, w'(pi/2) = 0, evaluated at r = pi/2 - h."""
    _check_start(b, h)
    A, B = _consts(problem)
    y = _rk.taylor_start(float(b), float(h), problem.lam, problem.q, A, B, RIGHT, 2)
    return OdeState(math.pi / 2 - h, y[0], y[1])


def _run(problem, y0, r0, r_out, nvar, cfg):
    A, B = _consts(problem)
    r_out = np.ascontiguousarray(r_out, dtype=float)
    states = np.zeros((r_out.shape[0], 6))
    status, r_reached, steps = _rk.integrate(
        y0, float(r0), r_out, problem.lam, problem.q, A, B, nvar,
        cfg.rel_tol, cfg.abs_tol, cfg.max_steps, states,
    )
    if status == _rk.POSITIVITY:
        raise PositivityError(f"w reached -1 near r = {r_reached:.6g}")
    if status == _rk.MAX_STEPS:
        raise IntegrationError(f"step budget {cfg.max_steps} exhausted at r = {r_reached:.6g}")
    if status != _rk.OK:
        raise IntegrationError(f"step size underflow at r = {r_reached:.6g}")
    return states


def integrate(problem: ProblemSpec, from_state: OdeState, r_target: float,
              cfg: IntegratorConfig = DEFAULT_CONFIG) -> OdeState:
    eps = cfg.eps_endpoint
    lo, hi = eps, math.pi / 2 - eps
    for r in (from_state.r, r_target):
        if not lo - 1e-15 <= r <= hi + 1e-15:
            raise ValueError(f"r = {r} outside [eps, pi/2 - eps]")
    if from_state.r == r_target:
        return from_state
    y0 = np.zeros(6)
    y0[0], y0[1] = from_state.phi, from_state.dphi
    states = _run(problem, y0, from_state.r, [r_target], 2, cfg)
    return OdeState(float(r_target), float(states[0, 0]), float(states[0, 1]))


def _start(problem, value, side, nvar, cfg):
    if not value > -1:
        raise PositivityError(f"endpoint value must exceed -1, got {value}")
    A, B = _consts(problem)
    h = cfg.eps_endpoint
    y0 = _rk.taylor_start(float(value), h, problem.lam, problem.q, A, B, side, nvar)
    r0 = h if side == LEFT else math.pi / 2 - h
    return y0, r0


def shoot(problem: ProblemSpec, value: float, side: int, nvar: int = 2,
          cfg: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """State vector (length ``nvar``) at pi/4 of the regular shot from ``side``.

    Components: w, w' (nvar >= 2); dw/dvalue and its derivative (nvar >= 4);
    dw/dlambda and its derivative (nvar = 6).
    """
    y0, r0 = _start(problem, value, side, nvar, cfg)
    return _run(problem, y0, r0, [R_MATCH], nvar, cfg)[0, :nvar]


def sample_shot(problem: ProblemSpec, value: float, side: int, r_grid,
                nvar: int = 2, cfg: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """States at the points of ``r_grid`` (ordered away from the start endpoint)."""
    y0, r0 = _start(problem, value, side, nvar, cfg)
    return _run(problem, y0, r0, r_grid, nvar, cfg)[:, :nvar]


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("YAMABE_THREADS", "1")))
    except ValueError:
        return 1


def shoot_many(problem: ProblemSpec, values, side: int, nvar: int = 2,
               cfg: IntegratorConfig = DEFAULT_CONFIG):
    """Vectorized :func:`shoot`: returns (states, status) arrays.

    ``status`` uses the codes of the compiled integrator (0 = ok,
    1 = positivity violation, 2 = step budget, 3 = step underflow).  Work is
    split across up to ``YAMABE_THREADS`` threads; results do not depend on
    the thread count.
    """
    values = np.ascontiguousarray(values, dtype=float)
    out = np.full((values.shape[0], 6), np.nan)
    status = np.zeros(values.shape[0], dtype=np.int64)
    A, B = _consts(problem)

    def work(sl):
        _rk.shoot_batch(values[sl], side, problem.lam, problem.q, A, B, cfg.eps_endpoint,
                        R_MATCH, nvar, cfg.rel_tol, cfg.abs_tol, cfg.max_steps,
                        out[sl], status[sl])

    nt = min(_threads(), max(1, values.shape[0]))
    if nt == 1:
        work(slice(None))
    else:
        bounds = np.linspace(0, values.shape[0], nt + 1).astype(int)
        with ThreadPoolExecutor(nt) as ex:
            list(ex.map(work, [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:])]))
    out[status != 0] = np.nan
    return out[:, :nvar], status


def integrate_linearized(problem: ProblemSpec, base, side: int,
                         cfg: IntegratorConfig = DEFAULT_CONFIG,
                         scale: float = 1.0) -> OdeState:
    """Regular solution v of the linearization about ``base``, at pi/4.

    ``base`` is a solution profile (anything with endpoint values ``a`` and
    ``b``) or a float endpoint value.  The base solution is re-integrated
    together with v from the same endpoint, so no interpolation of sampled
    data is involved.  v starts as ``scale`` times the regular expansion
    with v(endpoint) = 1.
    """
    if isinstance(base, (int, float)):
        value = float(base)
    else:
        value = base.a if side == LEFT else base.b
    y0, r0 = _start(problem, value, side, 4, cfg)
    y0[2:4] *= scale
    st = _run(problem, y0, r0, [R_MATCH], 4, cfg)[0]
    return OdeState(R_MATCH, float(st[2]), float(st[3]))
