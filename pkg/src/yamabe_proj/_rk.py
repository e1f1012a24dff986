"""Compiled Dormand-Prince 5(4) integrator for the reduced ODE.

State layout (up to 6 components):

    y[0], y[1]  w, w'                     the nonlinear profile
    y[2], y[3]  v, v'                     d(w)/d(endpoint value): linearization
    y[4], y[5]  z, z'                     d(w)/d(lambda)

``nvar`` selects how many of these are integrated (2, 4 or 6).  The v and z
blocks are linear, and their error weights are scaled by the magnitude of
their initial data so that the step sequence does not depend on how the
linear solution is normalized.
"""
import math

import numpy as np
from numba import njit

OK = 0
POSITIVITY = 1
MAX_STEPS = 2
STEP_UNDERFLOW = 3

# Dormand & Prince (1980) tableau
C2, C3, C4, C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (
    9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0
)
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4, E5, E6, E7 = (
    71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0
)


@njit(cache=True, nogil=True)
def rhs(r, y, lam, q, A, B, nvar, out):
    """Write dy/dr into ``out``; return False if u = w + 1 <= 0."""
    u = y[0] + 1.0
    if not u > 0.0:
        return False
    c = math.cos(r)
    s = math.sin(r)
    d = (A * c * c - B) / (c * s)
    uq = u ** (q - 2.0)
    g_lam = u - uq * u
    out[0] = y[1]
    out[1] = -d * y[1] + lam * g_lam
    if nvar >= 4:
        g_w = lam * (1.0 - (q - 1.0) * uq)
        out[2] = y[3]
        out[3] = -d * y[3] + g_w * y[2]
        if nvar >= 6:
            out[4] = y[5]
            out[5] = -d * y[5] + g_w * y[4] + g_lam
    return True


@njit(cache=True, nogil=True)
def taylor_start(value, h, lam, q, A, B, side, nvar):
    """Regular-solution expansion at an endpoint, offset h into the interval.

    side = 0: r = 0, where drift ~ (A - B)/r.
    side = 1: r = pi/2, where drift ~ -B/(pi/2 - r).
    """
    y = np.zeros(6)
    c0 = (A - B) if side == 0 else B
    sgn = 1.0 if side == 0 else -1.0
    u = value + 1.0
    uq = u ** (q - 2.0)
    g_lam = u - uq * u
    g = lam * g_lam
    g_w = lam * (1.0 - (q - 1.0) * uq)
    y[0] = value + g * h * h / (2.0 * (1.0 + c0))
    y[1] = sgn * g * h / (1.0 + c0)
    if nvar >= 4:
        y[2] = 1.0 + g_w * h * h / (2.0 * (1.0 + c0))
        y[3] = sgn * g_w * h / (1.0 + c0)
    if nvar >= 6:
        y[4] = g_lam * h * h / (2.0 * (1.0 + c0))
        y[5] = sgn * g_lam * h / (1.0 + c0)
    return y


@njit(cache=True, nogil=True)
def _error_norm(err, y, ynew, scale_lin, rtol, atol, nvar):
    acc = 0.0
    for i in range(nvar):
        a = atol if i < 2 else atol * scale_lin[(i - 2) // 2]
        sc = a + rtol * max(abs(y[i]), abs(ynew[i]))
        e = err[i] / sc
        acc += e * e
    return math.sqrt(acc / nvar)


@njit(cache=True, nogil=True)
def integrate(y0, r0, r_out, lam, q, A, B, nvar, rtol, atol, max_steps, out_states):
    """Integrate from r0 through the monotone points r_out (last = target).

    States at each r_out[j] are written to out_states[j, :nvar].  Returns
    (status, r_reached, steps).  The state at r_reached is left in
    out_states[-1] on failure.
    """
    y = y0.copy()
    ynew = np.empty(6)
    ytmp = np.empty(6)
    err = np.zeros(6)
    k1 = np.zeros(6)
    k2 = np.zeros(6)
    k3 = np.zeros(6)
    k4 = np.zeros(6)
    k5 = np.zeros(6)
    k6 = np.zeros(6)
    k7 = np.zeros(6)
    scale_lin = np.ones(2)
    for blk in range(2):
        i = 2 + 2 * blk
        if i < nvar:
            m = max(abs(y0[i]), abs(y0[i + 1]))
            if m > 0.0:
                scale_lin[blk] = m
    n_out = r_out.shape[0]
    r = r0
    direction = 1.0 if r_out[n_out - 1] >= r0 else -1.0
    dist_sing = min(r0, 0.5 * math.pi - r0)
    h = min(0.1 * dist_sing, abs(r_out[n_out - 1] - r0))
    if h <= 0.0:
        h = abs(r_out[n_out - 1] - r0)
    hmin = 1e-14
    steps = 0
    fac_max = 5.0
    if not rhs(r, y, lam, q, A, B, nvar, k1):
        for i in range(nvar):
            out_states[n_out - 1, i] = y[i]
        return POSITIVITY, r, steps
    j = 0
    # outputs sitting exactly at the start
    while j < n_out and r_out[j] == r0:
        for i in range(nvar):
            out_states[j, i] = y[i]
        j += 1
    while j < n_out:
        target = r_out[j]
        if steps >= max_steps:
            for i in range(nvar):
                out_states[n_out - 1, i] = y[i]
            return MAX_STEPS, r, steps
        remaining = (target - r) * direction
        hit = False
        hs = h
        if hs >= remaining:
            hs = remaining
            hit = True
        dr = direction * hs
        ok = True
        for i in range(nvar):
            ytmp[i] = y[i] + dr * A21 * k1[i]
        ok = ok and rhs(r + C2 * dr, ytmp, lam, q, A, B, nvar, k2)
        if ok:
            for i in range(nvar):
                ytmp[i] = y[i] + dr * (A31 * k1[i] + A32 * k2[i])
            ok = rhs(r + C3 * dr, ytmp, lam, q, A, B, nvar, k3)
        if ok:
            for i in range(nvar):
                ytmp[i] = y[i] + dr * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
            ok = rhs(r + C4 * dr, ytmp, lam, q, A, B, nvar, k4)
        if ok:
            for i in range(nvar):
                ytmp[i] = y[i] + dr * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
            ok = rhs(r + C5 * dr, ytmp, lam, q, A, B, nvar, k5)
        if ok:
            for i in range(nvar):
                ytmp[i] = y[i] + dr * (
                    A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]
                )
            ok = rhs(r + dr, ytmp, lam, q, A, B, nvar, k6)
        if ok:
            for i in range(nvar):
                ynew[i] = y[i] + dr * (
                    B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]
                )
            ok = rhs(r + dr, ynew, lam, q, A, B, nvar, k7)
        steps += 1
        if not ok:
            # a stage left the positive cone; shrink until the crossing is resolved
            h = 0.25 * hs
            fac_max = 1.0
            if h < hmin:
                for i in range(nvar):
                    out_states[n_out - 1, i] = y[i]
                return POSITIVITY, r, steps
            continue
        for i in range(nvar):
            err[i] = dr * (
                E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]
            )
        en = _error_norm(err, y, ynew, scale_lin, rtol, atol, nvar)
        if not math.isfinite(en):
            h = 0.25 * hs
            fac_max = 1.0
            if h < hmin:
                for i in range(nvar):
                    out_states[n_out - 1, i] = y[i]
                return STEP_UNDERFLOW, r, steps
            continue
        if en <= 1.0:
            r = target if hit else r + dr
            for i in range(nvar):
                y[i] = ynew[i]
                k1[i] = k7[i]
            fac = fac_max if en == 0.0 else min(fac_max, max(0.2, 0.9 * en ** -0.2))
            fac_max = 5.0
            if hit:
                for i in range(nvar):
                    out_states[j, i] = y[i]
                j += 1
                # a step cut short to land on an output keeps the uncut proposal
                if hs >= h:
                    h = hs * fac
            else:
                h = hs * fac
        else:
            h = hs * max(0.2, 0.9 * en ** -0.2)
            fac_max = 1.0
            if h < hmin:
                for i in range(nvar):
                    out_states[n_out - 1, i] = y[i]
                return STEP_UNDERFLOW, r, steps
    return OK, r, steps


@njit(cache=True, nogil=True)
def shoot_batch(values, side, lam, q, A, B, eps, r_match, nvar, rtol, atol, max_steps, out, status):
    """Shoot from one endpoint for each start value; store states at r_match."""
    r_out = np.array([r_match])
    buf = np.zeros((1, 6))
    r0 = eps if side == 0 else 0.5 * math.pi - eps
    for i in range(values.shape[0]):
        v = values[i]
        if not v > -1.0:
            status[i] = POSITIVITY
            continue
        y0 = taylor_start(v, eps, lam, q, A, B, side, nvar)
        st, _, _ = integrate(y0, r0, r_out, lam, q, A, B, nvar, rtol, atol, max_steps, buf)
        status[i] = st
        for k in range(nvar):
            out[i, k] = buf[0, k]


@njit(cache=True, nogil=True)
def linear_det_batch(lams, a, b, q, A, B, eps, r_match, rtol, atol, max_steps, out, status):
    """Normalized matching determinant of the linearization, one per lambda.

    For each lambda the regular linearized solutions about the shots
    w(0) = a and w(pi/2) = b are matched at r_match:
    (v_L v_R' - v_L' v_R) / (|(v_L, v_L')| |(v_R, v_R')|).
    """
    r_out = np.array([r_match])
    buf = np.zeros((1, 6))
    for i in range(lams.shape[0]):
        lam = lams[i]
        y0 = taylor_start(a, eps, lam, q, A, B, 0, 4)
        st, _, _ = integrate(y0, eps, r_out, lam, q, A, B, 4, rtol, atol, max_steps, buf)
        vl = buf[0, 2]
        dvl = buf[0, 3]
        if st == OK:
            y0 = taylor_start(b, eps, lam, q, A, B, 1, 4)
            st, _, _ = integrate(y0, 0.5 * math.pi - eps, r_out, lam, q, A, B, 4,
                                 rtol, atol, max_steps, buf)
        status[i] = st
        if st != OK:
            out[i] = np.nan
            continue
        vr = buf[0, 2]
        dvr = buf[0, 3]
        out[i] = (vl * dvr - dvl * vr) / (math.hypot(vl, dvl) * math.hypot(vr, dvr))
