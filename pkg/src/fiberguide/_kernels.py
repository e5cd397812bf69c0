"""Compiled inner loops: field evaluation and trajectory propagation.

Everything here is deliberately scalar and allocation-free so numba can
compile it to a tight loop.  The public API in :mod:`fiberguide.potential`
and :mod:`fiberguide.dynamics` wraps these kernels; there is exactly one
implementation of the field math so the integrator, the point-wise API,
and the scattering model can never drift apart.

The per-trajectory random stream is a splitmix64 counter generator held in
a local variable.  Draws therefore depend only on the trajectory seed and
the number of draws so far, never on thread scheduling, which is what makes
ensemble results independent of the worker count.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

# Field parameter vector layout (float64, see potential.flatten_field).
P_DEPTH = 0  # guide depth U0, J
P_WAIST = 1  # guide mode field radius at the core, m
P_ZR = 2  # Rayleigh range of the emerging cone, m
P_LENGTH = 3  # fiber length, m
P_CORE = 4  # core radius used for wall collisions, m
P_BAR_ON = 5
P_BAR_H = 6  # barrier height, J
P_BAR_SIG = 7  # barrier axial 1/e half width, m
P_BAR_POS = 8  # barrier center along z, m
P_RES_ON = 9
P_RES_D = 10  # reservoir depth, J
P_RES_W = 11  # reservoir waist, m
P_RES_ZR = 12  # reservoir Rayleigh range, m
P_RES_FX = 13  # reservoir focus position
P_RES_FY = 14
P_RES_FZ = 15
P_RES_AX = 16  # reservoir beam axis, unit vector
P_RES_AY = 17
P_RES_AZ = 18
P_GRAV_ON = 19
P_GX = 20  # m*g*axis, J/m
P_GY = 21
P_GZ = 22
N_PARAMS = 23

# Trajectory outcome codes.
KIND_TRANSMITTED = 0
KIND_LOST_WALL = 1
KIND_LOST_BACK = 2
KIND_TIMED_OUT = 3

_U64 = np.uint64
_SM_GAMMA = _U64(0x9E3779B97F4A7C15)
_SM_M1 = _U64(0xBF58476D1CE4E5B9)
_SM_M2 = _U64(0x94D049BB133111EB)
_SH30 = _U64(30)
_SH27 = _U64(27)
_SH31 = _U64(31)
_SH11 = _U64(11)
_TO_DOUBLE = 1.0 / 9007199254740992.0  # 2**-53


@njit(inline="always", cache=True)
def _next_uniform(state):
    """Advance one splitmix64 state, return (state, uniform in [0, 1))."""
    state = state + _SM_GAMMA
    z = state
    z = (z ^ (z >> _SH30)) * _SM_M1
    z = (z ^ (z >> _SH27)) * _SM_M2
    z = z ^ (z >> _SH31)
    return state, (z >> _SH11) * _TO_DOUBLE


@njit(inline="always", cache=True)
def field_terms(x, y, z, p):
    """Potential, force, and guide-light intensity proxy at one point.

    Returns (U, fx, fy, fz, u_guide_abs) where u_guide_abs is the magnitude
    of the guide-beam term alone, which is proportional to the local guide
    intensity and drives photon scattering.
    """
    r2 = x * x + y * y
    u0 = p[P_DEPTH]
    w0 = p[P_WAIST]
    zr = p[P_ZR]
    length = p[P_LENGTH]
    w02 = w0 * w0

    # Mode radius: constant inside the fiber, expanding cone outside.
    if z < 0.0:
        w2 = w02 * (1.0 + (z * z) / (zr * zr))
        dw2dz = 2.0 * w02 * z / (zr * zr)
    elif z > length:
        dz = z - length
        w2 = w02 * (1.0 + (dz * dz) / (zr * zr))
        dw2dz = 2.0 * w02 * dz / (zr * zr)
    else:
        w2 = w02
        dw2dz = 0.0

    eg = np.exp(-2.0 * r2 / w2)
    ug = -u0 * (w02 / w2) * eg
    u = ug
    # dU/d(r^2) and dU/d(w^2) expressed through ug itself.
    du_dr2 = -2.0 * ug / w2
    du_dw2 = (-ug / w2) * (1.0 - 2.0 * r2 / w2)
    fx = -du_dr2 * 2.0 * x
    fy = -du_dr2 * 2.0 * y
    fz = -du_dw2 * dw2dz

    if p[P_BAR_ON] != 0.0:
        h = p[P_BAR_H]
        sig = p[P_BAR_SIG]
        dzb = z - p[P_BAR_POS]
        ub = h * np.exp(-(dzb * dzb) / (sig * sig)) * np.exp(-2.0 * r2 / w02)
        u += ub
        fz += ub * 2.0 * dzb / (sig * sig)
        fx += ub * 4.0 * x / w02
        fy += ub * 4.0 * y / w02

    if p[P_RES_ON] != 0.0:
        d0 = p[P_RES_D]
        wr0 = p[P_RES_W]
        zrr = p[P_RES_ZR]
        relx = x - p[P_RES_FX]
        rely = y - p[P_RES_FY]
        relz = z - p[P_RES_FZ]
        ax = p[P_RES_AX]
        ay = p[P_RES_AY]
        az = p[P_RES_AZ]
        s = relx * ax + rely * ay + relz * az
        rho2 = relx * relx + rely * rely + relz * relz - s * s
        if rho2 < 0.0:
            rho2 = 0.0
        wr02 = wr0 * wr0
        wr2 = wr02 * (1.0 + (s * s) / (zrr * zrr))
        ur = -d0 * (wr02 / wr2) * np.exp(-2.0 * rho2 / wr2)
        u += ur
        du_drho2 = -2.0 * ur / wr2
        du_dwr2 = (-ur / wr2) * (1.0 - 2.0 * rho2 / wr2)
        dwr2ds = 2.0 * wr02 * s / (zrr * zrr)
        rhox = relx - s * ax
        rhoy = rely - s * ay
        rhoz = relz - s * az
        fax = -du_dwr2 * dwr2ds
        fx += -du_drho2 * 2.0 * rhox + fax * ax
        fy += -du_drho2 * 2.0 * rhoy + fax * ay
        fz += -du_drho2 * 2.0 * rhoz + fax * az

    if p[P_GRAV_ON] != 0.0:
        u += p[P_GX] * x + p[P_GY] * y + p[P_GZ] * z
        fx -= p[P_GX]
        fy -= p[P_GY]
        fz -= p[P_GZ]

    return u, fx, fy, fz, -ug


@njit(cache=True)
def potential_at(x, y, z, p):
    u, _, _, _, _ = field_terms(x, y, z, p)
    return u


@njit(cache=True)
def force_at(x, y, z, p):
    _, fx, fy, fz, _ = field_terms(x, y, z, p)
    return fx, fy, fz


@njit(cache=True)
def guide_term_abs(x, y, z, p):
    _, _, _, _, ua = field_terms(x, y, z, p)
    return ua


@njit(cache=True, parallel=True)
def propagate_batch(
    init,
    seeds,
    p,
    mass,
    dt,
    n_steps,
    z_escape,
    scatter_on,
    scatter_coef,
    recoil,
    prop_sign,
    snap_times,
    kinds,
    arrival,
    exit_v,
    nscat,
    finals,
    snap_pos,
    snap_alive,
):
    """Velocity-Verlet propagation of a batch of independent trajectories.

    init       (n, 6)  x, y, z, vx, vy, vz at t = 0
    seeds      (n,)    uint64 stream seed per trajectory
    snap_times (m,)    sorted times at which surviving positions are recorded
    kinds, arrival, exit_v, nscat, finals, snap_pos, snap_alive are output
    arrays allocated by the caller.  finals holds (x, y, z, vx, vy, vz, t)
    at the terminal event.

    Each iteration of the outer loop touches only trajectory i, so results
    are bitwise independent of how iterations are distributed over threads.
    """
    n = init.shape[0]
    m = snap_times.shape[0]
    length = p[P_LENGTH]
    core2 = p[P_CORE] * p[P_CORE]
    hdm = (0.5 * dt) / mass
    two_pi = 2.0 * np.pi

    for i in prange(n):
        x = init[i, 0]
        y = init[i, 1]
        z = init[i, 2]
        vx = init[i, 3]
        vy = init[i, 4]
        vz = init[i, 5]
        state = seeds[i]
        count = 0
        done = False

        j = 0
        while j < m and snap_times[j] <= 0.0:
            snap_pos[i, j, 0] = x
            snap_pos[i, j, 1] = y
            snap_pos[i, j, 2] = z
            snap_alive[i, j] = 1
            j += 1

        # An atom created on the facet plane outside the core is already lost.
        if 0.0 <= z <= length and x * x + y * y >= core2:
            kinds[i] = KIND_LOST_WALL
            finals[i, 0] = x
            finals[i, 1] = y
            finals[i, 2] = z
            finals[i, 3] = vx
            finals[i, 4] = vy
            finals[i, 5] = vz
            finals[i, 6] = 0.0
            nscat[i] = 0
            arrival[i] = np.nan
            exit_v[i, 0] = np.nan
            exit_v[i, 1] = np.nan
            exit_v[i, 2] = np.nan
            continue

        _, fx, fy, fz, ua = field_terms(x, y, z, p)
        for k in range(n_steps):
            zp = z
            xp = x
            yp = y
            vxp = vx
            vyp = vy
            vzp = vz

            vhx = vx + fx * hdm
            vhy = vy + fy * hdm
            vhz = vz + fz * hdm
            x = x + vhx * dt
            y = y + vhy * dt
            z = z + vhz * dt
            _, fx, fy, fz, ua = field_terms(x, y, z, p)
            vx = vhx + fx * hdm
            vy = vhy + fy * hdm
            vz = vhz + fz * hdm
            t2 = (k + 1) * dt

            if zp < length and z >= length:
                # Crossed the exit plane during this step.
                frac = (length - zp) / (z - zp)
                cx = xp + frac * (x - xp)
                cy = yp + frac * (y - yp)
                cvx = vxp + frac * (vx - vxp)
                cvy = vyp + frac * (vy - vyp)
                cvz = vzp + frac * (vz - vzp)
                tc = (k + frac) * dt
                if cx * cx + cy * cy < core2:
                    kinds[i] = KIND_TRANSMITTED
                    arrival[i] = tc
                    exit_v[i, 0] = cvx
                    exit_v[i, 1] = cvy
                    exit_v[i, 2] = cvz
                else:
                    kinds[i] = KIND_LOST_WALL
                    arrival[i] = np.nan
                    exit_v[i, 0] = np.nan
                    exit_v[i, 1] = np.nan
                    exit_v[i, 2] = np.nan
                finals[i, 0] = cx
                finals[i, 1] = cy
                finals[i, 2] = length
                finals[i, 3] = cvx
                finals[i, 4] = cvy
                finals[i, 5] = cvz
                finals[i, 6] = tc
                nscat[i] = count
                done = True
                break

            if 0.0 <= z <= length and x * x + y * y >= core2:
                kinds[i] = KIND_LOST_WALL
                done = True
            elif z < z_escape and vz < 0.0:
                kinds[i] = KIND_LOST_BACK
                done = True
            if done:
                arrival[i] = np.nan
                exit_v[i, 0] = np.nan
                exit_v[i, 1] = np.nan
                exit_v[i, 2] = np.nan
                finals[i, 0] = x
                finals[i, 1] = y
                finals[i, 2] = z
                finals[i, 3] = vx
                finals[i, 4] = vy
                finals[i, 5] = vz
                finals[i, 6] = t2
                nscat[i] = count
                break

            while j < m and snap_times[j] <= t2:
                snap_pos[i, j, 0] = x
                snap_pos[i, j, 1] = y
                snap_pos[i, j, 2] = z
                snap_alive[i, j] = 1
                j += 1

            if scatter_on:
                state, u = _next_uniform(state)
                if u < scatter_coef * ua * dt:
                    # Absorption recoil along the guide axis, emission isotropic.
                    vz = vz + prop_sign * recoil
                    state, u1 = _next_uniform(state)
                    state, u2 = _next_uniform(state)
                    ct = 2.0 * u1 - 1.0
                    st = np.sqrt(1.0 - ct * ct)
                    ph = two_pi * u2
                    vx = vx + recoil * st * np.cos(ph)
                    vy = vy + recoil * st * np.sin(ph)
                    vz = vz + recoil * ct
                    count += 1

        if not done:
            kinds[i] = KIND_TIMED_OUT
            arrival[i] = np.nan
            exit_v[i, 0] = np.nan
            exit_v[i, 1] = np.nan
            exit_v[i, 2] = np.nan
            finals[i, 0] = x
            finals[i, 1] = y
            finals[i, 2] = z
            finals[i, 3] = vx
            finals[i, 4] = vy
            finals[i, 5] = vz
            finals[i, 6] = n_steps * dt
            nscat[i] = count
