"""Compiled inner loops for ring mixing.

The rotation arithmetic lives here, in one place, so the public single-move
API and the bulk mixing driver produce bit-identical results.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# Squared norm threshold below which e_j + e_k or e_j - e_k counts as
# degenerate (rotation axis or angle undefined).  Matches a 1e-9 norm cut.
PAIR_TOL_SQ = 1e-18


@njit(cache=True)
def rotate_pair(edges, j, k, theta):
    """Rotate edges j and k about their bisector in place.

    The pair sum is the rotation axis, so it is conserved up to roundoff;
    each rotated edge is renormalized to unit length before storing.
    Returns False (leaving edges untouched) if the pair is degenerate.
    """
    ax = edges[j, 0]
    ay = edges[j, 1]
    az = edges[j, 2]
    bx = edges[k, 0]
    by = edges[k, 1]
    bz = edges[k, 2]

    sx = ax + bx
    sy = ay + by
    sz = az + bz
    s2 = sx * sx + sy * sy + sz * sz
    dx = ax - bx
    dy = ay - by
    dz = az - bz
    d2 = dx * dx + dy * dy + dz * dz
    if s2 <= PAIR_TOL_SQ or d2 <= PAIR_TOL_SQ:
        return False

    # Decompose e_j = s/2 + h, e_k = s/2 - h and rotate h about s by theta.
    # The component of h perpendicular to both h and s is (e_j x e_k)/|s|.
    inv_s = 1.0 / np.sqrt(s2)
    cx = (ay * bz - az * by) * inv_s
    cy = (az * bx - ax * bz) * inv_s
    cz = (ax * by - ay * bx) * inv_s
    ct = np.cos(theta)
    st = np.sin(theta)
    rx = (0.5 * dx) * ct + cx * st
    ry = (0.5 * dy) * ct + cy * st
    rz = (0.5 * dz) * ct + cz * st

    njx = 0.5 * sx + rx
    njy = 0.5 * sy + ry
    njz = 0.5 * sz + rz
    nkx = 0.5 * sx - rx
    nky = 0.5 * sy - ry
    nkz = 0.5 * sz - rz

    # Renormalize: the algebra preserves unit length exactly, this just
    # stops roundoff from accumulating over long mixing runs.
    inv_j = 1.0 / np.sqrt(njx * njx + njy * njy + njz * njz)
    inv_k = 1.0 / np.sqrt(nkx * nkx + nky * nky + nkz * nkz)
    edges[j, 0] = njx * inv_j
    edges[j, 1] = njy * inv_j
    edges[j, 2] = njz * inv_j
    edges[k, 0] = nkx * inv_k
    edges[k, 1] = nky * inv_k
    edges[k, 2] = nkz * inv_k
    return True


@njit(cache=True)
def run_moves(edges, tape, need):
    """Consume uniform triples from tape until `need` moves are accepted.

    Each tape row (u0, u1, u2) selects an ordered distinct edge pair and an
    angle: j = floor(u0 * n), k = j + 1 + floor(u1 * (n - 1)) mod n,
    theta = 2 * pi * u2.  Returns (moves done, tape rows consumed).
    """
    n = edges.shape[0]
    done = 0
    used = 0
    for t in range(tape.shape[0]):
        if done >= need:
            break
        j = int(tape[t, 0] * n)
        if j >= n:
            j = n - 1
        step = 1 + int(tape[t, 1] * (n - 1))
        if step > n - 1:
            step = n - 1
        k = j + step
        if k >= n:
            k -= n
        theta = 2.0 * np.pi * tape[t, 2]
        used += 1
        if rotate_pair(edges, j, k, theta):
            done += 1
    return done, used
