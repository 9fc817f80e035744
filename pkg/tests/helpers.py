"""Shared construction helpers for the test suite.

These are deliberately independent of the library internals: fixture
polygons are built from first principles so they can serve as oracles.
"""

from __future__ import annotations

import numpy as np

from idealrings import Ring


def regular_ring(n: int) -> Ring:
    """Planar regular n-gon with unit sides, traversed counterclockwise."""
    angles = 2.0 * np.pi * np.arange(n) / n
    edges = np.stack(
        [np.cos(angles), np.sin(angles), np.zeros(n)], axis=1
    )
    # Direction sum of the n-th roots of unity vanishes, so this closes.
    return Ring(edges)


def paired_ring(n: int, rng: np.random.Generator) -> Ring:
    """Random closed polygon from antipodal direction pairs (n even).

    Independent of the library sampler so sampler tests have a second,
    trivially correct source of valid rings.
    """
    assert n % 2 == 0
    v = rng.standard_normal((n // 2, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    edges = np.concatenate([v, -v])
    return Ring(edges[rng.permutation(n)])


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform-ish random rotation matrix (QR of a Gaussian matrix)."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def equilateralize(points: np.ndarray, iters: int = 400) -> Ring:
    """Project a closed polyline onto the space of unit-edge closed polygons.

    Alternates edge renormalization with uniform redistribution of the
    closure defect.  Converges fast for inputs whose edges are already
    roughly unit length; used to build knotted fixtures from smooth curves.
    """
    pts = np.asarray(points, dtype=float)
    edges = np.diff(np.vstack([pts, pts[:1]]), axis=0)
    for _ in range(iters):
        edges /= np.linalg.norm(edges, axis=1, keepdims=True)
        edges -= edges.mean(axis=0)
    edges /= np.linalg.norm(edges, axis=1, keepdims=True)
    edges -= edges.mean(axis=0)
    return Ring(edges)


def torus_trefoil_points(m: int, r_tube: float = 0.5) -> np.ndarray:
    """m points on a (2, 3) torus curve, a smooth trefoil."""
    t = 2.0 * np.pi * np.arange(m) / m
    rad = 1.0 + r_tube * np.cos(3.0 * t)
    return np.stack(
        [rad * np.cos(2.0 * t), rad * np.sin(2.0 * t), r_tube * np.sin(3.0 * t)],
        axis=1,
    )


def trefoil_ring(m: int = 24) -> Ring:
    """Equilateral trefoil ring built from a sampled torus curve."""
    pts = torus_trefoil_points(m)
    # Rescale so chords are near unit length before projecting.
    chord = np.linalg.norm(np.diff(np.vstack([pts, pts[:1]]), axis=0), axis=1).mean()
    return equilateralize(pts / chord)
