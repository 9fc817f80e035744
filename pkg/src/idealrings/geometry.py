"""Equilateral polygon containers and local shape observables.

A ring is a closed polygon with unit-length edges; an open chain drops the
closure constraint.  Both are stored as arrays of edge vectors, with the
first vertex pinned at the origin.  Vertices are prefix sums of the edges,
so vertex k is the position after walking the first k edges.

All observables are plain functions of the edge array.  Subsegment
quantities use cyclic indexing on rings: a subsegment of length k starting
at edge j walks edges j, j+1, ..., j+k-1 with indices taken mod n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Per-edge unit-length tolerance and per-edge closure allowance.  Mixing
# renormalizes edges after every move, so honest rings sit far inside both.
UNIT_EDGE_TOL = 1e-9
CLOSURE_TOL_PER_EDGE = 1e-9


def _validated_edges(edges, min_edges: int) -> np.ndarray:
    e = np.array(edges, dtype=np.float64, copy=True)
    if e.ndim != 2 or e.shape[1] != 3:
        raise ValueError(f"edge array must have shape (n, 3), got {e.shape}")
    if e.shape[0] < min_edges:
        raise ValueError(f"need at least {min_edges} edges, got {e.shape[0]}")
    if not np.all(np.isfinite(e)):
        raise ValueError("edge array contains non-finite values")
    norms = np.linalg.norm(e, axis=1)
    worst = float(np.max(np.abs(norms - 1.0)))
    if worst > UNIT_EDGE_TOL:
        raise ValueError(f"edges must have unit length (worst deviation {worst:.3e})")
    return e


@dataclass(frozen=True)
class Ring:
    """Closed equilateral polygon, stored as n unit edge vectors summing to zero."""

    edges: np.ndarray

    def __post_init__(self):
        e = _validated_edges(self.edges, min_edges=3)
        defect = float(np.linalg.norm(e.sum(axis=0)))
        if defect > CLOSURE_TOL_PER_EDGE * e.shape[0]:
            raise ValueError(
                f"edges do not close (defect {defect:.3e} for n={e.shape[0]})"
            )
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)

    @property
    def n(self) -> int:
        return self.edges.shape[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, Ring) and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.edges.tobytes()))


@dataclass(frozen=True)
class OpenChain:
    """Open chain of n unit edge vectors; no closure constraint."""

    edges: np.ndarray

    def __post_init__(self):
        e = _validated_edges(self.edges, min_edges=1)
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)

    @property
    def n(self) -> int:
        return self.edges.shape[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, OpenChain) and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.edges.tobytes()))


@dataclass(frozen=True)
class Subsegment:
    """A cyclic run of k consecutive edges of a ring, starting at edge index start."""

    ring: Ring
    start: int
    length: int

    def __post_init__(self):
        n = self.ring.n
        if not 1 <= self.length <= n:
            raise ValueError(f"subsegment length must be in [1, {n}], got {self.length}")
        object.__setattr__(self, "start", int(self.start) % n)

    def edge_indices(self) -> np.ndarray:
        return (self.start + np.arange(self.length)) % self.ring.n


def vertices(polygon: Ring | OpenChain) -> np.ndarray:
    """All n+1 vertex positions, starting from the origin.

    For a ring the last vertex returns to the origin up to the closure
    tolerance; the n distinct vertices are rows 0..n-1.
    """
    v = np.empty((polygon.n + 1, 3))
    v[0] = 0.0
    np.cumsum(polygon.edges, axis=0, out=v[1:])
    return v


def closure_defect(ring: Ring) -> float:
    """Norm of the edge sum; zero for an exactly closed polygon."""
    return float(np.linalg.norm(ring.edges.sum(axis=0)))


def end_to_end_sq(chain: OpenChain) -> float:
    """Squared distance between the first and last vertex of an open chain."""
    s = chain.edges.sum(axis=0)
    return float(s @ s)


def squared_end_to_end(ring: Ring, k: int, start: int = 0) -> float:
    """Squared distance between vertices start and start+k along the ring.

    k may run from 1 to n; k = n returns the squared closure defect.  The
    start index wraps cyclically.
    """
    n = ring.n
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    idx = (int(start) % n + np.arange(k)) % n
    s = ring.edges[idx].sum(axis=0)
    return float(s @ s)


def center_of_mass(polygon: Ring | OpenChain) -> np.ndarray:
    """Mean of the n vertices reached after each edge (the start vertex is excluded).

    With the start pinned at the origin this is the standard vertex centroid
    convention for which the closed-form ensemble averages hold.
    """
    return vertices(polygon)[1:].mean(axis=0)


def radius_of_gyration_sq(polygon: Ring | OpenChain) -> float:
    """Mean squared distance of the n vertices from their centroid."""
    v = vertices(polygon)[1:]
    c = v.mean(axis=0)
    d = v - c
    return float(np.mean(np.einsum("ij,ij->i", d, d)))


def subsegment_rg_sq(seg: Subsegment) -> float:
    """Squared radius of gyration of one subsegment, from its own k vertices.

    The subsegment is treated as an open chain in place: its vertices are
    the ring vertices reached after each of its k edges.  k = 1 gives 0.
    """
    e = seg.ring.edges[seg.edge_indices()]
    v = np.cumsum(e, axis=0)
    c = v.mean(axis=0)
    d = v - c
    return float(np.mean(np.einsum("ij,ij->i", d, d)))


def mean_subsegment_rg_sq(ring: Ring, k: int) -> float:
    """Average of subsegment_rg_sq over all n cyclic starting positions."""
    n = ring.n
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    total = 0.0
    for start in range(n):
        total += subsegment_rg_sq(Subsegment(ring, start, k))
    return total / n
