"""Monte Carlo sampling of rings and open chains.

Rings are generated by the hedgehog construction (antipodal direction
pairs, randomly interleaved) and decorrelated by crankshaft moves: a
random pair of edges is rotated by a uniform angle about its sum, which
preserves closure and edge lengths.  Open chains are independent uniform
unit steps.

Determinism contract: every sampled object is a pure function of an
integer seed plus a substream path.  Streams for ensemble members are
derived via RngStream.child, so member i is reproducible in isolation
without generating members 0..i-1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from idealrings._kernels import rotate_pair, run_moves
from idealrings.geometry import OpenChain, Ring

# Norm threshold for rejecting a degenerate crankshaft pair.
PAIR_TOL = 1e-9

# Mixing draws one tape block sized to the requested move count, then
# fixed 64-attempt blocks while rejections leave moves outstanding.
# Leftover tape rows are discarded, so the generator call sequence is a
# function of (seed, path, moves) only.
_RETRY_BLOCK = 64

# Hard cap on total attempts, as a multiple of the requested move count.
_ATTEMPT_FACTOR = 100

# Substream tags: purpose of the first path element under a run's seed.
RING_STREAM = 0
CHAIN_STREAM = 1
CLASSIFY_STREAM = 2
KNOT_SCAN_STREAM = 3
CONVERGENCE_STREAM = 4


class RngStream:
    """Deterministic tree of independent random streams.

    A stream is identified by an integer seed and a path of non-negative
    integers.  child(*steps) addresses a subtree; the underlying numpy
    generator is built lazily from SeedSequence(seed, spawn_key=path), so
    sibling streams are statistically independent and every stream is
    reproducible from (seed, path) alone.
    """

    __slots__ = ("seed", "path", "_gen")

    def __init__(self, seed: int, path: tuple[int, ...] = ()):
        seed = int(seed)
        if seed < 0:
            raise ValueError("seed must be a non-negative integer")
        self.seed = seed
        self.path = tuple(int(p) for p in path)
        if any(p < 0 for p in self.path):
            raise ValueError("stream path entries must be non-negative")
        self._gen = None

    def child(self, *steps: int) -> "RngStream":
        return RngStream(self.seed, self.path + steps)

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            ss = np.random.SeedSequence(self.seed, spawn_key=self.path)
            self._gen = np.random.Generator(np.random.PCG64(ss))
        return self._gen

    def __repr__(self):
        return f"RngStream(seed={self.seed}, path={self.path})"


@dataclass(frozen=True)
class MixPolicy:
    """Number of accepted crankshaft moves to apply when mixing."""

    moves: int

    def __post_init__(self):
        if self.moves < 0:
            raise ValueError("moves must be non-negative")

    @classmethod
    def default(cls, n: int) -> "MixPolicy":
        # 6 moves per edge decorrelates shape observables at these sizes.
        return cls(6 * n)


def _unit_rows(gen: np.random.Generator, m: int) -> np.ndarray:
    """m independent uniform points on the unit sphere (Gaussian direction)."""
    v = gen.standard_normal((m, 3))
    while True:
        norms = np.linalg.norm(v, axis=1)
        bad = norms < 1e-8
        if not bad.any():
            break
        v[bad] = gen.standard_normal((int(bad.sum()), 3))
    return v / norms[:, None]


def sample_unit_sphere(rng: RngStream) -> np.ndarray:
    """One uniform point on the unit sphere."""
    return _unit_rows(rng.generator, 1)[0]


def hedgehog_start(n: int, rng: RngStream) -> Ring:
    """Closed starting configuration from n/2 antipodal direction pairs.

    Draw n/2 uniform sphere points, take each together with its negation,
    and lay the n directions down in random order.  The edge multiset is
    exactly balanced, so the polygon closes by construction.  Requires
    even n >= 4.
    """
    if n < 4 or n % 2 != 0:
        raise ValueError(f"hedgehog construction needs even n >= 4, got {n}")
    gen = rng.generator
    half = _unit_rows(gen, n // 2)
    edges = np.concatenate([half, -half])
    return Ring(edges[gen.permutation(n)])


def crankshaft(ring: Ring, j: int, k: int, theta: float) -> Ring:
    """One crankshaft move: rotate edges j and k by theta about their sum.

    Edge order elsewhere is untouched, so closure is preserved exactly.
    Raises ValueError if the pair is (anti)parallel within tolerance, in
    which case the axis or the rotation plane is undefined.
    """
    n = ring.n
    if not (0 <= j < n and 0 <= k < n):
        raise ValueError(f"edge indices must be in [0, {n}), got {j}, {k}")
    if j == k:
        raise ValueError("crankshaft needs two distinct edges")
    edges = np.array(ring.edges, copy=True)
    if not rotate_pair(edges, j, k, float(theta)):
        raise ValueError(
            f"edges {j} and {k} are parallel or antiparallel within {PAIR_TOL}"
        )
    return Ring(edges)


def mix(ring: Ring, policy: MixPolicy, rng: RngStream) -> Ring:
    """Apply policy.moves accepted crankshaft moves with random pairs and angles.

    Rejected attempts (degenerate pairs) draw replacement attempts from the
    same stream.  A configuration that rejects 100x more attempts than the
    requested moves raises RuntimeError; with random rings this indicates a
    bug or a geometrically frozen input, not bad luck.
    """
    if policy.moves == 0:
        return ring
    edges = np.array(ring.edges, copy=True)
    gen = rng.generator
    need = policy.moves
    cap = _ATTEMPT_FACTOR * policy.moves
    done = 0
    attempts = 0
    block = policy.moves
    while done < need:
        tape = gen.random((block, 3))
        moved, used = run_moves(edges, tape, need - done)
        done += moved
        attempts += used
        if done < need and attempts >= cap:
            raise RuntimeError(
                f"mixing stalled: {done}/{need} moves after {attempts} attempts"
            )
        block = _RETRY_BLOCK
    return Ring(edges)


def sample_ring(n: int, rng: RngStream, policy: MixPolicy | None = None) -> Ring:
    """One equilibrated ring: hedgehog start plus crankshaft mixing."""
    if policy is None:
        policy = MixPolicy.default(n)
    return mix(hedgehog_start(n, rng), policy, rng)


def sample_open_chain(n: int, rng: RngStream) -> OpenChain:
    """Open chain of n independent uniform unit steps."""
    if n < 1:
        raise ValueError(f"need at least one edge, got {n}")
    return OpenChain(_unit_rows(rng.generator, n))


def ring_for_index(seed: int, index: int, n: int, policy: MixPolicy | None = None) -> Ring:
    """Ring `index` of the deterministic ensemble addressed by seed."""
    return sample_ring(n, RngStream(seed).child(RING_STREAM, index), policy)


def chain_for_index(seed: int, index: int, n: int) -> OpenChain:
    """Open chain `index` of the deterministic ensemble addressed by seed."""
    return sample_open_chain(n, RngStream(seed).child(CHAIN_STREAM, index))
