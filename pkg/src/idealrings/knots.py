"""Knot classification for rings and open segments.

The pipeline: project a closed polyline along a random direction, read the
crossings off the planar diagram, and compute the determinant invariant
|det| of the coloring matrix at t = -1 in exact integer arithmetic.  The
determinant separates the unknot (1) from the trefoil (3) and the other
small knots this package cares about; it is constant across projections of
the same curve, which doubles as a numerical self-check.

Open segments are typed by a closure spectrum: both ends are joined to a
random point on a large enclosing sphere and the resulting loop is
classified; repeating over many sphere points gives a distribution of
knot types for the segment.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass

import numpy as np
from numba import njit

from idealrings.geometry import Ring, vertices
from idealrings.sampler import RngStream

UNKNOT_DET = 1
TREFOIL_DET = 3

# Parameter-space margin from segment endpoints for a generic crossing,
# and the relative depth margin separating over from under strands.
_PARAM_EPS = 1e-9
_DEPTH_EPS = 1e-9

# A projection direction is retried this many times before giving up.
MAX_PROJECTION_TRIES = 50

DEFAULT_CLOSURES = 100
DEFAULT_TOLERANCE = 0.5
DEFAULT_RADIUS_FACTOR = 10.0
MIN_RADIUS_FACTOR = 3.0


class DegenerateProjectionError(RuntimeError):
    """The chosen direction produced a non-generic diagram; retry with another."""


# ---------------------------------------------------------------------------
# Planar diagrams


@njit(cache=True)
def _find_crossings(xy, z, closed, depth_eps):
    """Scan all non-adjacent segment pairs of a projected polyline.

    Returns (status, count, seg_a, seg_b, s, t, z_a, z_b) where status is
    0 for a generic diagram and 1 for any near-degeneracy: a crossing too
    close to a segment endpoint, a depth tie, or nearly parallel segments
    that approach each other.
    """
    m = xy.shape[0]
    nseg = m if closed else m - 1
    cap = nseg * (nseg - 1) // 2
    seg_a = np.empty(cap, dtype=np.int64)
    seg_b = np.empty(cap, dtype=np.int64)
    par_s = np.empty(cap)
    par_t = np.empty(cap)
    dep_a = np.empty(cap)
    dep_b = np.empty(cap)
    count = 0
    for a in range(nseg):
        a2 = a + 1
        if a2 == m:
            a2 = 0
        p1x = xy[a, 0]
        p1y = xy[a, 1]
        d1x = xy[a2, 0] - p1x
        d1y = xy[a2, 1] - p1y
        l1sq = d1x * d1x + d1y * d1y
        for b in range(a + 2, nseg):
            if closed and a == 0 and b == nseg - 1:
                continue
            b2 = b + 1
            if b2 == m:
                b2 = 0
            p2x = xy[b, 0]
            p2y = xy[b, 1]
            d2x = xy[b2, 0] - p2x
            d2y = xy[b2, 1] - p2y
            den = d1x * d2y - d1y * d2x
            rx = p2x - p1x
            ry = p2y - p1y
            scale = math.sqrt(l1sq * (d2x * d2x + d2y * d2y))
            if abs(den) <= 1e-12 * scale:
                # Nearly parallel.  Harmless unless the segments nearly
                # touch, which would make the crossing count unstable.
                l1 = math.sqrt(l1sq)
                dist = abs(rx * d1y - ry * d1x) / l1
                t0 = (rx * d1x + ry * d1y) / l1sq
                t1 = t0 + (d2x * d1x + d2y * d1y) / l1sq
                lo = min(t0, t1)
                hi = max(t0, t1)
                if dist <= 1e-6 and hi >= -1e-6 and lo <= 1.0 + 1e-6:
                    return 1, count, seg_a, seg_b, par_s, par_t, dep_a, dep_b
                continue
            s = (rx * d2y - ry * d2x) / den
            t = (rx * d1y - ry * d1x) / den
            if s <= -_PARAM_EPS or s >= 1.0 + _PARAM_EPS:
                continue
            if t <= -_PARAM_EPS or t >= 1.0 + _PARAM_EPS:
                continue
            if s < _PARAM_EPS or s > 1.0 - _PARAM_EPS or t < _PARAM_EPS or t > 1.0 - _PARAM_EPS:
                return 1, count, seg_a, seg_b, par_s, par_t, dep_a, dep_b
            za = z[a] + s * (z[a2] - z[a])
            zb = z[b] + t * (z[b2] - z[b])
            if abs(za - zb) <= depth_eps:
                return 1, count, seg_a, seg_b, par_s, par_t, dep_a, dep_b
            seg_a[count] = a
            seg_b[count] = b
            par_s[count] = s
            par_t[count] = t
            dep_a[count] = za
            dep_b[count] = zb
            count += 1
    return 0, count, seg_a, seg_b, par_s, par_t, dep_a, dep_b


@dataclass(frozen=True)
class Diagram:
    """Knot diagram as a Gauss sequence with crossing signs.

    entries lists the 2C strand passages in traversal order as
    (crossing id, passes_over, sign).  Each crossing id appears exactly
    twice, once over and once under; a sequence violating that (which is
    what a multi-component link would produce) is rejected.
    """

    entries: tuple[tuple[int, bool, int], ...]
    closed: bool = True
    n_segments: int = 0

    def __post_init__(self):
        seen: dict[int, list[bool]] = {}
        for cid, over, sign in self.entries:
            seen.setdefault(cid, []).append(over)
            if sign not in (-1, 1):
                raise ValueError(f"crossing sign must be +-1, got {sign}")
        for cid, overs in seen.items():
            if len(overs) != 2 or overs[0] == overs[1]:
                raise ValueError(
                    f"crossing {cid} must appear exactly once over and once under; "
                    "the strand is not a single closed component"
                )

    @property
    def n_crossings(self) -> int:
        return len(self.entries) // 2

    @classmethod
    def from_gauss_code(cls, code: str, closed: bool = True) -> "Diagram":
        """Build a diagram from text like "O1 U2 O3 U1 O2 U3".

        Signs are not part of this notation; they default to +1, which the
        determinant does not depend on.
        """
        entries = []
        for token in code.split():
            kind = token[0].upper()
            if kind not in ("O", "U"):
                raise ValueError(f"bad Gauss token {token!r}")
            entries.append((int(token[1:]), kind == "O", 1))
        return cls(tuple(entries), closed=closed)

    def simplified(self) -> "Diagram":
        """Remove kinks and poke pairs; the determinant is unchanged."""
        return Diagram(
            _simplify_entries(self.entries), closed=self.closed, n_segments=self.n_segments
        )


def _simplify_entries(entries) -> tuple:
    """Iteratively delete Reidemeister-I and II patterns from a Gauss sequence.

    R-I: the two passages of one crossing are cyclically adjacent.
    R-II: two crossings whose over-passages are cyclically adjacent and
    whose under-passages are also cyclically adjacent (a poke bigon).
    Both deletions preserve the knot type, so they are pure matrix-size
    optimizations for the determinant.
    """
    seq = list(entries)
    while True:
        m = len(seq)
        if m == 0:
            break
        removed_ids = None
        for p in range(m):
            if seq[p][0] == seq[(p + 1) % m][0]:
                removed_ids = {seq[p][0]}
                break
        if removed_ids is None:
            over_adj = set()
            under_adj = set()
            for p in range(m):
                a = seq[p]
                b = seq[(p + 1) % m]
                if a[0] == b[0]:
                    continue
                pair = (min(a[0], b[0]), max(a[0], b[0]))
                if a[1] and b[1]:
                    over_adj.add(pair)
                elif not a[1] and not b[1]:
                    under_adj.add(pair)
            pokes = over_adj & under_adj
            if pokes:
                removed_ids = set(min(pokes))
        if removed_ids is None:
            break
        seq = [e for e in seq if e[0] not in removed_ids]
    return tuple(seq)


def _bareiss_abs_det(mat: list[list[int]]) -> int:
    """Absolute determinant of an integer matrix, fraction-free.

    Bareiss elimination keeps every intermediate value an exact integer
    (each division is exact), so arbitrarily large determinants are safe.
    """
    size = len(mat)
    if size == 0:
        return 1
    prev = 1
    for r in range(size - 1):
        pivot_row = None
        for i in range(r, size):
            if mat[i][r] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            return 0
        if pivot_row != r:
            mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        pivot = mat[r][r]
        for i in range(r + 1, size):
            row_i = mat[i]
            row_r = mat[r]
            head = row_i[r]
            for j in range(r + 1, size):
                row_i[j] = (row_i[j] * pivot - head * row_r[j]) // prev
            row_i[r] = 0
        prev = pivot
    return abs(mat[size - 1][size - 1])


def alexander_determinant(diagram: Diagram) -> int:
    """Determinant invariant |det at t = -1| of a single-component diagram.

    Arcs run between consecutive under-passages; each crossing contributes
    a row with +2 on the over arc and -1 on the two arcs meeting at the
    under-passage (entries summed when arcs coincide).  One row and column
    are dropped and the rest is evaluated exactly over the integers.
    """
    if not diagram.closed:
        raise ValueError("determinant needs a closed diagram")
    entries = _simplify_entries(diagram.entries)
    n_cross = len(entries) // 2
    if n_cross == 0:
        return 1

    unders = [p for p, e in enumerate(entries) if not e[1]]
    over_pos: dict[int, int] = {}
    under_pos: dict[int, int] = {}
    for p, (cid, over, _sign) in enumerate(entries):
        if over:
            over_pos[cid] = p
        else:
            under_pos[cid] = p

    mat = [[0] * n_cross for _ in range(n_cross)]
    for row, cid in enumerate(over_pos):
        over_arc = bisect_left(unders, over_pos[cid]) % n_cross
        under_idx = bisect_left(unders, under_pos[cid])
        in_arc = under_idx
        out_arc = (under_idx + 1) % n_cross
        mat[row][over_arc] += 2
        mat[row][in_arc] -= 1
        mat[row][out_arc] -= 1
        if sum(mat[row]) != 0:
            raise RuntimeError("coloring row does not balance; arc indexing bug")

    minor = [row[: n_cross - 1] for row in mat[: n_cross - 1]]
    det = _bareiss_abs_det(minor)
    if det % 2 != 1:
        raise RuntimeError(
            f"determinant {det} is even; knot determinants are odd, so the "
            "diagram was not a valid single-component projection"
        )
    return det


def _projection_basis(direction: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    w = np.asarray(direction, dtype=np.float64)
    norm = np.linalg.norm(w)
    if norm < 1e-12:
        raise ValueError("projection direction must be nonzero")
    w = w / norm
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(w)))] = 1.0
    u = np.cross(w, axis)
    u /= np.linalg.norm(u)
    v = np.cross(w, u)
    return u, v, w


def project(points, direction, closed: bool = True) -> Diagram:
    """Planar diagram of a polyline viewed along `direction`.

    Crossings come from exact 2D segment intersection in the projection
    plane; the strand nearer the viewer (larger coordinate along the
    direction) passes over.  Raises DegenerateProjectionError whenever the
    diagram would be unstable: tangencies, crossings at segment endpoints,
    depth ties, or a segment seen nearly end-on.
    """
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"points must have shape (m, 3), got {pts.shape}")
    min_points = 3 if closed else 2
    if pts.shape[0] < min_points:
        raise ValueError(f"need at least {min_points} points")
    u, v, w = _projection_basis(direction)

    m = pts.shape[0]
    nseg = m if closed else m - 1
    step3d = (pts[(np.arange(nseg) + 1) % m] - pts[np.arange(nseg)])
    len3d = np.linalg.norm(step3d, axis=1)
    if np.any(len3d < 1e-12):
        raise ValueError("consecutive points coincide")

    xy = np.ascontiguousarray(pts @ np.column_stack([u, v]))
    z = np.ascontiguousarray(pts @ w)

    # A segment seen nearly end-on projects to a point and its crossing
    # parameters become meaningless; ask for a new direction instead.
    step2d = xy[(np.arange(nseg) + 1) % m] - xy[np.arange(nseg)]
    if np.any(np.linalg.norm(step2d, axis=1) < 1e-6 * len3d):
        raise DegenerateProjectionError("segment nearly parallel to view direction")

    depth_eps = _DEPTH_EPS * max(1.0, float(np.max(np.abs(z))))
    status, count, seg_a, seg_b, par_s, par_t, dep_a, dep_b = _find_crossings(
        xy, z, closed, depth_eps
    )
    if status != 0:
        raise DegenerateProjectionError("non-generic projection")

    if count == 0:
        return Diagram((), closed=closed, n_segments=nseg)

    # Order passages along the strand; position = segment index + parameter.
    passages = []
    for c in range(count):
        a = int(seg_a[c])
        b = int(seg_b[c])
        over_first = dep_a[c] > dep_b[c]
        d1 = step2d[a]
        d2 = step2d[b]
        cross2 = d1[0] * d2[1] - d1[1] * d2[0]
        # Sign convention: +1 when over direction to under direction turns
        # counterclockwise; the determinant does not depend on it.
        sign = 1 if (cross2 > 0) == over_first else -1
        passages.append((a + par_s[c], c, over_first, sign))
        passages.append((b + par_t[c], c, not over_first, sign))
    passages.sort()

    # Two passages nearly coincident on one segment would make the order,
    # and hence the Gauss sequence, unstable.
    for (pos1, *_), (pos2, *_) in zip(passages, passages[1:]):
        if pos2 - pos1 < _PARAM_EPS and int(pos1) == int(pos2):
            raise DegenerateProjectionError("two crossings coincide on a segment")

    entries = tuple((cid, over, sign) for _pos, cid, over, sign in passages)
    return Diagram(entries, closed=closed, n_segments=nseg)


# ---------------------------------------------------------------------------
# Classification


@dataclass(frozen=True)
class KnotClass:
    """Knot type resolved to its determinant invariant."""

    determinant: int

    def __post_init__(self):
        if self.determinant < 1 or self.determinant % 2 == 0:
            raise ValueError(f"determinant must be odd and >= 1, got {self.determinant}")

    @property
    def label(self) -> str:
        if self.determinant == UNKNOT_DET:
            return "unknot"
        if self.determinant == TREFOIL_DET:
            return "trefoil"
        return f"det{self.determinant}"

    @property
    def is_unknot(self) -> bool:
        return self.determinant == UNKNOT_DET

    @property
    def is_trefoil(self) -> bool:
        return self.determinant == TREFOIL_DET


def _unit_vec(gen: np.random.Generator) -> np.ndarray:
    while True:
        v = gen.standard_normal(3)
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            return v / norm


def _projection_determinant(points: np.ndarray, gen: np.random.Generator) -> int:
    """Determinant from one random generic projection, retrying degeneracies."""
    for _ in range(MAX_PROJECTION_TRIES):
        try:
            return alexander_determinant(project(points, _unit_vec(gen), closed=True))
        except DegenerateProjectionError:
            continue
    raise RuntimeError(
        f"no generic projection found in {MAX_PROJECTION_TRIES} attempts"
    )


def classify_ring(ring: Ring, rng: RngStream, directions: int = 3) -> KnotClass:
    """Knot class of a ring, cross-checked over several random projections.

    The determinant is projection-invariant, so the independent directions
    must agree; disagreement means a numerical fault and raises.
    """
    if directions < 1:
        raise ValueError("need at least one direction")
    pts = vertices(ring)[:-1]
    gen = rng.generator
    dets = [_projection_determinant(pts, gen) for _ in range(directions)]
    if len(set(dets)) != 1:
        raise RuntimeError(
            f"projections of one ring disagree ({dets}); numerical fault"
        )
    return KnotClass(dets[0])


# ---------------------------------------------------------------------------
# Closure spectra for open segments


@dataclass(frozen=True)
class ClosureSpectrum:
    """Distribution of knot classes over random closures of an open segment."""

    counts: dict[int, int]
    n_closures: int

    def __post_init__(self):
        object.__setattr__(self, "counts", dict(self.counts))
        total = 0
        for det, cnt in self.counts.items():
            KnotClass(det)  # validates det
            if cnt < 1:
                raise ValueError("spectrum counts must be positive")
            total += cnt
        if total != self.n_closures:
            raise ValueError(
                f"counts sum to {total}, expected n_closures={self.n_closures}"
            )

    def fraction(self, determinant: int) -> float:
        return self.counts.get(determinant, 0) / self.n_closures

    @property
    def trefoil_fraction(self) -> float:
        return self.fraction(TREFOIL_DET)

    @property
    def unknot_fraction(self) -> float:
        return self.fraction(UNKNOT_DET)

    def to_json_dict(self) -> dict[str, int]:
        return {
            KnotClass(det).label: int(self.counts[det])
            for det in sorted(self.counts)
        }


def _segment_frame(points: np.ndarray) -> tuple[np.ndarray, float]:
    """Centroid and diameter (max pairwise distance) of a point set."""
    center = points.mean(axis=0)
    diff = points[:, None, :] - points[None, :, :]
    diam = float(np.sqrt(np.einsum("ijk,ijk->ij", diff, diff).max()))
    return center, diam


def _closure_det(points, center, radius, gen: np.random.Generator) -> int:
    """Close the segment through one random sphere point and classify."""
    apex = center + radius * _unit_vec(gen)
    loop = np.vstack([points, apex])
    return _projection_determinant(loop, gen)


def _check_spectrum_args(points, closures: int, radius_factor: float):
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 2:
        raise ValueError(f"segment needs at least 2 points of dim 3, got {pts.shape}")
    if closures < 1:
        raise ValueError("need at least one closure")
    if radius_factor < MIN_RADIUS_FACTOR:
        raise ValueError(f"radius_factor must be >= {MIN_RADIUS_FACTOR}")
    center, diam = _segment_frame(pts)
    if diam < 1e-12:
        raise ValueError("degenerate segment: all points coincide")
    return pts, center, radius_factor * diam


def closure_spectrum(
    points,
    rng: RngStream,
    closures: int = DEFAULT_CLOSURES,
    radius_factor: float = DEFAULT_RADIUS_FACTOR,
) -> ClosureSpectrum:
    """Knot-class counts over random sphere-point closures of an open segment.

    The closure sphere is centered at the segment centroid with radius
    radius_factor times the segment diameter, so both closure chords stay
    far outside the segment's own geometry.  Trials consume the stream in
    order from trial 0, so a rerun with the same stream replays exactly.
    """
    pts, center, radius = _check_spectrum_args(points, closures, radius_factor)
    gen = rng.generator
    counts: dict[int, int] = {}
    for _ in range(closures):
        det = _closure_det(pts, center, radius, gen)
        counts[det] = counts.get(det, 0) + 1
    return ClosureSpectrum(counts, closures)


def is_trefoil_segment(spectrum: ClosureSpectrum, tolerance: float = DEFAULT_TOLERANCE) -> bool:
    """True when the trefoil fraction strictly exceeds the tolerance."""
    if not 0.0 <= tolerance < 1.0:
        raise ValueError("tolerance must be in [0, 1)")
    return spectrum.trefoil_fraction > tolerance


def _majority_verdict(
    points,
    want_det: int,
    tolerance: float,
    rng: RngStream,
    closures: int,
    radius_factor: float,
) -> bool:
    """Early-exit version of the spectrum threshold test.

    Draws trials in the same order as closure_spectrum from the same
    stream, so a segment that passes here yields an identical prefix of
    trials when the full spectrum is recomputed; the scan just stops as
    soon as the verdict is certain either way.
    """
    pts, center, radius = _check_spectrum_args(points, closures, radius_factor)
    gen = rng.generator
    need = math.floor(closures * tolerance) + 1
    hits = 0
    for t in range(closures):
        if _closure_det(pts, center, radius, gen) == want_det:
            hits += 1
            if hits >= need:
                return True
        if hits + (closures - t - 1) < need:
            return False
    return hits >= need


# ---------------------------------------------------------------------------
# Knot length


@dataclass(frozen=True)
class KnotLengthResult:
    """Shortest trefoil-carrying subsegment of a knotted ring.

    start is the 0-based first edge of the segment, length its edge count.
    spectrum and complement hold the full closure spectra of the winning
    segment and of the rest of the ring; both are None only in the
    fallback case where no proper segment qualified and the whole ring
    (length n) is reported.
    """

    start: int
    length: int
    spectrum: ClosureSpectrum | None
    complement: ClosureSpectrum | None
    n_closures: int
    tolerance: float

    def to_json_dict(self) -> dict:
        return {
            "start": int(self.start),
            "length": int(self.length),
            "spectrum": None if self.spectrum is None else self.spectrum.to_json_dict(),
            "complement": None
            if self.complement is None
            else self.complement.to_json_dict(),
            "n_closures": int(self.n_closures),
            "tolerance": float(self.tolerance),
        }


def knot_length(
    ring: Ring,
    rng: RngStream,
    closures_per_segment: int = DEFAULT_CLOSURES,
    tolerance: float = DEFAULT_TOLERANCE,
    radius_factor: float = DEFAULT_RADIUS_FACTOR,
) -> KnotLengthResult:
    """Locate the shortest subsegment that carries a trefoil ring's knot.

    Scans lengths k = 3, 4, ... and all cyclic starts i in order; the
    first segment whose closure spectrum is majority-trefoil and whose
    complement closes to a majority-unknot wins.  Rings not classified as
    trefoils are rejected.  If no segment up to k = n-1 qualifies, the
    whole ring is reported as the knotted portion (length n).
    """
    cls = classify_ring(ring, rng.child(0))
    if not cls.is_trefoil:
        raise ValueError(f"knot_length needs a trefoil ring, got {cls.label}")
    verts = vertices(ring)[:-1]
    n = ring.n
    idx = np.arange(n + 1)
    for k in range(3, n):
        for i in range(n):
            seg = verts[(i + idx[: k + 1]) % n]
            if not _majority_verdict(
                seg, TREFOIL_DET, tolerance, rng.child(1, k, i),
                closures_per_segment, radius_factor,
            ):
                continue
            comp = verts[(i + k + idx[: n - k + 1]) % n]
            if not _majority_verdict(
                comp, UNKNOT_DET, tolerance, rng.child(2, k, i),
                closures_per_segment, radius_factor,
            ):
                continue
            spectrum = closure_spectrum(
                seg, rng.child(1, k, i), closures_per_segment, radius_factor
            )
            complement = closure_spectrum(
                comp, rng.child(2, k, i), closures_per_segment, radius_factor
            )
            return KnotLengthResult(
                start=i,
                length=k,
                spectrum=spectrum,
                complement=complement,
                n_closures=closures_per_segment,
                tolerance=tolerance,
            )
    return KnotLengthResult(
        start=0,
        length=n,
        spectrum=None,
        complement=None,
        n_closures=closures_per_segment,
        tolerance=tolerance,
    )
