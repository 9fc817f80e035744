"""Closed-form shape averages and streaming ensemble estimators.

The analytic_* functions are exact ensemble averages over ideal rings
(closed equilateral polygons with uniformly distributed shapes) and open
freely jointed chains.  Each has an *_exact sibling returning a Fraction,
so reduction identities between the formulas can be asserted exactly;
the float versions convert at the boundary.

Estimators consume rings one at a time and are mergeable, so ensembles
can be accumulated in independent chunks and combined in a fixed order.
The standard-error unit is the per-ring average: positions within one
ring are correlated, rings are independent.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from idealrings.geometry import Ring

PROFILE_CSV_COLUMNS = (
    "k",
    "e2e_mean",
    "e2e_se",
    "rg_mean",
    "rg_se",
    "analytic_e2e",
    "analytic_rg",
)

OPEN_CSV_COLUMNS = ("analytic_open_e2e", "analytic_open_rg")


# ---------------------------------------------------------------------------
# Exact closed forms


def _check_ring_n(n: int) -> int:
    n = int(n)
    if n < 2:
        raise ValueError(f"ring length must be at least 2, got {n}")
    return n


def analytic_edge_product_exact(n: int) -> Fraction:
    """Average dot product of two distinct edges of a ring: -1/(n-1)."""
    n = _check_ring_n(n)
    return Fraction(-1, n - 1)


def analytic_e2e_exact(k: int, n: int) -> Fraction:
    """Average squared distance between ring vertices k steps apart: k(n-k)/(n-1)."""
    n = _check_ring_n(n)
    k = int(k)
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must be in [1, {n - 1}], got {k}")
    return Fraction(k * (n - k), n - 1)


def analytic_com_sq_exact(n: int) -> Fraction:
    """Average squared distance of a ring's centroid from a vertex: (n+1)/12."""
    n = _check_ring_n(n)
    return Fraction(n + 1, 12)


def analytic_rg_exact(n: int) -> Fraction:
    """Average squared radius of gyration of a ring: (n+1)/12."""
    n = _check_ring_n(n)
    return Fraction(n + 1, 12)


def analytic_subseg_com_sq_exact(k: int, n: int) -> Fraction:
    """Average squared centroid distance of a k-edge subsegment from its start."""
    n = _check_ring_n(n)
    k = int(k)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    num = (2 * k * k + 3 * k + 1) * 2 * n - 3 * k * (k + 1) ** 2
    return Fraction(num, 12 * k * (n - 1))


def analytic_subseg_rg_exact(k: int, n: int) -> Fraction:
    """Average squared radius of gyration of a k-edge ring subsegment."""
    n = _check_ring_n(n)
    k = int(k)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    return Fraction((k * k - 1) * (2 * n - k), 12 * k * (n - 1))


def analytic_open_e2e_exact(k: int) -> Fraction:
    """Average squared end-to-end distance of a k-step open chain: k."""
    k = int(k)
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    return Fraction(k)


def analytic_open_rg_exact(k: int) -> Fraction:
    """Average squared radius of gyration of a k-step open chain: (k^2-1)/(6k)."""
    k = int(k)
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    return Fraction(k * k - 1, 6 * k)


def analytic_edge_product(n: int) -> float:
    return float(analytic_edge_product_exact(n))


def analytic_e2e(k: int, n: int) -> float:
    return float(analytic_e2e_exact(k, n))


def analytic_com_sq(n: int) -> float:
    return float(analytic_com_sq_exact(n))


def analytic_rg(n: int) -> float:
    return float(analytic_rg_exact(n))


def analytic_subseg_com_sq(k: int, n: int) -> float:
    return float(analytic_subseg_com_sq_exact(k, n))


def analytic_subseg_rg(k: int, n: int) -> float:
    return float(analytic_subseg_rg_exact(k, n))


def analytic_open_e2e(k: int) -> float:
    return float(analytic_open_e2e_exact(k))


def analytic_open_rg(k: int) -> float:
    return float(analytic_open_rg_exact(k))


def effective_length_from_rg(rg_sq: float) -> float:
    """Chain length whose average radius of gyration matches rg_sq: 12x - 1."""
    rg_sq = float(rg_sq)
    if rg_sq < 0.0:
        raise ValueError("squared radius of gyration cannot be negative")
    return 12.0 * rg_sq - 1.0

def effective_length_from_max_e2e(max_e2e: float) -> float:
    """Ring length whose peak internal distance profile matches max_e2e.

    The profile peak of an n-ring is n^2 / (4(n-1)) at k = n/2; the larger
    root of that quadratic is n = 2m + 2*sqrt(m^2 - m).
    """
    m = float(max_e2e)
    if m < 1.0:
        raise ValueError(f"profile maximum must be at least 1, got {m}")
    return 2.0 * m + 2.0 * math.sqrt(m * (m - 1.0))


def e2e_divergence_k(n: int, rel_tol: float = 0.01) -> int | None:
    """Smallest k whose ring e2e average differs from the open value by > rel_tol.

    The open-chain average at separation k is exactly k, so this is the
    window length beyond which ring closure is felt at the given relative
    tolerance.  None if no k in 1..n-1 diverges.
    """
    for k in range(1, n):
        if abs(analytic_e2e(k, n) - k) / k > rel_tol:
            return k
    return None


def rg_divergence_k(n: int, rel_tol: float = 0.01) -> int | None:
    """Smallest k whose subsegment rg average differs from the open chain by > rel_tol.

    k = 1 is skipped (both averages are 0).  None if no k in 2..n diverges.
    """
    for k in range(2, n + 1):
        open_val = analytic_open_rg(k)
        if abs(analytic_subseg_rg(k, n) - open_val) / open_val > rel_tol:
            return k
    return None


# ---------------------------------------------------------------------------
# Streaming estimators


class StreamingMoments:
    """Running mean and variance over scalars or fixed-shape arrays.

    Single observations enter via push; disjoint accumulators combine via
    merge, which is associative up to roundoff.  Variance is the sample
    variance (ddof=1) and is reported as 0 until two observations exist.
    """

    __slots__ = ("count", "_mean", "_m2")

    def __init__(self, shape: tuple[int, ...] = ()):
        self.count = 0
        self._mean = np.zeros(shape)
        self._m2 = np.zeros(shape)

    def push(self, x) -> None:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != self._mean.shape:
            raise ValueError(f"expected shape {self._mean.shape}, got {x.shape}")
        self.count += 1
        delta = x - self._mean
        self._mean += delta / self.count
        self._m2 += delta * (x - self._mean)

    def merge(self, other: "StreamingMoments") -> "StreamingMoments":
        if other._mean.shape != self._mean.shape:
            raise ValueError("cannot merge accumulators of different shapes")
        if other.count == 0:
            return self
        if self.count == 0:
            self.count = other.count
            self._mean = other._mean.copy()
            self._m2 = other._m2.copy()
            return self
        total = self.count + other.count
        delta = other._mean - self._mean
        self._mean = self._mean + delta * (other.count / total)
        self._m2 = (
            self._m2
            + other._m2
            + delta * delta * (self.count * other.count / total)
        )
        self.count = total
        return self

    @property
    def mean(self) -> np.ndarray:
        return self._mean.copy()

    @property
    def variance(self) -> np.ndarray:
        if self.count < 2:
            return np.zeros_like(self._m2)
        return self._m2 / (self.count - 1)

    @property
    def sem(self) -> np.ndarray:
        if self.count < 2:
            return np.zeros_like(self._m2)
        return np.sqrt(self.variance / self.count)


@dataclass(frozen=True)
class ShapeProfile:
    """Ensemble-averaged internal distance and subsegment gyration curves.

    Arrays are indexed by k-1 for k = 1..n-1: e2e is the mean squared
    distance between vertices k steps apart, rg the mean squared radius of
    gyration of k-edge subsegments.  Standard errors treat each ring's
    positional average as one observation.
    """

    n: int
    count: int
    e2e_mean: np.ndarray
    e2e_se: np.ndarray
    rg_mean: np.ndarray
    rg_se: np.ndarray

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("profile needs at least one ring")
        for name in ("e2e_mean", "e2e_se", "rg_mean", "rg_se"):
            a = np.asarray(getattr(self, name), dtype=np.float64)
            if a.shape != (self.n - 1,):
                raise ValueError(f"{name} must have shape ({self.n - 1},)")
            a = a.copy()
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def ks(self) -> np.ndarray:
        return np.arange(1, self.n)

    def analytic_e2e_row(self) -> np.ndarray:
        return np.array([analytic_e2e(k, self.n) for k in self.ks])

    def analytic_rg_row(self) -> np.ndarray:
        return np.array([analytic_subseg_rg(k, self.n) for k in self.ks])


def _profile_rows(edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-ring positional averages of e2e and subsegment rg for k = 1..n-1.

    Works on the doubled vertex walk so every cyclic window is a contiguous
    slice; prefix sums over the walk give each window's vertex sum and sum
    of squared norms in O(1), O(n^2) total per ring.
    """
    n = edges.shape[0]
    walk = np.empty((2 * n + 1, 3))
    walk[0] = 0.0
    np.cumsum(np.concatenate([edges, edges]), axis=0, out=walk[1:])

    norm_sq = np.einsum("ij,ij->i", walk, walk)
    vert_prefix = np.vstack([np.zeros(3), np.cumsum(walk[1:], axis=0)])
    norm_prefix = np.concatenate([[0.0], np.cumsum(norm_sq[1:])])

    starts = np.arange(n)[:, None]
    ks = np.arange(1, n)[None, :]
    ends = starts + ks

    diff = walk[ends] - walk[starts]
    e2e = np.einsum("ijk,ijk->ij", diff, diff).mean(axis=0)

    win_sum = vert_prefix[ends] - vert_prefix[starts]
    win_norm = norm_prefix[ends] - norm_prefix[starts]
    origin = walk[:n]
    # Shift each window to its own start vertex before taking moments.
    shifted_norm = (
        win_norm
        - 2.0 * np.einsum("ijk,ik->ij", win_sum, origin)
        + ks * norm_sq[:n, None]
    )
    centroid = win_sum / ks[:, :, None] - origin[:, None, :]
    rg = (
        shifted_norm / ks - np.einsum("ijk,ijk->ij", centroid, centroid)
    ).mean(axis=0)
    return e2e, rg


class ProfileAccumulator:
    """Mergeable accumulator of per-ring profile rows for a fixed ring length."""

    def __init__(self, n: int):
        if n < 3:
            raise ValueError(f"ring length must be at least 3, got {n}")
        self.n = n
        self._e2e = StreamingMoments((n - 1,))
        self._rg = StreamingMoments((n - 1,))

    @property
    def count(self) -> int:
        return self._e2e.count

    def push_ring(self, ring: Ring) -> None:
        if ring.n != self.n:
            raise ValueError(f"expected n={self.n}, got ring with n={ring.n}")
        e2e_row, rg_row = _profile_rows(ring.edges)
        self._e2e.push(e2e_row)
        self._rg.push(rg_row)

    def merge(self, other: "ProfileAccumulator") -> "ProfileAccumulator":
        if other.n != self.n:
            raise ValueError("cannot merge accumulators for different ring lengths")
        self._e2e.merge(other._e2e)
        self._rg.merge(other._rg)
        return self

    def result(self) -> ShapeProfile:
        if self.count < 1:
            raise ValueError("no rings accumulated")
        return ShapeProfile(
            n=self.n,
            count=self.count,
            e2e_mean=self._e2e.mean,
            e2e_se=self._e2e.sem,
            rg_mean=self._rg.mean,
            rg_se=self._rg.sem,
        )


def estimate_profile(rings: Iterable[Ring]) -> ShapeProfile:
    """Shape profile of an ensemble of same-length rings."""
    acc = None
    for ring in rings:
        if acc is None:
            acc = ProfileAccumulator(ring.n)
        acc.push_ring(ring)
    if acc is None:
        raise ValueError("empty ensemble")
    return acc.result()


def edge_product_of_ring(ring: Ring) -> float:
    """Average e_i . e_j over distinct edge pairs of one ring.

    Uses the square-of-sum identity: sum over ordered distinct pairs is
    |sum e|^2 - sum |e|^2, so the per-ring average needs no pair loop.
    """
    s = ring.edges.sum(axis=0)
    total_sq = float(np.einsum("ij,ij->", ring.edges, ring.edges))
    n = ring.n
    return (float(s @ s) - total_sq) / (n * (n - 1))


def estimate_edge_product(rings: Iterable[Ring]) -> tuple[float, float]:
    """Ensemble mean and standard error of the per-ring edge-pair average."""
    acc = StreamingMoments()
    for ring in rings:
        acc.push(edge_product_of_ring(ring))
    if acc.count == 0:
        raise ValueError("empty ensemble")
    return float(acc.mean), float(acc.sem)


# ---------------------------------------------------------------------------
# Profile serialization


def _fmt(x: float) -> str:
    # repr of a Python float is the shortest exact round-trip form.
    return repr(float(x))


def write_profile_csv(fileobj, profile: ShapeProfile, include_open: bool = True) -> None:
    """Write one row per k with the estimated and analytic profile values.

    The seven canonical columns come first; when include_open is set, the
    open-chain analytic curves are appended for side-by-side comparison.
    """
    header = PROFILE_CSV_COLUMNS + (OPEN_CSV_COLUMNS if include_open else ())
    writer = csv.writer(fileobj, lineterminator="\n")
    writer.writerow(header)
    analytic_e = profile.analytic_e2e_row()
    analytic_r = profile.analytic_rg_row()
    for i, k in enumerate(profile.ks):
        row = [
            str(int(k)),
            _fmt(profile.e2e_mean[i]),
            _fmt(profile.e2e_se[i]),
            _fmt(profile.rg_mean[i]),
            _fmt(profile.rg_se[i]),
            _fmt(analytic_e[i]),
            _fmt(analytic_r[i]),
        ]
        if include_open:
            row.append(_fmt(analytic_open_e2e(int(k))))
            row.append(_fmt(analytic_open_rg(int(k))))
        writer.writerow(row)


def read_profile_csv(fileobj) -> dict[str, np.ndarray]:
    """Read a profile CSV back into arrays keyed by column name."""
    reader = csv.DictReader(fileobj)
    if reader.fieldnames is None:
        raise ValueError("empty profile CSV")
    missing = [c for c in PROFILE_CSV_COLUMNS if c not in reader.fieldnames]
    if missing:
        raise ValueError(f"profile CSV missing columns: {missing}")
    columns: dict[str, list[float]] = {name: [] for name in reader.fieldnames}
    for row in reader:
        for name in reader.fieldnames:
            columns[name].append(float(row[name]))
    out = {name: np.array(vals) for name, vals in columns.items()}
    out["k"] = out["k"].astype(int)
    return out
