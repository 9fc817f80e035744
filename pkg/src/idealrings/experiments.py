"""Scripted studies: estimator convergence and the phantom-vs-trefoil comparison.

Both studies are pure functions of (parameters, seed).  Samples are
addressed by index through RngStream substreams and accumulated in
fixed-size chunks merged in index order, so reports are bit-identical
for any thread count.
"""

from __future__ import annotations

import json
import subprocess
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path

import numpy as np

from idealrings._parallel import run_jobs
from idealrings.geometry import radius_of_gyration_sq
from idealrings.knots import classify_ring, knot_length
from idealrings.sampler import (
    CLASSIFY_STREAM,
    CONVERGENCE_STREAM,
    KNOT_SCAN_STREAM,
    RING_STREAM,
    MixPolicy,
    RngStream,
    sample_ring,
)
from idealrings.stats import (
    ProfileAccumulator,
    ShapeProfile,
    StreamingMoments,
    analytic_rg,
    effective_length_from_max_e2e,
    effective_length_from_rg,
)

# Fixed accumulation chunk; part of the determinism contract, not tunable.
CHUNK = 1024

DEFAULT_SIZES = (10, 100, 1000, 10000, 100000)
DEFAULT_BUDGET_FACTOR = 100

_SLOPE_NOTE = (
    "abs_errors are |ensemble mean rg^2 - (n+1)/12| per replicate; the "
    "log-log slope over replicate means is reported as fitted, without "
    "asserting any particular exponent"
)


def build_id() -> str:
    """Identifier of the code that produced a report."""
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=10,
        )
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except OSError:
        pass
    try:
        return f"idealrings-{metadata.version('idealrings')}"
    except metadata.PackageNotFoundError:
        return "idealrings-unknown"


def _json_default(obj):
    raise TypeError(f"not JSON serializable: {type(obj)}")


def write_json(fileobj, payload: dict) -> None:
    """Stable JSON: sorted keys, no trailing whitespace, newline at EOF."""
    json.dump(payload, fileobj, sort_keys=True, indent=2, default=_json_default)
    fileobj.write("\n")


def _profile_payload(profile: ShapeProfile) -> dict:
    return {
        "n": int(profile.n),
        "count": int(profile.count),
        "k": [int(k) for k in profile.ks],
        "e2e_mean": [float(x) for x in profile.e2e_mean],
        "e2e_se": [float(x) for x in profile.e2e_se],
        "rg_mean": [float(x) for x in profile.rg_mean],
        "rg_se": [float(x) for x in profile.rg_se],
    }


# ---------------------------------------------------------------------------
# Convergence of the gyration estimator


@dataclass(frozen=True)
class ConvergenceReport:
    """Decay of the gyration-estimate error with ensemble size.

    abs_errors[s][r] is |mean rg^2 - (n+1)/12| for replicate r at
    sizes[s].  slope/intercept fit log10(replicate-mean error) against
    log10(size); the pooled fit uses every replicate point.
    """

    n: int
    moves: int
    sizes: tuple[int, ...]
    replicates: int
    seed: int
    build: str
    abs_errors: tuple[tuple[float, ...], ...]
    mean_abs_errors: tuple[float, ...]
    # Fit fields are None when there are fewer than two sizes to fit.
    slope: float | None
    intercept: float | None
    pooled_slope: float | None
    pooled_intercept: float | None

    def to_json_dict(self) -> dict:
        return {
            "kind": "convergence",
            "build": self.build,
            "seed": int(self.seed),
            "n": int(self.n),
            "moves": int(self.moves),
            "sizes": [int(s) for s in self.sizes],
            "replicates": int(self.replicates),
            "abs_errors": [[float(e) for e in row] for row in self.abs_errors],
            "mean_abs_errors": [float(e) for e in self.mean_abs_errors],
            "slope": _opt_float(self.slope),
            "intercept": _opt_float(self.intercept),
            "pooled_slope": _opt_float(self.pooled_slope),
            "pooled_intercept": _opt_float(self.pooled_intercept),
            "note": _SLOPE_NOTE,
        }

    def write_csv(self, fileobj) -> None:
        fileobj.write("size,replicate,abs_error\n")
        for size, row in zip(self.sizes, self.abs_errors):
            for r, err in enumerate(row):
                fileobj.write(f"{size},{r},{err!r}\n")


def read_convergence_csv(fileobj) -> dict[str, np.ndarray]:
    """Columns of a ConvergenceReport CSV as arrays keyed by header name."""
    header = fileobj.readline().strip().split(",")
    if header != ["size", "replicate", "abs_error"]:
        raise ValueError(f"unexpected header {header}")
    rows = [line.strip().split(",") for line in fileobj if line.strip()]
    return {
        "size": np.array([int(r[0]) for r in rows]),
        "replicate": np.array([int(r[1]) for r in rows]),
        "abs_error": np.array([float(r[2]) for r in rows]),
    }


def read_summary_csv(fileobj) -> dict[str, str]:
    """Key/value pairs of an EnsembleComparison summary CSV, values raw."""
    header = fileobj.readline().strip().split(",")
    if header != ["key", "value"]:
        raise ValueError(f"unexpected header {header}")
    out = {}
    for line in fileobj:
        line = line.rstrip("\n")
        if not line:
            continue
        key, _, value = line.partition(",")
        out[key] = value
    return out


def _rg_chunk(job) -> StreamingMoments:
    seed, n, moves, size_idx, replicate, lo, hi = job
    root = RngStream(seed)
    policy = MixPolicy(moves)
    acc = StreamingMoments()
    for i in range(lo, hi):
        ring = sample_ring(
            n, root.child(CONVERGENCE_STREAM, size_idx, replicate, i), policy
        )
        acc.push(radius_of_gyration_sq(ring))
    return acc


def run_convergence(
    n: int = 50,
    moves: int = 150,
    sizes=DEFAULT_SIZES,
    replicates: int = 10,
    seed: int = 0,
    threads: int = 1,
) -> ConvergenceReport:
    """Measure |mean rg^2 - (n+1)/12| over fresh ensembles of growing size.

    Each (size, replicate) cell is an independent ensemble; the fitted
    log-log slope summarizes how fast the error decays.
    """
    sizes = tuple(int(s) for s in sizes)
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("sizes must be positive")
    if replicates < 1:
        raise ValueError("need at least one replicate")
    exact = analytic_rg(n)

    jobs = []
    cells = []
    for s, size in enumerate(sizes):
        for r in range(replicates):
            chunk_jobs = [
                (seed, n, moves, s, r, lo, min(lo + CHUNK, size))
                for lo in range(0, size, CHUNK)
            ]
            cells.append((s, r, len(chunk_jobs)))
            jobs.extend(chunk_jobs)

    results = run_jobs(_rg_chunk, jobs, threads)

    errors = [[0.0] * replicates for _ in sizes]
    pos = 0
    for s, r, n_chunks in cells:
        acc = StreamingMoments()
        for res in results[pos : pos + n_chunks]:
            acc.merge(res)
        pos += n_chunks
        errors[s][r] = abs(float(acc.mean) - exact)

    mean_abs = [float(np.mean(row)) for row in errors]
    slope = intercept = pooled_slope = pooled_intercept = None
    if len(sizes) >= 2:
        # Exact zeros cannot occur with continuous data; clamp defensively
        # so the log fit stays finite.
        log_sizes = np.log10(sizes)
        log_means = np.log10(np.maximum(mean_abs, 1e-300))
        slope, intercept = (float(c) for c in np.polyfit(log_sizes, log_means, 1))
        xs = np.repeat(log_sizes, replicates)
        ys = np.log10(
            np.maximum(np.array(errors, dtype=float).ravel(), 1e-300)
        )
        pooled_slope, pooled_intercept = (
            float(c) for c in np.polyfit(xs, ys, 1)
        )

    return ConvergenceReport(
        n=n,
        moves=moves,
        sizes=sizes,
        replicates=replicates,
        seed=seed,
        build=build_id(),
        abs_errors=tuple(tuple(row) for row in errors),
        mean_abs_errors=tuple(mean_abs),
        slope=slope,
        intercept=intercept,
        pooled_slope=pooled_slope,
        pooled_intercept=pooled_intercept,
    )


# ---------------------------------------------------------------------------
# Phantom vs trefoil ensembles


@dataclass(frozen=True)
class EnsembleComparison:
    """Shape statistics of all sampled rings vs the trefoil-classified subset.

    The phantom population is every ring the run generated; trefoils are
    the subset whose determinant class is the trefoil.  Effective lengths
    back-solve the closed forms for the open/ring length whose average
    matches the observed trefoil statistic.
    """

    n: int
    seed: int
    target_trefoils: int
    moves: int
    closures: int
    tolerance: float
    radius_factor: float
    budget: int
    build: str
    complete: bool
    n_sampled: int
    n_trefoils: int
    class_counts: dict[str, int]
    phantom_profile: ShapeProfile
    trefoil_profile: ShapeProfile | None
    phantom_rg_mean: float
    phantom_rg_se: float
    trefoil_rg_mean: float | None
    trefoil_rg_se: float | None
    trefoil_max_e2e: float | None
    trefoil_max_e2e_k: int | None
    effective_length_rg: float | None
    effective_length_max_e2e: float | None
    trefoil_indices: tuple[int, ...]
    knot_lengths: tuple[int, ...] | None
    mean_knot_length: float | None

    def to_json_dict(self) -> dict:
        return {
            "kind": "trefoil_study",
            "build": self.build,
            "seed": int(self.seed),
            "parameters": {
                "n": int(self.n),
                "target_trefoils": int(self.target_trefoils),
                "moves": int(self.moves),
                "closures": int(self.closures),
                "tolerance": float(self.tolerance),
                "radius_factor": float(self.radius_factor),
                "budget": int(self.budget),
            },
            "complete": bool(self.complete),
            "n_sampled": int(self.n_sampled),
            "n_trefoils": int(self.n_trefoils),
            "class_counts": {k: int(v) for k, v in self.class_counts.items()},
            "phantom": {
                **_profile_payload(self.phantom_profile),
                "rg_mean": float(self.phantom_rg_mean),
                "rg_se": float(self.phantom_rg_se),
            },
            "trefoil": None
            if self.trefoil_profile is None
            else {
                **_profile_payload(self.trefoil_profile),
                "rg_mean": float(self.trefoil_rg_mean),
                "rg_se": float(self.trefoil_rg_se),
            },
            "summary": {
                "trefoil_max_e2e": _opt_float(self.trefoil_max_e2e),
                "trefoil_max_e2e_k": _opt_int(self.trefoil_max_e2e_k),
                "effective_length_from_rg": _opt_float(self.effective_length_rg),
                "effective_length_from_max_e2e": _opt_float(
                    self.effective_length_max_e2e
                ),
                "mean_knot_length": _opt_float(self.mean_knot_length),
                "knot_lengths": None
                if self.knot_lengths is None
                else [int(x) for x in self.knot_lengths],
                "trefoil_indices": [int(i) for i in self.trefoil_indices],
            },
        }

    def write_summary_csv(self, fileobj) -> None:
        rows = [
            ("n", self.n),
            ("seed", self.seed),
            ("n_sampled", self.n_sampled),
            ("n_trefoils", self.n_trefoils),
            ("complete", int(self.complete)),
            ("phantom_rg_mean", repr(self.phantom_rg_mean)),
            ("trefoil_rg_mean", _opt_repr(self.trefoil_rg_mean)),
            ("trefoil_max_e2e", _opt_repr(self.trefoil_max_e2e)),
            ("effective_length_from_rg", _opt_repr(self.effective_length_rg)),
            (
                "effective_length_from_max_e2e",
                _opt_repr(self.effective_length_max_e2e),
            ),
            ("mean_knot_length", _opt_repr(self.mean_knot_length)),
        ]
        fileobj.write("key,value\n")
        for key, value in rows:
            fileobj.write(f"{key},{value}\n")


def _opt_float(x):
    return None if x is None else float(x)


def _opt_int(x):
    return None if x is None else int(x)


def _opt_repr(x):
    return "" if x is None else repr(float(x))


def _study_chunk(job):
    """Sample, classify, and accumulate rings lo..hi of the study stream."""
    seed, n, moves, lo, hi = job
    root = RngStream(seed)
    policy = MixPolicy(moves)
    phantom = ProfileAccumulator(n)
    trefoil = ProfileAccumulator(n)
    phantom_rg = StreamingMoments()
    trefoil_rg = StreamingMoments()
    class_counts: dict[str, int] = {}
    trefoil_indices = []
    for i in range(lo, hi):
        ring = sample_ring(n, root.child(RING_STREAM, i), policy)
        cls = classify_ring(ring, root.child(CLASSIFY_STREAM, i))
        class_counts[cls.label] = class_counts.get(cls.label, 0) + 1
        phantom.push_ring(ring)
        rg = radius_of_gyration_sq(ring)
        phantom_rg.push(rg)
        if cls.is_trefoil:
            trefoil.push_ring(ring)
            trefoil_rg.push(rg)
            trefoil_indices.append(i)
    return phantom, trefoil, phantom_rg, trefoil_rg, class_counts, trefoil_indices


def _knot_length_job(job) -> int:
    seed, n, moves, index, closures, tolerance, radius_factor = job
    root = RngStream(seed)
    ring = sample_ring(n, root.child(RING_STREAM, index), MixPolicy(moves))
    result = knot_length(
        ring,
        root.child(KNOT_SCAN_STREAM, index),
        closures_per_segment=closures,
        tolerance=tolerance,
        radius_factor=radius_factor,
    )
    return result.length


def run_trefoil_study(
    n: int = 50,
    target_trefoils: int = 200,
    seed: int = 0,
    moves: int | None = None,
    closures: int = 100,
    tolerance: float = 0.5,
    radius_factor: float = 10.0,
    budget_factor: int = DEFAULT_BUDGET_FACTOR,
    threads: int = 1,
    knot_lengths: bool = True,
) -> EnsembleComparison:
    """Sample rings until enough trefoils are collected, then compare shapes.

    All sampled rings form the phantom population; rings classified as
    trefoils are additionally accumulated separately, and (optionally)
    each trefoil's knot length is measured.  Sampling stops at the first
    chunk boundary where the target is met, or when the budget
    (budget_factor * target) is exhausted, in which case the report is
    flagged incomplete.
    """
    if target_trefoils < 1:
        raise ValueError("target_trefoils must be positive")
    if moves is None:
        moves = MixPolicy.default(n).moves
    budget = budget_factor * target_trefoils

    phantom = ProfileAccumulator(n)
    trefoil = ProfileAccumulator(n)
    phantom_rg = StreamingMoments()
    trefoil_rg = StreamingMoments()
    class_counts: dict[str, int] = {}
    trefoil_indices: list[int] = []

    chunk_jobs = [
        (seed, n, moves, lo, min(lo + CHUNK, budget))
        for lo in range(0, budget, CHUNK)
    ]
    wave = max(1, threads)
    pos = 0
    while pos < len(chunk_jobs) and len(trefoil_indices) < target_trefoils:
        batch = chunk_jobs[pos : pos + wave]
        pos += len(batch)
        for ph, tr, ph_rg, tr_rg, counts, indices in run_jobs(
            _study_chunk, batch, threads
        ):
            phantom.merge(ph)
            trefoil.merge(tr)
            phantom_rg.merge(ph_rg)
            trefoil_rg.merge(tr_rg)
            for label, cnt in counts.items():
                class_counts[label] = class_counts.get(label, 0) + cnt
            trefoil_indices.extend(indices)
            if len(trefoil_indices) >= target_trefoils:
                break

    n_trefoils = len(trefoil_indices)
    complete = n_trefoils >= target_trefoils

    lengths = None
    mean_len = None
    if knot_lengths and n_trefoils > 0:
        jobs = [
            (seed, n, moves, i, closures, tolerance, radius_factor)
            for i in trefoil_indices
        ]
        lengths = tuple(run_jobs(_knot_length_job, jobs, threads))
        mean_len = float(np.mean(lengths))

    have_trefoils = n_trefoils > 0
    trefoil_profile = trefoil.result() if have_trefoils else None
    max_e2e = None
    max_k = None
    eff_rg = None
    eff_max = None
    tre_rg_mean = None
    tre_rg_se = None
    if have_trefoils:
        idx = int(np.argmax(trefoil_profile.e2e_mean))
        max_e2e = float(trefoil_profile.e2e_mean[idx])
        max_k = idx + 1
        tre_rg_mean = float(trefoil_rg.mean)
        tre_rg_se = float(trefoil_rg.sem)
        eff_rg = effective_length_from_rg(tre_rg_mean)
        eff_max = effective_length_from_max_e2e(max_e2e)

    return EnsembleComparison(
        n=n,
        seed=seed,
        target_trefoils=target_trefoils,
        moves=moves,
        closures=closures,
        tolerance=tolerance,
        radius_factor=radius_factor,
        budget=budget,
        build=build_id(),
        complete=complete,
        n_sampled=phantom.count,
        n_trefoils=n_trefoils,
        class_counts=class_counts,
        phantom_profile=phantom.result(),
        trefoil_profile=trefoil_profile,
        phantom_rg_mean=float(phantom_rg.mean),
        phantom_rg_se=float(phantom_rg.sem),
        trefoil_rg_mean=tre_rg_mean,
        trefoil_rg_se=tre_rg_se,
        trefoil_max_e2e=max_e2e,
        trefoil_max_e2e_k=max_k,
        effective_length_rg=eff_rg,
        effective_length_max_e2e=eff_max,
        trefoil_indices=tuple(trefoil_indices),
        knot_lengths=lengths,
        mean_knot_length=mean_len,
    )
