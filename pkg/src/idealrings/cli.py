"""Command-line interface: sampling, profiling, knot analysis, studies.

Output bytes depend only on the flags and seed.  Thread count changes
scheduling, never content; no timestamps are emitted.  Exit codes:
0 success, 1 internal failure, 2 invalid configuration or input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import nullcontext
from pathlib import Path

from idealrings._parallel import run_jobs
from idealrings.experiments import (
    CHUNK,
    run_convergence,
    run_trefoil_study,
    write_json,
)
from idealrings.geometry import Ring
from idealrings.io import (
    MalformedInputError,
    read_polygons,
    write_polygons_json,
    write_polygons_text,
)
from idealrings.knots import classify_ring, knot_length
from idealrings.sampler import (
    CLASSIFY_STREAM,
    KNOT_SCAN_STREAM,
    RING_STREAM,
    MixPolicy,
    RngStream,
    ring_for_index,
    sample_ring,
)
from idealrings.stats import ProfileAccumulator, write_profile_csv


def _parse_sizes(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        ) from None
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return sizes


def _check_ring_n(n: int) -> None:
    if n < 4 or n % 2:
        raise ValueError(
            f"--n must be an even number of at least 4 (edges come in "
            f"antipodal pairs), got {n}"
        )


def _check_positive(value, flag: str) -> None:
    if value <= 0:
        raise ValueError(f"{flag} must be positive, got {value}")


def _moves_for(args) -> int:
    if args.moves is None:
        return MixPolicy.default(args.n).moves
    _check_positive(args.moves, "--moves")
    return args.moves


def _open_out(path):
    if path is None:
        return nullcontext(sys.stdout)
    return open(path, "w", newline="")


# ---------------------------------------------------------------------------
# Subcommands


def cmd_sample(args) -> int:
    _check_ring_n(args.n)
    _check_positive(args.count, "--count")
    moves = _moves_for(args)
    policy = MixPolicy(moves)
    rings = [
        ring_for_index(args.seed, i, args.n, policy) for i in range(args.count)
    ]
    with _open_out(args.out) as out:
        if args.format == "json":
            write_polygons_json(out, rings)
        else:
            write_polygons_text(out, rings)
    return 0


def _profile_chunk(job) -> ProfileAccumulator:
    seed, n, moves, lo, hi = job
    root = RngStream(seed)
    policy = MixPolicy(moves)
    acc = ProfileAccumulator(n)
    for i in range(lo, hi):
        acc.push_ring(sample_ring(n, root.child(RING_STREAM, i), policy))
    return acc


def cmd_profile(args) -> int:
    _check_ring_n(args.n)
    _check_positive(args.count, "--count")
    moves = _moves_for(args)
    jobs = [
        (args.seed, args.n, moves, lo, min(lo + CHUNK, args.count))
        for lo in range(0, args.count, CHUNK)
    ]
    acc = ProfileAccumulator(args.n)
    for part in run_jobs(_profile_chunk, jobs, args.threads):
        acc.merge(part)
    profile = acc.result()
    with _open_out(args.out) as out:
        if args.format == "json":
            write_json(
                out,
                {
                    "kind": "profile",
                    "seed": int(args.seed),
                    "parameters": {
                        "n": int(args.n),
                        "count": int(args.count),
                        "moves": int(moves),
                    },
                    "profile": {
                        "n": int(profile.n),
                        "count": int(profile.count),
                        "k": [int(k) for k in profile.ks],
                        "e2e_mean": [float(x) for x in profile.e2e_mean],
                        "e2e_se": [float(x) for x in profile.e2e_se],
                        "rg_mean": [float(x) for x in profile.rg_mean],
                        "rg_se": [float(x) for x in profile.rg_se],
                        "analytic_e2e": [float(x) for x in profile.analytic_e2e_row()],
                        "analytic_rg": [float(x) for x in profile.analytic_rg_row()],
                    },
                },
            )
        else:
            write_profile_csv(out, profile, include_open=True)
    return 0


def _classify_job(job) -> dict:
    seed, index, edges, closures, tolerance, radius_factor, want_length = job
    ring = Ring(edges)
    root = RngStream(seed)
    cls = classify_ring(ring, root.child(CLASSIFY_STREAM, index))
    record = {
        "index": index,
        "class": cls.label,
        "determinant": cls.determinant,
    }
    if want_length and cls.is_trefoil:
        result = knot_length(
            ring,
            root.child(KNOT_SCAN_STREAM, index),
            closures_per_segment=closures,
            tolerance=tolerance,
            radius_factor=radius_factor,
        )
        record["knot_length"] = result.length
    return record


def cmd_knots(args) -> int:
    try:
        with open(args.input, "r") as fh:
            rings = read_polygons(fh)
    except OSError as exc:
        raise MalformedInputError(f"cannot read {args.input}: {exc}") from None
    jobs = [
        (
            args.seed,
            i,
            ring.edges,
            args.closures,
            args.tolerance,
            args.radius_factor,
            args.knot_length,
        )
        for i, ring in enumerate(rings)
    ]
    records = run_jobs(_classify_job, jobs, args.threads)
    with _open_out(args.out) as out:
        for record in records:
            out.write(json.dumps(record, sort_keys=True) + "\n")
    return 0


def read_knot_lines(fileobj) -> list[dict]:
    """Parse the JSON-lines output of the knots subcommand."""
    records = []
    for lineno, line in enumerate(fileobj, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"line {lineno}: {exc.msg}") from None
    return records


def cmd_converge(args) -> int:
    _check_ring_n(args.n)
    _check_positive(args.moves, "--moves")
    _check_positive(args.replicates, "--replicates")
    report = run_convergence(
        n=args.n,
        moves=args.moves,
        sizes=args.sizes,
        replicates=args.replicates,
        seed=args.seed,
        threads=args.threads,
    )
    with _open_out(args.out) as out:
        if args.format == "csv":
            report.write_csv(out)
        else:
            write_json(out, report.to_json_dict())
    return 0


def cmd_trefoil_study(args) -> int:
    _check_ring_n(args.n)
    _check_positive(args.target, "--target")
    moves = _moves_for(args)
    study = run_trefoil_study(
        n=args.n,
        target_trefoils=args.target,
        seed=args.seed,
        moves=moves,
        closures=args.closures,
        tolerance=args.tolerance,
        radius_factor=args.radius_factor,
        threads=args.threads,
        knot_lengths=not args.skip_knot_lengths,
    )
    if args.format == "csv":
        if args.out is None:
            raise ValueError(
                "--format csv for trefoil-study needs --out; profiles are "
                "written to sibling .phantom.csv and .trefoil.csv files"
            )
        base = Path(args.out)
        with open(base, "w", newline="") as out:
            study.write_summary_csv(out)
        with open(base.with_suffix(".phantom.csv"), "w", newline="") as out:
            write_profile_csv(out, study.phantom_profile, include_open=False)
        if study.trefoil_profile is not None:
            with open(base.with_suffix(".trefoil.csv"), "w", newline="") as out:
                write_profile_csv(out, study.trefoil_profile, include_open=False)
    else:
        with _open_out(args.out) as out:
            write_json(out, study.to_json_dict())
    return 0 if study.complete else 1


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="idealrings",
        description=(
            "Monte Carlo sampling and shape/knot analysis of closed "
            "equilateral polygons (ideal rings)."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(
            name,
            help=help_text,
            formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        )
        p.set_defaults(func=func)
        p.add_argument("--seed", type=int, default=0, help="root RNG seed")
        p.add_argument(
            "--out", default=None, help="output path (default: stdout)"
        )
        p.add_argument(
            "--threads",
            type=int,
            default=os.cpu_count() or 1,
            help="worker processes; never affects output bytes",
        )
        return p

    def add_ring_opts(p, moves_default=None):
        p.add_argument("--n", type=int, default=50, help="edges per ring (even)")
        if moves_default is None:
            p.add_argument(
                "--moves",
                type=int,
                default=None,
                help="mixing moves per ring (default: 6n)",
            )
        else:
            p.add_argument(
                "--moves", type=int, default=moves_default,
                help="mixing moves per ring",
            )

    def add_knot_opts(p):
        p.add_argument(
            "--closures", type=int, default=100,
            help="closure trials per spectrum",
        )
        p.add_argument(
            "--tolerance", type=float, default=0.5,
            help="majority fraction required of a spectrum verdict",
        )
        p.add_argument(
            "--radius-factor", type=float, default=10.0,
            help="closure sphere radius as a multiple of segment extent",
        )

    p = add("sample", cmd_sample, "write sampled ring coordinates")
    add_ring_opts(p)
    p.add_argument("--count", type=int, default=10, help="number of rings")
    p.add_argument(
        "--format", choices=("csv", "json"), default="csv",
        help="csv = plain-text x y z records",
    )

    p = add("profile", cmd_profile, "estimate shape profile vs closed forms")
    add_ring_opts(p)
    p.add_argument("--count", type=int, default=1000, help="number of rings")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = add("knots", cmd_knots, "classify polygons from a file, JSON lines out")
    p.add_argument("input", help="polygon file (text or JSON)")
    add_knot_opts(p)
    p.add_argument(
        "--knot-length",
        action="store_true",
        help="also measure knot length for trefoil-classified rings",
    )

    p = add("converge", cmd_converge, "error of the gyration estimator vs ensemble size")
    add_ring_opts(p, moves_default=150)
    p.add_argument(
        "--sizes",
        type=_parse_sizes,
        default=(10, 100, 1000, 10000, 100000),
        help="comma-separated ensemble sizes",
    )
    p.add_argument("--replicates", type=int, default=10, help="ensembles per size")
    p.add_argument("--format", choices=("csv", "json"), default="json")

    p = add("trefoil-study", cmd_trefoil_study, "compare all rings vs trefoil subset")
    add_ring_opts(p)
    p.add_argument("--target", type=int, default=200, help="trefoils to collect")
    add_knot_opts(p)
    p.add_argument(
        "--skip-knot-lengths",
        action="store_true",
        help="skip the per-trefoil knot length scan",
    )
    p.add_argument("--format", choices=("csv", "json"), default="json")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MalformedInputError as exc:
        print(f"idealrings: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"idealrings: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"idealrings: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
