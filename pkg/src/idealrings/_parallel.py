"""Deterministic work distribution.

Jobs are pure functions of their arguments (substreams are derived from
the job index, never from shared state), and results are always merged in
job order.  The thread count therefore only affects scheduling; every
output byte is identical for any value.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence


def run_jobs(worker: Callable, jobs: Sequence, threads: int) -> list:
    """Run worker over jobs, returning results in job order."""
    if threads <= 1 or len(jobs) <= 1:
        return [worker(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, jobs))
