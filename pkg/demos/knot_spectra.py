"""Knot classification and closure spectra.

Classifies sampled rings by Alexander determinant, then opens a known
trefoil (drops its last vertex) and shows the closure spectrum: the
distribution of knot classes obtained by reclosing the open segment
through random points on a large surrounding sphere.  A segment that
still "contains" the knot stays majority-trefoil.

Run: python3 demos/knot_spectra.py  (writes knot_spectra.png here)
"""

from collections import Counter
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from idealrings import RngStream, classify_ring, closure_spectrum, ring_for_index
from idealrings.sampler import CLASSIFY_STREAM

N = 50
COUNT = 300
SEED = 42


def torus_trefoil(m=30):
    # (2,3) torus curve resampled to m points; edges are near-equal but
    # classification only needs the vertex geometry to be a trefoil.
    t = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
    pts = np.stack(
        [
            np.cos(2 * t) * (3 + np.cos(3 * t)),
            np.sin(2 * t) * (3 + np.cos(3 * t)),
            np.sin(3 * t),
        ],
        axis=1,
    )
    return pts


def main():
    root = RngStream(SEED)
    counts = Counter()
    for i in range(COUNT):
        ring = ring_for_index(SEED, i, N)
        counts[classify_ring(ring, root.child(CLASSIFY_STREAM, i)).label] += 1
    print(f"knot classes over {COUNT} sampled rings at n={N}:")
    for label, c in sorted(counts.items()):
        print(f"  {label:>8}: {c:4d}  ({100.0 * c / COUNT:.1f}%)")

    pts = torus_trefoil()
    opened = pts[:-1]  # drop one vertex: an open arc that still knots
    spectrum = closure_spectrum(opened, root.child(9))
    print("closure spectrum of an opened trefoil (100 closures):")
    for det, c in sorted(spectrum.counts.items()):
        print(f"  determinant {det}: {c}")
    print(f"  trefoil fraction {spectrum.trefoil_fraction:.2f}")

    fig, (ax1, ax2) = plt.subplots(
        1, 2, figsize=(10, 4), gridspec_kw={"width_ratios": [1.2, 1]}
    )
    dets = sorted(spectrum.counts)
    ax1.bar([str(d) for d in dets], [spectrum.counts[d] for d in dets])
    ax1.set_xlabel("knot determinant of closure")
    ax1.set_ylabel("closures (of 100)")
    ax1.set_title("closure spectrum, opened trefoil")

    ring_counts = sorted(counts.items())
    ax2.bar([l for l, _ in ring_counts], [c for _, c in ring_counts])
    ax2.set_ylabel(f"rings (of {COUNT})")
    ax2.set_title(f"sampled ring classes, n={N}")
    ax2.tick_params(axis="x", rotation=45)

    out = Path(__file__).with_name("knot_spectra.png")
    fig.savefig(out, dpi=120, bbox_inches="tight")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
