"""Top-bin index of agitation histograms for random clouds.

Compares the top index on bins of normalised energy xi with the index on
bins of energy share (fraction of the total agitation energy), and with
the mass-weighted bound (J - 1) delta W_J <= 1.
"""

import argparse

import numpy as np

from granex.histogram import histogram
from granex.pointsys import random_cloud


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--clouds", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)
    clouds = [random_cloud(rng, int(rng.integers(5, 300))) for _ in range(args.clouds)]
    print(f"{'delta':>6} {'1/delta':>8} {'max J-1 (xi)':>13} {'max J-1 (share)':>16} {'max (J-1)dW_J':>14}")
    for delta in (0.05, 0.1, 0.5):
        hs = [histogram(c, delta) for c in clouds]
        print(f"{delta:6.2f} {1 / delta:8.1f} {max(h.top_bin - 1 for h in hs):13d} "
              f"{max(h.share_top_bin - 1 for h in hs):16d} "
              f"{max((h.top_bin - 1) * delta * h.top_mass_fraction for h in hs):14.4f}")


if __name__ == "__main__":
    main()
