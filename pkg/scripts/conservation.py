"""Energy bookkeeping of a random spring network under gravity.

For each step size, integrates the network and reports the relative drift
of the total energy, with and without pair damping.
"""

import argparse

import numpy as np

from granex import forces as fm
from granex.dynamics import energy_drift, simulate_nbody
from granex.pointsys import random_cloud


def network(n, seed, damping):
    rng = np.random.default_rng(seed)
    cloud = random_cloud(rng, n)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if j == i + 1 or rng.random() < 0.3]
    return cloud, [fm.PairSpring(pairs, 2.0, 0.8, damping), fm.UniformField([0, 0, -9.81])]


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--time", type=float, default=5.0)
    p.add_argument("--damping", type=float, default=0.2)
    args = p.parse_args()
    print(f"{'dt':>8} {'undamped drift':>15} {'damped E(T)-E(0)':>17} {'max rise':>10}")
    for dt in (4e-3, 2e-3, 1e-3, 5e-4):
        steps = int(round(args.time / dt))
        c, models = network(args.n, args.seed, 0.0)
        drift = energy_drift(simulate_nbody(c, models, dt, steps))
        c, models = network(args.n, args.seed, args.damping)
        e = simulate_nbody(c, models, dt, steps).columns["energy"]
        print(f"{dt:8.0e} {drift:15.3e} {e[-1] - e[0]:17.6f} {np.max(np.diff(e)):10.2e}")


if __name__ == "__main__":
    main()
