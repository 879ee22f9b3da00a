"""Catalogue of agitation-energy densities: moments and weak temperatures.

Writes one CSV row per density with the computed weak temperature, its
quadrature cross-check and the tabulated closed form where one exists.
"""

import argparse
import csv
import math
import sys

from granex import distrib as ds
from granex.special import solve_bose_fermi

CASES = [
    ("canonical", {}), ("power_law", {}),
    ("piecewise_constant", {"beta": 0.5}),
    ("piecewise_linear", {"beta": 1.5}), ("piecewise_linear", {"beta": 3.0}),
    ("piecewise_exponential", {"xi2": 1.5}), ("piecewise_exponential", {"xi2": 3.0}),
    ("sinusoidal", {"alpha": -0.5}), ("sinusoidal", {"alpha": 1.0}),
    ("bose", {}), ("fermi", {}),
]


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", help="CSV path (default: stdout)")
    args = p.parse_args()
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh)
    w.writerow(["name", "params", "m0", "m1", "theta_w", "theta_w_quadrature", "theta_w_table"])
    for name, params in CASES:
        d = ds.make(name, **params)
        m0, m1 = ds.moments(d)
        tw = ds.theta_w(d).value
        tq = ds.theta_w_quadrature(d)
        printed = ds.printed_theta_w(d)
        w.writerow([name, ";".join(f"{k}={v:g}" for k, v in d.params().items()),
                    f"{m0:.12f}", f"{m1:.12f}", f"{tw:.10g}", f"{tq:.10g}",
                    "" if printed is None or math.isinf(printed) else f"{printed:.10g}"])
    bose, fermi = solve_bose_fermi()
    print(f"# roots: bose {bose:.10f}  fermi {fermi:.10f}", file=sys.stderr)
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
