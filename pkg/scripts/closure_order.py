"""Step-halving study of the closure integrator on the isotropic case.

Prints the error at t = 1 against the closed form and the observed order.
"""

import argparse

import numpy as np

from granex.dynamics import ClosureSpec, ClosureState, closure_integrate, isotropic_solution


def final_error(n, b0, y0, h0):
    I = np.eye(3)
    init = ClosureState(np.zeros(3), np.zeros(3), I, b0 * I, y0 * I, h0 * I)
    rec = closure_integrate(ClosureSpec.isotropic(), init, 1.0 / n, n)
    b, y, h = isotropic_solution(1.0, b0, y0, h0)
    return max(abs(rec.columns["B"][-1, 0, 0] - b), abs(rec.columns["Y"][-1, 0, 0] - y),
               abs(rec.columns["H"][-1, 0, 0] - h))


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--b0", type=float, default=1.0)
    p.add_argument("--y0", type=float, default=0.5)
    p.add_argument("--h0", type=float, default=0.2)
    p.add_argument("--levels", type=int, default=6)
    args = p.parse_args()
    prev = None
    print(f"{'steps':>6} {'dt':>10} {'error':>12} {'order':>7}")
    for k in range(args.levels):
        n = 10 * 2 ** k
        err = final_error(n, args.b0, args.y0, args.h0)
        order = "" if prev is None else f"{np.log2(prev / err):7.3f}"
        print(f"{n:6d} {1 / n:10.2e} {err:12.3e} {order:>7}")
        prev = err


if __name__ == "__main__":
    main()
