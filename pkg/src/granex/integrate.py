"""Classical fixed-step fourth-order Runge-Kutta."""

from __future__ import annotations

import numpy as np


class DivergenceError(RuntimeError):
    def __init__(self, step: int, what: str = "state"):
        super().__init__(f"non-finite {what} at step {step}")
        self.step = step


def rk4_step(rhs, t: float, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(t, y)
    k2 = rhs(t + dt / 2, y + dt / 2 * k1)
    k3 = rhs(t + dt / 2, y + dt / 2 * k2)
    k4 = rhs(t + dt, y + dt * k3)
    return y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def check_step_args(dt: float, steps: int):
    if not (dt > 0.0 and np.isfinite(dt)):
        raise ValueError("dt must be positive")
    if int(steps) < 1:
        raise ValueError("steps must be at least 1")
