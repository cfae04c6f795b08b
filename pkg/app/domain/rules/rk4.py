"""Fixed-step classical Runge-Kutta helpers shared by the characteristic solvers."""

import math
from typing import Callable

import numpy as np

Rhs = Callable[[float, np.ndarray], np.ndarray]


def time_grid(t_start: float, t_end: float, step: float) -> np.ndarray:
    """Uniform samples from t_start to t_end (either direction) with spacing at most step."""
    steps = max(1, math.ceil(abs(t_end - t_start) / step - 1e-9))
    return np.linspace(t_start, t_end, steps + 1)


def rk4_step(f: Rhs, t: float, z: np.ndarray, h: float) -> np.ndarray:
    half_dt = 0.5 * h
    k1 = f(t, z)
    k2 = f(t + half_dt, z + half_dt * k1)
    k3 = f(t + half_dt, z + half_dt * k2)
    k4 = f(t + h, z + h * k3)
    return z + (k1 + 2.0 * (k2 + k3) + k4) * h / 6.0
