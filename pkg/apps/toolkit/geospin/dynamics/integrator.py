"""Classical fixed-step fourth-order Runge-Kutta.

The state is any numpy array (real or complex). Sample times are
t0 + i·h; when h does not divide the interval the last step is shortened so
the final sample lands exactly on t_end.
"""

import math
from typing import Callable, Iterator

import numpy as np

from geospin.core.errors import InvalidParameterError

Rhs = Callable[[float, np.ndarray], np.ndarray]


def rk4_step(f: Rhs, t: float, y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_count(t0: float, t_end: float, h: float) -> int:
    """Number of steps from t0 to t_end, the last one possibly shorter."""
    if not (h > 0 and math.isfinite(h)):
        raise InvalidParameterError("h", h, "step must be positive")
    if not t_end > t0:
        raise InvalidParameterError("t_end", t_end, f"must exceed the start time {t0}")
    # tolerate rounding in (t_end - t0)/h so 1.0/1e-3 is 1000 steps, not 1001
    steps = (t_end - t0) / h
    whole = math.floor(steps + 1e-9)
    count = whole if abs(steps - whole) <= 1e-9 * max(1.0, steps) else whole + 1
    return max(count, 1)


def sample_times(t0: float, t_end: float, h: float) -> list[float]:
    n = step_count(t0, t_end, h)
    return [t0 + i * h for i in range(n)] + [t_end]


def rk4_path(f: Rhs, t0: float, y0: np.ndarray, t_end: float, h: float) -> Iterator[tuple[float, np.ndarray]]:
    """Yield (t, y) at every sample time, starting with (t0, y0)."""
    times = sample_times(t0, t_end, h)
    y = np.array(y0, copy=True)
    yield times[0], y
    for t, t_next in zip(times, times[1:]):
        y = rk4_step(f, t, y, t_next - t)
        yield t_next, y
