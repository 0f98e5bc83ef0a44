"""Central finite differences with one Richardson step.

Every derivative here is ``(4 D(h/2) - D(h)) / 3`` where ``D`` is the plain
central difference; the leading ``h^2`` error term cancels.
"""

from __future__ import annotations

import numpy as np


def step_size(x, rel_step: float) -> np.ndarray:
    """Per-coordinate step ``rel_step * max(|x_i|, 1)``."""
    x = np.asarray(x, dtype=float)
    return rel_step * np.maximum(np.abs(x), 1.0)


def partial(f, x, axis: int, rel_step: float = 1e-3):
    """Richardson-extrapolated central difference of ``f`` along ``axis`` at ``x``.

    ``f`` may return a scalar or an array.
    """
    x = np.asarray(x, dtype=float)
    h = step_size(x, rel_step)[axis]

    def central(hh):
        e = np.zeros_like(x)
        e[axis] = hh
        return (np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2 * hh)

    return (4.0 * central(0.5 * h) - central(h)) / 3.0


def gradient(f, x, rel_step: float = 1e-3) -> np.ndarray:
    """Stack of partials; the coordinate index is the leading axis."""
    x = np.asarray(x, dtype=float)
    return np.stack([np.asarray(partial(f, x, a, rel_step)) for a in range(x.shape[0])])


def second_central(f, x0: float, h: float, f0=None) -> float:
    """Richardson-extrapolated ``f''(x0)`` of a scalar function."""
    if f0 is None:
        f0 = f(x0)

    def d2(hh):
        return (f(x0 + hh) - 2.0 * f0 + f(x0 - hh)) / hh**2

    return (4.0 * d2(0.5 * h) - d2(h)) / 3.0
