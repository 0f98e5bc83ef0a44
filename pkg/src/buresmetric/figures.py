"""Tabulated data behind the four figures, and deterministic CSV output."""

from __future__ import annotations

import csv
import os
import tempfile
from pathlib import Path

import numpy as np

from .bures import commuting_distance_grid
from .ensemble import reference_g_bb
from .errors import InvariantViolation
from .geometry import EXCESS_ATOL, cumulative_lengths

FIG1_RANGE = (0.05, 10.0)
FIG1_POINTS = 400
SURFACE_BETA_MAX = 5.0
SURFACE_GRID = 100
SURFACE_N = 100


def worker_count() -> int:
    """Worker hint from ``BURES_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("BURES_THREADS", "1")))
    except ValueError:
        return 1


def surface_betas(grid: int = SURFACE_GRID, beta_max: float = SURFACE_BETA_MAX) -> np.ndarray:
    """``grid`` equally spaced values covering ``(0, beta_max]``."""
    return beta_max * np.arange(1, grid + 1) / grid


def fig1_data(points: int = FIG1_POINTS, lo: float = FIG1_RANGE[0], hi: float = FIG1_RANGE[1]):
    """``g_bb`` of ``zeta_n`` for ``n = 2..7`` against ``beta``."""
    betas = np.linspace(lo, hi, points)
    cols = [betas] + [reference_g_bb(n, betas) for n in range(2, 8)]
    header = ["beta"] + [f"g_bb_n{n}" for n in range(2, 8)]
    return header, np.column_stack(cols)


def _pairs(betas):
    b1, b2 = np.meshgrid(betas, betas, indexing="ij")
    return b1, b2


def fig2_data(grid: int = SURFACE_GRID, n: int = SURFACE_N):
    """Bures distance surface between ``zeta_n(beta1)`` and ``zeta_n(beta2)``."""
    b1, b2 = _pairs(surface_betas(grid))
    d = commuting_distance_grid(n, b1, b2)
    return ["beta1", "beta2", "d_bures"], np.column_stack([b1.ravel(), b2.ravel(), d.ravel()])


def excess_data(n: int, grid: int = SURFACE_GRID, workers: int | None = None):
    """Arc length of ``sqrt(g_bb)`` minus Bures distance on the ``(beta1, beta2)`` grid."""
    betas = surface_betas(grid)
    lengths = cumulative_lengths(n, betas, workers=worker_count() if workers is None else workers)
    b1, b2 = _pairs(betas)
    l1, l2 = _pairs(lengths)
    delta = np.abs(l2 - l1) - commuting_distance_grid(n, b1, b2)
    if np.min(delta) < -EXCESS_ATOL:
        raise InvariantViolation(f"arc length below Bures distance for n={n}: min excess {np.min(delta):.3e}")
    return ["beta1", "beta2", "excess"], np.column_stack([b1.ravel(), b2.ravel(), delta.ravel()])


def figure_data(which: int, grid: int | None = None):
    if which == 1:
        return fig1_data() if grid is None else fig1_data(points=grid)
    if which == 2:
        return fig2_data() if grid is None else fig2_data(grid=grid)
    if which in (3, 4):
        n = 2 if which == 3 else 3
        return excess_data(n) if grid is None else excess_data(n, grid=grid)
    raise ValueError(f"figures are numbered 1-4, got {which!r}")


def format_float(x: float) -> str:
    return f"{x:.17g}"


def write_csv(path, header, rows) -> Path:
    """Write ``rows`` under ``header`` atomically (temp file in the same directory, then rename)."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in np.asarray(rows, dtype=float):
                writer.writerow([format_float(v) for v in row])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
