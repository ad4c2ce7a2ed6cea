"""One-dimensional minimization used by the ECSI-based baseline."""
from __future__ import annotations

import math

import numpy as np

__all__ = ["golden_section", "grid_then_golden"]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, lo, hi, tol: float = 1e-6):
    """Vectorized golden-section search on brackets ``[lo, hi]``.

    ``f`` maps an array of abscissae (same shape as ``lo``) to values. The
    iteration count is set by the widest bracket. Returns ``(x, f(x))``.
    """
    a = np.array(lo, dtype=float, copy=True)
    b = np.array(hi, dtype=float, copy=True)
    width = float(np.max(b - a)) if a.size else 0.0
    steps = 0 if width <= tol else math.ceil(math.log(tol / width) / math.log(_INV_PHI))
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(steps):
        left = fc < fd
        # keep [a, d] where f(c) < f(d), otherwise [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = np.where(left, b - _INV_PHI * (b - a), d)
        new_d = np.where(left, c, a + _INV_PHI * (b - a))
        c, d = new_c, new_d
        fc, fd = np.where(left, f(c), fd), np.where(left, fc, f(d))
    x = 0.5 * (a + b)
    return x, f(x)


def grid_then_golden(f, step: float = 1e-3, tol: float = 1e-6, batch: int = 1):
    """Minimize ``f`` over (0, 1) from a uniform grid refined by golden section.

    ``f`` takes an array of shape (batch, k) and returns values of the same
    shape, so several independent problems are solved at once. The refined
    point replaces the best grid point only when it is no worse, which keeps
    the result below every grid value searched.

    Returns ``(x, fx)`` arrays of shape (batch,).
    """
    k = int(round(1.0 / step))
    grid = np.arange(1, k) * step
    vals = f(np.broadcast_to(grid, (batch, grid.size)))
    idx = np.argmin(vals, axis=1)
    best_x = grid[idx]
    best_f = vals[np.arange(batch), idx]
    lo = np.maximum(best_x - step, 1e-12)
    hi = np.minimum(best_x + step, 1.0 - 1e-12)

    def f_col(x):
        return f(x[:, None])[:, 0]

    x, fx = golden_section(f_col, lo, hi, tol)
    better = fx <= best_f
    return np.where(better, x, best_x), np.where(better, fx, best_f)
