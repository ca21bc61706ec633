"""Predetermined sample distributions and conjugate mirroring."""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq
from scipy.special import ellipeinc

from ..core import FrequencyGrid, SampleSet


def _half_ellipse_x(c: float, n: int) -> np.ndarray:
    """x-coordinates of ``n`` points equally spaced in arc length on the upper half
    of the ellipse ``x = cos t, y = c sin t``, ordered from x = -1 to x = 1."""
    if c == 0.0:
        return np.linspace(-1.0, 1.0, n)
    # ds/dt = sqrt(1 - (1 - c^2) cos^2 t); with t = u + pi/2 this is the
    # incomplete elliptic integral of the second kind in u
    m = 1.0 - c * c
    quarter = ellipeinc(np.pi / 2, m)

    def arc(t):
        return ellipeinc(t - np.pi / 2, m) + quarter

    total = 2.0 * quarter
    x = np.empty(n)
    for i, target in enumerate(np.linspace(0.0, total, n)):
        if i == 0:
            t = 0.0
        elif i == n - 1:
            t = np.pi
        else:
            t = brentq(lambda tt: arc(tt) - target, 0.0, np.pi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        x[i] = -np.cos(t)
    # enforce exact mirror symmetry
    return 0.5 * (x - x[::-1])


def chebyshev_points(c: float, n: int, band: tuple[float, float]) -> np.ndarray:
    """``n`` frequencies of the "Cheb c" distribution mapped affinely onto ``band``.

    ``c`` is the ellipse radius along y (x radius 1); ``c = 0`` is the
    equidistant distribution and ``c = 1`` the classic Chebyshev (circle) one.
    """
    if c < 0:
        raise ValueError("ellipse radius must be non-negative")
    if n < 2:
        raise ValueError("need at least two points")
    lo, hi = band
    x = _half_ellipse_x(float(c), int(n))
    if c == 0.0:
        return np.linspace(lo, hi, n)
    return lo + 0.5 * (x + 1.0) * (hi - lo)


def snap_to_grid(freqs_hz, grid: FrequencyGrid) -> np.ndarray:
    """Grid indices nearest to ``freqs_hz``; a collision moves to the nearest free index."""
    f_grid = grid.freqs_hz
    freqs_hz = np.asarray(freqs_hz, dtype=float)
    if freqs_hz.size > f_grid.size:
        raise ValueError(f"{freqs_hz.size} points do not fit on a {f_grid.size}-point grid")
    taken = np.zeros(f_grid.size, dtype=bool)
    out = np.empty(freqs_hz.size, dtype=int)
    for n, f in enumerate(freqs_hz):
        order = np.argsort(np.abs(f_grid - f), kind="stable")
        idx = order[np.argmax(~taken[order])]
        taken[idx] = True
        out[n] = idx
    return np.sort(out)


def chebyshev_indices(c: float, n: int, grid: FrequencyGrid) -> np.ndarray:
    return snap_to_grid(chebyshev_points(c, n, (grid.f_min, grid.f_max)), grid)


def double_sided(samples: SampleSet) -> SampleSet:
    """Union of the samples and their mirrors ``(s*, S(s)*)``; already present points are skipped."""
    mirror_s = samples.s.conj()
    present = np.isin(mirror_s, samples.s)
    keep = ~present
    return SampleSet(
        np.concatenate([samples.s, mirror_s[keep]]),
        np.concatenate([samples.values, samples.values[keep].conj()]),
    )
