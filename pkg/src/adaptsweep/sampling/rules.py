"""Next-sample selection rules.

Every rule returns a fine-grid index drawn from the unsampled points; ties
resolve to the lowest frequency.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..core import BarycentricModel, FrequencyGrid
from ..loewner import LoewnerData, combine_theta, theta_grid
from ..metrics import DELTA, approx_error, pairwise_deviation

# default phases of the unitary 2x2 family
UNITARY_PHASES = (1.1051, -1.7482, 2.9750, 0.9596)


class SweepComplete(RuntimeError):
    """Every grid point has been sampled."""


def _candidates(sampled: np.ndarray) -> np.ndarray:
    free = ~np.asarray(sampled, dtype=bool)
    if not np.any(free):
        raise SweepComplete("all grid points are sampled")
    return free


def _argmax_free(score: np.ndarray, free: np.ndarray) -> int:
    masked = np.where(free, score, -np.inf)
    masked = np.where(np.isnan(masked), -np.inf, masked)
    return int(np.argmax(masked))


def _argmin_free(score: np.ndarray, free: np.ndarray) -> int:
    masked = np.where(free, score, np.inf)
    masked = np.where(np.isnan(masked), np.inf, masked)
    return int(np.argmin(masked))


# --------------------------------------------------------------------------- Vuillemin


def spectral_norm_trace(values: np.ndarray) -> np.ndarray:
    return np.linalg.norm(values, ord=2, axis=(1, 2))


def pick_vuillemin(f: np.ndarray, sampled: np.ndarray, iteration: int) -> int:
    """Strongest unsampled peak (even iterations) or valley (odd) of ``f``.

    Falls back to the other kind of extremum, then to the largest absolute
    forward difference of ``f``.
    """
    f = np.asarray(f, dtype=float)
    free = _candidates(sampled)
    inner = np.arange(1, f.size - 1)
    peaks = inner[(f[inner] > f[inner - 1]) & (f[inner] > f[inner + 1]) & free[inner]]
    valleys = inner[(f[inner] < f[inner - 1]) & (f[inner] < f[inner + 1]) & free[inner]]
    kinds = [(peaks, True), (valleys, False)]
    if iteration % 2:
        kinds.reverse()
    for idx, is_peak in kinds:
        if idx.size:
            vals = f[idx]
            # first index among equals keeps ties at the lowest frequency
            return int(idx[np.argmax(vals)] if is_peak else idx[np.argmin(vals)])
    slope = np.abs(np.diff(f))
    for j in np.argsort(-slope, kind="stable"):
        for cand in (j, j + 1):
            if free[cand]:
                return int(cand)
    raise SweepComplete("no free grid point")  # pragma: no cover


# --------------------------------------------------------------------------- Pradovera


def node_sum(model: BarycentricModel, s) -> np.ndarray:
    """``|sum_i b_i / (s - lambda_i)|``; infinite at the nodes."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    with np.errstate(divide="ignore", invalid="ignore"):
        total = np.sum(model.coeffs[None, :] / (s[:, None] - model.nodes[None, :]), axis=1)
    out = np.abs(total)
    hit = np.any(s[:, None] == model.nodes[None, :], axis=1)
    out[hit] = np.inf
    return out


def pick_pradovera(model: BarycentricModel, grid: FrequencyGrid, sampled: np.ndarray) -> int:
    free = _candidates(sampled)
    return _argmin_free(node_sum(model, grid.points), free)


# --------------------------------------------------------------------------- Theta I / II


@dataclass(frozen=True)
class GMatrixSet:
    G1: tuple[np.ndarray, ...]
    G2: tuple[np.ndarray, ...]
    mode: str = "uniform"
    seed: int | None = None

    def pairs(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """All G1 x G2 combinations (uniform mode) or the matched tau-pairs (unitary mode)."""
        if self.mode == "unitary":
            return list(zip(self.G1, self.G2))
        return list(itertools.product(self.G1, self.G2))


def make_g_matrices(seed: int | None, count: int = 6, m: int = 1, p: int | None = None) -> GMatrixSet:
    """``count // 2`` matrices each for G1 (p x m) and G2 (m x m), entries uniform on [-1, 1]."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if count < 2 or count % 2:
        raise ValueError("count must be even and >= 2")
    p = m if p is None else p
    rng = np.random.default_rng(seed)
    half = count // 2
    g1 = tuple(2.0 * rng.random((p, m)) - 1.0 for _ in range(half))
    g2 = tuple(2.0 * rng.random((m, m)) - 1.0 for _ in range(half))
    return GMatrixSet(g1, g2, "uniform", seed)


def unitary_g_matrices(count: int = 40, phases=UNITARY_PHASES) -> GMatrixSet:
    """2x2 unitary family ``[[a, b], [-b* e^{j theta}, a* e^{j theta}]]``, theta on [0, 2 pi]."""
    x, y, z, w = (np.exp(1j * ph) / np.sqrt(2.0) for ph in phases)
    g1, g2 = [], []
    for th in np.linspace(0.0, 2.0 * np.pi, count):
        e = np.exp(1j * th)
        g1.append(np.array([[w, z], [-np.conj(z) * e, np.conj(w) * e]]))
        g2.append(np.array([[x, y], [-np.conj(y) * e, np.conj(x) * e]]))
    return GMatrixSet(tuple(g1), tuple(g2), "unitary", None)


@dataclass
class ThetaPick:
    index: int
    deviation: np.ndarray  # max element-wise relative spread per grid point
    e_approx: np.ndarray
    d_max: float
    absolute: bool = False


def interpolant_family(data: LoewnerData, gset: GMatrixSet, grid: FrequencyGrid, pseudo: bool = False):
    ev = theta_grid(data, grid.points, pseudo)
    return np.stack([combine_theta(ev, g1, g2, data, grid.points) for g1, g2 in gset.pairs()])


def pick_theta1(
    data: LoewnerData,
    gset: GMatrixSet,
    grid: FrequencyGrid,
    sampled: np.ndarray,
    pseudo: bool = False,
) -> ThetaPick:
    """Grid point where the generating-system interpolants disagree the most."""
    free = _candidates(sampled)
    family = interpolant_family(data, gset, grid, pseudo)
    dev = pairwise_deviation(family, DELTA)
    with np.errstate(invalid="ignore"):
        score = np.max(np.nan_to_num(dev, nan=-np.inf), axis=(1, 2))
    absolute = False
    if not np.any(np.isfinite(score[free]) & (score[free] >= 0)):
        absolute = True
        with np.errstate(invalid="ignore"):
            spread = np.nanmax(np.abs(family[:, None] - family[None, :]), axis=(0, 1))
        score = np.max(np.nan_to_num(spread, nan=-np.inf), axis=(1, 2))
    idx = _argmax_free(score, free)
    finite = score[free & np.isfinite(score)]
    return ThetaPick(
        index=idx,
        deviation=score,
        e_approx=approx_error(family, DELTA),
        d_max=float(finite.max()) if finite.size else np.nan,
        absolute=absolute,
    )


def condition_trace(data: LoewnerData, grid: FrequencyGrid, pseudo: bool = False) -> np.ndarray:
    """``kappa(s) = ||Theta(s)||_2 ||Theta_bar(s)||_2`` on the grid (inf at nodes)."""
    ev = theta_grid(data, grid.points, pseudo)
    ok = np.all(np.isfinite(ev.theta), axis=(1, 2)) & np.all(np.isfinite(ev.theta_bar), axis=(1, 2))
    kappa = np.full(len(grid), np.inf)
    kappa[ok] = np.linalg.norm(ev.theta[ok], ord=2, axis=(1, 2)) * np.linalg.norm(
        ev.theta_bar[ok], ord=2, axis=(1, 2)
    )
    return kappa


def pick_theta2(data: LoewnerData, grid: FrequencyGrid, sampled: np.ndarray, pseudo: bool = False) -> int:
    free = _candidates(sampled)
    return _argmin_free(condition_trace(data, grid, pseudo), free)
