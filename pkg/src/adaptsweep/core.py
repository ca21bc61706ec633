"""Shared domain types: frequency grids, sample sets and evaluable surrogate models.

Frequencies are carried as complex Laplace values ``s = j*omega`` everywhere;
Hz only appear at I/O boundaries (``FrequencyGrid.freqs_hz``, Touchstone, CSV).
Response values are stored as arrays of shape ``(n_points, p, m)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np

TWO_PI = 2.0 * np.pi

# relative distance to a node below which barycentric evaluation returns the node value
NODE_TOL = 1e-13


class SingularResolventError(np.linalg.LinAlgError):
    """Raised when ``sI - A`` is numerically singular at an evaluation point."""

    def __init__(self, s: complex, distance: float):
        super().__init__(f"resolvent singular at s={s!r} (nearest eigenvalue at distance {distance:.3e})")
        self.s = s
        self.distance = distance


@dataclass(frozen=True)
class FrequencyGrid:
    """Ordered set of purely imaginary evaluation points ``s'_l = j*2*pi*f_l``."""

    points: np.ndarray
    hz: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).copy()
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("a frequency grid needs at least two points")
        if np.any(pts.real != 0.0):
            raise ValueError("grid points must lie on the imaginary axis")
        if np.any(np.diff(pts.imag) <= 0):
            raise ValueError("grid frequencies must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        # Hz values are kept as given so band edges round-trip exactly
        hz = pts.imag / TWO_PI if self.hz is None else np.asarray(self.hz, dtype=float).copy()
        if hz.shape != pts.shape:
            raise ValueError("hz must match points")
        hz.setflags(write=False)
        object.__setattr__(self, "hz", hz)

    @classmethod
    def from_hz(cls, freqs_hz) -> FrequencyGrid:
        f = np.asarray(freqs_hz, dtype=float)
        return cls(1j * TWO_PI * f, f)

    @property
    def freqs_hz(self) -> np.ndarray:
        return self.hz

    @property
    def f_min(self) -> float:
        return float(self.freqs_hz[0])

    @property
    def f_max(self) -> float:
        return float(self.freqs_hz[-1])

    @property
    def omega(self) -> np.ndarray:
        return self.points.imag

    def __len__(self) -> int:
        return self.points.size

    def index_of(self, s: complex, rtol: float = 1e-12) -> int:
        """Grid index of ``s``; raises ``KeyError`` if ``s`` is not a grid point."""
        scale = max(abs(self.points[-1]), 1.0)
        i = int(np.argmin(np.abs(self.points - s)))
        if abs(self.points[i] - s) > rtol * scale:
            raise KeyError(f"{s!r} is not on the frequency grid")
        return i


def make_grid(f_min: float, f_max: float, n_points: int) -> FrequencyGrid:
    """Equidistant grid ``2*pi*j*linspace(f_min, f_max, n_points)``."""
    if int(n_points) != n_points or n_points < 2:
        raise ValueError(f"grid needs an integer count >= 2, got {n_points!r}")
    if not f_min < f_max:
        raise ValueError(f"reversed or empty band [{f_min}, {f_max}]")
    return FrequencyGrid.from_hz(np.linspace(f_min, f_max, int(n_points)))


@dataclass(frozen=True)
class SampleSet:
    """Ordered pairs ``(s_i, S(s_i))`` with all values sharing one ``(p, m)`` shape."""

    s: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.s, dtype=complex).reshape(-1).copy()
        vals = np.asarray(self.values, dtype=complex).copy()
        if vals.ndim == 1:
            vals = vals[:, None, None]
        if vals.ndim != 3 or vals.shape[0] != s.size:
            raise ValueError(f"values must have shape (N, p, m) with N={s.size}, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("response values must be finite")
        if np.unique(s).size != s.size:
            raise ValueError("sample frequencies must be distinct")
        s.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "values", vals)

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @property
    def m(self) -> int:
        return self.values.shape[2]

    def __len__(self) -> int:
        return self.s.size

    def sorted(self) -> SampleSet:
        """Copy sorted by angular frequency (imaginary part), stable."""
        order = np.argsort(self.s.imag, kind="stable")
        return SampleSet(self.s[order], self.values[order])

    def subset(self, idx) -> SampleSet:
        return SampleSet(self.s[idx], self.values[idx])

    def append(self, s: complex, value) -> SampleSet:
        value = np.asarray(value, dtype=complex).reshape(1, self.p, self.m)
        return SampleSet(np.append(self.s, s), np.concatenate([self.values, value]))


@runtime_checkable
class SurrogateModel(Protocol):
    """Anything evaluable on complex frequencies, returning ``(n, p, m)`` arrays."""

    form: str

    @property
    def shape(self) -> tuple[int, int]: ...

    def evaluate(self, s) -> np.ndarray: ...


@dataclass(frozen=True)
class StateSpaceModel:
    """``H(s) = C (sI - A)^{-1} B + D``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    rank: int | None = None
    form: str = field(default="state-space", init=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.D.shape

    @property
    def order(self) -> int:
        return self.A.shape[0]

    def poles(self) -> np.ndarray:
        return np.linalg.eigvals(self.A)

    def evaluate(self, s, chunk: int = 32) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        n = self.order
        out = np.empty((s.size, *self.shape), dtype=complex)
        if n == 0:
            out[:] = self.D
            return out
        eig = np.linalg.eigvals(self.A)
        dist = np.min(np.abs(s[:, None] - eig[None, :]), axis=1)
        scale = np.maximum(np.max(np.abs(eig)), 1.0)
        bad = dist <= 1e-13 * scale
        if np.any(bad):
            i = int(np.argmax(bad))
            raise SingularResolventError(complex(s[i]), float(dist[i]))
        eye = np.eye(n)
        # bounded batches keep the stacked (chunk, n, n) systems small
        step = max(1, min(chunk, int(4e6 // max(n * n, 1))))
        for lo in range(0, s.size, step):
            sl = slice(lo, lo + step)
            lhs = s[sl, None, None] * eye - self.A
            try:
                x = np.linalg.solve(lhs, np.broadcast_to(self.B, (lhs.shape[0], *self.B.shape)))
            except np.linalg.LinAlgError as exc:
                raise SingularResolventError(complex(s[lo]), 0.0) from exc
            out[sl] = self.C @ x + self.D
        return out


@dataclass(frozen=True)
class PoleResidueModel:
    """``h_ij(s) = sum_n r_nij / (s - a_n) + d_ij + s e_ij`` with poles shared by all entries."""

    poles: np.ndarray
    residues: np.ndarray  # (N, p, m)
    d: np.ndarray  # (p, m)
    e: np.ndarray  # (p, m)
    form: str = field(default="pole-residue", init=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.d.shape

    @property
    def order(self) -> int:
        return self.poles.size

    def evaluate(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        basis = 1.0 / (s[:, None] - self.poles[None, :])
        return (
            np.einsum("ln,nij->lij", basis, self.residues)
            + self.d[None]
            + s[:, None, None] * self.e[None]
        )


@dataclass(frozen=True)
class BarycentricModel:
    """``H(s) = sum_i b_i w_i/(s - lambda_i) / sum_i b_i/(s - lambda_i)``."""

    nodes: np.ndarray
    values: np.ndarray  # (k, p, m)
    coeffs: np.ndarray
    form: str = field(default="barycentric", init=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape[1:]

    def evaluate(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        diff = s[:, None] - self.nodes[None, :]
        near = np.abs(diff) <= NODE_TOL * np.maximum(np.abs(self.nodes)[None, :], 1e-300)
        with np.errstate(divide="ignore", invalid="ignore"):
            weights = self.coeffs[None, :] / diff
            num = np.einsum("li,ipm->lpm", weights, self.values)
            den = weights.sum(axis=1)
            out = num / den[:, None, None]
        rows, cols = np.nonzero(near)
        out[rows] = self.values[cols]
        return out


def evaluate_model(model: SurrogateModel, grid: FrequencyGrid | np.ndarray) -> np.ndarray:
    """Evaluate ``model`` at every grid point; returns ``(M_s, p, m)``."""
    points = grid.points if isinstance(grid, FrequencyGrid) else np.asarray(grid, dtype=complex)
    return model.evaluate(points)
