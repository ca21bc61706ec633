"""Vector fitting with one pole set shared by every matrix entry.

Each iteration solves the linearised problem

    sum_n r_n/(s - a_n) + d + s e - h(s) sum_n rt_n/(s - a_n) ~= h(s)

in the least-squares sense over all entries (the sigma residues ``rt`` are
common to all entries), then relocates the poles to ``eig(diag(a) - 1 rt^T)``.
Per-entry unknowns are eliminated with a QR step so the shared sigma system
stays small.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import PoleResidueModel, SampleSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VfConfig:
    order: int
    iterations: int = 10
    stable: bool = True
    # starting poles: real part = -imag * damping
    damping: float = 0.01

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("vector fitting order must be >= 1")
        if self.iterations < 1:
            raise ValueError("vector fitting needs at least one iteration")


@dataclass
class VfStep:
    sigma_residues: np.ndarray
    residues: np.ndarray  # (N, n_entries)
    d: np.ndarray
    e: np.ndarray
    rank: int
    n_unknowns: int
    residual: float

    @property
    def rank_deficient(self) -> bool:
        return self.rank < self.n_unknowns


@dataclass
class VfResult:
    model: PoleResidueModel
    pole_history: list[np.ndarray] = field(default_factory=list)
    ill_conditioned: list[str] = field(default_factory=list)


def initial_poles(config: VfConfig | int, band: tuple[float, float]) -> np.ndarray:
    """Starting poles for an angular-frequency band ``(w_min, w_max)``.

    Conjugate pairs with imaginary parts spread linearly over the band and
    real parts ``-damping * imag``; odd orders add a real pole at
    ``-damping * (band centre)``.
    """
    if isinstance(config, int):
        config = VfConfig(order=config)
    w_lo, w_hi = float(band[0]), float(band[1])
    if w_hi < w_lo:
        raise ValueError("empty band")
    n_pairs = config.order // 2
    imag = np.linspace(w_lo, w_hi, n_pairs)
    # a pair at DC would collapse onto the real axis
    imag = np.where(imag == 0.0, max(w_hi, 1.0) * 1e-3, imag)
    upper = -config.damping * imag + 1j * imag
    poles = np.empty(config.order, dtype=complex)
    poles[0 : 2 * n_pairs : 2] = upper
    poles[1 : 2 * n_pairs : 2] = upper.conj()
    if config.order % 2:
        poles[-1] = -config.damping * 0.5 * (w_lo + w_hi)
    return poles


def _basis(s: np.ndarray, poles: np.ndarray) -> np.ndarray:
    """Columns ``1/(s - a_n)``, ``1``, ``s``."""
    return np.hstack([1.0 / (s[:, None] - poles[None, :]), np.ones((s.size, 1)), s[:, None]])


def _scaled_lstsq(a: np.ndarray, b: np.ndarray):
    norms = np.linalg.norm(a, axis=0)
    norms[norms == 0] = 1.0
    x, _, rank, sv = np.linalg.lstsq(a / norms, b, rcond=None)
    x = x / (norms[:, None] if x.ndim == 2 else norms)
    return x, int(rank), sv


def _entries(samples: SampleSet) -> np.ndarray:
    return samples.values.reshape(len(samples), -1)


def vf_iterate(samples: SampleSet, poles: np.ndarray) -> VfStep:
    """One linearised solve over all entries of ``samples`` with fixed ``poles``.

    Every unknown (``r_n`` per entry, shared ``rt_n``, ``d`` and ``e`` per
    entry) is solved for simultaneously. Rank deficiency is logged and
    reported on the returned step, not raised.
    """
    s = samples.s
    h = _entries(samples)
    n_pts, n_ent = h.shape
    N = poles.size
    phi = _basis(s, poles)  # (n_pts, N + 2)
    nb = phi.shape[1]
    n_unknowns = n_ent * nb + N
    if 2 * n_pts * n_ent < n_unknowns:
        raise ValueError(
            f"{n_pts * n_ent} equations are too few for {n_unknowns} unknowns"
        )
    a = np.zeros((n_pts * n_ent, n_unknowns), dtype=complex)
    for k in range(n_ent):
        rows = slice(k * n_pts, (k + 1) * n_pts)
        a[rows, k * nb : (k + 1) * nb] = phi
        a[rows, n_ent * nb :] = -h[:, k, None] * phi[:, :N]
    b = h.T.reshape(-1)
    x, rank, _ = _scaled_lstsq(a, b)
    if rank < n_unknowns:
        logger.warning("vector fitting system rank %d < %d unknowns", rank, n_unknowns)
    per = x[: n_ent * nb].reshape(n_ent, nb).T
    resid = float(np.linalg.norm(a @ x - b))
    return VfStep(
        sigma_residues=x[n_ent * nb :],
        residues=per[:N],
        d=per[N],
        e=per[N + 1],
        rank=rank,
        n_unknowns=n_unknowns,
        residual=resid,
    )


def _sigma_residues(samples: SampleSet, poles: np.ndarray) -> tuple[np.ndarray, int, int]:
    """Shared sigma residues with per-entry unknowns eliminated by QR."""
    s = samples.s
    h = _entries(samples)
    N = poles.size
    phi = _basis(s, poles)
    nb = phi.shape[1]
    blocks, rhs = [], []
    for k in range(h.shape[1]):
        a = np.hstack([phi, -h[:, k, None] * phi[:, :N]])
        norms = np.linalg.norm(a, axis=0)
        norms[norms == 0] = 1.0
        q, r = np.linalg.qr(np.hstack([a / norms, h[:, k, None]]), mode="reduced")
        # rows of R past the per-entry block only involve the shared unknowns
        blocks.append(r[nb : nb + N, nb : nb + N] * norms[nb:])
        rhs.append(r[nb : nb + N, -1])
    big = np.vstack(blocks)
    x, rank, _ = _scaled_lstsq(big, np.concatenate(rhs))
    return x, rank, N


def relocate_poles(poles: np.ndarray, sigma_residues: np.ndarray, stable: bool = True) -> np.ndarray:
    """Zeros of sigma: ``eig(diag(poles) - ones * sigma_residues^T)``."""
    poles = np.asarray(poles, dtype=complex)
    rt = np.asarray(sigma_residues, dtype=complex)
    if poles.shape != rt.shape:
        raise ValueError("pole and sigma-residue counts differ")
    new = np.linalg.eigvals(np.diag(poles) - np.outer(np.ones(poles.size), rt))
    if stable:
        new = np.where(new.real > 0, -new.real + 1j * new.imag, new)
    return new


def fit_residues(samples: SampleSet, poles: np.ndarray) -> tuple[PoleResidueModel, int]:
    """Final linear solve for residues, ``d`` and ``e`` with the poles held fixed."""
    h = _entries(samples)
    phi = _basis(samples.s, poles)
    x, rank, _ = _scaled_lstsq(phi, h)
    N = poles.size
    p, m = samples.p, samples.m
    model = PoleResidueModel(
        poles=np.asarray(poles, dtype=complex).copy(),
        residues=x[:N].reshape(N, p, m),
        d=x[N].reshape(p, m),
        e=x[N + 1].reshape(p, m),
    )
    return model, rank


def vf_fit(samples: SampleSet, config: VfConfig, poles: np.ndarray | None = None) -> VfResult:
    """Fit a common-pole rational model to every entry of ``samples``."""
    if poles is None:
        w = np.abs(samples.s.imag)
        poles = initial_poles(config, (w.min(), w.max()))
    poles = np.asarray(poles, dtype=complex)
    n_ent = samples.p * samples.m
    if 2 * len(samples) < config.order + 2:
        raise ValueError(
            f"{len(samples)} samples are too few for order {config.order} (need 2N_s >= N + 2)"
        )
    result = VfResult(model=None)  # type: ignore[arg-type]
    result.pole_history.append(poles)
    for it in range(config.iterations):
        rt, rank, n = _sigma_residues(samples, poles)
        if rank < n:
            result.ill_conditioned.append(f"iteration {it}: sigma system rank {rank} < {n}")
        poles = relocate_poles(poles, rt, config.stable)
        result.pole_history.append(poles)
    model, rank = fit_residues(samples, poles)
    if rank < config.order + 2:
        msg = f"residue system rank {rank} < {config.order + 2} ({n_ent} entries)"
        logger.warning("vector fitting: %s", msg)
        result.ill_conditioned.append(msg)
    result.model = model
    return result
