"""Block Loewner framework: data partitioning, the Loewner matrix and its interpolants.

Column data ``(lambda_i, w_i)`` and row data ``(mu_j, v_j)`` give

    Lambda = diag(lambda) (x) I_m,  R = [I_m ... I_m],  W = [w_1 ... w_k]
    M = diag(mu) (x) I_p,           L = [I_p; ...; I_p], V = [v_1; ...; v_q]

and the block Loewner matrix with blocks ``(v_j - w_i)/(mu_j - lambda_i)``,
which satisfies ``M LL - LL Lambda = V R - L W``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .core import BarycentricModel, SampleSet, StateSpaceModel

PINV_EPS = 1e-12
# Theta is refused when the Loewner matrix condition number exceeds this
MAX_COND = 1e15


class SingularLoewnerError(np.linalg.LinAlgError):
    def __init__(self, message: str, cond: float = np.inf):
        super().__init__(f"{message} (condition estimate {cond:.3e})")
        self.cond = cond


class NodeError(ValueError):
    """Evaluation requested exactly at an interpolation node."""


@dataclass(frozen=True)
class Partition:
    lam: np.ndarray
    w: np.ndarray  # (k, p, m)
    mu: np.ndarray
    v: np.ndarray  # (q, p, m)

    @property
    def k(self) -> int:
        return self.lam.size

    @property
    def q(self) -> int:
        return self.mu.size

    @property
    def p(self) -> int:
        return self.w.shape[1]

    @property
    def m(self) -> int:
        return self.w.shape[2]


def alternate_split(samples: SampleSet) -> Partition:
    """Sort by angular frequency; 1st, 3rd, ... samples become column data, the rest row data."""
    ordered = samples.sorted()
    return Partition(
        lam=ordered.s[0::2],
        w=ordered.values[0::2],
        mu=ordered.s[1::2],
        v=ordered.values[1::2],
    )


def mirror_split(samples: SampleSet) -> Partition:
    """Column data = the samples, row data = their conjugate mirrors ``(s*, S(s)*)``."""
    return Partition(lam=samples.s, w=samples.values, mu=samples.s.conj(), v=samples.values.conj())


@dataclass(frozen=True)
class LoewnerData:
    partition: Partition
    Lam: np.ndarray
    R: np.ndarray
    W: np.ndarray
    M: np.ndarray
    L: np.ndarray
    V: np.ndarray
    LL: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def p(self) -> int:
        return self.partition.p

    @property
    def m(self) -> int:
        return self.partition.m

    @property
    def square(self) -> bool:
        return self.LL.shape[0] == self.LL.shape[1]

    def singular_values(self) -> np.ndarray:
        if "sv" not in self._cache:
            self._cache["sv"] = np.linalg.svd(self.LL, compute_uv=False)
        return self._cache["sv"]

    def cond(self) -> float:
        sv = self.singular_values()
        return float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf

    def pinv(self, eps: float = PINV_EPS) -> tuple[np.ndarray, int]:
        """Truncated pseudo-inverse and the effective rank it keeps."""
        key = ("pinv", eps)
        if key not in self._cache:
            u, sv, vh = np.linalg.svd(self.LL, full_matrices=False)
            tol = eps * (sv[0] if sv.size else 0.0) * max(self.LL.shape)
            r = int(np.sum(sv > tol))
            pinv = (vh[:r].conj().T / sv[:r]) @ u[:, :r].conj().T
            self._cache[key] = (pinv, r)
        return self._cache[key]

    def lu(self):
        if "lu" not in self._cache:
            if not self.square:
                raise SingularLoewnerError(f"Loewner matrix is {self.LL.shape}, not square")
            c = self.cond()
            if not np.isfinite(c) or c > MAX_COND:
                raise SingularLoewnerError("Loewner matrix numerically singular", c)
            self._cache["lu"] = sla.lu_factor(self.LL)
        return self._cache["lu"]


def build_loewner(partition: Partition) -> LoewnerData:
    lam, mu, w, v = partition.lam, partition.mu, partition.w, partition.v
    k, q, p, m = partition.k, partition.q, partition.p, partition.m
    gap = mu[:, None] - lam[None, :]
    if np.any(gap == 0):
        raise ValueError("column and row frequencies must be disjoint")
    # blocks (j, i) = (v_j - w_i) / (mu_j - lambda_i), laid out as (pq) x (mk)
    blocks = (v[:, None] - w[None, :]) / gap[:, :, None, None]
    LL = blocks.transpose(0, 2, 1, 3).reshape(q * p, k * m)
    return LoewnerData(
        partition=partition,
        Lam=np.kron(np.diag(lam), np.eye(m)),
        R=np.tile(np.eye(m), (1, k)).astype(complex),
        W=w.transpose(1, 0, 2).reshape(p, k * m),
        M=np.kron(np.diag(mu), np.eye(p)),
        L=np.tile(np.eye(p), (q, 1)).astype(complex),
        V=v.reshape(q * p, m),
        LL=LL,
    )


def state_space_interpolant(data: LoewnerData, D=None, eps: float = PINV_EPS) -> StateSpaceModel:
    """Realisation ``A = Lambda + B R``, ``B = LL^# (V - L D)``, ``C = -(W - D R)``.

    ``LL^#`` is the SVD pseudo-inverse with singular values below
    ``eps * sigma_max * max(shape)`` dropped; the kept rank is stored on the model.
    """
    p, m = data.p, data.m
    D = np.zeros((p, m), dtype=complex) if D is None else np.asarray(D, dtype=complex)
    pinv, rank = data.pinv(eps)
    B = pinv @ (data.V - data.L @ D)
    A = data.Lam + B @ data.R
    C = -(data.W - D @ data.R)
    return StateSpaceModel(A=A, B=B, C=C, D=D, rank=rank)


# --------------------------------------------------------------------------- generating system


@dataclass(frozen=True)
class ThetaEvaluation:
    theta: np.ndarray  # (..., p+m, p+m)
    theta_bar: np.ndarray
    p: int

    def blocks(self, bar: bool = False):
        t = self.theta_bar if bar else self.theta
        p = self.p
        return t[..., :p, :p], t[..., :p, p:], t[..., p:, :p], t[..., p:, p:]


def _theta_factors(data: LoewnerData, pseudo: bool):
    """``(X, LL^-1 Y, X LL^-1, Y)`` with ``X = [W; -R]`` and ``Y = [L V]``."""
    key = ("theta", pseudo)
    if key in data._cache:
        return data._cache[key]
    if data.p != data.m:
        raise SingularLoewnerError("generating system needs square responses (p = m)")
    X = np.vstack([data.W, -data.R])
    Y = np.hstack([data.L, data.V])
    if pseudo:
        inv, _ = data.pinv()
        out = (X, inv @ Y, X @ inv, Y)
    else:
        if data.partition.k != data.partition.q:
            raise SingularLoewnerError(
                f"generating system needs k = q (got k={data.partition.k}, q={data.partition.q})"
            )
        lu = data.lu()
        Li_Y = sla.lu_solve(lu, Y)
        X_Li = sla.lu_solve(lu, X.T, trans=1).T
        out = (X, Li_Y, X_Li, Y)
    data._cache[key] = out
    return out


def theta_grid(data: LoewnerData, s, pseudo: bool = False) -> ThetaEvaluation:
    """Theta(s) and its inverse Theta_bar(s) at every point of ``s``.

    Uses ``(sLL - LL Lambda)^{-1} = (sI - Lambda)^{-1} LL^{-1}`` and
    ``(sLL - M LL)^{-1} = LL^{-1} (sI - M)^{-1}`` so one factorisation of the
    Loewner matrix serves all points. Points on a node give non-finite entries.
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    X, Li_Y, X_Li, Y = _theta_factors(data, pseudo)
    lam = np.diag(data.Lam)
    mu = np.diag(data.M)
    n = X.shape[0]
    eye = np.eye(n)
    with np.errstate(divide="ignore", invalid="ignore"):
        rl = 1.0 / (s[:, None] - lam[None, :])
        rm = 1.0 / (s[:, None] - mu[None, :])
        theta = eye + np.einsum("ar,lr,rb->lab", X, rl, Li_Y)
        theta_bar = eye - np.einsum("ar,lr,rb->lab", X_Li, rm, Y)
    return ThetaEvaluation(theta, theta_bar, data.p)


def theta(data: LoewnerData, s: complex, pseudo: bool = False) -> ThetaEvaluation:
    """Theta and Theta_bar at a single non-node frequency."""
    lam = np.diag(data.Lam)
    mu = np.diag(data.M)
    scale = max(np.max(np.abs(lam)), np.max(np.abs(mu)), 1.0)
    if np.min(np.abs(s - lam)) <= 1e-14 * scale or np.min(np.abs(s - mu)) <= 1e-14 * scale:
        raise NodeError(f"s={s!r} coincides with an interpolation node")
    ev = theta_grid(data, [s], pseudo)
    return ThetaEvaluation(ev.theta[0], ev.theta_bar[0], ev.p)


@dataclass(frozen=True)
class GeneratingModel:
    """``H = [T11 G1 - T12 G2][-T21 G1 + T22 G2]^{-1}`` with constant ``G1, G2``.

    Points where the bracketed denominator is numerically singular evaluate
    to NaN. At column nodes the interpolation limit ``w_i`` is returned.
    """

    data: LoewnerData
    G1: np.ndarray
    G2: np.ndarray
    pseudo: bool = False
    max_cond: float = 1e14
    form: str = field(default="generating", init=False)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.data.p, self.data.m)

    def evaluate(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        ev = theta_grid(self.data, s, self.pseudo)
        return combine_theta(ev, self.G1, self.G2, self.data, s, self.max_cond)


def combine_theta(ev: ThetaEvaluation, G1, G2, data: LoewnerData, s, max_cond: float = 1e14):
    t11, t12, t21, t22 = ev.blocks()
    with np.errstate(all="ignore"):
        num = t11 @ G1 - t12 @ G2
        den = -t21 @ G1 + t22 @ G2
        finite = np.all(np.isfinite(den), axis=(1, 2)) & np.all(np.isfinite(num), axis=(1, 2))
        out = np.full(num.shape, np.nan + 0j)
        if np.any(finite):
            c = np.linalg.cond(den[finite])
            ok = np.zeros_like(finite)
            ok[finite] = c < max_cond
            # H = num den^{-1}  <=>  den^T H^T = num^T
            sol = np.linalg.solve(np.swapaxes(den[ok], 1, 2), np.swapaxes(num[ok], 1, 2))
            out[ok] = np.swapaxes(sol, 1, 2)
    lam = data.partition.lam
    scale = max(np.max(np.abs(lam)), 1.0)
    hit = np.abs(s[:, None] - lam[None, :]) <= 1e-14 * scale
    rows, cols = np.nonzero(hit)
    out[rows] = data.partition.w[cols]
    return out


def generating_interpolant(data: LoewnerData, G1, G2, pseudo: bool = False) -> GeneratingModel:
    p, m = data.p, data.m
    G1 = np.broadcast_to(np.asarray(G1, dtype=complex), (p, m)).copy()
    G2 = np.broadcast_to(np.asarray(G2, dtype=complex), (m, m)).copy()
    # fail early on the same preconditions as theta
    _theta_factors(data, pseudo)
    return GeneratingModel(data, G1, G2, pseudo)


# --------------------------------------------------------------------------- barycentric


def barycentric_matrix(partition: Partition) -> np.ndarray:
    """``(q p m) x k`` matrix whose column ``i`` stacks all ``(v_j - w_i)/(mu_j - lambda_i)``."""
    gap = partition.mu[:, None] - partition.lam[None, :]
    blocks = (partition.v[:, None] - partition.w[None, :]) / gap[:, :, None, None]
    return blocks.transpose(0, 2, 3, 1).reshape(-1, partition.k)


def barycentric_fit(partition: Partition) -> BarycentricModel:
    """Unit-norm coefficients minimising the summed Frobenius Loewner residual."""
    if partition.k < 1 or partition.q < 1:
        raise ValueError("barycentric fit needs column and row data")
    A = barycentric_matrix(partition)
    _, _, vh = np.linalg.svd(A, full_matrices=True)
    b = vh[-1].conj()
    i = int(np.argmax(np.abs(b)))
    b = b * (abs(b[i]) / b[i])
    b = b / np.linalg.norm(b)
    b[i] = abs(b[i])
    return BarycentricModel(nodes=partition.lam.copy(), values=partition.w.copy(), coeffs=b)


def barycentric_objective(partition: Partition, coeffs) -> float:
    A = barycentric_matrix(partition)
    return float(np.linalg.norm(A @ np.asarray(coeffs)) ** 2)
