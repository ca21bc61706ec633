"""Error measures on the fine grid."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

DELTA = 1e-15


@dataclass(frozen=True)
class ErrorReport:
    rmse: float
    e_rel: np.ndarray
    e_approx: np.ndarray | None = None
    d_max: float | None = None
    delta: float = DELTA


def _check(truth, model):
    truth = np.asarray(truth, dtype=complex)
    model = np.asarray(model, dtype=complex)
    if truth.shape != model.shape:
        raise ValueError(f"shape mismatch {truth.shape} vs {model.shape}")
    if truth.ndim == 1:
        truth, model = truth[:, None, None], model[:, None, None]
    return truth, model


def rmse(truth, model) -> float:
    """Root mean square over points of the squared Frobenius error."""
    truth, model = _check(truth, model)
    return float(np.sqrt(np.mean(np.sum(np.abs(truth - model) ** 2, axis=(1, 2)))))


def relative_error(truth, model, delta: float = DELTA) -> np.ndarray:
    """Per point Frobenius norm of ``(H - S)/(S + delta)`` taken element-wise."""
    truth, model = _check(truth, model)
    return np.linalg.norm((model - truth) / (truth + delta), axis=(1, 2))


def pairwise_deviation(family, delta: float = DELTA) -> np.ndarray:
    """``max_{tau,nu} |H_tau - H_nu| / |H_tau + delta|`` per point and entry.

    ``family`` has shape ``(T, M, p, m)``; the result ``(M, p, m)``. NaN
    members (invalid evaluations) are ignored.
    """
    family = np.asarray(family, dtype=complex)
    if family.shape[0] < 2:
        raise ValueError("need at least two interpolants")
    out = np.full(family.shape[1:], np.nan)
    with np.errstate(invalid="ignore", divide="ignore"), warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for member in family:
            spread = np.nanmax(np.abs(family - member[None]), axis=0)
            out = np.fmax(out, spread / np.abs(member + delta))
    return out


def approx_error(family, delta: float = DELTA) -> np.ndarray:
    """Frobenius norm per point of the pairwise deviation scaled by ``1/p``."""
    family = np.asarray(family, dtype=complex)
    p = family.shape[2]
    dev = pairwise_deviation(family, delta) / p
    return np.linalg.norm(np.nan_to_num(dev, nan=0.0), axis=(1, 2))


def error_report(truth, model, family=None, delta: float = DELTA) -> ErrorReport:
    e_approx = d_max = None
    if family is not None:
        e_approx = approx_error(family, delta)
        dev = pairwise_deviation(family, delta)
        d_max = float(np.nanmax(dev)) if np.any(np.isfinite(dev)) else np.nan
    return ErrorReport(rmse(truth, model), relative_error(truth, model, delta), e_approx, d_max, delta)
