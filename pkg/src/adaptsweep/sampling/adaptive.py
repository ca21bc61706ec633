"""The adaptive sampling loop and model construction shared by samplers and benchmarks."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..core import FrequencyGrid, SampleSet
from ..loewner import (
    LoewnerData,
    alternate_split,
    barycentric_fit,
    build_loewner,
    mirror_split,
    state_space_interpolant,
)
from ..metrics import relative_error, rmse
from ..vecfit import VfConfig, vf_fit
from .distributions import double_sided
from .rules import (
    GMatrixSet,
    SweepComplete,
    make_g_matrices,
    pick_pradovera,
    pick_theta1,
    pick_theta2,
    pick_vuillemin,
    spectral_norm_trace,
    unitary_g_matrices,
)

logger = logging.getLogger(__name__)

METHODS = ("theta1", "theta2", "pradovera", "vuillemin")
FRAMEWORKS = ("loewner", "vecfit")
ODD_STRATEGIES = ("double", "pinv", "split")


@dataclass(frozen=True)
class ModelOptions:
    framework: str = "loewner"
    double_sided: bool = True
    vf_iterations: int = 10
    vf_max_order: int | None = None

    def __post_init__(self):
        if self.framework not in FRAMEWORKS:
            raise ValueError(f"unknown framework {self.framework!r}")


def vf_order(n_samples: int, max_order: int | None = None) -> int:
    """Order used when vector fitting ``n_samples`` one-sided samples."""
    order = max(1, n_samples - 1)
    return min(order, max_order) if max_order else order


def build_model(samples: SampleSet, options: ModelOptions = ModelOptions()):
    """Surrogate from ``samples`` using the configured framework (D = 0 for Loewner)."""
    data = double_sided(samples) if options.double_sided else samples
    if options.framework == "loewner":
        return state_space_interpolant(build_loewner(alternate_split(data)))
    order = vf_order(len(samples), options.vf_max_order)
    return vf_fit(data, VfConfig(order=order, iterations=options.vf_iterations)).model


@dataclass(frozen=True)
class AdaptiveConfig:
    method: str = "theta1"
    iterations: int = 30
    tolerance: float = 0.0
    seed: int | None = 0
    model: ModelOptions = ModelOptions()
    odd_strategy: str = "double"
    g_count: int = 6
    g_mode: str = "uniform"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.odd_strategy not in ODD_STRATEGIES:
            raise ValueError(f"unknown odd-sample strategy {self.odd_strategy!r}")
        if self.method == "theta1" and self.g_mode == "uniform" and self.seed is None:
            raise ValueError("theta1 with random G matrices needs a seed")


@dataclass
class Step:
    iteration: int
    n_samples: int  # oracle samples available when the pick was made
    index: int
    freq_hz: float
    fallback: str | None = None
    d_max: float | None = None
    e_approx: np.ndarray | None = None
    rmse: float | None = None


@dataclass
class AdaptiveResult:
    model: object
    samples: SampleSet
    indices: list[int]
    history: list[Step] = field(default_factory=list)
    rmse_by_n: dict[int, float] = field(default_factory=dict)
    stopped_early: bool = False
    queries: int = 0

    @property
    def picks(self) -> list[int]:
        return [st.index for st in self.history]


def _loewner_for_theta(samples: SampleSet, strategy: str) -> list[tuple[LoewnerData, bool]]:
    """Loewner data sets (and whether to use the pseudo-inverse) for the Theta rules."""
    if strategy == "double":
        return [(build_loewner(alternate_split(double_sided(samples))), False)]
    ordered = samples.sorted()
    if len(ordered) % 2 == 0:
        return [(build_loewner(alternate_split(ordered)), False)]
    if strategy == "pinv":
        return [(build_loewner(alternate_split(ordered)), True)]
    n = len(ordered)
    return [
        (build_loewner(alternate_split(ordered.subset(slice(0, n - 1)))), False),
        (build_loewner(alternate_split(ordered.subset(slice(1, n)))), False),
    ]


def _bisect_largest_gap(indices: list[int]) -> int:
    idx = np.sort(np.asarray(indices))
    gaps = np.diff(idx)
    j = int(np.argmax(gaps))
    if gaps[j] < 2:
        raise SweepComplete("no unsampled point between samples")
    return int((idx[j] + idx[j + 1]) // 2)


def adaptive_run(
    oracle,
    config: AdaptiveConfig,
    reference: np.ndarray | None = None,
    gset: GMatrixSet | None = None,
    initial: list[int] | None = None,
) -> AdaptiveResult:
    """Greedy sampling loop starting from the two band edges.

    Each iteration builds the surrogate from the current samples, asks the
    configured rule for the next grid point, queries the oracle there and
    appends the result. A rule failure (e.g. a singular Loewner matrix) falls
    back to bisecting the largest index gap. With ``reference`` (true values
    on the grid) the RMSE of every intermediate model is recorded.
    """
    grid: FrequencyGrid = oracle.grid
    n_grid = len(grid)
    indices = list(initial) if initial is not None else [0, n_grid - 1]
    samples = SampleSet(grid.points[indices], np.stack([oracle.query_index(i) for i in indices]))
    sampled = np.zeros(n_grid, dtype=bool)
    sampled[indices] = True
    if config.method == "theta1" and gset is None:
        p, m = samples.p, samples.m
        gset = unitary_g_matrices() if config.g_mode == "unitary" else make_g_matrices(config.seed, config.g_count, m, p)
    result = AdaptiveResult(model=None, samples=samples, indices=indices)

    def record(model) -> None:
        if reference is not None:
            result.rmse_by_n[len(samples)] = rmse(reference, model.evaluate(grid.points))

    for n in range(config.iterations):
        model = build_model(samples, config.model)
        record(model)
        step = Step(iteration=n, n_samples=len(samples), index=-1, freq_hz=np.nan)
        if reference is not None:
            step.rmse = result.rmse_by_n[len(samples)]
        try:
            if sampled.all():
                raise SweepComplete("all grid points are sampled")
            pick = _pick(config, model, samples, grid, sampled, gset, n, step)
        except SweepComplete:
            break
        except (np.linalg.LinAlgError, ValueError, FloatingPointError) as exc:
            logger.debug("rule %s failed at iteration %d: %s", config.method, n, exc)
            try:
                pick = _bisect_largest_gap(indices)
            except SweepComplete:
                break
            step.fallback = f"bisect ({type(exc).__name__}: {exc})"
        if pick is None:
            result.stopped_early = True
            break
        if sampled[pick]:
            raise RuntimeError(f"rule {config.method} re-picked grid index {pick}")
        step.index = int(pick)
        step.freq_hz = float(grid.freqs_hz[pick])
        value = oracle.query_index(pick)
        samples = samples.append(grid.points[pick], value)
        indices.append(int(pick))
        sampled[pick] = True
        result.history.append(step)

    result.model = build_model(samples, config.model)
    record(result.model)
    result.samples = samples
    result.indices = indices
    result.queries = getattr(oracle, "queries", len(indices))
    return result


def _pick(config: AdaptiveConfig, model, samples, grid, sampled, gset, n, step: Step):
    """Next grid index, or None when the stopping tolerance is met."""
    if config.method == "vuillemin":
        f = spectral_norm_trace(model.evaluate(grid.points))
        return pick_vuillemin(f, sampled, n)
    if config.method == "pradovera":
        bary = barycentric_fit(mirror_split(_off_axis(samples)))
        return pick_pradovera(bary, grid, sampled)
    sets = _loewner_for_theta(samples, config.odd_strategy)
    if config.method == "theta2":
        return pick_theta2(sets[0][0], grid, sampled, pseudo=sets[0][1])
    picks = [pick_theta1(data, gset, grid, sampled, pseudo=pseudo) for data, pseudo in sets]
    best = max(picks, key=lambda pk: -np.inf if np.isnan(pk.d_max) else pk.d_max)
    step.d_max = best.d_max
    step.e_approx = best.e_approx
    if config.tolerance > 0 and np.max(best.e_approx) < config.tolerance:
        return None
    if best.absolute:
        step.fallback = "absolute difference"
    return best.index


def _off_axis(samples: SampleSet) -> SampleSet:
    """Drop real-axis points, whose mirror coincides with themselves."""
    keep = samples.s.imag != 0
    return samples.subset(keep) if not keep.all() else samples


def error_traces(reference: np.ndarray, model, grid: FrequencyGrid) -> np.ndarray:
    return relative_error(reference, model.evaluate(grid.points))
