"""RMSE-versus-sample-count benchmarks and their CSV outputs.

Files written to the output directory:

``rmse_vs_n.csv``
    one row per run and sample count:
    ``method,sampler,n_samples,n_model_samples,seed,rmse,note``
``rmse_summary.csv``
    per (method, sampler, n_samples): run count and min / median / max RMSE
``min_envelope.csv``
    per framework and sample count, the smallest RMSE over the Chebyshev
    family: ``framework,n_samples,min_rmse,best_c``
``runs/<method>_<sampler>[_<seed>]_{picks,trace}.csv``
    pick history and ``freq_hz,e_rel,e_approx`` traces of each adaptive run
"""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .core import SampleSet, make_grid
from .metrics import relative_error, rmse
from .oracle import PlaybackOracle, SyntheticRationalSystem, make_synthetic
from .sampling import AdaptiveConfig, ModelOptions, adaptive_run, build_model, chebyshev_indices
from .sampling.adaptive import FRAMEWORKS, METHODS

logger = logging.getLogger(__name__)

RUN_COLUMNS = ["method", "sampler", "n_samples", "n_model_samples", "seed", "rmse", "note"]
SUMMARY_COLUMNS = ["method", "sampler", "n_samples", "runs", "min_rmse", "median_rmse", "max_rmse"]
ENVELOPE_COLUMNS = ["framework", "n_samples", "min_rmse", "best_c"]
TRACE_COLUMNS = ["freq_hz", "e_rel", "e_approx"]
PICK_COLUMNS = ["order", "grid_index", "freq_hz", "n_samples", "rmse", "d_max", "fallback"]

DEFAULT_METHODS = (
    "loewner+theta1",
    "loewner+theta2",
    "loewner+pradovera",
    "loewner+vuillemin",
    "loewner+cheb",
    "vecfit+cheb",
)


@dataclass
class BenchmarkConfig:
    oracle: dict = field(default_factory=lambda: {"kind": "synthetic", "seed": 0, "order": 8, "ports": 2})
    f_min: float = 1e9
    f_max: float = 10e9
    n_grid: int = 400
    methods: list[str] = field(default_factory=lambda: list(DEFAULT_METHODS))
    ns_min: int = 2
    ns_max: int = 70
    cheb_count: int = 30
    cheb_c_max: float = 2.0
    cheb_values: list[float] | None = None
    seeds: int = 30
    base_seed: int = 0
    double_sided: bool = True
    vf_iterations: int = 10
    vf_max_order: int | None = None
    odd_strategy: str = "double"
    g_count: int = 6
    details: bool = True
    jobs: int = 1
    out: str = "bench_out"

    def __post_init__(self):
        for spec in self.methods:
            framework, _, sampler = spec.partition("+")
            if framework not in FRAMEWORKS or sampler not in (*METHODS, "cheb"):
                raise ValueError(f"unknown method {spec!r}; expected <loewner|vecfit>+<{'|'.join((*METHODS, 'cheb'))}>")
        if self.ns_min < 2 or self.ns_max < self.ns_min:
            raise ValueError(f"bad sample range [{self.ns_min}, {self.ns_max}]")

    @property
    def c_values(self) -> list[float]:
        if self.cheb_values is not None:
            return [float(c) for c in self.cheb_values]
        return [float(c) for c in np.linspace(0.0, self.cheb_c_max, self.cheb_count)]

    def model_options(self, framework: str) -> ModelOptions:
        return ModelOptions(framework, self.double_sided, self.vf_iterations, self.vf_max_order)

    @classmethod
    def from_dict(cls, data: dict) -> BenchmarkConfig:
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**data)


@dataclass
class BenchmarkResult:
    rows: list[dict]
    summary: list[dict]
    envelope: list[dict]
    out: Path


# --------------------------------------------------------------------------- oracle


def make_oracle(config: BenchmarkConfig) -> tuple[PlaybackOracle, dict]:
    spec = dict(config.oracle)
    kind = spec.pop("kind", "synthetic")
    if kind == "touchstone":
        return PlaybackOracle.from_touchstone(spec["path"]), {"kind": kind, **spec}
    grid = make_grid(config.f_min, config.f_max, config.n_grid)
    if kind == "manifest":
        system = SyntheticRationalSystem.load(spec["path"])
    elif kind == "synthetic":
        ports = int(spec.pop("ports", 2))
        system = make_synthetic(
            int(spec.pop("seed", 0)),
            int(spec.pop("order", 8)),
            ports,
            ports,
            band=(config.f_min, config.f_max),
            **spec,
        )
    else:
        raise ValueError(f"unknown oracle kind {kind!r}")
    return PlaybackOracle.from_system(system, grid), {"kind": kind, **config.oracle}


# --------------------------------------------------------------------------- jobs


def _jobs(config: BenchmarkConfig) -> list[tuple]:
    jobs = []
    for spec in config.methods:
        framework, _, sampler = spec.partition("+")
        if sampler == "cheb":
            jobs.extend((framework, "cheb", c) for c in config.c_values)
        elif sampler == "theta1":
            jobs.extend((framework, sampler, config.base_seed + i) for i in range(config.seeds))
        else:
            jobs.append((framework, sampler, None))
    return jobs


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return "nan" if np.isnan(x) else format(float(x), ".17g")
    return str(x)


def _n_model(samples_s: np.ndarray, double: bool) -> int:
    if not double:
        return samples_s.size
    return samples_s.size + int(np.sum(samples_s.imag != 0))


def _run_cheb(config: BenchmarkConfig, oracle: PlaybackOracle, framework: str, c: float) -> list[dict]:
    grid, truth = oracle.grid, oracle.values
    opts = config.model_options(framework)
    rows = []
    for n in range(config.ns_min, config.ns_max + 1):
        row = {"method": framework, "sampler": f"cheb:{c!r}", "n_samples": n, "seed": None, "note": ""}
        try:
            idx = chebyshev_indices(c, n, grid)
            samples = SampleSet(grid.points[idx], truth[idx])
            row["n_model_samples"] = _n_model(samples.s, opts.double_sided)
            row["rmse"] = rmse(truth, build_model(samples, opts).evaluate(grid.points))
        except (np.linalg.LinAlgError, ValueError) as exc:
            row.update(n_model_samples=None, rmse=np.nan, note=f"{type(exc).__name__}: {exc}")
        rows.append(row)
    return rows


def _run_adaptive(config: BenchmarkConfig, oracle: PlaybackOracle, framework: str, method: str, seed) -> tuple:
    grid, truth = oracle.grid, oracle.values
    oracle.reset()
    acfg = AdaptiveConfig(
        method=method,
        iterations=config.ns_max - 2,
        seed=seed,
        model=config.model_options(framework),
        odd_strategy=config.odd_strategy,
        g_count=config.g_count,
    )
    res = adaptive_run(oracle, acfg, reference=truth)
    rows = []
    for n in range(config.ns_min, config.ns_max + 1):
        row = {"method": framework, "sampler": method, "n_samples": n, "seed": seed, "note": ""}
        if n in res.rmse_by_n:
            row["rmse"] = res.rmse_by_n[n]
            row["n_model_samples"] = _n_model(grid.points[res.indices[:n]], acfg.model.double_sided)
        else:
            row.update(rmse=np.nan, n_model_samples=None, note="not reached")
        fb = next((st.fallback for st in res.history if st.n_samples == n and st.fallback), None)
        if fb:
            row["note"] = f"pick fallback: {fb.split(' (')[0]}"
        rows.append(row)
    details = None
    if config.details:
        picks = [
            [i + 1, st.index, st.freq_hz, st.n_samples, st.rmse, st.d_max, st.fallback or ""]
            for i, st in enumerate(res.history)
        ]
        e_rel = relative_error(truth, res.model.evaluate(grid.points))
        last = next((st.e_approx for st in reversed(res.history) if st.e_approx is not None), None)
        e_approx = last if last is not None else np.full(len(grid), np.nan)
        trace = np.column_stack([grid.freqs_hz, e_rel, e_approx])
        details = (picks, trace)
    return rows, details


def _execute(config: BenchmarkConfig, job: tuple):
    oracle, _ = make_oracle(config)
    framework, sampler, param = job
    if sampler == "cheb":
        return job, _run_cheb(config, oracle, framework, param), None
    rows, details = _run_adaptive(config, oracle, framework, sampler, param)
    return job, rows, details


# --------------------------------------------------------------------------- aggregation


def _sort_key(row: dict):
    seed = row["seed"]
    return (row["method"], row["sampler"], -1 if seed is None else int(seed), int(row["n_samples"]))


def summarize(rows: list[dict]) -> list[dict]:
    groups: dict[tuple, list[float]] = {}
    for r in rows:
        # theta1 seeds share one sampler name, so their runs pool into one group
        key = (r["method"], r["sampler"], r["n_samples"])
        groups.setdefault(key, [])
        if r["rmse"] is not None and np.isfinite(r["rmse"]):
            groups[key].append(float(r["rmse"]))
    out = []
    for (method, sampler, n), vals in sorted(groups.items()):
        v = np.asarray(vals)
        out.append(
            {
                "method": method,
                "sampler": sampler,
                "n_samples": n,
                "runs": v.size,
                "min_rmse": float(v.min()) if v.size else np.nan,
                "median_rmse": float(np.median(v)) if v.size else np.nan,
                "max_rmse": float(v.max()) if v.size else np.nan,
            }
        )
    return out


def min_envelope(rows: list[dict]) -> list[dict]:
    """Per framework and sample count, the best RMSE over all Chebyshev distributions."""
    best: dict[tuple, tuple[float, float]] = {}
    for r in rows:
        if not r["sampler"].startswith("cheb:"):
            continue
        val = r["rmse"]
        if val is None or not np.isfinite(val):
            continue
        c = float(r["sampler"].split(":", 1)[1])
        key = (r["method"], r["n_samples"])
        # strict < keeps the smallest c among ties (c values arrive in ascending order)
        if key not in best or val < best[key][0] or (val == best[key][0] and c < best[key][1]):
            best[key] = (float(val), c)
    return [
        {"framework": fw, "n_samples": n, "min_rmse": v, "best_c": c}
        for (fw, n), (v, c) in sorted(best.items())
    ]


def _write_csv(path: Path, columns: list[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        values = [r[c] for c in columns] if isinstance(r, dict) else r
        writer.writerow([_fmt(v) for v in values])
    path.write_text(buf.getvalue())


def run_benchmark(config: BenchmarkConfig) -> BenchmarkResult:
    """Run every (method, sampler, seed / c) job and write the CSV artifacts."""
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = _jobs(config)
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_execute, [config] * len(jobs), jobs))
    else:
        results = [_execute(config, job) for job in jobs]
    rows: list[dict] = []
    runs_dir = out / "runs"
    for job, job_rows, details in results:
        rows.extend(job_rows)
        if details is not None:
            runs_dir.mkdir(exist_ok=True)
            framework, sampler, seed = job
            stem = f"{framework}_{sampler}" + ("" if seed is None else f"_{seed}")
            picks, trace = details
            _write_csv(runs_dir / f"{stem}_picks.csv", PICK_COLUMNS, picks)
            _write_csv(runs_dir / f"{stem}_trace.csv", TRACE_COLUMNS, trace.tolist())
    rows.sort(key=_sort_key)
    summary = summarize(rows)
    envelope = min_envelope(rows)
    _write_csv(out / "rmse_vs_n.csv", RUN_COLUMNS, rows)
    _write_csv(out / "rmse_summary.csv", SUMMARY_COLUMNS, summary)
    _write_csv(out / "min_envelope.csv", ENVELOPE_COLUMNS, envelope)
    return BenchmarkResult(rows, summary, envelope, out)


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def config_dict(config: BenchmarkConfig) -> dict:
    return asdict(config)
