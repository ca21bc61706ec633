"""adaptsweep: adaptive frequency sampling benchmarks and tools.

    adaptsweep run    --config bench.yaml [--oracle ...] [--method ...] [--ns-min N] [--ns-max N]
                      [--seeds N] [--out DIR] [--jobs N]
    adaptsweep sample --oracle ... --method theta1 --iterations 30 --seed 0 --out model.json
    adaptsweep synth  --order 8 --ports 2 --seed 0 --out system.s2p
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np
import yaml

from .benchmark import BenchmarkConfig, make_oracle, run_benchmark
from .core import make_grid
from .io import export_model
from .oracle import make_synthetic, write_touchstone
from .sampling import AdaptiveConfig, ModelOptions, adaptive_run


def parse_oracle(text: str) -> dict:
    """``path.sNp`` | ``path.json`` | ``synthetic[:key=value,...]``."""
    if text.startswith("synthetic"):
        spec: dict = {"kind": "synthetic"}
        _, _, rest = text.partition(":")
        for item in filter(None, rest.split(",")):
            key, _, value = item.partition("=")
            spec[key.strip()] = yaml.safe_load(value)
        return spec
    suffix = Path(text).suffix.lower()
    if suffix == ".json":
        return {"kind": "manifest", "path": text}
    return {"kind": "touchstone", "path": text}


def _load_config(args) -> BenchmarkConfig:
    data = {}
    if args.config:
        data = yaml.safe_load(Path(args.config).read_text()) or {}
    if args.oracle:
        data["oracle"] = parse_oracle(args.oracle)
    if args.method:
        data["methods"] = args.method
    for flag, key in (("ns_min", "ns_min"), ("ns_max", "ns_max"), ("seeds", "seeds"), ("out", "out"), ("jobs", "jobs")):
        value = getattr(args, flag)
        if value is not None:
            data[key] = value
    return BenchmarkConfig.from_dict(data)


def cmd_run(args) -> int:
    config = _load_config(args)
    result = run_benchmark(config)
    print(f"wrote {len(result.rows)} rows to {result.out / 'rmse_vs_n.csv'}")
    return 0


def cmd_sample(args) -> int:
    config = BenchmarkConfig(oracle=parse_oracle(args.oracle), f_min=args.f_min, f_max=args.f_max, n_grid=args.n_grid)
    oracle, oracle_spec = make_oracle(config)
    framework, _, method = args.method.rpartition("+")
    acfg = AdaptiveConfig(
        method=method,
        iterations=args.iterations,
        tolerance=args.tolerance,
        seed=args.seed,
        model=ModelOptions(framework or "loewner"),
    )
    res = adaptive_run(oracle, acfg, reference=oracle.values)
    for st in res.history:
        extra = f"  [{st.fallback}]" if st.fallback else ""
        print(f"{st.n_samples:4d}  pick {st.freq_hz:.6e} Hz  rmse {st.rmse:.3e}{extra}")
    final = res.rmse_by_n[len(res.samples)]
    print(f"final: {len(res.samples)} samples, {res.queries} oracle queries, rmse {final:.3e}")
    if args.out:
        provenance = {
            "method": args.method,
            "seed": args.seed,
            "oracle": oracle_spec,
            "samples_hz": [float(oracle.grid.freqs_hz[i]) for i in res.indices],
        }
        export_model(res.model, args.out, (oracle.grid.f_min, oracle.grid.f_max), provenance)
        print(f"model written to {args.out}")
    return 0


def cmd_synth(args) -> int:
    system = make_synthetic(args.seed, args.order, args.ports, args.ports, band=(args.f_min, args.f_max))
    grid = make_grid(args.f_min, args.f_max, args.n_grid)
    out = Path(args.out)
    write_touchstone(out, grid.freqs_hz, system.evaluate(grid.points))
    system.save(out.with_suffix(".json"))
    print(f"wrote {out} and {out.with_suffix('.json')}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adaptsweep", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="benchmark samplers by RMSE versus sample count")
    run.add_argument("--config", help="YAML file with BenchmarkConfig keys")
    run.add_argument("--oracle", help="touchstone path, synthetic manifest (.json) or synthetic:key=value,...")
    run.add_argument("--method", action="append", help="framework+sampler, repeatable (e.g. loewner+theta1)")
    run.add_argument("--ns-min", type=int)
    run.add_argument("--ns-max", type=int)
    run.add_argument("--seeds", type=int, help="theta1 repetitions")
    run.add_argument("--out")
    run.add_argument("--jobs", type=int)
    run.set_defaults(func=cmd_run)

    smp = sub.add_parser("sample", help="one adaptive sampling run")
    smp.add_argument("--oracle", default="synthetic")
    smp.add_argument("--method", default="loewner+theta1")
    smp.add_argument("--iterations", type=int, default=30)
    smp.add_argument("--tolerance", type=float, default=0.0)
    smp.add_argument("--seed", type=int, default=0)
    smp.add_argument("--f-min", type=float, default=1e9)
    smp.add_argument("--f-max", type=float, default=10e9)
    smp.add_argument("--n-grid", type=int, default=400)
    smp.add_argument("--out", help="write the final model manifest here")
    smp.set_defaults(func=cmd_sample)

    syn = sub.add_parser("synth", help="write a synthetic system as Touchstone + JSON manifest")
    syn.add_argument("--order", type=int, default=8)
    syn.add_argument("--ports", type=int, default=2)
    syn.add_argument("--seed", type=int, default=0)
    syn.add_argument("--f-min", type=float, default=1e9)
    syn.add_argument("--f-max", type=float, default=10e9)
    syn.add_argument("--n-grid", type=int, default=400)
    syn.add_argument("--out", required=True)
    syn.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    np.seterr(all="ignore")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"adaptsweep: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
