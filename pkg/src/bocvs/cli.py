"""Command-line entry points: run, sweep, oracle, report."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .harness import (ExperimentConfig, default_grid, oracle_for_config,
                      report, run_experiment)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="flat key=value config file")
    p.add_argument("--out", default=None, help="output directory override")
    p.add_argument("--oracle-cache", default=None,
                   help="oracle cache file to load or create")


def cmd_run(args) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    if args.seed is not None:
        cfg.seeds = str(args.seed)
    elif args.seeds is not None:
        cfg.seeds = args.seeds
    result = run_experiment(cfg, out_dir=args.out,
                            oracle_cache=args.oracle_cache)
    for path in result["traces"]:
        print(path)
    if "summary" in result:
        print(result["summary"])
    for seed, msg in result["errors"].items():
        print(f"seed {seed} failed: {msg}", file=sys.stderr)
    return 1 if result["errors"] else 0


def cmd_sweep(args) -> int:
    base = ExperimentConfig.from_file(args.config)
    envs = args.envs.split(",") if args.envs else [base.environment]
    costs = args.cost_models.split(",") if args.cost_models else [base.cost_model]
    variances = ([float(v) for v in args.variances.split(",")]
                 if args.variances else [base.distribution_variance])
    algorithms = (args.algorithms.split(",") if args.algorithms
                  else [base.algorithm])
    out_root = args.out or base.out_dir
    failures = 0
    for env in envs:
        for cost in costs:
            for var in variances:
                for alg in algorithms:
                    cfg = replace(base, environment=env, cost_model=cost,
                                  distribution_variance=var, algorithm=alg,
                                  control_sets=None)
                    name = f"{env}_{cost}_var{var}_{alg}"
                    cell_dir = os.path.join(out_root, name)
                    cache = (args.oracle_cache
                             or os.path.join(out_root, f"oracle_{env}_var{var}.txt"))
                    print(f"[{name}]")
                    result = run_experiment(cfg, out_dir=cell_dir,
                                            oracle_cache=cache)
                    failures += len(result["errors"])
    return 1 if failures else 0


def cmd_oracle(args) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    cache = args.oracle_cache or os.path.join(
        os.path.dirname(args.config) or ".", f"oracle_{cfg.environment}.txt")
    oracle = oracle_for_config(cfg, cache_path=cache)
    print(cache)
    print(f"best set {oracle.i_plus}, best value {oracle.v_plus:.6f}, "
          f"tolerated {list(oracle.tolerated)}")
    return 0


def cmd_report(args) -> int:
    grid = None
    if args.budget_step is not None:
        cfg = ExperimentConfig.from_file(
            os.path.join(args.run_dirs[0], "config.txt"))
        grid = default_grid(cfg.budget, args.budget_step)
    csv_text, table = report(args.run_dirs, grid)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv_text)
        print(args.out)
    print(table)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bocvs",
        description="budgeted Bayesian optimization over control-variable subsets")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment config")
    _add_common(p)
    p.add_argument("--seed", type=int, default=None, help="run a single seed")
    p.add_argument("--seeds", default=None, help="comma list of seeds")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("sweep", help="cross product of cells from a base config")
    _add_common(p)
    p.add_argument("--envs", default=None)
    p.add_argument("--cost-models", default=None)
    p.add_argument("--variances", default=None)
    p.add_argument("--algorithms", default=None)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("oracle", help="precompute the offline oracle")
    _add_common(p)
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("report", help="aggregate finished run directories")
    p.add_argument("run_dirs", nargs="+")
    p.add_argument("--out", default=None, help="write the CSV here")
    p.add_argument("--budget-step", type=float, default=None)
    p.set_defaults(fn=cmd_report)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
