"""Experiment runner: configs, seeded runs, regret ledgers, and reports.

Configs are flat ``key = value`` text; traces, ledgers, and summaries are
one-header CSV.  Everything is deterministic per (config, seed) down to the
bytes, which is what the replay tests pin.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from .acquisition import AcquisitionSpec
from .algorithm import RunConfig, RunTrace, TraceRow, run as run_proposed
from .baselines import etc50_run, ts_psq_run, ucb_psq_run
from .benchmarks import (CostModel, ObjectiveEnvironment, OracleSolution,
                         compute_oracle, make_ackley_env, make_airfoil_env,
                         make_hartmann_env, make_levy_env, named_cost_model,
                         validate_cost_ordering, COST_SETS)
from .control import (ControlSetFamily, PartialQuery, SampleBank,
                      VariableDistribution, assemble_batch)
from .gp import BetaSchedule, KernelSpec

ENVIRONMENTS = {
    "hartmann12": make_hartmann_env,
    "ackley12": make_ackley_env,
    "levy12": make_levy_env,
    "airfoil": make_airfoil_env,
}
ALGORITHMS = ("proposed", "ucb-psq", "ts-psq", "etc-50")

TRACE_COLUMNS = ("t", "phase", "set_index", "pq", "complement", "y",
                 "cost_draw", "cum_cost", "alpha_t", "S1")
LEDGER_COLUMNS = ("t", "phase", "set_index", "cum_cost", "exp_value",
                  "quality_regret_alpha0", "quality_regret_alphat",
                  "cum_quality_alpha0", "cum_quality_alphat",
                  "cost_regret", "cum_cost_regret")
SUMMARY_COLUMNS = ("budget", "simple_regret_mean", "simple_regret_se",
                   "evals_mean", "evals_se", "n_seeds")


@dataclass
class ExperimentConfig:
    """One experiment cell: environment x costs x input law x algorithm."""

    environment: str = "hartmann12"
    control_sets: Optional[str] = None        # "1,2,3|4,5,6|..."; None = env default
    distribution: str = "truncnorm"
    distribution_variance: float = 0.02
    cost_model: str = "cheap"
    cost_means: Optional[str] = None          # comma list when cost_model=custom
    cost_noise_sd: float = 0.02
    algorithm: str = "proposed"
    budget: float = 100.0
    support_upper: float = 1.0
    explore_cap: float = 60.0
    tau: Optional[int] = None
    alpha0: float = 0.1
    beta: float = 2.0
    mc_samples: int = 64
    oracle_samples: int = 4096
    candidates: int = 256
    refine_rounds: int = 10
    shrink: float = 0.5
    solve_dtype: str = "float64"
    max_incumbents: Optional[int] = None
    lazy_filter: bool = False
    kernel: str = "squared-exponential"
    lengthscale: str = "0.5"
    output_scale: float = 1.0
    y_offset: float = 0.0
    gp_lambda: float = 0.01
    noise_sd: float = 0.01
    plays_per_group: int = 50
    feature_count: int = 512
    cost_floor: float = 0.01
    seeds: str = "0,1,2,3,4"
    out_dir: str = "runs/out"

    _FIELD_ORDER = ("environment", "control_sets", "distribution",
                    "distribution_variance", "cost_model", "cost_means",
                    "cost_noise_sd", "algorithm", "budget", "support_upper",
                    "explore_cap", "tau", "alpha0", "beta", "mc_samples",
                    "oracle_samples", "candidates", "refine_rounds", "shrink",
                    "solve_dtype", "max_incumbents", "lazy_filter", "kernel",
                    "lengthscale",
                    "output_scale", "y_offset", "gp_lambda", "noise_sd",
                    "plays_per_group",
                    "feature_count", "cost_floor", "seeds", "out_dir")

    def validate(self) -> None:
        if self.environment not in ENVIRONMENTS:
            raise ValueError(f"unknown environment {self.environment!r}; "
                             f"known: {sorted(ENVIRONMENTS)}")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; "
                             f"known: {ALGORITHMS}")
        if self.cost_model not in COST_SETS and self.cost_model != "custom":
            raise ValueError(f"unknown cost model {self.cost_model!r}")
        if self.cost_model == "custom" and not self.cost_means:
            raise ValueError("cost_model=custom requires cost_means")
        if self.distribution not in ("truncnorm", "uniform"):
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if not self.budget > 0:
            raise ValueError("budget must be positive")
        if not (0.0 <= self.alpha0 <= 1.0):
            raise ValueError("alpha0 must lie in [0, 1]")
        if not self.seed_list():
            raise ValueError("seeds must be a nonempty comma list")

    def seed_list(self) -> list:
        return [int(s) for s in str(self.seeds).split(",") if s != ""]

    def to_text(self) -> str:
        lines = []
        for name in self._FIELD_ORDER:
            value = getattr(self, name)
            if value is None:
                value = "none"
            elif isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{name} = {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in cls._FIELD_ORDER:
                raise ValueError(f"line {lineno}: unknown key {key!r}")
            values[key] = val
        cfg = cls()
        for key, val in values.items():
            setattr(cfg, key, _coerce(val, getattr(cfg, key), key))
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_text(fh.read())


_INT_KEYS = {"tau", "mc_samples", "oracle_samples", "candidates",
             "refine_rounds", "max_incumbents", "plays_per_group",
             "feature_count"}
_FLOAT_KEYS = {"distribution_variance", "cost_noise_sd", "budget",
               "support_upper", "explore_cap", "alpha0", "beta", "shrink",
               "output_scale", "y_offset", "gp_lambda", "noise_sd",
               "cost_floor"}
_BOOL_KEYS = {"lazy_filter"}
_OPTIONAL_KEYS = {"tau", "max_incumbents", "control_sets", "cost_means"}


def _coerce(val: str, default, key: str):
    if key in _OPTIONAL_KEYS and val.lower() in ("none", "auto", ""):
        return None
    if key in _INT_KEYS:
        return int(val)
    if key in _FLOAT_KEYS:
        return float(val)
    if key in _BOOL_KEYS:
        if val.lower() not in ("true", "false"):
            raise ValueError(f"{key} must be true or false")
        return val.lower() == "true"
    return val


def parse_sets(text: str) -> list:
    sets = []
    for part in text.split("|"):
        part = part.strip()
        if not part:
            raise ValueError("empty control set in list")
        sets.append(tuple(int(v) for v in part.split(",")))
    return sets


def format_sets(sets: Sequence) -> str:
    return " | ".join(",".join(str(v) for v in s) for s in sets)


def build_environment(cfg: ExperimentConfig) -> ObjectiveEnvironment:
    return ENVIRONMENTS[cfg.environment](noise_sd=cfg.noise_sd)


def build_family(cfg: ExperimentConfig,
                 env: ObjectiveEnvironment) -> ControlSetFamily:
    sets = parse_sets(cfg.control_sets) if cfg.control_sets else env.default_sets
    if cfg.distribution == "uniform":
        dist = VariableDistribution("uniform")
    else:
        dist = VariableDistribution("truncnorm", 0.5, cfg.distribution_variance)
    return ControlSetFamily(env.dim, list(sets), [dist] * env.dim)


def build_cost_model(cfg: ExperimentConfig,
                     family: ControlSetFamily) -> CostModel:
    if cfg.cost_model == "custom":
        means = np.array([float(v) for v in cfg.cost_means.split(",")])
        model = CostModel(means, noise_sd=cfg.cost_noise_sd, name="custom")
    else:
        model = named_cost_model(cfg.cost_model, noise_sd=cfg.cost_noise_sd)
    validate_cost_ordering(family, model.means)
    return model


def build_kernel(cfg: ExperimentConfig, dim: int) -> KernelSpec:
    parts = [float(v) for v in str(cfg.lengthscale).split(",")]
    ls = np.full(dim, parts[0]) if len(parts) == 1 else np.array(parts)
    if ls.shape[0] != dim:
        raise ValueError(f"lengthscale needs 1 or {dim} entries")
    return KernelSpec(cfg.kernel, ls, cfg.output_scale)


def build_run_config(cfg: ExperimentConfig, seed: int) -> RunConfig:
    env = build_environment(cfg)
    family = build_family(cfg, env)
    cost_model = build_cost_model(cfg, family)
    kernel = build_kernel(cfg, env.dim)
    schedule = BetaSchedule(constant=cfg.beta)
    acq = AcquisitionSpec(n_candidates=cfg.candidates,
                          refine_rounds=cfg.refine_rounds, shrink=cfg.shrink,
                          seed=0, max_incumbents=cfg.max_incumbents,
                          solve_dtype=cfg.solve_dtype)
    return RunConfig(env=env, family=family, cost_model=cost_model,
                     kernel=kernel, lam=cfg.gp_lambda, schedule=schedule,
                     budget=cfg.budget, support_upper=cfg.support_upper,
                     tau=cfg.tau, explore_cap=cfg.explore_cap,
                     alpha0=cfg.alpha0, mc_samples=cfg.mc_samples, acq=acq,
                     seed=seed, cost_floor=cfg.cost_floor,
                     lazy_filter=cfg.lazy_filter,
                     plays_per_group=cfg.plays_per_group,
                     feature_count=cfg.feature_count, y_offset=cfg.y_offset)


def run_algorithm(cfg: ExperimentConfig, seed: int) -> RunTrace:
    run_config = build_run_config(cfg, seed)
    runner = {"proposed": run_proposed, "ucb-psq": ucb_psq_run,
              "ts-psq": ts_psq_run, "etc-50": etc50_run}[cfg.algorithm]
    return runner(run_config)


# ---------------------------------------------------------------------------
# Trace persistence

def _join_floats(values) -> str:
    return ";".join(repr(float(v)) for v in values)


def _split_floats(text: str) -> np.ndarray:
    if not text:
        return np.empty(0)
    return np.array([float(v) for v in text.split(";")])


def trace_to_csv(trace: RunTrace, path: str) -> None:
    lines = [",".join(TRACE_COLUMNS)]
    for r in trace.rows:
        lines.append(",".join([
            str(r.t), r.phase, str(r.set_index), _join_floats(r.pq),
            _join_floats(r.complement), repr(float(r.y)),
            repr(float(r.cost_draw)), repr(float(r.cum_cost)),
            repr(float(r.alpha)), ";".join(str(i) for i in r.s1)]))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def trace_from_csv(path: str) -> List[TraceRow]:
    with open(path) as fh:
        lines = [l.rstrip("\n") for l in fh if l.strip()]
    header = tuple(lines[0].split(","))
    if header != TRACE_COLUMNS:
        raise ValueError(f"{path}: unexpected trace header {header}")
    rows = []
    for line in lines[1:]:
        f = line.split(",")
        rows.append(TraceRow(
            t=int(f[0]), phase=f[1], set_index=int(f[2]),
            pq=_split_floats(f[3]), complement=_split_floats(f[4]),
            y=float(f[5]), cost_draw=float(f[6]), cum_cost=float(f[7]),
            alpha=float(f[8]),
            s1=tuple(int(v) for v in f[9].split(";")) if f[9] else ()))
    return rows


# ---------------------------------------------------------------------------
# Regret accounting

class PlayValueCache:
    """Expected true objective value per (set, partial query), memoized.

    One large complement bank per set, shared by every row, keeps the
    estimates deterministic and makes converged tails nearly free.
    """

    def __init__(self, env: ObjectiveEnvironment, family: ControlSetFamily,
                 n_samples: int = 4096, seed: int = 12345):
        self.env = env
        self.family = family
        self.bank = SampleBank(family, n_samples, seed)
        self._memo: Dict[tuple, float] = {}

    def value(self, set_index: int, pq_values: np.ndarray) -> float:
        key = (set_index, np.asarray(pq_values, dtype=float).tobytes())
        if key not in self._memo:
            X = assemble_batch(self.family, set_index,
                               np.asarray(pq_values, dtype=float)[None, :],
                               self.bank.effective(set_index))
            self._memo[key] = float(np.mean(self.env.value(X)))
        return self._memo[key]


def play_values(rows: Sequence[TraceRow], cache: PlayValueCache) -> np.ndarray:
    return np.array([cache.value(r.set_index, r.pq) for r in rows])


def quality_regret(oracle: OracleSolution, rows: Sequence[TraceRow],
                   env: ObjectiveEnvironment, family: ControlSetFamily,
                   n_samples: int = 4096,
                   cache: Optional[PlayValueCache] = None) -> dict:
    """Per-step quality regret under the oracle's fixed alpha and the
    per-step recorded alpha."""
    if cache is None:
        cache = PlayValueCache(env, family, n_samples)
    ev = play_values(rows, cache)
    alpha0 = oracle.alpha
    alphas = np.array([r.alpha for r in rows])
    r0 = (1.0 - alpha0) * oracle.v_plus - ev
    rt = (1.0 - alphas) * oracle.v_plus - ev
    return {"exp_value": ev, "alpha0": r0, "alphat": rt,
            "cum_alpha0": np.cumsum(r0), "cum_alphat": np.cumsum(rt)}


def cost_regret(cost_model: CostModel, oracle: OracleSolution,
                rows: Sequence[TraceRow]) -> np.ndarray:
    """Per-step overpay in configured means against the cheapest tolerated set."""
    if (oracle.i_star is not None and oracle.cost_means is not None
            and np.array_equal(oracle.cost_means, cost_model.means)):
        i_star = oracle.i_star
    else:
        i_star = oracle.cheapest_tolerated(cost_model.means)
    c_star = cost_model.means[i_star - 1]
    played = np.array([cost_model.means[r.set_index - 1] for r in rows])
    return np.maximum(played - c_star, 0.0)


def build_ledger(oracle: OracleSolution, rows: Sequence[TraceRow],
                 env: ObjectiveEnvironment, family: ControlSetFamily,
                 cost_model: CostModel, n_samples: int = 4096,
                 cache: Optional[PlayValueCache] = None) -> dict:
    q = quality_regret(oracle, rows, env, family, n_samples, cache)
    rc = cost_regret(cost_model, oracle, rows)
    return {
        "t": np.array([r.t for r in rows]),
        "phase": [r.phase for r in rows],
        "set_index": np.array([r.set_index for r in rows]),
        "cum_cost": np.array([r.cum_cost for r in rows]),
        "exp_value": q["exp_value"],
        "quality_regret_alpha0": q["alpha0"],
        "quality_regret_alphat": q["alphat"],
        "cum_quality_alpha0": q["cum_alpha0"],
        "cum_quality_alphat": q["cum_alphat"],
        "cost_regret": rc,
        "cum_cost_regret": np.cumsum(rc),
    }


def ledger_to_csv(ledger: dict, path: str) -> None:
    n = len(ledger["t"])
    lines = [",".join(LEDGER_COLUMNS)]
    for k in range(n):
        cells = []
        for col in LEDGER_COLUMNS:
            v = ledger[col][k]
            if col in ("t", "set_index"):
                cells.append(str(int(v)))
            elif col == "phase":
                cells.append(v)
            else:
                cells.append(repr(float(v)))
        lines.append(",".join(cells))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def ledger_from_csv(path: str) -> dict:
    with open(path) as fh:
        lines = [l.rstrip("\n") for l in fh if l.strip()]
    header = tuple(lines[0].split(","))
    if header != LEDGER_COLUMNS:
        raise ValueError(f"{path}: unexpected ledger header {header}")
    cols = {c: [] for c in LEDGER_COLUMNS}
    for line in lines[1:]:
        for c, v in zip(LEDGER_COLUMNS, line.split(",")):
            cols[c].append(v)
    out = {}
    for c in LEDGER_COLUMNS:
        if c == "phase":
            out[c] = cols[c]
        elif c in ("t", "set_index"):
            out[c] = np.array([int(v) for v in cols[c]])
        else:
            out[c] = np.array([float(v) for v in cols[c]])
    return out


def simple_regret_curve(ledger: dict, v_plus: float,
                        grid: np.ndarray) -> np.ndarray:
    """Best-found value gap within each cumulative-spend level (NaN before
    any play)."""
    cum = ledger["cum_cost"]
    ev = ledger["exp_value"]
    out = np.full(len(grid), np.nan)
    for j, b in enumerate(grid):
        mask = cum <= b + 1e-12
        if np.any(mask):
            out[j] = v_plus - np.max(ev[mask])
    return out


def eval_count_curve(ledger: dict, grid: np.ndarray) -> np.ndarray:
    cum = ledger["cum_cost"]
    return np.array([int(np.sum(cum <= b + 1e-12)) for b in grid])


def default_grid(budget: float, step: float = 5.0) -> np.ndarray:
    n = int(round(budget / step))
    return np.linspace(0.0, n * step, n + 1)


def summarize(curves: Sequence[np.ndarray], counts: Sequence[np.ndarray],
              grid: np.ndarray) -> list:
    """Per-budget mean and standard error over seeds (NaN-aware)."""
    rows = []
    sr = np.vstack(curves)
    ec = np.vstack([c.astype(float) for c in counts])
    for j, b in enumerate(grid):
        col = sr[:, j]
        ok = ~np.isnan(col)
        n = int(ok.sum())
        if n:
            mean = float(np.mean(col[ok]))
            se = float(np.std(col[ok], ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        else:
            mean, se = float("nan"), float("nan")
        em = float(np.mean(ec[:, j]))
        es = (float(np.std(ec[:, j], ddof=1) / np.sqrt(len(curves)))
              if len(curves) > 1 else 0.0)
        rows.append({"budget": float(b), "simple_regret_mean": mean,
                     "simple_regret_se": se, "evals_mean": em,
                     "evals_se": es, "n_seeds": n})
    return rows


def summary_to_csv(rows: Sequence[dict], path: str) -> None:
    lines = [",".join(SUMMARY_COLUMNS)]
    for r in rows:
        lines.append(",".join(
            str(int(r[c])) if c == "n_seeds" else repr(float(r[c]))
            for c in SUMMARY_COLUMNS))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def summary_from_csv(path: str) -> list:
    with open(path) as fh:
        lines = [l.rstrip("\n") for l in fh if l.strip()]
    header = tuple(lines[0].split(","))
    if header != SUMMARY_COLUMNS:
        raise ValueError(f"{path}: unexpected summary header {header}")
    rows = []
    for line in lines[1:]:
        vals = line.split(",")
        row = dict(zip(SUMMARY_COLUMNS, (float(v) for v in vals)))
        row["n_seeds"] = int(row["n_seeds"])
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# Oracle cache

def oracle_to_text(oracle: OracleSolution, cfg: ExperimentConfig,
                   sets: Sequence) -> str:
    lines = [
        f"environment = {cfg.environment}",
        f"control_sets = {format_sets(sets)}",
        f"distribution = {cfg.distribution}",
        f"distribution_variance = {cfg.distribution_variance}",
        f"alpha = {oracle.alpha!r}",
        f"values = {_join_floats(oracle.values)}",
        f"v_plus = {oracle.v_plus!r}",
        f"i_plus = {oracle.i_plus}",
        f"tolerated = {';'.join(str(i) for i in oracle.tolerated)}",
    ]
    for i, q in enumerate(oracle.queries, start=1):
        lines.append(f"query_{i} = {_join_floats(q)}")
    if oracle.cost_means is not None:
        lines.append(f"cost_means = {_join_floats(oracle.cost_means)}")
        lines.append(f"i_star = {oracle.i_star}")
    return "\n".join(lines) + "\n"


def oracle_from_text(text: str) -> tuple:
    """Returns (OracleSolution, context dict for cache validation)."""
    kv = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, val = line.partition("=")
        kv[key.strip()] = val.strip()
    values = _split_floats(kv["values"])
    queries = [_split_floats(kv[f"query_{i}"]) for i in range(1, len(values) + 1)]
    oracle = OracleSolution(
        alpha=float(kv["alpha"]), values=values, queries=queries,
        v_plus=float(kv["v_plus"]), i_plus=int(kv["i_plus"]),
        tolerated=tuple(int(v) for v in kv["tolerated"].split(";")))
    if "cost_means" in kv:
        oracle.cost_means = _split_floats(kv["cost_means"])
        oracle.i_star = int(kv["i_star"])
    context = {k: kv.get(k) for k in ("environment", "control_sets",
                                      "distribution", "distribution_variance")}
    return oracle, context


def oracle_for_config(cfg: ExperimentConfig, cache_path: Optional[str] = None,
                      env: Optional[ObjectiveEnvironment] = None,
                      family: Optional[ControlSetFamily] = None) -> OracleSolution:
    """Load a matching cached oracle or compute (and optionally cache) one."""
    env = env or build_environment(cfg)
    family = family or build_family(cfg, env)
    cost_model = build_cost_model(cfg, family)
    context = {"environment": cfg.environment,
               "control_sets": format_sets(family.sets),
               "distribution": cfg.distribution,
               "distribution_variance": str(cfg.distribution_variance)}
    if cache_path and os.path.exists(cache_path):
        with open(cache_path) as fh:
            oracle, stored = oracle_from_text(fh.read())
        if (stored == context and oracle.alpha == cfg.alpha0):
            if (oracle.cost_means is None
                    or not np.array_equal(oracle.cost_means, cost_model.means)):
                oracle.cost_means = cost_model.means.copy()
                oracle.i_star = oracle.cheapest_tolerated(cost_model.means)
            return oracle
    oracle = compute_oracle(env, family, cfg.alpha0,
                            n_samples=cfg.oracle_samples,
                            cost_means=cost_model.means)
    if cache_path:
        os.makedirs(os.path.dirname(cache_path) or ".", exist_ok=True)
        with open(cache_path, "w") as fh:
            fh.write(oracle_to_text(oracle, cfg, family.sets))
    return oracle


# ---------------------------------------------------------------------------
# Experiment driver

def run_experiment(cfg: ExperimentConfig, out_dir: Optional[str] = None,
                   oracle_cache: Optional[str] = None) -> dict:
    """Run every seed, persist traces and ledgers, and write the summary.

    A failing seed is isolated: its error lands in ``errors`` and the summary
    aggregates the seeds that finished.
    """
    cfg.validate()
    out_dir = out_dir or cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "config.txt"), "w") as fh:
        fh.write(cfg.to_text())
    env = build_environment(cfg)
    family = build_family(cfg, env)
    cost_model = build_cost_model(cfg, family)
    oracle = oracle_for_config(cfg, oracle_cache, env, family)
    cache = PlayValueCache(env, family, cfg.oracle_samples)
    grid = default_grid(cfg.budget)

    curves, counts, errors = [], [], {}
    result = {"out_dir": out_dir, "traces": [], "ledgers": [], "errors": errors}
    for seed in cfg.seed_list():
        try:
            trace = run_algorithm(cfg, seed)
            ledger = build_ledger(oracle, trace.rows, env, family, cost_model,
                                  cache=cache)
            tpath = os.path.join(out_dir, f"trace_seed{seed}.csv")
            lpath = os.path.join(out_dir, f"ledger_seed{seed}.csv")
            trace_to_csv(trace, tpath)
            ledger_to_csv(ledger, lpath)
            curves.append(simple_regret_curve(ledger, oracle.v_plus, grid))
            counts.append(eval_count_curve(ledger, grid))
            result["traces"].append(tpath)
            result["ledgers"].append(lpath)
        except Exception as exc:  # noqa: BLE001 - per-seed isolation
            errors[seed] = f"{type(exc).__name__}: {exc}"
    if curves:
        rows = summarize(curves, counts, grid)
        summary_to_csv(rows, os.path.join(out_dir, "summary.csv"))
        result["summary"] = os.path.join(out_dir, "summary.csv")
    if errors:
        with open(os.path.join(out_dir, "errors.txt"), "w") as fh:
            for seed, msg in sorted(errors.items()):
                fh.write(f"seed {seed}: {msg}\n")
    return result


def report(run_dirs: Sequence[str], grid: Optional[np.ndarray] = None) -> tuple:
    """Aggregate finished runs into per-algorithm tables.

    Returns (csv text, aligned text table).  Refuses to aggregate runs whose
    cell keys (environment, costs, input law, budget) disagree.
    """
    cell_key = None
    per_alg = {}
    for d in run_dirs:
        cfg = ExperimentConfig.from_file(os.path.join(d, "config.txt"))
        key = (cfg.environment, cfg.cost_model, cfg.distribution,
               cfg.distribution_variance, cfg.budget)
        if cell_key is None:
            cell_key = key
        elif key != cell_key:
            raise ValueError(
                f"run dir {d} belongs to cell {key}, expected {cell_key}")
        g = default_grid(cfg.budget) if grid is None else grid
        oracle = oracle_for_config(cfg)
        curves, counts = [], []
        for seed in cfg.seed_list():
            lpath = os.path.join(d, f"ledger_seed{seed}.csv")
            if not os.path.exists(lpath):
                continue
            ledger = ledger_from_csv(lpath)
            curves.append(simple_regret_curve(ledger, oracle.v_plus, g))
            counts.append(eval_count_curve(ledger, g))
        if curves:
            per_alg[cfg.algorithm] = (summarize(curves, counts, g), g)

    csv_lines = ["algorithm," + ",".join(SUMMARY_COLUMNS)]
    text_lines = [f"{'algorithm':<10} {'budget':>8} {'simple_regret':>16} "
                  f"{'se':>10} {'evals':>10} {'se':>8} {'seeds':>5}"]
    for alg in sorted(per_alg):
        rows, g = per_alg[alg]
        for r in rows:
            csv_lines.append(alg + "," + ",".join(
                str(int(r[c])) if c == "n_seeds" else repr(float(r[c]))
                for c in SUMMARY_COLUMNS))
            text_lines.append(
                f"{alg:<10} {r['budget']:>8.1f} {r['simple_regret_mean']:>16.6f} "
                f"{r['simple_regret_se']:>10.6f} {r['evals_mean']:>10.1f} "
                f"{r['evals_se']:>8.2f} {r['n_seeds']:>5d}")
    return "\n".join(csv_lines) + "\n", "\n".join(text_lines) + "\n"
