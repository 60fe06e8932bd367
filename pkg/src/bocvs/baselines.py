"""Comparison algorithms: cost-blind UCB, Thompson sampling, explore-then-commit.

All baselines share the budget meter, rng-stream layout, and trace schema of
the main algorithm, so traces are comparable column for column.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from .acquisition import AcquisitionSpec, maximize_expected, maximize_over_family
from .algorithm import (BudgetMeter, CostEstimator, RngBundle, RunConfig,
                        RunTrace, _incumbent_arrays, _play)
from .control import ControlSetFamily, SampleBank
from .gp import BetaSchedule, GaussianProcessState


@dataclass(frozen=True)
class BaselineSpec:
    """Which baseline to run and its knobs."""

    kind: str
    beta_override: float = 2.0
    plays_per_group: int = 50
    feature_count: int = 512

    def __post_init__(self):
        if self.kind not in ("ucb-psq", "ts-psq", "etc-50"):
            raise ValueError(f"unknown baseline kind {self.kind!r}")
        if self.plays_per_group < 1:
            raise ValueError("plays_per_group must be >= 1")


def ucb_psq_step(gp: GaussianProcessState, family: ControlSetFamily,
                 banks: SampleBank, schedule: BetaSchedule,
                 spec: AcquisitionSpec,
                 incumbents: Optional[Dict[int, np.ndarray]] = None) -> tuple:
    """Cost-blind argmax of the expected UCB over every (set, partial query)."""
    i, pq, _ = maximize_over_family(gp, schedule, family,
                                    range(1, family.num_sets + 1), banks, spec,
                                    "ucb", incumbents)
    return i, pq


def sample_posterior_function(gp: GaussianProcessState, n_features: int,
                              rng: np.random.Generator) -> Callable:
    """One approximate posterior draw via a random cosine-feature expansion.

    Weight-space view: with features phi scaled so phi(x).phi(x') approximates
    the kernel, the posterior over weights given the data is Gaussian with
    mean A^-1 Phi^T y and covariance lam * A^-1 where A = Phi^T Phi + lam*I.
    The returned callable is a fixed function of its input.
    """
    kernel = gp.kernel
    if kernel.family != "squared-exponential":
        raise ValueError("posterior function sampling needs the "
                         "squared-exponential kernel")
    d = kernel.dim
    omega = rng.standard_normal((d, n_features)) / kernel.lengthscales[:, None]
    offsets = rng.uniform(0.0, 2.0 * np.pi, size=n_features)
    scale = np.sqrt(2.0 * kernel.output_scale / n_features)

    def features(X: np.ndarray) -> np.ndarray:
        return scale * np.cos(np.atleast_2d(X) @ omega + offsets)

    zeta = rng.standard_normal(n_features)
    if gp.num_obs == 0:
        weights = zeta
    else:
        Phi = features(gp.X)
        A = Phi.T @ Phi + gp.lam * np.eye(n_features)
        La = cholesky(A, lower=True, check_finite=False)
        mean = solve_triangular(
            La.T, solve_triangular(La, Phi.T @ gp.y, lower=True,
                                   check_finite=False),
            lower=False, check_finite=False)
        weights = mean + np.sqrt(gp.lam) * solve_triangular(
            La.T, zeta, lower=False, check_finite=False)

    return lambda X: features(X) @ weights


def ts_psq_step(gp: GaussianProcessState, family: ControlSetFamily,
                banks: SampleBank, rng: np.random.Generator,
                spec: AcquisitionSpec, n_features: int = 512,
                incumbents: Optional[Dict[int, np.ndarray]] = None) -> tuple:
    """Draw one posterior sample and play its expected-value argmax."""
    sample = sample_posterior_function(gp, n_features, rng)
    incumbents = incumbents or {}
    best = None
    for i in range(1, family.num_sets + 1):
        pq, val = maximize_expected(sample, family, i, banks, spec,
                                    incumbents.get(i))
        if best is None or val > best[2]:
            best = (i, pq, val)
    return best[0], best[1]


def _baseline_scaffold(config: RunConfig, name: str):
    config.validate()
    m = config.family.num_sets
    meter = BudgetMeter(config.budget, config.support_upper)
    estimator = CostEstimator(m, config.horizon())
    gp = GaussianProcessState.empty(config.kernel, config.lam)
    rngs = RngBundle(config.seed)
    trace = RunTrace(name, config.seed)
    incumbents = {i: [] for i in range(1, m + 1)}
    return meter, estimator, gp, rngs, trace, incumbents


def ucb_psq_run(config: RunConfig) -> RunTrace:
    meter, estimator, gp, rngs, trace, incumbents = _baseline_scaffold(
        config, "ucb-psq")
    t = 0
    while meter.can_play():
        t += 1
        bank = SampleBank(config.family, config.mc_samples, rngs.bank_seed())
        i, pq = ucb_psq_step(gp, config.family, bank, config.schedule,
                             config.acq, _incumbent_arrays(incumbents))
        gp = _play(config, gp, meter, estimator, trace, rngs, t, "exploit",
                   pq, 0.0, ())
        incumbents[i].append(pq.values.copy())
    return trace


def ts_psq_run(config: RunConfig) -> RunTrace:
    meter, estimator, gp, rngs, trace, incumbents = _baseline_scaffold(
        config, "ts-psq")
    t = 0
    while meter.can_play():
        t += 1
        bank = SampleBank(config.family, config.mc_samples, rngs.bank_seed())
        i, pq = ts_psq_step(gp, config.family, bank, rngs.extra, config.acq,
                            config.feature_count, _incumbent_arrays(incumbents))
        gp = _play(config, gp, meter, estimator, trace, rngs, t, "exploit",
                   pq, 0.0, ())
        incumbents[i].append(pq.values.copy())
    return trace


def size_groups(family: ControlSetFamily) -> list:
    """Sets grouped by cardinality, groups ordered by increasing size.

    A stand-in for grouping by cost when costs are unknown: smaller control
    sets are presumed cheaper.
    """
    sizes = sorted({len(s) for s in family.sets})
    return [[i for i in range(1, family.num_sets + 1)
             if len(family.sets[i - 1]) == size] for size in sizes]


def etc50_run(config: RunConfig) -> RunTrace:
    """Fixed plays per size group, then commit to the expected-UCB argmax set."""
    meter, estimator, gp, rngs, trace, incumbents = _baseline_scaffold(
        config, "etc-50")
    t = 0
    for group in size_groups(config.family):
        for _ in range(config.plays_per_group):
            if not meter.can_play():
                return trace
            t += 1
            bank = SampleBank(config.family, config.mc_samples,
                              rngs.bank_seed())
            i, pq, _ = maximize_over_family(
                gp, config.schedule, config.family, group, bank, config.acq,
                "ucb", _incumbent_arrays(incumbents))
            gp = _play(config, gp, meter, estimator, trace, rngs, t,
                       "explore", pq, 0.0, ())
            incumbents[i].append(pq.values.copy())
    committed = None
    while meter.can_play():
        t += 1
        bank = SampleBank(config.family, config.mc_samples, rngs.bank_seed())
        subset = (range(1, config.family.num_sets + 1) if committed is None
                  else [committed])
        i, pq, _ = maximize_over_family(
            gp, config.schedule, config.family, subset, bank, config.acq,
            "ucb", _incumbent_arrays(incumbents))
        committed = i
        gp = _play(config, gp, meter, estimator, trace, rngs, t, "exploit",
                   pq, 0.0, ())
        incumbents[i].append(pq.values.copy())
    return trace


def run_baseline(config: RunConfig, spec: BaselineSpec) -> RunTrace:
    runner = {"ucb-psq": ucb_psq_run, "ts-psq": ts_psq_run,
              "etc-50": etc50_run}[spec.kind]
    return runner(config)
