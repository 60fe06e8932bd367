"""The three comparison algorithms on the same budget and seed.

UCB-PSQ maximizes the expected upper bound cost-blind, TS-PSQ plays a
posterior sample's argmax, and the explore-then-commit variant spends fixed
plays per size group before committing.
"""

from collections import Counter

import numpy as np

from bocvs import (AcquisitionSpec, BetaSchedule, KernelSpec, RunConfig,
                   etc50_run, make_hartmann_env, named_cost_model,
                   truncnorm_family, ts_psq_run, ucb_psq_run)

env = make_hartmann_env()
family = truncnorm_family(env.dim, env.default_sets, variance=0.02)

def config(seed=0):
    return RunConfig(
        env=env, family=family, cost_model=named_cost_model("cheap"),
        kernel=KernelSpec("squared-exponential", np.full(12, 0.5), 4.0),
        lam=0.01, schedule=BetaSchedule(constant=2.0),
        budget=10.0, mc_samples=16, plays_per_group=2, feature_count=256,
        acq=AcquisitionSpec(n_candidates=64, refine_rounds=4,
                            solve_dtype="float32"),
        seed=seed)

for name, runner in (("ucb-psq", ucb_psq_run), ("ts-psq", ts_psq_run),
                     ("etc", etc50_run)):
    trace = runner(config())
    sets = dict(sorted(Counter(r.set_index for r in trace).items()))
    print(f"{name:8s} {len(trace):3d} plays  spend {trace.rows[-1].cum_cost:6.2f}"
          f"  plays per set {sets}")
