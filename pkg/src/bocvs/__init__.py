"""Budgeted Bayesian optimization over cost-varying control-variable subsets."""

from .acquisition import (AcquisitionSpec, BoundsSolution, maximize_bounds,
                          maximize_expected, maximize_expected_lcb,
                          maximize_expected_ucb, maximize_over_family)
from .algorithm import (BudgetMeter, CostEstimator, ExploitState, ExploreCache,
                        RunConfig, RunTrace, TraceRow, alpha_schedule,
                        exploit_step, explore_phase, run,
                        seed_intersected_bounds)
from .baselines import (BaselineSpec, etc50_run, run_baseline,
                        sample_posterior_function, size_groups, ts_psq_run,
                        ts_psq_step, ucb_psq_run, ucb_psq_step)
from .benchmarks import (CostModel, ObjectiveEnvironment, OracleSolution,
                         compute_oracle, fetch_airfoil, make_ackley_env,
                         make_airfoil_env, make_hartmann_env, make_levy_env,
                         named_cost_model, validate_cost_ordering)
from .control import (ControlSetFamily, PartialQuery, SampleBank,
                      VariableDistribution, assemble, expected_value,
                      sample_complement, split, truncnorm_family,
                      uniform_family)
from .gp import (BetaSchedule, GaussianProcessState, KernelSpec, mig_estimate,
                 mig_profile)
from .harness import (ExperimentConfig, PlayValueCache, build_ledger,
                      cost_regret, default_grid, oracle_for_config,
                      quality_regret, report, run_experiment)

__version__ = "0.1.0"
