"""Shared test utilities: independent oracles and synthetic constructions."""

from __future__ import annotations

import numpy as np

from bocvs.gp import BetaSchedule, GaussianProcessState, KernelSpec, mig_profile


def dense_posterior(kernel: KernelSpec, lam: float, X: np.ndarray,
                    y: np.ndarray, queries: np.ndarray) -> tuple:
    """Direct dense-solve posterior, independent of the incremental factor."""
    queries = np.atleast_2d(queries)
    if len(X) == 0:
        mu = np.zeros(queries.shape[0])
        var = kernel.diag(queries.shape[0])
        return mu, np.sqrt(var)
    A = kernel.gram(X) + lam * np.eye(len(X))
    K_star = kernel.gram(X, queries)
    sol = np.linalg.solve(A, np.column_stack([y[:, None], K_star]))
    mu = K_star.T @ sol[:, 0]
    var = kernel.diag(queries.shape[0]) - np.einsum("ij,ij->j", K_star, sol[:, 1:])
    return mu, np.sqrt(np.maximum(var, 0.0))


def telescoped_information_gain(kernel: KernelSpec, lam: float,
                                X: np.ndarray) -> float:
    """Sum of 0.5*log(1 + var/lam) along the sequence, built point by point."""
    state = GaussianProcessState.empty(kernel, lam)
    total = 0.0
    for x in X:
        _, sd = state.posterior(x)
        total += 0.5 * np.log1p(sd**2 / lam)
        state = state.update(x, 0.0)
    return total


def rkhs_function(kernel: KernelSpec, norm_bound: float, n_centers: int,
                  rng: np.random.Generator):
    """Random finite kernel expansion with RKHS norm just under the bound."""
    Z = rng.uniform(size=(n_centers, kernel.dim))
    a = rng.standard_normal(n_centers)
    K = kernel.gram(Z)
    norm = np.sqrt(a @ K @ a)
    a *= 0.9 * norm_bound / norm
    return lambda X: kernel.gram(np.atleast_2d(X), Z) @ a


def coverage_trial(kernel: KernelSpec, norm_bound: float, noise_sd: float,
                   delta: float, rounds: int, n_test: int,
                   schedule: BetaSchedule, seed: int) -> bool:
    """True when the confidence band covers a random RKHS target everywhere.

    Runs ``rounds`` random queries with Gaussian observation noise and checks
    |posterior mean - f| <= beta_t * sd at ``n_test`` fixed points before
    every round.
    """
    rng = np.random.default_rng(seed)
    f = rkhs_function(kernel, norm_bound, 30, rng)
    lam = 1.0 + 2.0 / rounds
    state = GaussianProcessState.empty(kernel, lam)
    test_points = rng.uniform(size=(n_test, kernel.dim))
    f_test = f(test_points)
    for t in range(1, rounds + 1):
        beta = schedule.value(t)
        mu, sd = state.posterior(test_points)
        if np.any(np.abs(mu - f_test) > beta * sd + 1e-12):
            return False
        x = rng.uniform(size=kernel.dim)
        y = float(f(x[None, :])[0]) + rng.normal(0.0, noise_sd)
        state = state.update(x, y)
    return True


def coverage_schedule(kernel: KernelSpec, norm_bound: float, noise_sd: float,
                      delta: float, rounds: int, seed: int = 0) -> BetaSchedule:
    lam = 1.0 + 2.0 / rounds
    sampler = lambda n: np.random.default_rng(seed).uniform(
        size=(n, kernel.dim))
    gains = mig_profile(kernel, sampler, rounds, n_candidates=256, lam=lam)
    return BetaSchedule(rkhs_bound=norm_bound, noise_scale=noise_sd,
                        delta=delta, mig=lambda s: gains[min(s, rounds)])


def make_toy_env(d: int, noise_sd: float = 0.0):
    """Smooth nonnegative toy objective: peak at the cube center."""
    from bocvs.benchmarks import ObjectiveEnvironment

    fn = lambda X: np.exp(-2.0 * np.sum((X - 0.5) ** 2, axis=1))
    return ObjectiveEnvironment(f"toy{d}", d, fn, 0.0, noise_sd, ())


def make_tiny_run_config(**overrides):
    """Small, fast run configuration for loop-level tests."""
    from bocvs.acquisition import AcquisitionSpec
    from bocvs.algorithm import RunConfig
    from bocvs.benchmarks import CostModel
    from bocvs.control import uniform_family

    d = overrides.pop("d", 2)
    env = overrides.pop("env", None) or make_toy_env(d)
    sets = overrides.pop("sets", [(1,), (1, 2)])
    family = overrides.pop("family", None) or uniform_family(d, sets)
    cost_model = overrides.pop("cost_model", None) or CostModel(
        np.linspace(0.3, 0.5, family.num_sets), noise_sd=0.0)
    defaults = dict(
        env=env, family=family, cost_model=cost_model,
        kernel=KernelSpec("squared-exponential", np.full(d, 0.5)), lam=0.05,
        schedule=BetaSchedule(constant=2.0), budget=3.0, support_upper=0.5,
        tau=1, explore_cap=None, alpha0=0.5, mc_samples=4,
        acq=AcquisitionSpec(n_candidates=16, refine_rounds=2), seed=0)
    defaults.update(overrides)
    return RunConfig(**defaults)
