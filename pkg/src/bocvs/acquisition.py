"""Maximizing expected scores over the control partial-query space.

The optimizer is deterministic given its seed: low-discrepancy starting
candidates, plus rounds of shrinking coordinate-wise perturbations around the
incumbent.  Scores are bank averages (common random numbers), so argmax
comparisons across candidates are noise-aligned.  No gradients: the searched
subspaces are at most a dozen coordinates wide.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence

import numpy as np
from scipy.stats import qmc

from .control import ControlSetFamily, PartialQuery, SampleBank, assemble_batch
from .gp import BetaSchedule, GaussianProcessState

# Rows per scoring chunk; keeps assembled query blocks comfortably in memory.
_CHUNK_ROWS = 200_000


@dataclass(frozen=True)
class AcquisitionSpec:
    """Search-effort knobs for one solve.

    ``max_incumbents`` caps how many previously played partial queries are
    injected as candidates (most recent kept); None injects all of them.
    ``refine_top`` restarts the local search from that many of the best raw
    candidates, and ``sweeps_per_scale`` repeats coordinate passes at each
    step size while they keep improving.
    """

    n_candidates: int = 256
    refine_rounds: int = 10
    shrink: float = 0.5
    seed: int = 0
    max_incumbents: Optional[int] = None
    refine_top: int = 1
    sweeps_per_scale: int = 1
    solve_dtype: str = "float64"

    def __post_init__(self):
        if self.n_candidates < 1:
            raise ValueError("n_candidates must be >= 1")
        if self.refine_rounds < 0:
            raise ValueError("refine_rounds must be >= 0")
        if not (0.0 < self.shrink < 1.0):
            raise ValueError("shrink must lie in (0, 1)")
        if self.refine_top < 1 or self.sweeps_per_scale < 1:
            raise ValueError("refine_top and sweeps_per_scale must be >= 1")
        if self.solve_dtype not in ("float64", "float32"):
            raise ValueError("solve_dtype must be float64 or float32")


def _sobol_candidates(k: int, n: int, seed: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        return qmc.Sobol(d=k, scramble=True, seed=seed).random(n)


def _candidate_pool(family: ControlSetFamily, i: int, spec: AcquisitionSpec,
                    incumbents: Optional[np.ndarray]) -> np.ndarray:
    k = family.set_size(i)
    pool = _sobol_candidates(k, spec.n_candidates, spec.seed)
    if incumbents is not None and len(incumbents) and k > 0:
        inc = np.atleast_2d(np.asarray(incumbents, dtype=float))
        if inc.shape[1] != k:
            raise ValueError(f"incumbents have width {inc.shape[1]}, set needs {k}")
        if spec.max_incumbents is not None and inc.shape[0] > spec.max_incumbents:
            inc = inc[-spec.max_incumbents:]
        inc = np.unique(inc, axis=0)
        pool = np.vstack([pool, inc])
    return pool


def _mean_over_bank(values: np.ndarray, n: int, S: int) -> np.ndarray:
    return values.reshape(n, S).mean(axis=1)


def _score_candidates(score_fn, family, i, P, bank: SampleBank) -> np.ndarray:
    """Bank-averaged scores for candidate control rows P; score_fn: (n,d)->(n,)."""
    B = bank.effective(i)
    S = B.shape[0]
    n = P.shape[0]
    per_chunk = max(1, _CHUNK_ROWS // S)
    out = np.empty(n)
    for lo in range(0, n, per_chunk):
        hi = min(n, lo + per_chunk)
        X = assemble_batch(family, i, P[lo:hi], B)
        out[lo:hi] = _mean_over_bank(np.asarray(score_fn(X), dtype=float).ravel(),
                                     hi - lo, S)
    return out


def _refine_one(score_rows_fn, best_x: np.ndarray, best_val: float,
                spec: AcquisitionSpec) -> tuple:
    """Coordinate descent over shrinking step sizes from one starting point."""
    k = best_x.shape[0]
    for r in range(spec.refine_rounds):
        step = 0.5 * spec.shrink**r
        for _ in range(spec.sweeps_per_scale):
            cands = np.repeat(best_x[None, :], 2 * k, axis=0)
            for j in range(k):
                cands[2 * j, j] = min(1.0, best_x[j] + step)
                cands[2 * j + 1, j] = max(0.0, best_x[j] - step)
            vals = score_rows_fn(cands)
            j = int(np.argmax(vals))
            if vals[j] > best_val:
                best_val = float(vals[j])
                best_x = cands[j].copy()
            else:
                break
    return best_x, best_val


def _coordinate_refine(score_rows_fn, pool: np.ndarray, vals: np.ndarray,
                       spec: AcquisitionSpec) -> tuple:
    """Refine the best raw candidates; never returns less than the raw max."""
    order = np.argsort(-vals, kind="stable")[:spec.refine_top]
    best_x = pool[order[0]].copy()
    best_val = float(vals[order[0]])
    if pool.shape[1] == 0 or spec.refine_rounds == 0:
        return best_x, best_val
    for idx in order:
        x, v = _refine_one(score_rows_fn, pool[idx].copy(), float(vals[idx]),
                           spec)
        if v > best_val:
            best_x, best_val = x, v
    return best_x, best_val


def maximize_expected(score_fn: Callable[[np.ndarray], np.ndarray],
                      family: ControlSetFamily, i: int, bank: SampleBank,
                      spec: AcquisitionSpec,
                      incumbents: Optional[np.ndarray] = None) -> tuple:
    """Best (PartialQuery, bank-averaged score) found for control set i."""
    pool = _candidate_pool(family, i, spec, incumbents)
    score_rows = lambda P: _score_candidates(score_fn, family, i, P, bank)
    vals = score_rows(pool)
    best_x, best_val = _coordinate_refine(score_rows, pool, vals, spec)
    return PartialQuery(i, best_x), best_val


@dataclass
class BoundsSolution:
    """Per-set maximizers of the expected upper and lower confidence bounds."""

    ucb_query: PartialQuery
    ucb_value: float
    lcb_query: PartialQuery
    lcb_value: float


def maximize_bounds(state: GaussianProcessState, beta: float,
                    family: ControlSetFamily, i: int, bank: SampleBank,
                    spec: AcquisitionSpec,
                    incumbents: Optional[np.ndarray] = None) -> BoundsSolution:
    """Solve the expected-UCB and expected-LCB maximizations together.

    Both objectives share each candidate's posterior evaluation, which is the
    expensive part, so the pair costs barely more than one solve.
    """
    B = bank.effective(i)
    S = B.shape[0]
    posterior = (state.posterior_f32 if spec.solve_dtype == "float32"
                 else state.posterior)

    def both_rows(P: np.ndarray) -> tuple:
        n = P.shape[0]
        per_chunk = max(1, _CHUNK_ROWS // S)
        e_mu = np.empty(n)
        e_sd = np.empty(n)
        for lo in range(0, n, per_chunk):
            hi = min(n, lo + per_chunk)
            X = assemble_batch(family, i, P[lo:hi], B)
            mu, sd = posterior(X)
            e_mu[lo:hi] = _mean_over_bank(mu, hi - lo, S)
            e_sd[lo:hi] = _mean_over_bank(sd, hi - lo, S)
        return e_mu + beta * e_sd, e_mu - beta * e_sd

    pool = _candidate_pool(family, i, spec, incumbents)
    u_vals, l_vals = both_rows(pool)
    ux, uv = _coordinate_refine(lambda P: both_rows(P)[0], pool, u_vals, spec)
    lx, lv = _coordinate_refine(lambda P: both_rows(P)[1], pool, l_vals, spec)
    return BoundsSolution(PartialQuery(i, ux), uv, PartialQuery(i, lx), lv)


def _beta_for(state: GaussianProcessState, schedule: BetaSchedule) -> float:
    # Bounds for the upcoming round use the width indexed one past the data size.
    return schedule.value(state.num_obs + 1)


def maximize_expected_ucb(state: GaussianProcessState, schedule: BetaSchedule,
                          family: ControlSetFamily, i: int, bank: SampleBank,
                          spec: AcquisitionSpec,
                          incumbents: Optional[np.ndarray] = None) -> tuple:
    sol = maximize_bounds(state, _beta_for(state, schedule), family, i, bank,
                          spec, incumbents)
    return sol.ucb_query, sol.ucb_value


def maximize_expected_lcb(state: GaussianProcessState, schedule: BetaSchedule,
                          family: ControlSetFamily, i: int, bank: SampleBank,
                          spec: AcquisitionSpec,
                          incumbents: Optional[np.ndarray] = None) -> tuple:
    sol = maximize_bounds(state, _beta_for(state, schedule), family, i, bank,
                          spec, incumbents)
    return sol.lcb_query, sol.lcb_value


def maximize_over_family(state: GaussianProcessState, schedule: BetaSchedule,
                         family: ControlSetFamily, subset: Sequence[int],
                         banks: SampleBank, spec: AcquisitionSpec,
                         kind: str = "ucb",
                         incumbents_map: Optional[Dict[int, np.ndarray]] = None) -> tuple:
    """Outer argmax over a nonempty collection of set indices.

    Ties go to the smallest set index (strict improvement required while
    scanning in ascending order).
    """
    subset = sorted(set(int(i) for i in subset))
    if not subset:
        raise ValueError("subset filter must be nonempty")
    if kind not in ("ucb", "lcb"):
        raise ValueError(f"kind must be 'ucb' or 'lcb', got {kind!r}")
    solver = maximize_expected_ucb if kind == "ucb" else maximize_expected_lcb
    best = None
    for i in subset:
        inc = incumbents_map.get(i) if incumbents_map else None
        pq, val = solver(state, schedule, family, i, banks, spec, inc)
        if best is None or val > best[2]:
            best = (i, pq, val)
    return best
