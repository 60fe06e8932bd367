"""Explore-then-commit optimization over cost-varying control subsets.

The run is split into a round-robin exploration phase and an exploitation
phase.  Exploration seeds intersected confidence bounds: a running max of
expected-LCB maxima and, per set, a running min of expected-UCB maxima.
Exploitation keeps only sets whose intersected UCB clears a (1 - alpha)
fraction of the intersected LCB, then plays the cheapest of those by an
optimistic (Hoeffding-lower-bound) cost estimate, spending a fixed budget of
unknown random costs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .acquisition import AcquisitionSpec, BoundsSolution, maximize_bounds
from .benchmarks import CostModel, ObjectiveEnvironment
from .control import (ControlSetFamily, PartialQuery, SampleBank, assemble,
                      sample_complement)
from .gp import BetaSchedule, GaussianProcessState, KernelSpec


@dataclass
class CostEstimator:
    """Empirical per-set cost means with an optimistic confidence bonus.

    The bonus sqrt(2 * log(horizon) / plays) shrinks as a set is played; the
    lower bound is the clamped mean-minus-bonus.  ``horizon`` is a fixed
    upper proxy for the total number of plays (any proxy at least as large as
    the realized count preserves the Hoeffding guarantee).
    """

    num_sets: int
    horizon: float
    counts: np.ndarray = field(init=False)
    sums: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.num_sets < 1:
            raise ValueError("num_sets must be >= 1")
        if not self.horizon > 1:
            raise ValueError("horizon must exceed 1")
        self.counts = np.zeros(self.num_sets, dtype=int)
        self.sums = np.zeros(self.num_sets)

    def record(self, i: int, draw: float) -> None:
        if not (1 <= i <= self.num_sets):
            raise ValueError(f"set index {i} outside 1..{self.num_sets}")
        if draw < 0:
            raise ValueError("cost draws are nonnegative")
        self.counts[i - 1] += 1
        self.sums[i - 1] += draw

    @property
    def total_plays(self) -> int:
        return int(self.counts.sum())

    def means(self) -> np.ndarray:
        out = np.zeros(self.num_sets)
        played = self.counts > 0
        out[played] = self.sums[played] / self.counts[played]
        return out

    def bonuses(self) -> np.ndarray:
        out = np.full(self.num_sets, np.inf)
        played = self.counts > 0
        out[played] = np.sqrt(2.0 * np.log(self.horizon) / self.counts[played])
        return out

    def lower_bounds(self) -> np.ndarray:
        return np.maximum(self.means() - self.bonuses(), 0.0)


@dataclass
class BudgetMeter:
    """Budget guard: a play may start only while a worst-case draw still fits.

    ``support_upper`` is the configured upper bound of the cost support; the
    final draw can overshoot the budget by at most that much.
    """

    budget: float
    support_upper: float = 1.0
    spent: float = 0.0

    def __post_init__(self):
        if not self.budget > 0:
            raise ValueError("budget must be positive")
        if not self.support_upper > 0:
            raise ValueError("support_upper must be positive")

    @property
    def remaining(self) -> float:
        return self.budget - self.spent

    def can_play(self) -> bool:
        return self.remaining >= self.support_upper

    def charge(self, draw: float) -> None:
        if not self.can_play():
            raise RuntimeError("charge on an exhausted budget")
        if draw < 0:
            raise ValueError("cost draws are nonnegative")
        self.spent += draw
        if self.spent - self.budget > self.support_upper:
            raise RuntimeError(
                f"overshoot {self.spent - self.budget:.4f} exceeds the "
                f"configured cost support bound {self.support_upper}")


@dataclass
class TraceRow:
    t: int
    phase: str
    set_index: int
    pq: np.ndarray
    complement: np.ndarray
    y: float
    cost_draw: float
    cum_cost: float
    alpha: float
    s1: tuple


@dataclass
class RunTrace:
    """Append-only per-iteration record; identical schema for every algorithm."""

    algorithm: str
    seed: int
    rows: List[TraceRow] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)


@dataclass
class ExploreCache:
    """Per-round solve values kept so bound seeding reuses fresh posteriors."""

    per_set_ucb: Dict[int, List[float]]
    round_lcb: List[float]


@dataclass
class ExploitState:
    """Intersected bounds plus the derived feasible and cheapest sets."""

    lcb_bar: float
    ucb_bar: np.ndarray
    s1: tuple = ()
    s3: tuple = ()


def alpha_schedule(alpha0: float, halving_every: int, evals: int) -> float:
    """Tolerance after a number of exploitation evaluations: halved per block."""
    if not (0.0 <= alpha0 <= 1.0):
        raise ValueError("alpha0 must lie in [0, 1]")
    if halving_every < 1:
        raise ValueError("halving_every must be >= 1")
    if evals < 0:
        raise ValueError("evals must be >= 0")
    return alpha0 * 2.0 ** (-(evals // halving_every))


@dataclass
class RngBundle:
    """Independent, reproducible streams for each randomness source."""

    seed: int

    def __post_init__(self):
        kids = np.random.SeedSequence(self.seed).spawn(5)
        self.banks = np.random.default_rng(kids[0])
        self.complements = np.random.default_rng(kids[1])
        self.noise = np.random.default_rng(kids[2])
        self.costs = np.random.default_rng(kids[3])
        self.extra = np.random.default_rng(kids[4])

    def bank_seed(self) -> int:
        return int(self.banks.integers(2**63))


@dataclass
class RunConfig:
    """Everything one optimization run needs, including all baselines' knobs."""

    env: ObjectiveEnvironment
    family: ControlSetFamily
    cost_model: CostModel
    kernel: KernelSpec
    lam: float
    schedule: BetaSchedule
    budget: float
    support_upper: float = 1.0
    tau: Optional[int] = None
    explore_cap: Optional[float] = None
    alpha0: float = 0.1
    halving_every: Optional[int] = None
    mc_samples: int = 64
    acq: AcquisitionSpec = field(default_factory=AcquisitionSpec)
    seed: int = 0
    cost_floor: float = 0.01
    lazy_filter: bool = False
    plays_per_group: int = 50
    feature_count: int = 512
    # Constant subtracted from observations before they reach the regression
    # state and added back onto its bounds: a configured prior level.  The
    # nonnegative objectives sit far from zero, which a zero-mean prior would
    # otherwise have to absorb into its output scale.
    y_offset: float = 0.0

    def validate(self) -> None:
        if not self.budget > 0:
            raise ValueError("budget must be positive")
        if self.family.num_sets < 1:
            raise ValueError("need at least one control set")
        if not (0.0 <= self.alpha0 <= 1.0):
            raise ValueError("alpha0 must lie in [0, 1]")
        if self.tau is not None and self.tau < 1:
            raise ValueError("tau must be >= 1")
        if self.mc_samples < 1:
            raise ValueError("mc_samples must be >= 1")
        if not self.cost_floor > 0:
            raise ValueError("cost_floor must be positive")
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if self.cost_model.num_sets != self.family.num_sets:
            raise ValueError("cost model and family disagree on the set count")
        if self.env.dim != self.family.dim:
            raise ValueError("environment and family disagree on the dimension")
        if self.plays_per_group < 1:
            raise ValueError("plays_per_group must be >= 1")

    def derived_tau(self) -> int:
        """Largest exploration passes whose worst-case spend fits the cap."""
        if self.tau is not None:
            return self.tau
        cap = self.effective_cap()
        per_pass = self.family.num_sets * self.support_upper
        return max(1, int(cap // per_pass))

    def effective_cap(self) -> float:
        cap = 0.6 * self.budget if self.explore_cap is None else self.explore_cap
        return min(cap, self.budget)

    def horizon(self) -> float:
        return max(2.0, math.ceil(self.budget / self.cost_floor))


def _play(config: RunConfig, gp: GaussianProcessState, meter: BudgetMeter,
          estimator: CostEstimator, trace: RunTrace, rngs: RngBundle, t: int,
          phase: str, pq: PartialQuery, alpha: float,
          s1: tuple) -> GaussianProcessState:
    """Observe one play end to end; the rng consumption order is fixed."""
    comp = sample_complement(config.family, pq.set_index, rngs.complements)
    x = assemble(config.family, pq, comp)
    y = config.env.observe(x, rngs.noise)
    draw = config.cost_model.draw(pq.set_index, rngs.costs)
    meter.charge(draw)
    estimator.record(pq.set_index, draw)
    gp = gp.update(x, y - config.y_offset)
    trace.rows.append(TraceRow(t, phase, pq.set_index, pq.values.copy(), comp,
                               y, draw, meter.spent, alpha, s1))
    return gp


def _incumbent_arrays(incumbents: Dict[int, list]) -> Dict[int, np.ndarray]:
    return {i: np.asarray(v) for i, v in incumbents.items() if v}


def explore_phase(env: ObjectiveEnvironment, gp: GaussianProcessState,
                  family: ControlSetFamily, tau: int, schedule: BetaSchedule,
                  spec: AcquisitionSpec, *, config: RunConfig,
                  meter: BudgetMeter, estimator: CostEstimator,
                  trace: RunTrace, rngs: RngBundle,
                  incumbents: Dict[int, list]) -> tuple:
    """Round-robin exploration: tau passes over the sets, budget permitting.

    Every round solves the played set's expected-UCB maximization and caches,
    per round, that value together with the expected-LCB maximum over all
    sets, so bound seeding never replays stale posteriors.
    """
    if tau < 1:
        raise ValueError("tau must be >= 1")
    m = family.num_sets
    cache = ExploreCache({i: [] for i in range(1, m + 1)}, [])
    cap = config.effective_cap()
    spent_before = meter.spent
    for t in range(1, m * tau + 1):
        if not meter.can_play():
            break
        if meter.spent - spent_before + config.support_upper > cap:
            break
        i = ((t - 1) % m) + 1
        bank = SampleBank(family, config.mc_samples, rngs.bank_seed())
        beta = schedule.value(gp.num_obs + 1)
        inc = _incumbent_arrays(incumbents)
        sols = {j: maximize_bounds(gp, beta, family, j, bank, spec, inc.get(j))
                for j in range(1, m + 1)}
        # Cached bound values live on the objective's scale.
        cache.per_set_ucb[i].append(sols[i].ucb_value + config.y_offset)
        cache.round_lcb.append(max(s.lcb_value for s in sols.values())
                               + config.y_offset)
        pq = sols[i].ucb_query
        gp = _play(config, gp, meter, estimator, trace, rngs, t, "explore",
                   pq, config.alpha0, ())
        incumbents[i].append(pq.values.copy())
    return gp, trace, cache


def seed_intersected_bounds(cache: ExploreCache, num_sets: int) -> ExploitState:
    """Intersect the cached exploration-round maxima into starting bounds.

    Sets never solved during exploration keep an infinite (vacuous) upper
    bound; an empty cache leaves the lower bound vacuous as well.
    """
    lcb_bar = max(cache.round_lcb) if cache.round_lcb else -np.inf
    ucb_bar = np.full(num_sets, np.inf)
    for i in range(1, num_sets + 1):
        vals = cache.per_set_ucb.get(i, [])
        if vals:
            ucb_bar[i - 1] = min(vals)
    return ExploitState(lcb_bar, ucb_bar)


def exploit_step(gp: GaussianProcessState, exploit: ExploitState,
                 cost: CostEstimator, family: ControlSetFamily,
                 banks: SampleBank, schedule: BetaSchedule,
                 spec: AcquisitionSpec, alpha_t: float, *,
                 incumbents: Optional[Dict[int, np.ndarray]] = None,
                 active_only: bool = False, value_offset: float = 0.0) -> tuple:
    """One exploitation decision; returns (set index, partial query, new state).

    Tightens the intersected bounds with fresh per-set solves, rebuilds the
    feasible set, resets the bounds to the current round's values if the
    feasible set ever empties, and plays the expected-UCB argmax among the
    feasible sets with the lowest optimistic cost estimate.

    ``active_only`` skips re-solving sets already filtered out: the tolerance
    never grows and the intersected LCB never drops between resets, so an
    excluded set stays excluded; this is a large saving once the feasible set
    is small.
    """
    m = family.num_sets
    beta = schedule.value(gp.num_obs + 1)
    incumbents = incumbents or {}

    def solve(i: int) -> BoundsSolution:
        sol = maximize_bounds(gp, beta, family, i, banks, spec,
                              incumbents.get(i))
        sol.ucb_value += value_offset
        sol.lcb_value += value_offset
        return sol

    if active_only and exploit.s1:
        active = list(exploit.s1)
    else:
        active = list(range(1, m + 1))
    sols = {i: solve(i) for i in active}

    cur_lcb = max(sols[i].lcb_value for i in active)
    lcb_argmax = min(i for i in active if sols[i].lcb_value == cur_lcb)
    lcb_bar = max(exploit.lcb_bar, cur_lcb)
    ucb_bar = exploit.ucb_bar.copy()
    for i in active:
        ucb_bar[i - 1] = min(ucb_bar[i - 1], sols[i].ucb_value)

    threshold = (1.0 - alpha_t) * lcb_bar
    s1 = [i for i in range(1, m + 1) if ucb_bar[i - 1] > threshold]
    if not s1:
        # Reset both bounds to the current round's values and rebuild.
        for i in range(1, m + 1):
            if i not in sols:
                sols[i] = solve(i)
        cur_lcb = max(s.lcb_value for s in sols.values())
        lcb_argmax = min(i for i in sols if sols[i].lcb_value == cur_lcb)
        lcb_bar = cur_lcb
        ucb_bar = np.array([sols[i].ucb_value for i in range(1, m + 1)])
        s1 = [i for i in range(1, m + 1) if ucb_bar[i - 1] > (1.0 - alpha_t) * lcb_bar]
        if not s1:
            # Only reachable at alpha = 0 with a zero-width bound; keep the
            # set that attains the current LCB.
            s1 = [lcb_argmax]
    assert s1, "feasible set empty after reset"

    lower = cost.lower_bounds()
    s1_lower = np.array([lower[i - 1] for i in s1])
    cheapest = s1_lower.min()
    s3 = [i for i in s1 if lower[i - 1] == cheapest]

    best_i, best_val = None, -np.inf
    for i in s3:
        if i not in sols:
            sols[i] = solve(i)
        if sols[i].ucb_value > best_val:
            best_i, best_val = i, sols[i].ucb_value
    new_state = ExploitState(lcb_bar, ucb_bar, tuple(s1), tuple(s3))
    return best_i, sols[best_i].ucb_query, new_state


def run(config: RunConfig) -> RunTrace:
    """Full budgeted run: exploration, bound seeding, exploitation loop."""
    config.validate()
    family, env = config.family, config.env
    m = family.num_sets
    meter = BudgetMeter(config.budget, config.support_upper)
    estimator = CostEstimator(m, config.horizon())
    gp = GaussianProcessState.empty(config.kernel, config.lam)
    rngs = RngBundle(config.seed)
    trace = RunTrace("proposed", config.seed)
    incumbents: Dict[int, list] = {i: [] for i in range(1, m + 1)}
    tau = config.derived_tau()

    gp, trace, cache = explore_phase(
        env, gp, family, tau, config.schedule, config.acq, config=config,
        meter=meter, estimator=estimator, trace=trace, rngs=rngs,
        incumbents=incumbents)
    exploit = seed_intersected_bounds(cache, m)

    halving = config.halving_every or env.dim
    evals = 0
    t = len(trace.rows)
    while meter.can_play():
        t += 1
        alpha_t = alpha_schedule(config.alpha0, halving, evals)
        bank = SampleBank(family, config.mc_samples, rngs.bank_seed())
        i_t, pq, exploit = exploit_step(
            gp, exploit, estimator, family, bank, config.schedule, config.acq,
            alpha_t, incumbents=_incumbent_arrays(incumbents),
            active_only=config.lazy_filter, value_offset=config.y_offset)
        gp = _play(config, gp, meter, estimator, trace, rngs, t, "exploit",
                   pq, alpha_t, exploit.s1)
        incumbents[i_t].append(pq.values.copy())
        evals += 1
    return trace
