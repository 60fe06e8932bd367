"""Benchmark objectives, stochastic cost generators, and offline oracles.

Synthetic objectives are maximization problems on [0,1]^d, shifted so values
are nonnegative (required for the quality-tolerance semantics); the shift is
recorded so raw values stay recoverable.  The synthetic 12-D problems embed a
6-D function and leave coordinates 7..12 inert.
"""

from __future__ import annotations

import hashlib
import os
import urllib.request
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .acquisition import AcquisitionSpec, maximize_expected
from .control import ControlSetFamily, PartialQuery, SampleBank
from .gp import GaussianProcessState, KernelSpec

EMBEDDED_12D_SETS = (
    (1, 2, 3), (4, 5, 6), (7, 8, 9), (10, 11, 12),
    (1, 2, 3, 4, 5, 6), (7, 8, 9, 10, 11, 12),
    (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12),
)
AIRFOIL_SETS = ((4, 5), (2, 5), (1, 4), (2, 3), (3, 5), (1, 2), (3, 4))

COST_SETS = {
    "cheap": (0.01, 0.01, 0.01, 0.1, 0.1, 0.1, 1.0),
    "moderate": (0.1, 0.1, 0.1, 0.2, 0.2, 0.2, 1.0),
}

NONNEGATIVITY_MARGIN = 0.1


@dataclass
class ObjectiveEnvironment:
    """Maximization objective on the unit cube with noisy observations.

    ``value`` returns the shifted (nonnegative) objective for a batch of
    rows; subtract ``shift`` to recover raw values.
    """

    name: str
    dim: int
    fn: Callable[[np.ndarray], np.ndarray]
    shift: float
    noise_sd: float = 0.01
    default_sets: tuple = ()

    def value(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise ValueError(f"points have dimension {X.shape[1]}, expected {self.dim}")
        return self.fn(X) + self.shift

    def observe(self, x: np.ndarray, rng: np.random.Generator) -> float:
        val = float(self.value(np.asarray(x)[None, :])[0])
        if self.noise_sd > 0:
            val += rng.normal(0.0, self.noise_sd)
        return val


def hartmann6(X: np.ndarray) -> np.ndarray:
    """Six-dimensional Hartmann in maximization form (values in (0, 3.32237])."""
    A = np.array([
        [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
        [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
        [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
        [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
    ])
    P = 1e-4 * np.array([
        [1312, 1696, 5569, 124, 8283, 5886],
        [2329, 4135, 8307, 3736, 1004, 9991],
        [2348, 1451, 3522, 2883, 3047, 6650],
        [4047, 8828, 8732, 5743, 1091, 381],
    ])
    alpha = np.array([1.0, 1.2, 3.0, 3.2])
    X = np.atleast_2d(X)
    inner = np.einsum("ij,nij->ni", A, (X[:, None, :] - P[None, :, :]) ** 2)
    return np.exp(-inner) @ alpha


def ackley(X: np.ndarray, a: float = 20.0, b: float = 0.2,
           c: float = 2.0 * np.pi) -> np.ndarray:
    """Standard Ackley (minimization form, >= 0, zero at the origin)."""
    X = np.atleast_2d(X)
    d = X.shape[1]
    s1 = np.sqrt(np.sum(X**2, axis=1) / d)
    s2 = np.sum(np.cos(c * X), axis=1) / d
    return -a * np.exp(-b * s1) - np.exp(s2) + a + np.e


def levy(X: np.ndarray) -> np.ndarray:
    """Standard Levy (minimization form, zero at all-ones)."""
    X = np.atleast_2d(X)
    w = 1.0 + (X - 1.0) / 4.0
    head = np.sin(np.pi * w[:, 0]) ** 2
    mid = np.sum((w[:, :-1] - 1.0) ** 2
                 * (1.0 + 10.0 * np.sin(np.pi * w[:, :-1] + 1.0) ** 2), axis=1)
    tail = (w[:, -1] - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * w[:, -1]) ** 2)
    return head + mid + tail


def make_hartmann_env(noise_sd: float = 0.01) -> ObjectiveEnvironment:
    """12-D embedding of Hartmann-6; coordinates 7..12 are inert.

    The maximization form is already nonnegative, so the shift is just the
    safety margin.
    """
    fn = lambda X: hartmann6(X[:, :6])
    return ObjectiveEnvironment("hartmann12", 12, fn, NONNEGATIVITY_MARGIN,
                                noise_sd, EMBEDDED_12D_SETS)


def make_ackley_env(noise_sd: float = 0.01) -> ObjectiveEnvironment:
    """12-D embedding of negated Ackley-6 mapped from [0,1] to [-5,5] per axis.

    Interval bound on the box: the radial term is at least a*exp(-b*5) and
    the cosine term at least exp(-1), so Ackley stays below
    a + e - (a + 1)/e; shifting the negated values by that plus a margin
    provably keeps the objective nonnegative.  The maximum sits at the cube
    center.
    """
    bound = 20.0 + np.e - 21.0 * np.exp(-1.0)
    fn = lambda X: -ackley(-5.0 + 10.0 * X[:, :6])
    return ObjectiveEnvironment("ackley12", 12, fn,
                                bound + NONNEGATIVITY_MARGIN, noise_sd,
                                EMBEDDED_12D_SETS)


def make_levy_env(noise_sd: float = 0.01) -> ObjectiveEnvironment:
    """12-D embedding of negated Levy-6 on [-10,10]; same mechanics as Ackley."""
    # Interval bound on Levy over [-10,10]^6: w ranges over [-1.75, 3.25].
    wmax_sq = 2.75**2
    bound = 1.0 + 5 * wmax_sq * 11.0 + wmax_sq * 2.0
    fn = lambda X: -levy(-10.0 + 20.0 * X[:, :6])
    return ObjectiveEnvironment("levy12", 12, fn, bound + NONNEGATIVITY_MARGIN,
                                noise_sd, EMBEDDED_12D_SETS)


@dataclass
class CostModel:
    """Per-set mean costs with thresholded additive Gaussian noise.

    Draws for sets whose mean is below ``noise_threshold`` are exact; noisy
    draws are clamped at zero.
    """

    means: np.ndarray
    noise_sd: float = 0.02
    noise_threshold: float = 0.1
    name: str = "custom"

    def __post_init__(self):
        self.means = np.asarray(self.means, dtype=float).ravel()
        if np.any(self.means < 0):
            raise ValueError("cost means must be nonnegative")

    @property
    def num_sets(self) -> int:
        return self.means.shape[0]

    def draw(self, i: int, rng: np.random.Generator) -> float:
        if not (1 <= i <= self.num_sets):
            raise ValueError(f"set index {i} outside 1..{self.num_sets}")
        c = self.means[i - 1]
        if self.noise_sd > 0 and c >= self.noise_threshold:
            c = c + rng.normal(0.0, self.noise_sd)
        return max(float(c), 0.0)


def named_cost_model(name: str, noise_sd: float = 0.02) -> CostModel:
    if name not in COST_SETS:
        raise ValueError(f"unknown cost model {name!r}; known: {sorted(COST_SETS)}")
    return CostModel(np.array(COST_SETS[name]), noise_sd=noise_sd, name=name)


def validate_cost_ordering(family: ControlSetFamily, means: np.ndarray) -> None:
    """Subsets must not cost more than their supersets; raises on violation.

    Non-strict on purpose: the reference cost sets price one nested pair
    equally, so a strict check would reject them.
    """
    means = np.asarray(means, dtype=float).ravel()
    if means.shape[0] != family.num_sets:
        raise ValueError("need one cost mean per control set")
    for i in range(1, family.num_sets + 1):
        for j in range(1, family.num_sets + 1):
            si, sj = set(family.sets[i - 1]), set(family.sets[j - 1])
            if si < sj and means[i - 1] > means[j - 1]:
                raise ValueError(
                    f"set {i} is a subset of set {j} but costs "
                    f"{means[i - 1]} > {means[j - 1]}")


@dataclass
class OracleSolution:
    """Offline per-set optima of the expected objective.

    ``tolerated`` lists the sets whose best expected value is within a
    (1 - alpha) factor of the overall best; ``i_star`` is the cheapest of
    those under ``cost_means`` when costs were supplied.
    """

    alpha: float
    values: np.ndarray
    queries: list
    v_plus: float
    i_plus: int
    tolerated: tuple
    cost_means: Optional[np.ndarray] = None
    i_star: Optional[int] = None

    def cheapest_tolerated(self, cost_means: np.ndarray) -> int:
        cost_means = np.asarray(cost_means, dtype=float).ravel()
        best = min(self.tolerated, key=lambda i: (cost_means[i - 1], i))
        return int(best)


def compute_oracle(env: ObjectiveEnvironment, family: ControlSetFamily,
                   alpha: float, n_samples: int = 4096,
                   cost_means: Optional[np.ndarray] = None, seed: int = 0,
                   spec: Optional[AcquisitionSpec] = None) -> OracleSolution:
    """Maximize the true expected objective per set with a large search budget."""
    if not (0.0 <= alpha <= 1.0):
        raise ValueError("alpha must lie in [0, 1]")
    if spec is None:
        spec = AcquisitionSpec(n_candidates=4096, refine_rounds=16, seed=seed,
                               refine_top=16, sweeps_per_scale=2)
    bank = SampleBank(family, n_samples, seed)
    values = np.empty(family.num_sets)
    queries = []
    for i in range(1, family.num_sets + 1):
        pq, val = maximize_expected(env.value, family, i, bank, spec)
        values[i - 1] = val
        queries.append(pq.values.copy())
    i_plus = int(np.argmax(values)) + 1
    v_plus = float(values[i_plus - 1])
    tolerated = tuple(i for i in range(1, family.num_sets + 1)
                      if values[i - 1] >= (1.0 - alpha) * v_plus)
    sol = OracleSolution(alpha, values, queries, v_plus, i_plus, tolerated)
    if cost_means is not None:
        sol.cost_means = np.asarray(cost_means, dtype=float).ravel()
        sol.i_star = sol.cheapest_tolerated(sol.cost_means)
    return sol


# ---------------------------------------------------------------------------
# Airfoil self-noise surrogate (table ingestion + GP fit)

AIRFOIL_URL = ("https://archive.ics.uci.edu/ml/machine-learning-databases/"
               "00291/airfoil_self_noise.dat")
# Pin recorded on first verified fetch; set to the hex digest printed by
# scripts/fetch_airfoil.py once the file has been retrieved and inspected.
AIRFOIL_SHA256: Optional[str] = None
AIRFOIL_COLUMNS = 6
AIRFOIL_MIN_ROWS = 1000
AIRFOIL_FILENAME = "airfoil_self_noise.dat"
# Surrogate fit settings; recorded here so the oracle and every algorithm
# share them.  RMSE over training rows must stay under this fraction of the
# (unit) output standard deviation.
AIRFOIL_LENGTHSCALE = 0.2
AIRFOIL_LAMBDA = 1e-3
AIRFOIL_RMSE_LIMIT = 0.5


def airfoil_data_path(path: Optional[str] = None) -> str:
    if path:
        return path
    base = os.environ.get("BOCVS_DATA_DIR", "data")
    return os.path.join(base, AIRFOIL_FILENAME)


def fetch_airfoil(dest: str, url: str = AIRFOIL_URL,
                  expected_sha256: Optional[str] = AIRFOIL_SHA256) -> str:
    """Download the dataset, verify the checksum when pinned, return the digest."""
    os.makedirs(os.path.dirname(dest) or ".", exist_ok=True)
    with urllib.request.urlopen(url) as resp:
        payload = resp.read()
    digest = hashlib.sha256(payload).hexdigest()
    if expected_sha256 is not None and digest != expected_sha256:
        raise ValueError(
            f"checksum mismatch: got {digest}, expected {expected_sha256}")
    with open(dest, "wb") as fh:
        fh.write(payload)
    load_airfoil_table(dest)  # structural validation
    return digest


def load_airfoil_table(path: str) -> np.ndarray:
    """Parse the whitespace-delimited 6-column table; strict about bad rows."""
    if not os.path.exists(path):
        raise FileNotFoundError(
            f"dataset not found at {path}; run scripts/fetch_airfoil.py or set "
            "BOCVS_DATA_DIR")
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != AIRFOIL_COLUMNS:
                raise ValueError(
                    f"{path}:{lineno}: expected {AIRFOIL_COLUMNS} columns, "
                    f"got {len(parts)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-numeric value") from exc
    if len(rows) < AIRFOIL_MIN_ROWS:
        raise ValueError(
            f"{path}: only {len(rows)} rows, expected >= {AIRFOIL_MIN_ROWS}")
    return np.asarray(rows)


def preprocess_airfoil(table: np.ndarray) -> tuple:
    """Log-transform inputs 1 and 5, min-max scale inputs, standardize output."""
    X = table[:, :5].copy()
    y = table[:, 5].copy()
    if np.any(X[:, [0, 4]] <= 0):
        raise ValueError("columns 1 and 5 must be positive for log transform")
    X[:, 0] = np.log(X[:, 0])
    X[:, 4] = np.log(X[:, 4])
    lo, hi = X.min(axis=0), X.max(axis=0)
    if np.any(hi <= lo):
        raise ValueError("degenerate input column; cannot min-max scale")
    X = (X - lo) / (hi - lo)
    y = (y - y.mean()) / y.std()
    return X, y


def make_airfoil_env(path: Optional[str] = None,
                     noise_sd: float = 0.01) -> ObjectiveEnvironment:
    """GP-surrogate objective fitted to the airfoil self-noise table.

    The objective is the posterior mean of a squared-exponential GP on the
    preprocessed data, shifted nonnegative by a scanned minimum plus margin.
    """
    table = load_airfoil_table(airfoil_data_path(path))
    X, y = preprocess_airfoil(table)
    kernel = KernelSpec("squared-exponential", np.full(5, AIRFOIL_LENGTHSCALE))
    state = GaussianProcessState.from_data(kernel, AIRFOIL_LAMBDA, X, y)
    # Mean-only evaluation: k(x, X_train) @ weights, cheap per query.
    from scipy.linalg import solve_triangular
    weights = solve_triangular(state.L.T, state.white_y, lower=False,
                               check_finite=False)

    def mean_fn(Q: np.ndarray) -> np.ndarray:
        return kernel.gram(Q, X) @ weights

    rmse = float(np.sqrt(np.mean((mean_fn(X) - y) ** 2)))
    if rmse > AIRFOIL_RMSE_LIMIT:
        raise ValueError(
            f"surrogate RMSE {rmse:.3f} exceeds limit {AIRFOIL_RMSE_LIMIT}")
    # Scan for the surrogate minimum to set the nonnegativity shift.
    from scipy.stats import qmc
    import warnings as _w
    with _w.catch_warnings():
        _w.simplefilter("ignore", UserWarning)
        grid = qmc.Sobol(d=5, scramble=True, seed=7).random(8192)
    low = float(mean_fn(grid).min())
    shift = -low + NONNEGATIVITY_MARGIN
    return ObjectiveEnvironment("airfoil", 5, mean_fn, shift, noise_sd,
                                AIRFOIL_SETS)
