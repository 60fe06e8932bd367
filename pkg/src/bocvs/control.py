"""Control sets, partial queries, and Monte-Carlo expectations.

A query in [0,1]^d splits into the coordinates the caller controls (one of m
index subsets) and the complement, which the environment draws from known
per-variable distributions.  Variables are numbered 1..d throughout, matching
how control sets are written in experiment configs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Optional, Sequence

import numpy as np
from scipy.stats import norm


@dataclass(frozen=True)
class VariableDistribution:
    """Sampling law of one query variable on [0,1].

    ``truncnorm`` restricts a normal with the given *pre-truncation* mean and
    variance to [0,1] (drawn by inverse CDF); symmetric parameters around 0.5
    keep the post-truncation mean at 0.5.
    """

    kind: str = "truncnorm"
    mean: float = 0.5
    variance: float = 0.02

    def __post_init__(self):
        if self.kind not in ("truncnorm", "uniform"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "truncnorm" and not self.variance > 0:
            raise ValueError("variance must be positive")

    def from_uniform(self, u: np.ndarray) -> np.ndarray:
        """Map standard uniforms through the inverse CDF."""
        if self.kind == "uniform":
            return u
        sd = np.sqrt(self.variance)
        lo = norm.cdf((0.0 - self.mean) / sd)
        hi = norm.cdf((1.0 - self.mean) / sd)
        return self.mean + sd * norm.ppf(lo + u * (hi - lo))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.from_uniform(rng.uniform(size=size))


@dataclass
class ControlSetFamily:
    """The m candidate control sets over d variables plus the sampling laws.

    ``sets`` holds 1-based variable indices; subsets may overlap.  Set indices
    (which control set) are also 1-based.
    """

    dim: int
    sets: list
    distributions: list

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if len(self.sets) < 1:
            raise ValueError("need at least one control set")
        norm_sets = []
        for s in self.sets:
            idx = tuple(sorted(int(v) for v in s))
            if len(set(idx)) != len(idx):
                raise ValueError(f"duplicate variable in control set {s}")
            if idx and (idx[0] < 1 or idx[-1] > self.dim):
                raise ValueError(f"control set {s} has indices outside 1..{self.dim}")
            norm_sets.append(idx)
        self.sets = norm_sets
        if len(self.distributions) != self.dim:
            raise ValueError("need one distribution per variable")

    @property
    def num_sets(self) -> int:
        return len(self.sets)

    def control_indices(self, i: int) -> np.ndarray:
        """0-based column indices of control set i (1-based)."""
        self._check_set(i)
        return np.array(self.sets[i - 1], dtype=int) - 1

    def complement(self, i: int) -> tuple:
        """1-based variable indices left to the environment for set i."""
        self._check_set(i)
        members = set(self.sets[i - 1])
        return tuple(v for v in range(1, self.dim + 1) if v not in members)

    def complement_indices(self, i: int) -> np.ndarray:
        return np.array(self.complement(i), dtype=int) - 1

    def set_size(self, i: int) -> int:
        self._check_set(i)
        return len(self.sets[i - 1])

    def _check_set(self, i: int) -> None:
        if not (1 <= i <= self.num_sets):
            raise ValueError(f"set index {i} outside 1..{self.num_sets}")


def uniform_family(dim: int, sets: Iterable) -> ControlSetFamily:
    return ControlSetFamily(dim, list(sets), [VariableDistribution("uniform")] * dim)


def truncnorm_family(dim: int, sets: Iterable, variance: float = 0.02,
                     mean: float = 0.5) -> ControlSetFamily:
    dist = VariableDistribution("truncnorm", mean, variance)
    return ControlSetFamily(dim, list(sets), [dist] * dim)


@dataclass(frozen=True)
class PartialQuery:
    """Values for the controlled coordinates of one control set."""

    set_index: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float).ravel())


def assemble(family: ControlSetFamily, pq: PartialQuery,
             complement: np.ndarray) -> np.ndarray:
    """Interleave controlled and environment-sampled coordinates into a full query."""
    ctrl = family.control_indices(pq.set_index)
    comp = family.complement_indices(pq.set_index)
    complement = np.asarray(complement, dtype=float).ravel()
    if pq.values.shape[0] != ctrl.shape[0]:
        raise ValueError(
            f"partial query has {pq.values.shape[0]} values, set needs {ctrl.shape[0]}")
    if complement.shape[0] != comp.shape[0]:
        raise ValueError(
            f"complement has {complement.shape[0]} values, expected {comp.shape[0]}")
    x = np.empty(family.dim)
    x[ctrl] = pq.values
    x[comp] = complement
    return x


def split(family: ControlSetFamily, i: int, x: np.ndarray) -> tuple:
    """Inverse of assemble: full query -> (control values, complement values)."""
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != family.dim:
        raise ValueError(f"query has dimension {x.shape[0]}, expected {family.dim}")
    return x[family.control_indices(i)].copy(), x[family.complement_indices(i)].copy()


def assemble_batch(family: ControlSetFamily, i: int, control_rows: np.ndarray,
                   complement_rows: np.ndarray) -> np.ndarray:
    """All pairings of n control rows with S complement rows -> (n*S, d).

    Control rows vary slowest, so row r*S + s pairs control r with sample s.
    """
    ctrl = family.control_indices(i)
    comp = family.complement_indices(i)
    P = np.atleast_2d(np.asarray(control_rows, dtype=float))
    B = np.atleast_2d(np.asarray(complement_rows, dtype=float))
    n, S = P.shape[0], B.shape[0]
    X = np.empty((n * S, family.dim))
    X[:, ctrl] = np.repeat(P, S, axis=0)
    X[:, comp] = np.tile(B, (n, 1))
    return X


def sample_complement(family: ControlSetFamily, i: int,
                      rng: np.random.Generator) -> np.ndarray:
    """One draw of the environment-sampled coordinates for set i."""
    comp = family.complement(i)
    out = np.empty(len(comp))
    for j, var in enumerate(comp):
        out[j] = family.distributions[var - 1].sample(rng, 1)[0]
    return out


class SampleBank:
    """Pre-drawn complement samples shared by every candidate in one solve.

    One matrix per control set (rows = samples, columns = complement
    coordinates), reproducible from the stored seed.  Sharing the bank across
    candidates makes argmax comparisons common-random-number comparisons.
    Rows come in antithetic pairs (u, 1-u through the inverse CDF), which
    keeps bank averages unbiased while cutting their variance.
    """

    def __init__(self, family: ControlSetFamily, count: int, seed: int,
                 antithetic: bool = True):
        if count < 1:
            raise ValueError("count must be >= 1")
        self.count = count
        self.seed = int(seed)
        rng = np.random.default_rng(self.seed)
        self._per_set: Dict[int, np.ndarray] = {}
        for i in range(1, family.num_sets + 1):
            comp = family.complement(i)
            if antithetic:
                u = rng.uniform(size=((count + 1) // 2, len(comp)))
                U = np.vstack([u, 1.0 - u])[:count]
            else:
                U = rng.uniform(size=(count, len(comp)))
            M = np.empty((count, len(comp)))
            for j, var in enumerate(comp):
                M[:, j] = family.distributions[var - 1].from_uniform(U[:, j])
            self._per_set[i] = M

    def for_set(self, i: int) -> np.ndarray:
        if i not in self._per_set:
            raise ValueError(f"bank has no samples for set {i}")
        return self._per_set[i]

    def effective(self, i: int) -> np.ndarray:
        """Bank rows with empty-complement duplication collapsed to one row."""
        B = self.for_set(i)
        return B[:1] if B.shape[1] == 0 else B


def expected_value(g: Callable[[np.ndarray], np.ndarray], family: ControlSetFamily,
                   pq: PartialQuery, bank: SampleBank) -> float:
    """Bank average of g over the random complement; g maps (n,d) -> (n,).

    Deterministic given the bank, so two partial queries scored against the
    same bank differ only through g's arguments.
    """
    B = bank.effective(pq.set_index)
    X = assemble_batch(family, pq.set_index, pq.values[None, :], B)
    vals = np.asarray(g(X), dtype=float).ravel()
    if vals.shape[0] != B.shape[0]:
        raise ValueError("g must return one value per input row")
    return float(np.mean(vals))
