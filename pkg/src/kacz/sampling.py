"""Row-subset samplers: volume probabilities, uniform draws, relaxation.

Volume sampling enumerates every subset (desk scale by design); uniform
draws use a partial Fisher-Yates shuffle. The relaxation factor turns
uniform draws into quasi-projector-matched steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EnumerationCapError, RankDeficiencyError
from .projectors import RowSubset, make_row_subset, subset_geometry
from .rng import Xoshiro256StarStar
from .tolerances import ENUMERATION_CAP


def combinations_colex(M: int, n: int):
    """All n-subsets of range(M) in colexicographic order."""
    if n == 0:
        yield ()
        return
    for top in range(n - 1, M):
        for rest in combinations_colex(top, n - 1):
            yield rest + (top,)


def check_enumeration_cap(M: int, n: int, cap: int = ENUMERATION_CAP) -> int:
    count = math.comb(M, n)
    if count > cap:
        raise EnumerationCapError(f"C({M},{n}) = {count} exceeds the enumeration cap {cap}")
    return count


@dataclass(frozen=True)
class VolumeDistribution:
    """Exhaustive v^2-proportional distribution over independent n-subsets.

    entries hold (indices, v_sq, cumulative v_sq) in colex order with
    zero-volume subsets excluded; vol_n is the enumerated normalizer and
    v_sq_max the largest squared volume over all subsets.
    """

    matrix: np.ndarray
    n: int
    entries: tuple[tuple[tuple[int, ...], float, float], ...]
    vol_n: float
    v_sq_max: float


def build_volume_distribution(A: np.ndarray, n: int) -> VolumeDistribution:
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    M = A.shape[0]
    check_enumeration_cap(M, n)
    entries = []
    cumulative = 0.0
    v_sq_max = 0.0
    for idx in combinations_colex(M, n):
        v_sq = subset_geometry(make_row_subset(A, idx)).v_sq
        v_sq_max = max(v_sq_max, v_sq)
        if v_sq > 0.0:
            cumulative += v_sq
            entries.append((idx, v_sq, cumulative))
    if not entries:
        raise RankDeficiencyError(f"every {n}-subset has zero volume (rank < {n})")
    return VolumeDistribution(
        matrix=A, n=n, entries=tuple(entries), vol_n=cumulative, v_sq_max=v_sq_max
    )


def draw_volume(dist: VolumeDistribution, rng: Xoshiro256StarStar) -> RowSubset:
    """Inverse-CDF draw: subset i with probability v_sq(i) / vol_n."""
    target = rng.random() * dist.vol_n
    lo, hi = 0, len(dist.entries) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if dist.entries[mid][2] <= target:
            lo = mid + 1
        else:
            hi = mid
    return make_row_subset(dist.matrix, dist.entries[lo][0])


def draw_uniform(M: int, n: int, rng: Xoshiro256StarStar) -> tuple[int, ...]:
    """Uniformly random sorted n-subset of range(M) via partial Fisher-Yates."""
    if not 1 <= n <= M:
        raise ValueError(f"need 1 <= n <= M, got n={n}, M={M}")
    pool = list(range(M))
    for i in range(n):
        j = i + rng.below(M - i)
        pool[i], pool[j] = pool[j], pool[i]
    return tuple(sorted(pool[:n]))


def max_subset_volume(A: np.ndarray, n: int) -> float:
    """Exact v^2_max over all n-subsets, by enumeration."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    check_enumeration_cap(A.shape[0], n)
    return max(
        subset_geometry(make_row_subset(A, idx)).v_sq
        for idx in combinations_colex(A.shape[0], n)
    )


@dataclass
class RelaxationState:
    """Relaxation configuration plus the current v^2_max estimate.

    In running mode v_sq_max only ever grows, tracking the largest squared
    volume observed so far in a pursuit.
    """

    mode: str = "undershoot"
    v_sq_max_mode: str = "exact"
    v_sq_max: float = 0.0

    def __post_init__(self):
        if self.mode not in ("undershoot", "overshoot"):
            raise ValueError(f"unknown relaxation mode {self.mode!r}")
        if self.v_sq_max_mode not in ("exact", "running"):
            raise ValueError(f"unknown v_sq_max mode {self.v_sq_max_mode!r}")
        if self.v_sq_max < 0.0:
            raise ValueError("v_sq_max must be nonnegative")


def relaxation_factor(v_sq: float, state: RelaxationState) -> float:
    """Step scaling 1 -/+ sqrt(1 - v_sq / v_sq_max), always in [0, 2].

    Running mode first absorbs v_sq into the maximum estimate. A zero
    maximum yields 0 (nothing is known yet, so the step is a no-op).
    """
    if v_sq < 0.0:
        raise ValueError("v_sq must be nonnegative")
    if state.v_sq_max_mode == "running" and v_sq > state.v_sq_max:
        state.v_sq_max = v_sq
    if state.v_sq_max == 0.0:
        return 0.0
    ratio = min(v_sq / state.v_sq_max, 1.0)
    root = math.sqrt(max(1.0 - ratio, 0.0))
    return 1.0 - root if state.mode == "undershoot" else 1.0 + root
