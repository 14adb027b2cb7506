"""Per-event comparison metrics and the summary statistics built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .engine import SimulationResult
from .kinematics import ldbo_distance
from .scenario import Scenario

EXACT_MAX_N = 20


class EmptyInput(ValueError):
    pass


class AllZero(ValueError):
    pass


@dataclass(frozen=True)
class EventMetrics:
    scenario_id: str
    model_name: str
    t_diff: float | None
    crashed: bool
    worst_case_crashed: bool
    ldbo_human: float
    ldbo_model: float | None
    ldbo_diff: float | None
    human_onset: float | None = None
    model_onset: float | None = None


def ldbo_at(scenario: Scenario, t: float) -> float:
    """LDBO of the (recorded) POV at time ``t``."""
    return ldbo_distance(scenario.pov_traj.interpolate(t), scenario.pov_geom, scenario.lane)


def compute_event_metrics(human_onset: float, model_result: SimulationResult,
                          worst_case: SimulationResult, scenario: Scenario) -> EventMetrics:
    onset = model_result.brake_onset_time
    ldbo_h = ldbo_at(scenario, human_onset)
    if onset is None:
        t_diff = ldbo_m = ldbo_d = None
    else:
        t_diff = onset - human_onset
        ldbo_m = ldbo_at(scenario, onset)
        ldbo_d = ldbo_m - ldbo_h
    return EventMetrics(scenario.id, model_result.model_name, t_diff, model_result.collided,
                        worst_case.collided, ldbo_h, ldbo_m, ldbo_d, human_onset, onset)


# -- descriptive ---------------------------------------------------------------

def median(values: Iterable[float]) -> float:
    v = sorted(values)
    if not v:
        raise EmptyInput("median of an empty sequence")
    mid = len(v) // 2
    return v[mid] if len(v) % 2 else 0.5 * (v[mid - 1] + v[mid])


@dataclass(frozen=True)
class Histogram:
    bin_width: float
    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]


def histogram(values: Iterable[float], bin_width: float) -> Histogram:
    """Half-open ``[edge, edge + width)`` bins on a grid of multiples of the width.

    Non-finite values are skipped.
    """
    if not bin_width > 0:
        raise ValueError("bin_width must be positive")
    vals = [float(v) for v in values if v is not None and math.isfinite(v)]
    if not vals:
        return Histogram(bin_width, (), ())
    # rounding keeps values sitting on an edge (0.5 / 0.25) in the upper bin
    idx = [math.floor(round(v / bin_width, 9)) for v in vals]
    lo, hi = min(idx), max(idx)
    counts = [0] * (hi - lo + 1)
    for i in idx:
        counts[i - lo] += 1
    edges = tuple(round((lo + k) * bin_width, 12) for k in range(hi - lo + 2))
    return Histogram(bin_width, edges, tuple(counts))


# -- Wilcoxon signed-rank ----------------------------------------------------

@dataclass(frozen=True)
class WilcoxonResult:
    w_statistic: float
    p_value: float
    n_effective: int
    method: str  # "exact" or "normal_approx"


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks, ties sharing the mean of the ranks they span."""
    a = np.asarray(values, dtype=float)
    order = np.argsort(a, kind="mergesort")
    ranks = np.empty(len(a))
    sorted_a = a[order]
    i = 0
    while i < len(a):
        j = i
        while j + 1 < len(a) and sorted_a[j + 1] == sorted_a[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _exact_p(doubled_ranks: Sequence[int], w2: int) -> float:
    """Two-sided p of the doubled statistic ``w2`` under random signs.

    Counts sign patterns with a dynamic program over achievable sums, which
    gives the same integer counts as listing all 2^n patterns.
    """
    total = sum(doubled_ranks)
    counts = np.zeros(total + 1, dtype=np.int64)
    counts[0] = 1
    for r in doubled_ranks:  # every doubled rank is >= 2
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[:-r]
        counts = counts + shifted
    n_patterns = float(2 ** len(doubled_ranks))
    lower = counts[:w2 + 1].sum() / n_patterns
    upper = counts[w2:].sum() / n_patterns
    return float(min(1.0, 2.0 * min(lower, upper)))


def wilcoxon_signed_rank(diffs: Iterable[float]) -> WilcoxonResult:
    """Two-sided Wilcoxon signed-rank test against a zero median.

    Zeros are dropped; ties get average ranks. ``W`` is the sum of positive
    ranks. Exact p for up to 20 nonzero differences, otherwise a normal
    approximation with tie and continuity corrections.
    """
    d = np.asarray([x for x in diffs if x != 0], dtype=float)
    n = len(d)
    if n == 0:
        raise AllZero("all differences are zero")
    ranks = average_ranks(np.abs(d))
    w = float(ranks[d > 0].sum())
    if n <= EXACT_MAX_N:
        doubled = [int(round(2 * r)) for r in ranks]
        return WilcoxonResult(w, _exact_p(doubled, int(round(2 * w))), n, "exact")

    mean = n * (n + 1) / 4.0
    _, tie_sizes = np.unique(np.abs(d), return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - float(np.sum(tie_sizes ** 3 - tie_sizes)) / 48.0
    z = max(0.0, abs(w - mean) - 0.5) / math.sqrt(var)
    p = math.erfc(z / math.sqrt(2.0))
    return WilcoxonResult(w, min(1.0, p), n, "normal_approx")
