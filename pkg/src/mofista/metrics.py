"""Front-quality metrics: nondominated filtering, purity, performance profiles."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .problems import Array

__all__ = [
    "Front",
    "nondominated_filter",
    "purity",
    "PerformanceProfile",
    "performance_profile",
]

_MATCH_TOL = 1e-8


@dataclass(frozen=True)
class Front:
    """A mutually nondominated set of objective vectors.

    Build fronts through :func:`nondominated_filter`; ``decisions`` rows,
    when present, align with ``objectives`` rows.
    """

    objectives: Array                 # (N, m)
    decisions: Optional[Array] = None  # (N, n) or None

    def __post_init__(self) -> None:
        obj = np.atleast_2d(np.asarray(self.objectives, dtype=float))
        object.__setattr__(self, "objectives", obj)
        if self.decisions is not None:
            dec = np.atleast_2d(np.asarray(self.decisions, dtype=float))
            if dec.shape[0] != obj.shape[0]:
                raise ValueError("decision rows must align with objective rows")
            object.__setattr__(self, "decisions", dec)

    def __len__(self) -> int:
        return self.objectives.shape[0]


def nondominated_filter(objectives: Array, decisions: Optional[Array] = None) -> Front:
    """Keep a vector u iff no input vector v has v <= u with v != u.

    Exact duplicates collapse to their first occurrence.  Row order follows
    the (lexicographically sorted) deduplicated objectives, which keeps the
    result independent of input ordering.
    """
    obj = np.asarray(objectives, dtype=float)
    if obj.size == 0:
        return Front(objectives=np.empty((0, 1)) if obj.ndim < 2 else obj.reshape(0, obj.shape[-1]),
                     decisions=None)
    obj = np.atleast_2d(obj)
    if decisions is not None:
        decisions = np.atleast_2d(np.asarray(decisions, dtype=float))
        if decisions.shape[0] != obj.shape[0]:
            raise ValueError("decision rows must align with objective rows")
    uniq, first = np.unique(obj, axis=0, return_index=True)
    # le[i, j]: row i weakly dominates row j; rows are distinct, so any
    # off-diagonal weak domination is domination proper.
    le = np.all(uniq[:, None, :] <= uniq[None, :, :], axis=2)
    np.fill_diagonal(le, False)
    keep = ~np.any(le, axis=0)
    kept_dec = decisions[first[keep]] if decisions is not None else None
    return Front(objectives=uniq[keep], decisions=kept_dec)


def purity(front_a: Front, all_fronts: Sequence[Front]) -> float:
    """Share of ``front_a`` surviving in the combined nondominated reference.

    The reference front merges every competitor's front and refilters; a
    point of ``front_a`` counts as surviving when it matches a reference
    point to within 1e-8 in the max norm.  An empty front scores 0.
    """
    if not any(f is front_a for f in all_fronts):
        raise ValueError("front_a must be one of all_fronts")
    if len(front_a) == 0:
        return 0.0
    merged = np.vstack([f.objectives for f in all_fronts if len(f) > 0])
    reference = nondominated_filter(merged).objectives
    dist = np.max(np.abs(front_a.objectives[:, None, :] - reference[None, :, :]), axis=2)
    return float(np.count_nonzero(np.min(dist, axis=1) <= _MATCH_TOL)) / len(front_a)


@dataclass(frozen=True)
class PerformanceProfile:
    """Stepwise cumulative cost-ratio curves, one per solver."""

    solvers: tuple[str, ...]
    taus: Array        # (T,) sorted finite ratio breakpoints, starting at 1
    fractions: Array   # (S, T); fractions[s, t] = share of problems solved within taus[t]

    def value(self, solver: str, tau: float) -> float:
        s = self.solvers.index(solver)
        t = np.searchsorted(self.taus, tau, side="right") - 1
        return 0.0 if t < 0 else float(self.fractions[s, t])


def performance_profile(costs: Array, solvers: Sequence[str]) -> PerformanceProfile:
    """Ratio-based profiles of a solvers-by-problems cost table.

    ``costs[s, p]`` is a positive scalar (iterations, time, ...) or NaN for
    a failed run.  For each problem the ratio against the per-problem best
    is formed; curve s at tau is the fraction of problems whose ratio is
    finite and <= tau.  Problems failed by every solver are dropped with a
    warning since no ratio is defined for them.
    """
    costs = np.atleast_2d(np.asarray(costs, dtype=float))
    if costs.shape[0] != len(solvers):
        raise ValueError("one cost row per solver required")
    if np.any(costs[np.isfinite(costs)] <= 0.0):
        raise ValueError("costs must be positive")
    solved = np.isfinite(costs)
    usable = np.any(solved, axis=0)
    if not np.all(usable):
        warnings.warn(f"excluding {int(np.count_nonzero(~usable))} problem(s) "
                      "failed by every solver", stacklevel=2)
    costs = costs[:, usable]
    if costs.shape[1] == 0:
        raise ValueError("no problem was solved by any solver")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        best = np.nanmin(costs, axis=0)
    ratios = costs / best[None, :]
    ratios[~np.isfinite(ratios)] = np.inf
    finite = ratios[np.isfinite(ratios)]
    taus = np.unique(np.concatenate([[1.0], finite]))
    fractions = np.mean(ratios[:, None, :] <= taus[None, :, None], axis=2)
    return PerformanceProfile(solvers=tuple(solvers), taus=taus, fractions=fractions)
