"""Accelerated proximal gradient loop with backtracking line search.

Each iteration takes a worst-case prox-linear step from an extrapolated
point ``y`` with trial constant ``L``.  The momentum recurrence carries the
step-constant ratio ``omega = L_new / L_old``:

.. math:: t_{+} = \\frac{1 + \\sqrt{1 + 4\\,\\omega\\, t^2}}{2}, \\qquad
          \\theta_{+} = \\frac{t - 1}{t_{+}}, \\qquad
          y_{+} = x + \\theta_{+} (x - x_{-}) .

The line search first deflates ``L`` by ``1/sigma``, then inflates by
``beta`` until the smooth parts satisfy the quadratic upper bound at the
trial step; every inflation rescales ``omega`` and rebuilds ``(t, y)``, so
accepted iterations satisfy the exact identity
``t (t - 1) / L = t_prev^2 / L_prev``.

Seeding ``t_prev = 0`` makes the first iteration use ``t = 1`` and
``y = x0`` regardless of retries, so backtracking at the start only adjusts
``L``.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from .problems import Array, ProblemInstance, evaluate_objectives
from .subproblem import SubproblemConfig, solve_subproblem

__all__ = [
    "Backtracking",
    "FixedStep",
    "PlainProxGrad",
    "Variant",
    "SolverConfig",
    "SolverState",
    "IterationRecord",
    "RunTrace",
    "Status",
    "SolveResult",
    "BacktrackingError",
    "fista_step",
    "sufficient_decrease_check",
    "run_solver",
    "accepted_L_bound_check",
]

_MAX_BACKTRACKS = 100


class BacktrackingError(RuntimeError):
    """Line search exceeded the inflation cap; the instance is likely
    inconsistent with the smoothness assumptions."""


@dataclass(frozen=True)
class Backtracking:
    """Adaptive step constants: deflate by ``1/sigma``, inflate by ``beta``."""


@dataclass(frozen=True)
class FixedStep:
    """Constant step ``L`` with the full momentum recurrence (``omega = 1``)."""

    L: float


@dataclass(frozen=True)
class PlainProxGrad:
    """Constant step ``L``, no momentum: ``y = x`` and ``t = 1`` throughout."""

    L: float


Variant = Union[Backtracking, FixedStep, PlainProxGrad]


@dataclass(frozen=True)
class SolverConfig:
    L_init: float = 1.0
    beta: float = 2.0
    sigma: float = 2.0
    eps: float = 1e-3
    max_iter: int = 1000
    variant: Variant = field(default_factory=Backtracking)
    subproblem: SubproblemConfig = field(default_factory=SubproblemConfig)

    def __post_init__(self) -> None:
        if not self.L_init > 0.0:
            raise ValueError("L_init must be positive")
        if not self.beta > 1.0:
            raise ValueError("beta must exceed 1")
        if not self.sigma > 1.0:
            raise ValueError("sigma must exceed 1")
        if not self.eps > 0.0:
            raise ValueError("eps must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass
class SolverState:
    """Mutable loop state; exposed for inspection and tests."""

    k: int
    x_curr: Array
    x_prev: Array
    y: Array
    t_curr: float
    t_prev: float
    L_curr: float
    L_prev: float
    omega_prev: float
    backtracks: int


@dataclass(frozen=True)
class IterationRecord:
    """One accepted iteration; enough to replay every trace diagnostic."""

    k: int
    L: float
    backtracks: int
    residual: float
    t: float
    y: Array
    x: Array
    objectives: Array
    dual_gap: float
    wall_ms: float


@dataclass(frozen=True)
class RunTrace:
    x0: Array
    objectives0: Array
    records: tuple[IterationRecord, ...]

    def iterates(self) -> Array:
        """Stacked ``(len(records) + 1, n)`` array starting at ``x0``."""
        return np.vstack([self.x0] + [r.x for r in self.records])

    def objective_rows(self) -> Array:
        return np.vstack([self.objectives0] + [r.objectives for r in self.records])


class Status(enum.Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    SUBPROBLEM_FAILURE = "subproblem_failure"


@dataclass(frozen=True)
class SolveResult:
    x: Array
    status: Status
    trace: RunTrace


def fista_step(x_prev: Array, x_prev2: Array, t_prev: float, omega: float):
    """Momentum update producing the triple for the next iteration.

    ``x_prev`` is the most recent accepted iterate, ``x_prev2`` the one
    before it.  With ``t_prev = 0`` this yields ``t = 1`` and ``theta = -1``,
    i.e. ``y = x_prev2``, which seeds the very first iteration.
    """
    t = (1.0 + np.sqrt(1.0 + 4.0 * omega * t_prev * t_prev)) / 2.0
    theta = (t_prev - 1.0) / t
    y = x_prev + theta * (x_prev - x_prev2)
    return t, theta, y


def sufficient_decrease_check(p: ProblemInstance, y: Array, z: Array, L: float) -> bool:
    """Quadratic upper bound on the smooth parts at the trial step.

    True iff ``f_i(z) <= f_i(y) + <grad f_i(y), z - y> + (L/2) ||z - y||^2``
    for every objective; the shared nonsmooth term cancels from both sides.
    The comparison carries a relative slack of a few ulp: once steps shrink
    toward convergence both sides agree to cancellation noise, and a bound
    that holds in exact arithmetic must not be rejected on that noise (a
    spurious rejection would inflate ``L`` past its provable cap).
    """
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    fy = np.asarray(p.smooth(y), dtype=float)
    fz = np.asarray(p.smooth(z), dtype=float)
    grads = np.asarray(p.smooth_jac(y), dtype=float)
    d = z - y
    bound = fy + grads @ d + 0.5 * L * float(d @ d)
    return bool(np.all(fz <= bound + 1e-12 * (1.0 + np.abs(fy))))


def run_solver(p: ProblemInstance, x0: Array, cfg: Optional[SolverConfig] = None) -> SolveResult:
    """Run one solver variant from ``x0`` until the weak-Pareto residual
    drops below ``cfg.eps`` or ``cfg.max_iter`` iterations are accepted.

    Deterministic: identical ``(p, x0, cfg)`` reproduce the trace exactly
    apart from wall-clock fields.  Raises :class:`BacktrackingError` after
    100 inflations within one iteration; a subproblem failure ends the run
    with ``Status.SUBPROBLEM_FAILURE``.
    """
    cfg = cfg or SolverConfig()
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (p.n,):
        raise ValueError(f"x0 has shape {x0.shape}, expected {(p.n,)}")
    objectives0 = evaluate_objectives(p, x0)

    # Couple the inner tolerance to the outer one so certified gaps never
    # swamp the stopping test: a relative gap of tau displaces the inner
    # minimizer by about sqrt(tau), which must stay well under eps.  The
    # floor keeps the target reachable in float64.
    tol_eff = min(cfg.subproblem.tol, max((cfg.eps / 100.0) ** 2, 1e-12))
    sub_cfg = replace(cfg.subproblem, tol=tol_eff)

    variant = cfg.variant
    state = SolverState(
        k=0, x_curr=x0, x_prev=x0, y=x0, t_curr=1.0, t_prev=0.0,
        L_curr=cfg.L_init, L_prev=cfg.L_init, omega_prev=1.0, backtracks=0,
    )
    records: list[IterationRecord] = []
    status = Status.MAX_ITER
    warm: Optional[Array] = None

    from .subproblem import SubproblemError  # local to avoid cycle in docs

    for k in range(1, cfg.max_iter + 1):
        tick = time.perf_counter()
        state.k = k
        state.backtracks = 0
        try:
            if isinstance(variant, Backtracking):
                omega = 1.0 / cfg.sigma
                L = omega * state.L_prev
                t, _, y = fista_step(state.x_curr, state.x_prev, state.t_prev, omega)
                sol = solve_subproblem(state.x_curr, y, L, p, sub_cfg, warm_weights=warm)
                while not sufficient_decrease_check(p, y, sol.z, L):
                    state.backtracks += 1
                    if state.backtracks > _MAX_BACKTRACKS:
                        raise BacktrackingError(
                            f"line search exceeded {_MAX_BACKTRACKS} inflations at"
                            f" iteration {k}; gradients are likely not"
                            f" Lipschitz on this region"
                        )
                    omega *= cfg.beta
                    L = omega * state.L_prev
                    t, _, y = fista_step(state.x_curr, state.x_prev, state.t_prev, omega)
                    sol = solve_subproblem(state.x_curr, y, L, p, sub_cfg, warm_weights=warm)
            elif isinstance(variant, FixedStep):
                omega = 1.0
                L = variant.L
                t, _, y = fista_step(state.x_curr, state.x_prev, state.t_prev, omega)
                sol = solve_subproblem(state.x_curr, y, L, p, sub_cfg, warm_weights=warm)
            else:
                omega = 1.0
                L = variant.L
                t = 1.0
                y = state.x_curr
                sol = solve_subproblem(state.x_curr, y, L, p, sub_cfg, warm_weights=warm)
        except SubproblemError:
            status = Status.SUBPROBLEM_FAILURE
            break

        x_next = sol.z
        residual = float(np.max(np.abs(x_next - y)))
        objectives = evaluate_objectives(p, x_next)
        wall_ms = (time.perf_counter() - tick) * 1e3
        records.append(IterationRecord(
            k=k, L=L, backtracks=state.backtracks, residual=residual, t=t,
            y=np.asarray(y, dtype=float), x=x_next, objectives=objectives,
            dual_gap=sol.dual_gap, wall_ms=wall_ms,
        ))
        warm = sol.weights
        state.x_prev, state.x_curr = state.x_curr, x_next
        state.t_prev, state.t_curr = t, t
        state.L_prev, state.L_curr = L, L
        state.omega_prev = omega
        state.y = np.asarray(y, dtype=float)
        if residual < cfg.eps:
            status = Status.CONVERGED
            break

    trace = RunTrace(x0=x0, objectives0=objectives0, records=tuple(records))
    return SolveResult(x=state.x_curr, status=status, trace=trace)


def accepted_L_bound_check(trace: RunTrace, L_true: float, cfg: SolverConfig) -> bool:
    """Every accepted step constant stays below ``max(beta * L_true, L_init)``.

    Vacuously true for the fixed-step variants, which never adapt ``L``.
    """
    if not isinstance(cfg.variant, Backtracking):
        return True
    cap = max(cfg.beta * L_true, cfg.L_init)
    return all(r.L <= cap * (1.0 + 1e-12) for r in trace.records)
