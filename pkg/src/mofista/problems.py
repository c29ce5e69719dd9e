"""Composite multiobjective problems with a shared nonsmooth term.

A problem instance collects ``m`` objectives of the form

.. math:: F_i(x) = f_i(x) + g(x), \\qquad i = 1, \\dots, m,

where each :math:`f_i` is continuously differentiable with Lipschitz
continuous gradient and :math:`g` is convex, possibly nonsmooth, and shared
by every objective.  All instances are immutable and safe to share across
threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

Array = np.ndarray

__all__ = [
    "Array",
    "EvaluationError",
    "NonsmoothPart",
    "Zero",
    "WeightedL1",
    "CustomNonsmooth",
    "ProblemInstance",
    "evaluate_objectives",
    "prox_nonsmooth",
    "pareto_leq",
    "pareto_lt",
]


class EvaluationError(RuntimeError):
    """An objective evaluation produced a non-finite value."""

    def __init__(self, message: str, x: Array):
        super().__init__(message)
        self.x = np.asarray(x, dtype=float)


def _check_step(t: float) -> None:
    if not t > 0.0:
        raise ValueError(f"prox step must be positive, got {t!r}")


class NonsmoothPart:
    """Shared convex nonsmooth term ``g``.

    Subclasses provide the function value and the step-scaled proximal
    operator

    .. math:: \\operatorname{prox}_{t g}(v)
              = \\operatorname*{argmin}_y\\; g(y) + \\frac{1}{2t}\\|v - y\\|^2.
    """

    def value(self, x: Array) -> float:
        raise NotImplementedError

    def prox(self, t: float, v: Array) -> Array:
        raise NotImplementedError


@dataclass(frozen=True)
class Zero(NonsmoothPart):
    """The zero function; its prox is the identity."""

    def value(self, x: Array) -> float:
        return 0.0

    def prox(self, t: float, v: Array) -> Array:
        _check_step(t)
        return np.asarray(v, dtype=float)


@dataclass(frozen=True)
class WeightedL1(NonsmoothPart):
    """``g(x) = weight * ||x||_1``; the prox is soft thresholding."""

    weight: float = 1.0

    def __post_init__(self) -> None:
        if self.weight < 0.0:
            raise ValueError("l1 weight must be nonnegative")

    def value(self, x: Array) -> float:
        return self.weight * float(np.sum(np.abs(x)))

    def prox(self, t: float, v: Array) -> Array:
        _check_step(t)
        v = np.asarray(v, dtype=float)
        level = t * self.weight
        return np.sign(v) * np.maximum(np.abs(v) - level, 0.0)


@dataclass(frozen=True)
class CustomNonsmooth(NonsmoothPart):
    """User-supplied value and prox oracles for an arbitrary convex ``g``."""

    value_fn: Callable[[Array], float]
    prox_fn: Callable[[float, Array], Array]

    def value(self, x: Array) -> float:
        return float(self.value_fn(x))

    def prox(self, t: float, v: Array) -> Array:
        _check_step(t)
        return np.asarray(self.prox_fn(t, v), dtype=float)


@dataclass(frozen=True)
class ProblemInstance:
    """An ``m``-objective composite problem on ``R^n``.

    Parameters
    ----------
    n, m : int
        Decision and objective dimensions.
    smooth : callable
        ``x -> (m,)`` array of smooth objective values ``f_i(x)``.
    smooth_jac : callable
        ``x -> (m, n)`` array whose rows are the gradients ``grad f_i(x)``.
    nonsmooth : NonsmoothPart
        Shared nonsmooth term ``g``, added to every objective.
    grad_lipschitz : float, optional
        A common Lipschitz constant of the smooth gradients, when known
        analytically (curvature units, 1/length^2 of f).
    """

    n: int
    m: int
    smooth: Callable[[Array], Array]
    smooth_jac: Callable[[Array], Array]
    nonsmooth: NonsmoothPart = field(default_factory=Zero)
    grad_lipschitz: Optional[float] = None

    def __post_init__(self) -> None:
        if self.n < 1 or self.m < 1:
            raise ValueError("problem dimensions must be positive")


def evaluate_objectives(p: ProblemInstance, x: Array) -> Array:
    """Full objective vector ``F(x) = f(x) + g(x)``.

    Raises :class:`EvaluationError` if any component is non-finite, carrying
    the offending point.
    """
    x = np.asarray(x, dtype=float)
    fx = np.asarray(p.smooth(x), dtype=float)
    if fx.shape != (p.m,):
        raise ValueError(f"smooth eval returned shape {fx.shape}, expected ({p.m},)")
    total = fx + p.nonsmooth.value(x)
    if not np.all(np.isfinite(total)):
        raise EvaluationError("objective evaluation produced a non-finite value", x)
    return total


def prox_nonsmooth(part: NonsmoothPart, t: float, v: Array) -> Array:
    """Step-scaled proximal point ``prox_{t g}(v)``; ``t`` must be positive."""
    _check_step(t)
    return part.prox(t, np.asarray(v, dtype=float))


def _pair(u: Array, v: Array) -> tuple[Array, Array]:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    return u, v


def pareto_leq(u: Array, v: Array) -> bool:
    """Componentwise partial order: ``u <= v`` in every coordinate."""
    u, v = _pair(u, v)
    return bool(np.all(u <= v))


def pareto_lt(u: Array, v: Array) -> bool:
    """Strict componentwise order: ``u < v`` in every coordinate."""
    u, v = _pair(u, v)
    return bool(np.all(u < v))
