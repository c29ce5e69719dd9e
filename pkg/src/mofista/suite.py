"""Benchmark problem registry.

The convex instances used by the acceptance tests (two-ball, scaled
quadratic, and skewed quadratic families, each with an optional shared l1
term) are hard coded with analytic gradient Lipschitz constants.  A handful
of standard instances from the multiobjective test-set literature are
registered alongside them, and :func:`register_problem` plus
:func:`load_problem_file` let users add the rest.

Box bounds only drive initial-point sampling; the solvers themselves are
unconstrained.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from .problems import Array, NonsmoothPart, ProblemInstance, WeightedL1, Zero

__all__ = [
    "ProblemDescriptor",
    "register_problem",
    "available_problems",
    "builtin_problem",
    "sample_initial_points",
    "pareto_segment",
    "load_problem_file",
]


@dataclass(frozen=True)
class ProblemDescriptor:
    """Benchmark metadata: sampling box, l1 weight, convexity, known L."""

    name: str
    n: int
    m: int
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    l1_weight: float = 0.0
    convex: bool = False
    L_true: Optional[float] = None


Builder = Callable[[], tuple[ProblemInstance, ProblemDescriptor]]
_REGISTRY: dict[str, Builder] = {}


def register_problem(name: str, builder: Builder) -> None:
    """Register a problem under a unique name."""
    if name in _REGISTRY:
        raise ValueError(f"problem {name!r} already registered")
    _REGISTRY[name] = builder


def available_problems() -> list[str]:
    return sorted(_REGISTRY)


def builtin_problem(name: str) -> tuple[ProblemInstance, ProblemDescriptor]:
    try:
        builder = _REGISTRY[name]
    except KeyError:
        known = ", ".join(available_problems())
        raise KeyError(f"unknown problem {name!r}; available: {known}") from None
    return builder()


def sample_initial_points(desc: ProblemDescriptor, count: int,
                          seed: Union[int, tuple[int, ...]]) -> Array:
    """Uniform draws from the descriptor's box; deterministic in the seed."""
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(seed)
    lower = np.asarray(desc.lower, dtype=float)
    upper = np.asarray(desc.upper, dtype=float)
    return lower + rng.random((count, desc.n)) * (upper - lower)


def _quadratic_family(name: str, centers: Array, scales: Array, consts: Array,
                      lower, upper, l1_weight: float) -> tuple[ProblemInstance, ProblemDescriptor]:
    """Objectives ``f_i(x) = scale_i * ||x - center_i||^2 + const_i``."""
    centers = np.asarray(centers, dtype=float)
    scales = np.asarray(scales, dtype=float)
    consts = np.asarray(consts, dtype=float)
    m, n = centers.shape

    def smooth(x: Array) -> Array:
        diff = x[None, :] - centers
        return scales * np.sum(diff * diff, axis=1) + consts

    def smooth_jac(x: Array) -> Array:
        return 2.0 * scales[:, None] * (x[None, :] - centers)

    part: NonsmoothPart = WeightedL1(l1_weight) if l1_weight > 0.0 else Zero()
    inst = ProblemInstance(n=n, m=m, smooth=smooth, smooth_jac=smooth_jac,
                           nonsmooth=part, grad_lipschitz=2.0 * float(np.max(scales)))
    desc = ProblemDescriptor(name=name, n=n, m=m, lower=tuple(lower), upper=tuple(upper),
                             l1_weight=l1_weight, convex=True,
                             L_true=2.0 * float(np.max(scales)))
    return inst, desc


def _register_quadratic(name, centers, scales, consts, lower, upper, l1_variant=True):
    register_problem(name, lambda: _quadratic_family(name, centers, scales, consts,
                                                     lower, upper, 0.0))
    if l1_variant:
        register_problem(name + "_l1",
                         lambda: _quadratic_family(name + "_l1", centers, scales, consts,
                                                   lower, upper, 1.0))


# Two quadratic balls centered at the origin and at (5, 5).
_register_quadratic(
    "BK1",
    centers=[[0.0, 0.0], [5.0, 5.0]],
    scales=[1.0, 1.0],
    consts=[0.0, 0.0],
    lower=(-5.0, -5.0), upper=(10.0, 10.0),
)

# Dimension-scaled quadratics: f1 = ||x||^2 / n, f2 = ||x - 2||^2 / n.
_register_quadratic(
    "JOS1",
    centers=[[0.0, 0.0], [2.0, 2.0]],
    scales=[0.5, 0.5],
    consts=[0.0, 0.0],
    lower=(-5.0, -5.0), upper=(5.0, 5.0),
)

# Three anisotropic quadratics sharing a coupling term (x1 - x2)^2.


def _sp1() -> tuple[ProblemInstance, ProblemDescriptor]:
    return _sp1_build("SP1", 0.0)


def _sp1_l1() -> tuple[ProblemInstance, ProblemDescriptor]:
    return _sp1_build("SP1_l1", 1.0)


def _sp1_build(name: str, l1_weight: float) -> tuple[ProblemInstance, ProblemDescriptor]:
    def smooth(x: Array) -> Array:
        coupling = (x[0] - x[1]) ** 2
        return np.array([(x[0] - 1.0) ** 2 + coupling,
                         (x[1] - 3.0) ** 2 + coupling])

    def smooth_jac(x: Array) -> Array:
        c1 = 2.0 * (x[0] - x[1])
        return np.array([[2.0 * (x[0] - 1.0) + c1, -c1],
                         [c1, 2.0 * (x[1] - 3.0) - c1]])

    part: NonsmoothPart = WeightedL1(l1_weight) if l1_weight > 0.0 else Zero()
    L = 3.0 + np.sqrt(5.0)  # top eigenvalue of [[4, -2], [-2, 2]]
    inst = ProblemInstance(n=2, m=2, smooth=smooth, smooth_jac=smooth_jac,
                           nonsmooth=part, grad_lipschitz=float(L))
    desc = ProblemDescriptor(name=name, n=2, m=2, lower=(2.0, -2.0), upper=(3.0, 3.0),
                             l1_weight=l1_weight, convex=True, L_true=float(L))
    return inst, desc


register_problem("SP1", _sp1)
register_problem("SP1_l1", _sp1_l1)

# Three quadratic bowls with distinct centers and offsets.
_register_quadratic(
    "VFM1",
    centers=[[0.0, 1.0], [0.0, -1.0], [1.0, 0.0]],
    scales=[1.0, 1.0, 1.0],
    consts=[0.0, 1.0, 2.0],
    lower=(-2.0, -2.0), upper=(2.0, 2.0),
    l1_variant=False,
)

# One-dimensional triple of shifted parabolas.
_register_quadratic(
    "MHHM1",
    centers=[[0.8], [0.85], [0.9]],
    scales=[1.0, 1.0, 1.0],
    consts=[0.0, 0.0, 0.0],
    lower=(0.0,), upper=(1.0,),
    l1_variant=False,
)

# Its two-dimensional companion.
_register_quadratic(
    "MHHM2",
    centers=[[0.8, 0.6], [0.85, 0.7], [0.9, 0.6]],
    scales=[1.0, 1.0, 1.0],
    consts=[0.0, 0.0, 0.0],
    lower=(0.0, 0.0), upper=(1.0, 1.0),
    l1_variant=False,
)


def _dd1() -> tuple[ProblemInstance, ProblemDescriptor]:
    """Quadratic ball against a cubic-perturbed linear form (nonconvex)."""

    def smooth(x: Array) -> Array:
        return np.array([float(x @ x),
                         3.0 * x[0] + 2.0 * x[1] - x[2] / 3.0 + 0.01 * (x[3] - x[4]) ** 3])

    def smooth_jac(x: Array) -> Array:
        cubic = 0.03 * (x[3] - x[4]) ** 2
        return np.array([2.0 * x,
                         [3.0, 2.0, -1.0 / 3.0, cubic, -cubic]])

    inst = ProblemInstance(n=5, m=2, smooth=smooth, smooth_jac=smooth_jac)
    desc = ProblemDescriptor(name="DD1", n=5, m=2,
                             lower=(-20.0,) * 5, upper=(20.0,) * 5)
    return inst, desc


register_problem("DD1", _dd1)


def _ff1() -> tuple[ProblemInstance, ProblemDescriptor]:
    """Complementary Gaussian wells around (+-1/sqrt(2), +-1/sqrt(2))."""
    c = 1.0 / np.sqrt(2.0)

    def smooth(x: Array) -> Array:
        return np.array([1.0 - np.exp(-((x[0] - c) ** 2 + (x[1] - c) ** 2)),
                         1.0 - np.exp(-((x[0] + c) ** 2 + (x[1] + c) ** 2))])

    def smooth_jac(x: Array) -> Array:
        e1 = np.exp(-((x[0] - c) ** 2 + (x[1] - c) ** 2))
        e2 = np.exp(-((x[0] + c) ** 2 + (x[1] + c) ** 2))
        return np.array([[2.0 * (x[0] - c) * e1, 2.0 * (x[1] - c) * e1],
                         [2.0 * (x[0] + c) * e2, 2.0 * (x[1] + c) * e2]])

    inst = ProblemInstance(n=2, m=2, smooth=smooth, smooth_jac=smooth_jac)
    desc = ProblemDescriptor(name="FF1", n=2, m=2,
                             lower=(-1.0, -1.0), upper=(1.0, 1.0))
    return inst, desc


register_problem("FF1", _ff1)


def pareto_segment(name: str, count: int = 20) -> Array:
    """Evenly spaced decision-space Pareto points for instances whose optimal
    set is known in closed form (smooth variants only)."""
    s = np.linspace(0.0, 1.0, count)
    if name == "BK1":
        return np.column_stack([5.0 * s, 5.0 * s])
    if name == "JOS1":
        return np.column_stack([2.0 * s, 2.0 * s])
    if name == "SP1":
        # Stationary points of lam * f1 + (1 - lam) * f2 over lam in (0, 1).
        pts = []
        for lam in np.linspace(1e-3, 1.0 - 1e-3, count):
            a = np.array([[2.0 * lam + 2.0, -2.0],
                          [-2.0, 2.0 * (1.0 - lam) + 2.0]])
            b = np.array([2.0 * lam, 6.0 * (1.0 - lam)])
            pts.append(np.linalg.solve(a, b))
        return np.vstack(pts)
    raise KeyError(f"no closed-form Pareto segment for {name!r}")


def load_problem_file(path: Union[str, Path], register: bool = False,
                      ) -> tuple[ProblemInstance, ProblemDescriptor]:
    """Load a quadratic problem definition.

    The file is JSON with fields ``name``, ``n``, ``m``, ``lower``, ``upper``,
    optional ``l1_weight``, and a list ``objectives`` of
    ``{"quad": n x n matrix, "linear": n vector, "constant": scalar}``
    entries meaning ``f_i(x) = x'Qx / 2 + b'x + c``.  The gradient Lipschitz
    constant and convexity flag are derived from the spectra.
    """
    spec = json.loads(Path(path).read_text())
    name = str(spec["name"])
    n, m = int(spec["n"]), int(spec["m"])
    if len(spec["objectives"]) != m:
        raise ValueError("objective count does not match m")
    quads = np.array([o["quad"] for o in spec["objectives"]], dtype=float)
    lins = np.array([o.get("linear", np.zeros(n)) for o in spec["objectives"]], dtype=float)
    consts = np.array([o.get("constant", 0.0) for o in spec["objectives"]], dtype=float)
    if quads.shape != (m, n, n) or lins.shape != (m, n):
        raise ValueError("malformed quadratic coefficients")
    quads = 0.5 * (quads + np.transpose(quads, (0, 2, 1)))
    eigs = np.linalg.eigvalsh(quads)
    l1_weight = float(spec.get("l1_weight", 0.0))

    def smooth(x: Array) -> Array:
        return 0.5 * np.einsum("i,mij,j->m", x, quads, x) + lins @ x + consts

    def smooth_jac(x: Array) -> Array:
        return quads @ x + lins

    part: NonsmoothPart = WeightedL1(l1_weight) if l1_weight > 0.0 else Zero()
    inst = ProblemInstance(n=n, m=m, smooth=smooth, smooth_jac=smooth_jac,
                           nonsmooth=part,
                           grad_lipschitz=float(np.max(np.abs(eigs))))
    desc = ProblemDescriptor(
        name=name, n=n, m=m,
        lower=tuple(float(v) for v in spec["lower"]),
        upper=tuple(float(v) for v in spec["upper"]),
        l1_weight=l1_weight,
        convex=bool(np.min(eigs) >= -1e-12),
        L_true=float(np.max(np.abs(eigs))),
    )
    if register:
        register_problem(name, lambda: (inst, desc))
    return inst, desc
