"""Benchmark objective functions and wrappers.

Objectives count evaluations: one per scalar call, the batch size per
batch call, so an optimization run's budget accounting has no hidden
evaluations.  The counter increment is lock-protected so candidates may
be evaluated from several threads.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels, injection
from .errors import InvalidDimension, NoKnownOptimum, UnknownProblem
from .rng import GaussianStream


@dataclass
class Objective:
    name: str
    dim: int
    batch: Callable[[np.ndarray], np.ndarray]
    optimum: np.ndarray | None = None
    f_opt: float | None = None
    _count: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def eval_count(self) -> int:
        return self._count

    def __call__(self, x) -> float:
        x = np.ascontiguousarray(x, dtype=float).reshape(1, self.dim)
        with self._lock:
            self._count += 1
        return float(self.batch(x)[0])

    def eval_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.ascontiguousarray(xs, dtype=float)
        with self._lock:
            self._count += xs.shape[0]
        return self.batch(xs)

    def reset_count(self) -> None:
        with self._lock:
            self._count = 0


def sphere(n: int) -> Objective:
    """f(x) = sum x_i^2, optimum at the origin."""
    if n < 1:
        raise InvalidDimension(f"sphere needs n >= 1, got {n}")
    return Objective("sphere", n, _kernels.sphere_batch, optimum=np.zeros(n), f_opt=0.0)


def rosenbrock(n: int) -> Objective:
    """Chained Rosenbrock: sum 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2, optimum at ones."""
    if n < 2:
        raise InvalidDimension(f"rosenbrock needs n >= 2, got {n}")
    return Objective(
        "rosenbrock", n, _kernels.rosenbrock_batch, optimum=np.ones(n), f_opt=0.0
    )


def rastrigin(n: int) -> Objective:
    """Multimodal smoke-test function: 10n + sum (x_i^2 - 10 cos(2 pi x_i))."""
    if n < 1:
        raise InvalidDimension(f"rastrigin needs n >= 1, got {n}")
    return Objective(
        "rastrigin", n, _kernels.rastrigin_batch, optimum=np.zeros(n), f_opt=0.0
    )


def monotone_wrap(obj: Objective, g: Callable[[float], float]) -> Objective:
    """Compose a strictly increasing map with an objective.

    Rank-based selection makes the optimizer invariant under such maps;
    the wrapper preserves the optimum and transforms f_opt through g.
    """
    inner = obj.batch

    def batch(xs: np.ndarray) -> np.ndarray:
        vals = inner(xs)
        return np.array([g(float(v)) for v in vals])

    return Objective(
        name=f"{obj.name}|wrapped",
        dim=obj.dim,
        batch=batch,
        optimum=None if obj.optimum is None else obj.optimum.copy(),
        f_opt=None if obj.f_opt is None else g(obj.f_opt),
    )


def perturbed_optimum_injector(
    obj: Objective, scale: float, stream: GaussianStream
) -> Callable[[], injection.InjectionRequest]:
    """Factory of solution proposals at the optimum plus gaussian noise.

    Each call draws optimum + scale * N(0, I) from the given stream and
    wraps it as a solution request.
    """
    if obj.optimum is None:
        raise NoKnownOptimum(f"{obj.name} exposes no optimum to perturb")
    optimum = obj.optimum

    def factory() -> injection.InjectionRequest:
        return injection.solution(optimum + scale * stream.normal(obj.dim))

    return factory


_REGISTRY: dict[str, Callable[[int], Objective]] = {
    "sphere": sphere,
    "rosenbrock": rosenbrock,
    "rastrigin": rastrigin,
}


def make_problem(name: str, dim: int) -> Objective:
    try:
        builder = _REGISTRY[name]
    except KeyError:
        raise UnknownProblem(
            f"unknown problem {name!r}; registered: {sorted(_REGISTRY)}"
        ) from None
    return builder(dim)


def problem_names() -> list[str]:
    return sorted(_REGISTRY)
