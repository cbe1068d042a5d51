"""Materialization and length control of externally proposed solutions.

External proposals enter the optimizer as candidate slots (solutions or
directions) or as a mean shift.  Because such proposals need not follow
the current sampling distribution, their steps are length-controlled in
the Mahalanobis metric before they reach the adaptation updates: either
hard-clipped at a fixed threshold, or reduced adaptively by comparing the
empirical distribution of observed step lengths against the normal tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .errors import (
    DuplicateMeanShift,
    InconsistentHistory,
    InvalidDirection,
    InvalidInjection,
    TooManyInjections,
)
from .symmat import EigenDecomposition, mahalanobis_norm

if TYPE_CHECKING:  # pragma: no cover
    from .engine import OptimizerState
    from .params import StrategyParameters

SOLUTION = "solution"
DIRECTION = "direction"
GRADIENT_DIRECTION = "gradient_direction"
MEAN_SHIFT = "mean_shift"
_KINDS = (SOLUTION, DIRECTION, GRADIENT_DIRECTION, MEAN_SHIFT)

HARD_CLIP = "hard_clip"
CDF_ADAPTIVE = "cdf_adaptive"
OFF = "off"
_MODES = (HARD_CLIP, CDF_ADAPTIVE, OFF)

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class InjectionRequest:
    """One external proposal: a solution, a direction, or a mean shift.

    ``repeat`` fills that many candidate slots with the same proposal
    (useful for emphasizing a solution of superior quality); it must be 1
    for mean shifts, which do not occupy a slot.
    """

    kind: str
    payload: np.ndarray
    repeat: int = 1

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidInjection(f"unknown injection kind {self.kind!r}")
        payload = np.asarray(self.payload, dtype=float)
        object.__setattr__(self, "payload", payload)
        if payload.ndim != 1 or payload.size == 0:
            raise InvalidInjection("payload must be a nonempty vector")
        if not np.all(np.isfinite(payload)):
            raise InvalidInjection("payload contains non-finite coordinates")
        if self.kind in (DIRECTION, GRADIENT_DIRECTION) and not np.any(payload):
            raise InvalidDirection("direction payload must be a nonzero vector")
        if self.repeat < 1:
            raise InvalidInjection(f"repeat must be >= 1, got {self.repeat}")
        if self.kind == MEAN_SHIFT and self.repeat != 1:
            raise InvalidInjection("a mean shift cannot be repeated within a generation")


def solution(x, repeat: int = 1) -> InjectionRequest:
    return InjectionRequest(SOLUTION, np.asarray(x, dtype=float), repeat)


def direction(v, repeat: int = 1) -> InjectionRequest:
    return InjectionRequest(DIRECTION, np.asarray(v, dtype=float), repeat)


def gradient_direction(v, repeat: int = 1) -> InjectionRequest:
    return InjectionRequest(GRADIENT_DIRECTION, np.asarray(v, dtype=float), repeat)


def mean_shift(x, repeat: int = 1) -> InjectionRequest:
    return InjectionRequest(MEAN_SHIFT, np.asarray(x, dtype=float), repeat)


@dataclass
class ClipPolicy:
    """Length-control policy for injected steps.

    hard_clip caps the Mahalanobis norm of single injected steps at c_y
    (and the weighted mean shift at c_ym); cdf_adaptive instead shortens a
    step only when its length is overrepresented in the run's empirical
    length record relative to the normal tail, with a 1.2 safety factor;
    off disables both.  ``history`` collects the transformed lengths
    l = sqrt(2) * (||C^{-1/2} y|| - E||N||) of all candidates, lam entries
    per iteration, and is mutated only by the engine inside tell().
    """

    mode: str = HARD_CLIP
    c_y: float = math.inf
    c_ym: float = math.inf
    safety_factor: float = 1.2
    history: list[float] = field(default_factory=list)

    def __post_init__(self):
        if self.mode not in _MODES:
            raise InvalidInjection(f"unknown clip mode {self.mode!r}")

    def record_lengths(self, norms: np.ndarray, expected_norm: float) -> None:
        """Append this iteration's transformed step lengths to the record."""
        ls = _SQRT2 * (np.asarray(norms, dtype=float) - expected_norm)
        self.history.extend(float(v) for v in ls)


def alpha_clip(c: float, x: float) -> float:
    """min(1, c/x): the factor shortening a step of length x to at most c."""
    if x <= 0.0:
        return 1.0
    return min(1.0, c / x)


def clip_injected_step(
    y: np.ndarray,
    dec: EigenDecomposition,
    policy: ClipPolicy,
    *,
    t: int | None = None,
    lam: int | None = None,
    expected_norm: float | None = None,
    c_y: float | None = None,
) -> tuple[np.ndarray, float]:
    """Length-control one injected step; returns (new step, applied factor).

    ``c_y`` overrides the policy threshold (the engine passes a reduced
    dimension's threshold while coordinates are frozen).  The cdf_adaptive
    branch needs the iteration index, the population size, and E||N|| to
    evaluate the empirical-tail trigger.
    """
    if policy.mode == OFF:
        return y, 1.0
    norm = mahalanobis_norm(dec, y)
    if policy.mode == HARD_CLIP:
        factor = alpha_clip(policy.c_y if c_y is None else c_y, norm)
    else:
        if t is None or lam is None or expected_norm is None:
            raise InvalidInjection("cdf_adaptive clipping needs t, lam, expected_norm")
        l = _SQRT2 * (norm - expected_norm)
        factor = cdf_normalize(
            l,
            policy.history,
            t,
            lam,
            expected_norm=expected_norm,
            safety_factor=policy.safety_factor,
        )
    if factor >= 1.0:
        return y, 1.0
    return factor * y, factor


def clip_delta_m(
    delta_m: np.ndarray,
    dec: EigenDecomposition,
    params: "StrategyParameters",
    policy: ClipPolicy,
) -> tuple[np.ndarray, float]:
    """Cap sqrt(mu_w) times the Mahalanobis norm of the mean shift at c_ym."""
    if policy.mode == OFF:
        return delta_m, 1.0
    scaled = math.sqrt(params.mu_w) * mahalanobis_norm(dec, delta_m)
    factor = alpha_clip(policy.c_ym, scaled)
    if factor >= 1.0:
        return delta_m, 1.0
    return factor * delta_m, factor


def direction_to_candidate(
    v: np.ndarray,
    state: "OptimizerState",
    params: "StrategyParameters",
    kind: str = DIRECTION,
) -> np.ndarray:
    """Place a direction proposal at the typical sampling distance.

    A plain direction v becomes m + sigma * sqrt(n)/||C^{-1/2} v|| * v; a
    gradient direction is first mapped through C.  Either way the
    resulting step has Mahalanobis norm exactly sqrt(n), matching the
    typical length of internally sampled perturbations.
    """
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        raise InvalidDirection("direction must be a nonzero vector")
    n = params.n
    dec = state.dec
    if kind == DIRECTION:
        scale = math.sqrt(n) / float(np.linalg.norm(dec.invroot @ v))
        step = scale * v
    elif kind == GRADIENT_DIRECTION:
        scale = math.sqrt(n) / float(np.linalg.norm(dec.root @ v))
        step = scale * (state.C @ v)
    else:
        raise InvalidInjection(f"not a direction kind: {kind!r}")
    return state.m + state.sigma * step


def make_mean_shift(x_m: np.ndarray, state: "OptimizerState") -> np.ndarray:
    """Sigma-normalized shift (x_m - m)/sigma used in place of recombination."""
    x_m = np.asarray(x_m, dtype=float)
    if not np.all(np.isfinite(x_m)):
        raise InvalidInjection("mean-shift target contains non-finite coordinates")
    return (x_m - state.m) / state.sigma


def _phi(x: float) -> float:
    """Standard normal CDF."""
    return 0.5 * (1.0 + math.erf(x / _SQRT2))


def _trigger(
    l: float, history: np.ndarray, t: int, lam: int, safety_factor: float
) -> bool:
    if l <= 1.0:
        return False
    freq = float(np.count_nonzero(history >= l)) / (t * lam)
    return freq > safety_factor * (1.0 - _phi(l))


def cdf_normalize(
    l: float,
    history,
    t: int,
    lam: int,
    *,
    expected_norm: float,
    safety_factor: float = 1.2,
    resolution: float = 1e-6,
) -> float:
    """Adaptive shortening factor from the empirical length record.

    A correction applies only if l > 1 and lengths >= l occur more often
    in the record than safety_factor times the standard-normal tail
    allows.  The step is then rescaled so its transformed length becomes
    the largest l' <= l at which the trigger no longer holds (binary
    search to ``resolution``); the factor is expressed in step space via
    ||C^{-1/2} y|| = l/sqrt(2) + E||N||.  Never lengthens a step.
    """
    if t < 1:
        raise InconsistentHistory(f"iteration index must be >= 1, got {t}")
    hist = np.asarray(history, dtype=float)
    if hist.size == 0:
        raise InconsistentHistory("empty length record at t >= 1")
    if not _trigger(l, hist, t, lam, safety_factor):
        return 1.0
    lo, hi = 1.0, l  # trigger is false at 1.0 by definition, true at l
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if _trigger(mid, hist, t, lam, safety_factor):
            hi = mid
        else:
            lo = mid
    target = lo
    norm = l / _SQRT2 + expected_norm
    new_norm = target / _SQRT2 + expected_norm
    return min(1.0, new_norm / norm)


def materialize(
    requests,
    state: "OptimizerState",
    params: "StrategyParameters",
) -> tuple[list[np.ndarray], np.ndarray | None]:
    """Turn requests into candidate-slot vectors plus an optional mean shift.

    Slot order follows request order, with repeats expanded in place.  The
    mean-shift target does not occupy a slot and is returned separately.
    """
    slots: list[np.ndarray] = []
    x_m: np.ndarray | None = None
    for req in requests:
        if req.kind == MEAN_SHIFT:
            if x_m is not None:
                raise DuplicateMeanShift("at most one mean shift per generation")
            x_m = req.payload
        elif req.kind == SOLUTION:
            slots.extend([req.payload] * req.repeat)
        else:
            cand = direction_to_candidate(req.payload, state, params, req.kind)
            slots.extend([cand] * req.repeat)
    if len(slots) > params.lam:
        raise TooManyInjections(
            f"{len(slots)} injected slots requested for population size {params.lam}"
        )
    return slots, x_m
