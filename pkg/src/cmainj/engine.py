"""The (mu_w, lambda) CMA-ES state machine with an ask-tell interface.

Candidates are sampled from a multivariate normal; external proposals may
replace candidate slots or shift the mean.  tell() ranks the evaluated
candidates and runs the update pipeline in a fixed order: form the
sigma-normalized steps, length-control injected ones, recombine the mean,
update both evolution paths, the covariance matrix, and the step-size.

Internally sampled candidates keep their generating steps (rather than
recomputing (x - m)/sigma), so rank-preserving fitness transformations
and translations reproduce trajectories exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import injection as inj
from ._kernels import weighted_outer
from .errors import (
    AllVariablesFrozen,
    InvalidDimension,
    InvalidFitness,
    InvalidInjection,
    StaleDecomposition,
)
from .params import StrategyParameters, clip_threshold, default_parameters
from .params import expected_norm as _expected_norm
from .rng import GaussianStream
from .symmat import EigenDecomposition, decompose, mahalanobis_norms, symmetrize

CLIP_AFTER_MEAN = "clip_after_mean"
CLIP_BEFORE_MEAN = "clip_before_mean"

ONLY_ON_MEAN_SHIFT = "only_on_mean_shift"
ALWAYS = "always"

DIVERGENCE_SIGMA = 1e12


@dataclass
class EngineConfig:
    """Behavioral switches of the update pipeline.

    mean_update_order selects whether the mean shift is length-controlled
    after the mean update (the default pipeline order, so the mean update
    itself uses the uncontrolled shift) or before it.  delta_m_clip_mode
    selects when the mean-shift cap applies at all: only on iterations
    with an injected mean shift (default), or every iteration.
    """

    clip_policy: str = inj.HARD_CLIP
    delta_m_clip_mode: str = ONLY_ON_MEAN_SHIFT
    mean_update_order: str = CLIP_AFTER_MEAN
    seed: int = 0


@dataclass
class OptimizerState:
    """Full optimizer state; snapshots are independent copies."""

    m: np.ndarray
    sigma: float
    C: np.ndarray
    p_sigma: np.ndarray
    p_c: np.ndarray
    t: int
    dec: EigenDecomposition
    best_ever: tuple[np.ndarray, float] | None = None

    @classmethod
    def initial(cls, m0: np.ndarray, sigma0: float) -> "OptimizerState":
        m0 = np.asarray(m0, dtype=float)
        if m0.ndim != 1 or m0.size < 1:
            raise InvalidDimension("initial mean must be a nonempty vector")
        if not (sigma0 > 0 and math.isfinite(sigma0)):
            raise InvalidDimension(f"initial step-size must be positive, got {sigma0}")
        n = m0.size
        c = np.eye(n)
        return cls(
            m=m0.copy(),
            sigma=float(sigma0),
            C=c,
            p_sigma=np.zeros(n),
            p_c=np.zeros(n),
            t=0,
            dec=decompose(c, stamp=0),
        )

    @property
    def n(self) -> int:
        return self.m.size

    def copy(self) -> "OptimizerState":
        best = None
        if self.best_ever is not None:
            best = (self.best_ever[0].copy(), self.best_ever[1])
        return OptimizerState(
            m=self.m.copy(),
            sigma=self.sigma,
            C=self.C.copy(),
            p_sigma=self.p_sigma.copy(),
            p_c=self.p_c.copy(),
            t=self.t,
            dec=self.dec,
            best_ever=best,
        )

    def is_finite(self) -> bool:
        return bool(
            math.isfinite(self.sigma)
            and np.all(np.isfinite(self.m))
            and np.all(np.isfinite(self.C))
            and np.all(np.isfinite(self.p_sigma))
            and np.all(np.isfinite(self.p_c))
        )


@dataclass
class Generation:
    """One iteration's candidates, their generating steps, and tell results."""

    candidates: np.ndarray  # (lam, n)
    steps: np.ndarray  # (lam, n) sigma-normalized steps y_i per slot
    injected_flags: np.ndarray  # (lam,) bool
    mean_shift: np.ndarray | None  # target x_m, not occupying a slot
    t: int
    mean_shift_only: bool = False
    fitnesses: np.ndarray | None = None  # filled at tell
    order: np.ndarray | None = None  # rank order (indices into slots)
    ranked_steps: np.ndarray | None = None  # (mu, n) after length control
    delta_m: np.ndarray | None = None
    h_sigma: int | None = None

    @property
    def lam(self) -> int:
        return self.candidates.shape[0]


@dataclass
class IterationReport:
    """Telemetry of one tell() call."""

    t: int  # iteration index that was completed
    h_sigma: int
    sigma_exponent_raw: float  # log step-size change before the cap
    sigma_exponent: float  # after the cap
    clip_count: int  # injected steps actually shortened
    delta_m_clip_factor: float  # 1.0 when the mean-shift cap did not act
    step_norms: np.ndarray  # Mahalanobis norms of all steps, rank order, pre-control
    sigma_ratio: float


@dataclass
class FrozenSet:
    """Coordinates held at fixed values across all candidates."""

    indices: np.ndarray
    values: np.ndarray
    free_mask: np.ndarray


def h_sigma(p_sigma_next: np.ndarray, params: StrategyParameters, t: int) -> int:
    """Stall indicator: 1 while the step-size path is not unexpectedly long.

    Compares ||p_sigma||^2 against n (1 - (1-c_sigma)^(2(t+1))) (2 + 4/(n+1)),
    the unbiased-growth envelope at iteration t (0-based).
    """
    n = params.n
    norm_sq = float(np.dot(p_sigma_next, p_sigma_next))
    threshold = (
        n * (1.0 - (1.0 - params.c_sigma) ** (2 * (t + 1))) * (2.0 + 4.0 / (n + 1.0))
    )
    return 1 if norm_sq < threshold else 0


def sigma_exponent(p_sigma_next: np.ndarray, params: StrategyParameters) -> tuple[float, float]:
    """(raw, capped) log step-size change from the path length."""
    norm = float(np.linalg.norm(p_sigma_next))
    raw = (params.c_sigma / params.d_sigma) * (norm / params.expected_norm - 1.0)
    return raw, min(params.delta_sigma_max, raw)


def update_sigma(
    sigma: float, p_sigma_next: np.ndarray, params: StrategyParameters
) -> float:
    """Cumulative step-size adaptation with the capped increment.

    The per-iteration ratio lies in [exp(-c_sigma/d_sigma),
    exp(delta_sigma_max)].
    """
    _, capped = sigma_exponent(p_sigma_next, params)
    return sigma * math.exp(capped)


def freeze_variables(
    params: StrategyParameters,
    state: OptimizerState,
    frozen,
) -> tuple[StrategyParameters, OptimizerState]:
    """Adjusted (params, state) view for a set of frozen coordinates.

    With j coordinates frozen, the step-size statistics run in dimension
    n - j: the path norm ignores frozen components, the stall threshold and
    E||N|| use n - j, and the single-step cap c_y is re-derived for n - j.
    Frozen diagonal entries of C are floored at the smallest eigenvalue of
    the free submatrix to avoid numerical collapse.
    """
    idx = np.asarray(sorted(set(int(i) for i in frozen)), dtype=int)
    n = params.n
    if idx.size == 0:
        return params, state
    if np.any(idx < 0) or np.any(idx >= n):
        raise InvalidDimension(f"frozen indices out of range for dimension {n}")
    if idx.size >= n:
        raise AllVariablesFrozen("cannot freeze every coordinate")
    n_free = n - idx.size
    params_view = replace(
        params,
        n=n_free,
        c_y=clip_threshold(n_free),
        expected_norm=_expected_norm(n_free),
    )
    free = np.ones(n, dtype=bool)
    free[idx] = False
    c = state.C.copy()
    floor = float(np.linalg.eigvalsh(c[np.ix_(free, free)])[0])
    for j in idx:
        if c[j, j] < floor:
            c[j, j] = floor
    state_view = state.copy()
    state_view.C = c
    state_view.dec = decompose(c, stamp=state.t)
    return params_view, state_view


class CmaEngine:
    """Ask-tell optimizer handle owning state, parameters, and the RNG.

    Single-writer: ask() and tell() must alternate from one logical thread
    of control; evaluating a generation's candidates may happen anywhere.
    """

    def __init__(
        self,
        m0,
        sigma0: float,
        params: StrategyParameters | None = None,
        config: EngineConfig | None = None,
        stream: GaussianStream | None = None,
        state: OptimizerState | None = None,
    ):
        self.state = state if state is not None else OptimizerState.initial(m0, sigma0)
        self.params = params if params is not None else default_parameters(self.state.n)
        if self.params.n != self.state.n:
            raise InvalidDimension(
                f"parameters are for dimension {self.params.n}, state is {self.state.n}"
            )
        self.config = config if config is not None else EngineConfig()
        self.stream = stream if stream is not None else GaussianStream(self.config.seed)
        self.clip_policy = inj.ClipPolicy(
            mode=self.config.clip_policy,
            c_y=self.params.c_y,
            c_ym=self.params.c_ym,
        )
        self._frozen: FrozenSet | None = None

    # -------------------------------------------------------- checkpointing

    def save(self, path) -> None:
        """Write a CMAINJ1 checkpoint of state and stream position."""
        from .checkpoint import save_checkpoint

        save_checkpoint(path, self.state, self.stream)

    @classmethod
    def resume(
        cls,
        path,
        params: StrategyParameters | None = None,
        config: EngineConfig | None = None,
    ) -> "CmaEngine":
        """Rebuild an engine from a checkpoint.

        Parameters and config are not stored in the record; defaults are
        re-derived from the dimension when not supplied.  The best-ever
        record is not part of a checkpoint.
        """
        from .checkpoint import load_checkpoint

        fields, stream = load_checkpoint(path)
        state = OptimizerState(
            m=fields["m"],
            sigma=fields["sigma"],
            C=fields["C"],
            p_sigma=fields["p_sigma"],
            p_c=fields["p_c"],
            t=fields["t"],
            dec=decompose(fields["C"], stamp=fields["t"]),
        )
        return cls(None, 0.0, params=params, config=config, stream=stream, state=state)

    # ------------------------------------------------------------ freezing

    def freeze(self, indices, values=None) -> None:
        """Hold the given coordinates at fixed values in all candidates.

        values default to the current mean's entries.  While frozen, every
        candidate is a modified (hence injected) solution and the
        step-size statistics run in the reduced dimension.
        """
        idx = np.asarray(sorted(set(int(i) for i in indices)), dtype=int)
        n = self.state.n
        if idx.size >= n:
            raise AllVariablesFrozen("cannot freeze every coordinate")
        if idx.size == 0:
            self._frozen = None
            return
        if np.any(idx < 0) or np.any(idx >= n):
            raise InvalidDimension(f"frozen indices out of range for dimension {n}")
        vals = (
            self.state.m[idx].copy()
            if values is None
            else np.asarray(values, dtype=float).copy()
        )
        if vals.shape != idx.shape:
            raise InvalidDimension("one frozen value per frozen index required")
        free = np.ones(n, dtype=bool)
        free[idx] = False
        self._frozen = FrozenSet(indices=idx, values=vals, free_mask=free)

    def unfreeze(self) -> None:
        self._frozen = None

    @property
    def frozen_indices(self) -> np.ndarray | None:
        return None if self._frozen is None else self._frozen.indices

    # ------------------------------------------------------------- ask/tell

    def ask(self, injections=(), mean_shift_only: bool = False) -> Generation:
        """Sample the next population, replacing slots with injected proposals.

        The full population is always drawn from the seeded stream first
        (so the stream position does not depend on the injections), then
        the first k slots are overwritten by the materialized requests.
        """
        state, params = self.state, self.params
        lam, n = params.lam, params.n
        z = self.stream.normal((lam, n))
        steps = z @ state.dec.root
        candidates = state.m + state.sigma * steps
        flags = np.zeros(lam, dtype=bool)

        slots, x_m = inj.materialize(injections, state, params)
        for j, vec in enumerate(slots):
            if vec.shape != (n,):
                raise InvalidInjection(
                    f"injected vector has shape {vec.shape}, expected ({n},)"
                )
            candidates[j] = vec
            steps[j] = (vec - state.m) / state.sigma
            flags[j] = True

        if mean_shift_only and x_m is None:
            raise InvalidInjection("mean_shift_only requires a mean-shift request")

        if self._frozen is not None:
            fz = self._frozen
            candidates[:, fz.indices] = fz.values
            steps[:, fz.indices] = (fz.values - state.m[fz.indices]) / state.sigma
            flags[:] = True  # every candidate is modified while freezing

        return Generation(
            candidates=candidates,
            steps=steps,
            injected_flags=flags,
            mean_shift=None if x_m is None else x_m.copy(),
            t=state.t,
            mean_shift_only=mean_shift_only,
        )

    def tell(self, gen: Generation, fitnesses=None) -> IterationReport:
        """Consume evaluated fitnesses and advance the state by one iteration.

        Raises InvalidFitness on any non-finite fitness (state unchanged).
        Ties rank by candidate index.  fitnesses may be omitted only for a
        mean-shift-only generation, whose candidates need no evaluation.
        """
        state, params, config = self.state, self.params, self.config
        if gen.t != state.t:
            raise StaleDecomposition(
                f"generation from iteration {gen.t} told at iteration {state.t}"
            )
        lam, mu, n = params.lam, params.mu, params.n

        if fitnesses is None:
            if not gen.mean_shift_only:
                raise InvalidFitness("fitnesses required unless mean_shift_only")
            order = np.arange(lam)
        else:
            fitnesses = np.asarray(fitnesses, dtype=float)
            if fitnesses.shape != (lam,):
                raise InvalidFitness(
                    f"expected {lam} fitness values, got shape {fitnesses.shape}"
                )
            if not np.all(np.isfinite(fitnesses)):
                raise InvalidFitness("non-finite fitness value")
            order = np.argsort(fitnesses, kind="stable")
        gen.fitnesses = fitnesses
        gen.order = order

        if self._frozen is not None:
            n_free = n - self._frozen.indices.size
            params_eff = replace(
                params,
                n=n_free,
                c_y=clip_threshold(n_free),
                expected_norm=_expected_norm(n_free),
            )
            free_mask = self._frozen.free_mask
        else:
            params_eff, free_mask = params, None

        y = gen.steps[order].copy()
        flags = gen.injected_flags[order]
        norms = mahalanobis_norms(state.dec, y)

        if self.clip_policy.mode == inj.CDF_ADAPTIVE:
            # Raw lengths enter the record before any correction so the
            # empirical CDF reflects the observed distribution.
            self.clip_policy.record_lengths(norms, params_eff.expected_norm)

        clip_count = 0
        if self.clip_policy.mode != inj.OFF:
            for i in np.flatnonzero(flags):
                y[i], factor = inj.clip_injected_step(
                    y[i],
                    state.dec,
                    self.clip_policy,
                    t=state.t + 1,
                    lam=lam,
                    expected_norm=params_eff.expected_norm,
                    c_y=params_eff.c_y,
                )
                if factor < 1.0:
                    clip_count += 1

        c_mu_eff = 0.0 if gen.mean_shift_only else params.c_mu

        if gen.mean_shift is not None:
            delta_m = inj.make_mean_shift(gen.mean_shift, state)
        else:
            delta_m = params.weights @ y[:mu]

        apply_dm_clip = self.clip_policy.mode != inj.OFF and (
            config.delta_m_clip_mode == ALWAYS or gen.mean_shift is not None
        )
        dm_factor = 1.0
        if config.mean_update_order == CLIP_BEFORE_MEAN and apply_dm_clip:
            delta_m, dm_factor = inj.clip_delta_m(delta_m, state.dec, params, self.clip_policy)
        m_next = state.m + params.c_m * state.sigma * delta_m
        if config.mean_update_order == CLIP_AFTER_MEAN and apply_dm_clip:
            delta_m, dm_factor = inj.clip_delta_m(delta_m, state.dec, params, self.clip_policy)

        p_sigma_next = (1.0 - params.c_sigma) * state.p_sigma + math.sqrt(
            params.c_sigma * (2.0 - params.c_sigma) * params.mu_w
        ) * (state.dec.invroot @ delta_m)

        p_for_stats = p_sigma_next if free_mask is None else p_sigma_next[free_mask]
        hs = h_sigma(p_for_stats, params_eff, state.t)

        p_c_next = (1.0 - params.c_c) * state.p_c + hs * math.sqrt(
            params.c_c * (2.0 - params.c_c) * params.mu_w
        ) * delta_m

        c_1_eff = params.c_1 * (1.0 - (1.0 - hs * hs) * params.c_c * (2.0 - params.c_c))
        c_next = (1.0 - c_1_eff - c_mu_eff) * state.C + params.c_1 * np.outer(
            p_c_next, p_c_next
        )
        if c_mu_eff > 0.0:
            c_next = c_next + c_mu_eff * weighted_outer(
                np.ascontiguousarray(y[:mu]), params.weights
            )
        c_next = symmetrize(c_next)

        if self._frozen is not None:
            fz = self._frozen
            floor = float(
                np.linalg.eigvalsh(c_next[np.ix_(fz.free_mask, fz.free_mask)])[0]
            )
            for j in fz.indices:
                if c_next[j, j] < floor:
                    c_next[j, j] = floor

        raw_exp, capped_exp = sigma_exponent(p_for_stats, params_eff)
        sigma_next = state.sigma * math.exp(capped_exp)

        if fitnesses is not None:
            best_i = int(order[0])
            best_f = float(fitnesses[best_i])
            if state.best_ever is None or best_f < state.best_ever[1]:
                state.best_ever = (gen.candidates[best_i].copy(), best_f)

        gen.ranked_steps = y[:mu]
        gen.delta_m = delta_m
        gen.h_sigma = hs

        sigma_ratio = sigma_next / state.sigma
        state.m = m_next
        state.sigma = sigma_next
        state.C = c_next
        state.p_sigma = p_sigma_next
        state.p_c = p_c_next
        state.t += 1
        state.dec = decompose(c_next, stamp=state.t)

        return IterationReport(
            t=state.t - 1,
            h_sigma=hs,
            sigma_exponent_raw=raw_exp,
            sigma_exponent=capped_exp,
            clip_count=clip_count,
            delta_m_clip_factor=dm_factor,
            step_norms=norms,
            sigma_ratio=sigma_ratio,
        )
