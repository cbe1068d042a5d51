"""Scenario runner reproducing the injection experiments at desk scale.

A scenario is one seeded optimization run of a registered problem with a
chosen injection mode; the runner emits a per-iteration log suitable for
CSV export and convergence analysis.  ``compare`` runs two scenarios over
a common list of seeds and reports the evaluation-count ratio.

Convergence is measured on the internally sampled candidates only:
injected proposals carry outside information, so counting their fitness
toward the target would measure the injector rather than the optimizer.
The best evaluated point overall (any source) is still tracked in the
engine state and is what the elitist reinjection mode re-injects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import injection as inj
from ._kernels import sphere_batch
from .engine import DIVERGENCE_SIGMA, CmaEngine, EngineConfig
from .errors import ConfigError
from .params import clip_threshold, default_parameters
from .problems import make_problem, perturbed_optimum_injector
from .rng import STREAM_OFFSET, GaussianStream

TARGET_REACHED = "target_reached"
BUDGET_EXHAUSTED = "budget_exhausted"
DIVERGED = "diverged"

INJECTION_MODES = ("none", "near_optimum", "direction", "mean_shift", "best_ever_elitist")

CSV_HEADER = "iter,evals,best_f,median_f,worst_f,sigma,psigma_ratio,cond,clips"

# Initial conditions per problem: far enough from the optimum that a
# near-optimum proposal initially acts like a slightly disturbed gradient
# direction.
_PRESETS = {
    "sphere": ("ones", 1.0),
    "rosenbrock": ("zeros", 0.5),
    "rastrigin": ("twos", 1.5),
}


@dataclass
class ScenarioConfig:
    problem: str
    dim: int
    lam: int | None = None
    sigma0: float | None = None
    m0: str | np.ndarray | None = None  # named preset or explicit vector
    injection_mode: str = "none"
    injection_scale: float = 1e-4
    clip_policy: str = inj.HARD_CLIP
    delta_sigma_max: float | None = None
    c_y: float | None = None
    c_ym: float | None = None
    seed: int = 0
    target_f: float = 1e-8
    max_evals: int = 100_000


@dataclass
class RunLog:
    config: ScenarioConfig
    rows: list[tuple] = field(default_factory=list)
    status: str = BUDGET_EXHAUSTED
    evals_to_target: int | None = None
    best_f: float = math.inf
    best_x: np.ndarray | None = None

    def add_row(
        self, it, evals, best_f, median_f, worst_f, sigma, psigma_ratio, cond, clips
    ):
        self.rows.append(
            (it, evals, best_f, median_f, worst_f, sigma, psigma_ratio, cond, clips)
        )

    @property
    def iterations(self) -> int:
        return len(self.rows)

    @property
    def evaluations(self) -> int:
        return self.rows[-1][1] if self.rows else 0

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(CSV_HEADER + "\n")
            for row in self.rows:
                it, evals, bf, mf, wf, sg, pr, cond, clips = row
                fh.write(
                    f"{it},{evals},{bf!r},{mf!r},{wf!r},{sg!r},{pr!r},{cond!r},{clips}\n"
                )


@dataclass
class SpeedupReport:
    seeds: list[int]
    evals_a: list[int]
    evals_b: list[int]
    censored_a: list[bool]
    censored_b: list[bool]
    median_a: float
    median_b: float
    ratio: float  # median_b / median_a
    ratio_min: float
    ratio_max: float

    @property
    def any_censored(self) -> bool:
        return any(self.censored_a) or any(self.censored_b)

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("seed,evals_a,evals_b,ratio,censored_a,censored_b\n")
            for s, ea, eb, ca, cb in zip(
                self.seeds, self.evals_a, self.evals_b, self.censored_a, self.censored_b
            ):
                fh.write(f"{s},{ea},{eb},{eb / ea!r},{int(ca)},{int(cb)}\n")
            fh.write(
                f"median,{self.median_a!r},{self.median_b!r},{self.ratio!r},,\n"
            )


def _initial_mean(cfg: ScenarioConfig) -> np.ndarray:
    m0 = cfg.m0
    if m0 is None:
        m0 = _PRESETS.get(cfg.problem, ("zeros", 1.0))[0]
    if isinstance(m0, str):
        named = {
            "zeros": np.zeros(cfg.dim),
            "ones": np.ones(cfg.dim),
            "twos": np.full(cfg.dim, 2.0),
        }
        try:
            return named[m0]
        except KeyError:
            raise ConfigError(f"unknown m0 preset {m0!r}") from None
    m0 = np.asarray(m0, dtype=float)
    if m0.shape != (cfg.dim,):
        raise ConfigError(f"m0 has shape {m0.shape}, expected ({cfg.dim},)")
    return m0


def _build(cfg: ScenarioConfig):
    if cfg.injection_mode not in INJECTION_MODES:
        raise ConfigError(f"unknown injection mode {cfg.injection_mode!r}")
    obj = make_problem(cfg.problem, cfg.dim)
    params = default_parameters(cfg.dim, cfg.lam)
    overrides = {}
    if cfg.delta_sigma_max is not None:
        overrides["delta_sigma_max"] = float(cfg.delta_sigma_max)
    if cfg.c_y is not None:
        overrides["c_y"] = float(cfg.c_y)
    if cfg.c_ym is not None:
        overrides["c_ym"] = float(cfg.c_ym)
    if overrides:
        params = params.with_overrides(**overrides)
    if obj.f_opt is not None and not cfg.target_f > obj.f_opt:
        raise ConfigError(
            f"target_f {cfg.target_f} must exceed the optimal value {obj.f_opt}"
        )
    if cfg.max_evals < params.lam:
        raise ConfigError("max_evals smaller than one population")
    sigma0 = cfg.sigma0
    if sigma0 is None:
        sigma0 = _PRESETS.get(cfg.problem, ("zeros", 1.0))[1]
    if not sigma0 > 0:
        raise ConfigError(f"sigma0 must be positive, got {sigma0}")
    engine = CmaEngine(
        _initial_mean(cfg),
        sigma0,
        params=params,
        config=EngineConfig(clip_policy=cfg.clip_policy, seed=cfg.seed),
    )
    return obj, engine


def run_scenario(cfg: ScenarioConfig) -> RunLog:
    """Execute one seeded ask-evaluate-tell loop until target, budget, or blowup."""
    obj, engine = _build(cfg)
    params = engine.params
    log = RunLog(config=cfg)
    sampled_best = math.inf
    evals = 0

    inj_stream = GaussianStream(cfg.seed + STREAM_OFFSET)
    near_opt = None
    if cfg.injection_mode in ("near_optimum", "mean_shift"):
        near_opt = perturbed_optimum_injector(obj, cfg.injection_scale, inj_stream)

    while True:
        requests = []
        if cfg.injection_mode == "near_optimum":
            requests = [near_opt()]
        elif cfg.injection_mode == "mean_shift":
            requests = [inj.mean_shift(near_opt().payload)]
        elif cfg.injection_mode == "direction":
            v = obj.optimum - engine.state.m
            if np.any(v):
                requests = [inj.direction(v)]
        elif cfg.injection_mode == "best_ever_elitist":
            if engine.state.best_ever is not None:
                requests = [inj.solution(engine.state.best_ever[0])]

        gen = engine.ask(requests)
        fits = obj.eval_batch(gen.candidates)
        report = engine.tell(gen, fits)
        evals += params.lam

        own = fits[~gen.injected_flags]
        if own.size:
            sampled_best = min(sampled_best, float(own.min()))
        clips = report.clip_count + (1 if report.delta_m_clip_factor < 1.0 else 0)
        state = engine.state
        log.add_row(
            report.t,
            evals,
            sampled_best,
            float(np.median(fits)),
            float(np.max(fits)),
            state.sigma,
            float(np.linalg.norm(state.p_sigma)) / params.expected_norm,
            state.dec.condition_number(),
            clips,
        )

        if sampled_best <= cfg.target_f:
            log.status = TARGET_REACHED
            log.evals_to_target = evals
            break
        if not state.is_finite() or state.sigma > DIVERGENCE_SIGMA:
            log.status = DIVERGED
            break
        if evals + params.lam > cfg.max_evals:
            log.status = BUDGET_EXHAUSTED
            break

    if engine.state.best_ever is not None:
        log.best_x, log.best_f = engine.state.best_ever
    return log


def compare(cfg_a: ScenarioConfig, cfg_b: ScenarioConfig, seeds) -> SpeedupReport:
    """Run both configs on every seed; ratio is median evals of b over a.

    Runs that never reach the target enter the ratio at their evaluation
    budget and are flagged as censored.
    """
    for attr in ("problem", "dim", "target_f"):
        if getattr(cfg_a, attr) != getattr(cfg_b, attr):
            raise ConfigError(f"compare requires matching {attr}")
    seeds = [int(s) for s in seeds]
    evals_a, evals_b, cens_a, cens_b = [], [], [], []
    for s in seeds:
        log_a = run_scenario(replace(cfg_a, seed=s))
        log_b = run_scenario(replace(cfg_b, seed=s))
        cens_a.append(log_a.evals_to_target is None)
        cens_b.append(log_b.evals_to_target is None)
        evals_a.append(log_a.evals_to_target or cfg_a.max_evals)
        evals_b.append(log_b.evals_to_target or cfg_b.max_evals)
    med_a = float(np.median(evals_a))
    med_b = float(np.median(evals_b))
    ratios = [b / a for a, b in zip(evals_a, evals_b)]
    return SpeedupReport(
        seeds=seeds,
        evals_a=evals_a,
        evals_b=evals_b,
        censored_a=cens_a,
        censored_b=cens_b,
        median_a=med_a,
        median_b=med_b,
        ratio=med_b / med_a,
        ratio_min=min(ratios),
        ratio_max=max(ratios),
    )


@dataclass
class ClipStats:
    n: int
    samples: int
    c_y: float
    fraction: float
    stderr: float


def clip_stats(n: int, samples: int, seed: int = 0) -> ClipStats:
    """Monte-Carlo estimate of the clipping probability under neutral sampling.

    Uses the engine's own sampling path with C = I, where the Mahalanobis
    norm of a step is chi-distributed with n degrees of freedom; reports
    the fraction of norms exceeding c_y and its standard error.
    """
    if samples < 10_000:
        raise ConfigError(f"need at least 1e4 samples, got {samples}")
    c_y = clip_threshold(n)
    stream = GaussianStream(seed)
    thresh = c_y * c_y
    count = 0
    remaining = samples
    chunk = max(1, min(200_000, (4_000_000 + n - 1) // n))
    while remaining > 0:
        m = min(chunk, remaining)
        z = stream.normal((m, n))
        count += int(np.count_nonzero(sphere_batch(np.ascontiguousarray(z)) > thresh))
        remaining -= m
    frac = count / samples
    stderr = math.sqrt(max(frac * (1.0 - frac), 1e-300) / samples)
    return ClipStats(n=n, samples=samples, c_y=c_y, fraction=frac, stderr=stderr)


# ------------------------------------------------------------- config files

_FIELD_ALIASES = {"lambda": "lam"}


def parse_config_file(path) -> ScenarioConfig:
    """Read a flat key=value scenario file (one key per line, # comments)."""
    known = {f.name: f for f in fields(ScenarioConfig)}
    raw: dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            key = _FIELD_ALIASES.get(key, key)
            if key not in known:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            raw[key] = value.strip()
    if "problem" not in raw or "dim" not in raw:
        raise ConfigError(f"{path}: problem and dim are required")
    kwargs: dict = {}
    for key, value in raw.items():
        kwargs[key] = _convert(key, value)
    try:
        return ScenarioConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _convert(key: str, value: str):
    if key == "problem":
        return value
    if key in ("dim", "lam", "seed", "max_evals"):
        return int(value)
    if key in ("sigma0", "injection_scale", "delta_sigma_max", "c_y", "c_ym", "target_f"):
        if value.lower() in ("inf", "infinity"):
            return math.inf
        return float(value)
    if key == "injection_mode":
        return normalize_injection_mode(value)
    if key == "clip_policy":
        return normalize_clip_policy(value)
    if key == "m0":
        parts = value.split()
        if len(parts) > 1 or _is_number(value):
            return np.array([float(p) for p in parts])
        return value
    raise ConfigError(f"no converter for key {key!r}")


def _is_number(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def normalize_injection_mode(value: str) -> str:
    mode = value.strip().lower().replace("-", "_")
    if mode == "best_ever":
        mode = "best_ever_elitist"
    if mode not in INJECTION_MODES:
        raise ConfigError(f"unknown injection mode {value!r}")
    return mode


def normalize_clip_policy(value: str) -> str:
    policy = value.strip().lower()
    short = {"hard": inj.HARD_CLIP, "cdf": inj.CDF_ADAPTIVE}
    policy = short.get(policy, policy)
    if policy not in (inj.HARD_CLIP, inj.CDF_ADAPTIVE, inj.OFF):
        raise ConfigError(f"unknown clip policy {value!r}")
    return policy
