"""Command-line interface: run / compare / clipstats.

Exit codes: 0 target reached or report written, 2 budget exhausted,
3 diverged, 64 configuration error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import CmaError, ConfigError
from .harness import (
    BUDGET_EXHAUSTED,
    DIVERGED,
    TARGET_REACHED,
    ScenarioConfig,
    clip_stats,
    compare,
    normalize_clip_policy,
    normalize_injection_mode,
    parse_config_file,
    run_scenario,
)

EXIT_OK = 0
EXIT_BUDGET = 2
EXIT_DIVERGED = 3
EXIT_CONFIG = 64

_STATUS_EXIT = {TARGET_REACHED: EXIT_OK, BUDGET_EXHAUSTED: EXIT_BUDGET, DIVERGED: EXIT_DIVERGED}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cmainj",
        description="CMA-ES with injection of external solutions: scenario runner",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and write a CSV log")
    run.add_argument("--problem", required=True)
    run.add_argument("--dim", type=int, required=True)
    run.add_argument("--lambda", dest="lam", type=int, default=None)
    run.add_argument("--sigma0", type=float, default=None)
    run.add_argument(
        "--inject",
        default="none",
        help="none|near-optimum|direction|mean-shift|best-ever",
    )
    run.add_argument("--inject-scale", type=float, default=1e-4)
    run.add_argument("--clip", default="hard", help="hard|cdf|off")
    run.add_argument("--dsigma-max", type=float, default=None)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--target", type=float, required=True)
    run.add_argument("--max-evals", type=int, required=True)
    run.add_argument("--out", required=True)

    cmp = sub.add_parser("compare", help="run two scenario files over shared seeds")
    cmp.add_argument("--base", required=True)
    cmp.add_argument("--variant", required=True)
    cmp.add_argument("--seeds", required=True, help="comma-separated integers")
    cmp.add_argument("--out", required=True)

    stats = sub.add_parser("clipstats", help="Monte-Carlo clipping-probability estimate")
    stats.add_argument("--dim", type=int, required=True)
    stats.add_argument("--samples", type=int, required=True)
    stats.add_argument("--seed", type=int, default=0)

    return parser


def _cmd_run(args) -> int:
    cfg = ScenarioConfig(
        problem=args.problem,
        dim=args.dim,
        lam=args.lam,
        sigma0=args.sigma0,
        injection_mode=normalize_injection_mode(args.inject),
        injection_scale=args.inject_scale,
        clip_policy=normalize_clip_policy(args.clip),
        delta_sigma_max=args.dsigma_max,
        seed=args.seed,
        target_f=args.target,
        max_evals=args.max_evals,
    )
    log = run_scenario(cfg)
    log.write_csv(args.out)
    tail = "" if log.evals_to_target is None else f" evals_to_target={log.evals_to_target}"
    print(
        f"{cfg.problem} n={cfg.dim} seed={cfg.seed}: {log.status}"
        f" iters={log.iterations} evals={log.evaluations}"
        f" best_f={log.best_f:.6g}{tail}"
    )
    return _STATUS_EXIT[log.status]


def _cmd_compare(args) -> int:
    cfg_a = parse_config_file(args.base)
    cfg_b = parse_config_file(args.variant)
    try:
        seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --seeds list: {exc}") from exc
    if not seeds:
        raise ConfigError("--seeds must list at least one integer")
    report = compare(cfg_a, cfg_b, seeds)
    report.write_csv(args.out)
    censored = " (censored runs present)" if report.any_censored else ""
    print(
        f"median evals: base={report.median_a:g} variant={report.median_b:g}"
        f" ratio(variant/base)={report.ratio:.3g}"
        f" range=[{report.ratio_min:.3g}, {report.ratio_max:.3g}]{censored}"
    )
    return EXIT_OK


def _cmd_clipstats(args) -> int:
    st = clip_stats(args.dim, args.samples, seed=args.seed)
    print(
        f"n={st.n} c_y={st.c_y:.4f} samples={st.samples}"
        f" clipped_fraction={st.fraction:.6f} stderr={st.stderr:.2e}"
    )
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "compare":
            return _cmd_compare(args)
        return _cmd_clipstats(args)
    except CmaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
