"""Experiment runner: figure2, simulate, overhead and verify subcommands.

Every subcommand is a deterministic function of its arguments and the
seed; running twice with the same inputs produces byte-identical output.
Floats are emitted with 9 significant digits so golden files are portable.

Exit status: 0 on success, 1 when `verify` finds a failing check, 2 for
configuration or usage errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import IO

from . import analysis, constraints, overhead
from .config import ConfigError, RunConfig, coerce_value, parse_config_file
from .protocol import run_simulation

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG_ERROR = 2

DEFAULT_SEED = 12345


def _resolve(flag_value, file_values: dict[str, str] | None, key: str, fallback):
    """Flag wins, then the config file, then the built-in default."""
    if flag_value is not None:
        return flag_value
    if file_values and key in file_values:
        return coerce_value(key, file_values[key])
    return fallback


def fmt(value) -> str:
    """CSV cell formatting: 9 significant digits, lowercase booleans, nan for undefined."""
    if value is None:
        return "nan"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def _row(*cells) -> str:
    return ",".join(fmt(cell) for cell in cells)


def cmd_figure2(args: argparse.Namespace, out: IO[str]) -> int:
    if args.loss_min > args.loss_max or args.steps < 2:
        raise ConfigError("loss_db", "need loss-min <= loss-max and steps >= 2")
    file_values = parse_config_file(args.config) if args.config else None
    gamma = _resolve(args.gamma, file_values, "gamma", 0.01)
    mu = _resolve(args.mu, file_values, "mu", 0.01)
    points = analysis.security_curve(gamma, mu, args.loss_min, args.loss_max, args.steps)
    lines = ["loss_db,T,D,e,h_e,g"]
    for p in points:
        lines.append(_row(p.loss_db, p.T, p.D, p.e, p.h_e, p.g))
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, out: IO[str]) -> int:
    file_values = parse_config_file(args.config) if args.config else None
    flags = {
        key: getattr(args, key)
        for key in (
            "seed", "K", "num_nodes", "pairs", "H2", "H3", "gamma", "mu", "T",
            "loss_db", "attack", "eta_path", "eta_msg", "threshold2", "threshold3",
            "traffic",
        )
    }
    config = RunConfig.build(file_values, flags)

    result = run_simulation(
        K=config.K,
        node_pairs=config.pairs,
        h2_per_pair=config.H2,
        h3_per_pair=config.H3,
        channel=config.channel(),
        attack=config.attack_config(),
        seed=config.seed,
        traffic=config.traffic,
        threshold2=config.threshold2,
        threshold3=config.threshold3,
    )

    lines = [
        "pair,type2_trials,type2_errors,D2_hat,type3_trials,type3_errors,D3_hat,"
        "eve_learned_fraction,detected"
    ]
    for pair in result.pairs:
        lines.append(
            _row(
                f"{pair.sender}-{pair.receiver}",
                pair.stats.type2_trials,
                pair.stats.type2_errors,
                pair.d2_hat,
                pair.stats.type3_trials,
                pair.stats.type3_errors,
                pair.d3_hat,
                pair.eve_learned_fraction,
                pair.detected,
            )
        )
    lines.append("")
    lines.append("detected,inferred_eta,leaked_fraction_bound,actual_learned_fraction")
    lines.append(
        _row(
            result.detected,
            result.inferred_eta,
            result.leaked_fraction_bound,
            result.actual_learned_fraction,
        )
    )
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_overhead(args: argparse.Namespace, out: IO[str]) -> int:
    file_values = parse_config_file(args.config) if args.config else None
    K = _resolve(args.K, file_values, "K", 100)
    H3 = _resolve(args.H3, file_values, "H3", 20)
    trials = _resolve(args.trials, file_values, "trials", 100_000)
    seed = _resolve(args.seed, file_values, "seed", DEFAULT_SEED)

    if args.m is not None and args.eta is not None:
        raise ConfigError("m", "give either --m or --eta, not both")
    if args.eta is not None:
        if not 0.0 <= args.eta <= 1.0:
            raise ConfigError("eta", f"must be in [0, 1], got {args.eta}")
        m = round(args.eta * K)
    else:
        m = args.m if args.m is not None else round(0.2 * K)
    if not 0 <= m <= K:
        raise ConfigError("m", f"must be in [0, K], got {m}")
    if not 0 <= H3 <= K:
        raise ConfigError("H3", f"must be in [0, K], got {H3}")

    exact = overhead.exact_escape_prob(K, H3, m)
    eta = m / K
    bound = overhead.bound_escape_prob(K, H3, eta) if 0.0 < eta < 1.0 else None
    mc_estimate, mc_stderr = overhead.montecarlo_escape(K, H3, m, trials, seed)

    report = overhead.required_overhead(K, args.epsilon, args.eta_max)

    lines = [
        "K,H3,m,exact,bound_S8,mc_estimate,mc_stderr",
        _row(K, H3, m, exact, bound, mc_estimate, mc_stderr),
        "",
        "epsilon,eta_max,alpha,beta,g1,H_sum,H_paper_constant",
        _row(
            report.epsilon,
            report.eta_max,
            report.alpha,
            report.beta,
            report.g1,
            report.h_total,
            report.g0_affine,
        ),
    ]
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, out: IO[str]) -> int:
    file_values = parse_config_file(args.config) if args.config else None
    seed = _resolve(args.seed, file_values, "seed", DEFAULT_SEED)
    checks, scatter = constraints.run_verification(
        dim=args.dim,
        samples=args.samples,
        scatter_samples=args.scatter_samples,
        seed=seed,
        enforce_return_constraint=not args.violate_constraints,
    )
    lines = ["check,result"]
    for check in checks:
        lines.append(f"{check.name},{'pass' if check.passed else 'fail'}")
    lines.append("")
    lines.append("disturbance,indistinguishability")
    for disturbance, distance in scatter:
        lines.append(_row(disturbance, distance))
    out.write("\n".join(lines) + "\n")
    return EXIT_OK if all(check.passed for check in checks) else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decoyroute",
        description="Decoy-slot quantum routing: simulator and security analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=None, help=f"default {DEFAULT_SEED}")
        p.add_argument("--out", type=str, default=None, help="output path (default stdout)")
        p.add_argument("--config", type=str, default=None, help="key = value config file")

    p = sub.add_parser("figure2", help="leak-vs-loss curve as CSV")
    add_common(p)
    p.add_argument("--gamma", type=float, default=None, help="default 0.01")
    p.add_argument("--mu", type=float, default=None, help="default 0.01")
    p.add_argument("--loss-min", dest="loss_min", type=float, default=0.0)
    p.add_argument("--loss-max", dest="loss_max", type=float, default=3.0)
    p.add_argument("--steps", type=int, default=61)
    p.set_defaults(func=cmd_figure2)

    p = sub.add_parser("simulate", help="run the clocked protocol once")
    add_common(p)
    p.add_argument("--K", type=int, default=None)
    p.add_argument("--num-nodes", dest="num_nodes", type=int, default=None)
    p.add_argument("--pairs", type=str, default=None, help="comma list like 0-1,0-2")
    p.add_argument("--H2", type=int, default=None)
    p.add_argument("--H3", type=int, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--loss-db", dest="loss_db", type=float, default=None)
    p.add_argument("--attack", choices=("none", "path", "message", "both"), default=None)
    p.add_argument("--eta-path", dest="eta_path", type=float, default=None)
    p.add_argument("--eta-msg", dest="eta_msg", type=float, default=None)
    p.add_argument("--threshold2", type=float, default=None)
    p.add_argument("--threshold3", type=float, default=None)
    p.add_argument("--traffic", choices=("full", "silent"), default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("overhead", help="escape probabilities and decoy sizing")
    add_common(p)
    p.add_argument("--K", type=int, default=None, help="default 100")
    p.add_argument("--H3", type=int, default=None, help="default 20")
    p.add_argument("--m", type=int, default=None, help="intercepted slot count")
    p.add_argument("--eta", type=float, default=None, help="intercepted fraction (sets m)")
    p.add_argument("--trials", type=int, default=None, help="default 100000")
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--eta-max", dest="eta_max", type=float, default=0.1)
    p.set_defaults(func=cmd_overhead)

    p = sub.add_parser("verify", help="attack-unitary constraint checks")
    add_common(p)
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--scatter-samples", dest="scatter_samples", type=int, default=1000)
    p.add_argument(
        "--violate-constraints",
        action="store_true",
        help="negative-control hook: skip the return-leg constraint",
    )
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None, stdout: IO[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = stdout if stdout is not None else sys.stdout
    try:
        if args.out is not None:
            with open(args.out, "w") as handle:
                return args.func(args, handle)
        return args.func(args, out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
