#!/usr/bin/env python3
"""Main entry point for the polyval solver suite."""

import argparse
import json
import sys
from dataclasses import replace
from fractions import Fraction
from itertools import chain
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

from core.errors import CapExceededError, ConfigError, GameFormatError, GameValidationError, InvariantViolation
from core.game import GameKind, GameSpec
from core.generator import ENUMERATION_CAP, GENERATOR_ID, GenConfig, enumerate_games, enumeration_size, random_games
from core.serialization import dumps_canonical, parse_game, serialize_game
from core.weights import parse_fraction
from harness.reports import bench_rows, summarize, write_bench_csv
from harness.runner import RunOptions, run_instance, verify_games
from utils.config import HarnessSettings, OracleSettings, SolverSettings, load_config
from utils.logger import configure_logging, setup_logger
from utils.trace import dump_failure

logger = setup_logger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3
EXIT_INTERRUPTED = 130

INPUT_ERRORS = (GameFormatError, GameValidationError, ConfigError, CapExceededError)


def _fraction(text: str) -> Fraction:
    try:
        return parse_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _fraction_list(text: str) -> List[Fraction]:
    return [_fraction(part) for part in text.split(",") if part.strip()]


def _switch(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected on or off")
    return text == "on"


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _read_input(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise GameFormatError(f"cannot read input: {e.strerror}", path)


def _write_output(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(path).write_text(text, encoding="utf-8")


def _run_options(args: argparse.Namespace, config: Dict[str, Any], **extra: Any) -> RunOptions:
    return RunOptions.from_settings(
        SolverSettings.from_config(config),
        realize=getattr(args, "realize", None),
        monitor=getattr(args, "monitor", None),
        fast_int=getattr(args, "fast_int", None),
        **extra,
    )


def _harness(args: argparse.Namespace, config: Dict[str, Any]) -> HarnessSettings:
    harness = HarnessSettings.from_config(config)
    if getattr(args, "jobs", None):
        harness = replace(harness, jobs=max(1, args.jobs))
    return harness


def _gen_config(args: argparse.Namespace, config: Dict[str, Any]) -> GenConfig:
    section = config.get("generator", {})
    kind = GameKind(args.kind)
    return GenConfig(
        n=args.n,
        min_out=int(section.get("min_out", 1)),
        max_out=args.max_out if args.max_out is not None else int(section.get("max_out", 2)),
        weights=tuple(args.weights) if args.weights else None,
        weight_low=int(section.get("weight_low", -10)),
        weight_high=int(section.get("weight_high", 10)),
        weight_denominator=int(section.get("weight_denominator", 1)),
        kind=kind,
        discount=args.discount if kind is GameKind.DISCOUNTED else None,
        threshold=args.threshold if kind is GameKind.MEAN_PAYOFF else None,
        bipartite=args.bipartite,
        seed=args.seed if args.seed is not None else int(section.get("seed", 0)),
        max_n=args.max_n,
    )


def _solve(spec: GameSpec, args: argparse.Namespace, config: Dict[str, Any], options: RunOptions) -> int:
    try:
        record = run_instance(spec, options)
    except InvariantViolation as e:
        path = dump_failure(spec, {"witness": e.witness, "trace": e.trace}, str(e),
                            _harness(args, config).trace_dir)
        print(f"internal check failed: {e}", file=sys.stderr)
        if path:
            print(f"trace dump: {path}", file=sys.stderr)
        return EXIT_INTERNAL
    _write_output(dumps_canonical(record.output) + "\n", args.out)
    if args.record:
        Path(args.record).write_text(json.dumps(record.to_dict(), indent=2), encoding="utf-8")
    return EXIT_OK


def cmd_solve(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    spec = parse_game(_read_input(args.input))
    return _solve(spec, args, config, _run_options(args, config, certificate=args.certificate))


def cmd_decide_mp(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    spec = parse_game(_read_input(args.input))
    if spec.kind is GameKind.ENERGY:
        threshold = args.threshold if args.threshold is not None else Fraction(0)
        spec = replace(spec, kind=GameKind.MEAN_PAYOFF, threshold=threshold)
    elif spec.kind is not GameKind.MEAN_PAYOFF:
        raise GameValidationError([f"decide-mp needs an mpd or energy game, got {spec.kind.value}"])
    if args.threshold is not None:
        spec = replace(spec, threshold=args.threshold)
    return _solve(spec, args, config, _run_options(args, config, certificate=args.certificate))


def _verify_source(args: argparse.Namespace, config: Dict[str, Any]) -> Iterable[GameSpec]:
    if args.input != "-" and Path(args.input).is_dir():
        return [parse_game(path.read_bytes()) for path in sorted(Path(args.input).glob("*.json"))
                if path.name != "manifest.json"]
    if args.exhaustive:
        cap = int(config.get("generator", {}).get("enumeration_cap", ENUMERATION_CAP))
        kind = GameKind(args.kind)
        max_out = args.max_out or 2
        weights = args.weights or [Fraction(-1), Fraction(0), Fraction(1)]
        for n in range(1, args.n + 1):
            size = enumeration_size(n, weights, max_out)
            if size > cap:
                raise CapExceededError(f"enumeration of {size} games exceeds cap {cap}")
        return chain.from_iterable(
            enumerate_games(n, max_out, weights, args.discount if kind is GameKind.DISCOUNTED else None,
                            kind, cap, threshold=args.threshold)
            for n in range(1, args.n + 1))
    return random_games(_gen_config(args, config), args.count)


def cmd_verify(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    games = _verify_source(args, config)
    report = verify_games(games, _run_options(args, config), OracleSettings.from_config(config),
                          _harness(args, config))
    _write_output(json.dumps(report.to_dict(), indent=2) + "\n", args.out)
    if not report.passed:
        if report.dump:
            print(f"witness game: {report.dump}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_gen(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    cfg = _gen_config(args, config)
    games = random_games(cfg, args.count)
    if args.out == "-":
        for spec in games:
            sys.stdout.write(serialize_game(spec).decode("utf-8") + "\n")
        return EXIT_OK

    target = Path(args.out)
    target.mkdir(parents=True, exist_ok=True)
    for i, spec in enumerate(games):
        (target / f"game_{i}.json").write_bytes(serialize_game(spec))
    manifest = {
        "generator": GENERATOR_ID,
        "count": args.count,
        "config": {
            "n": cfg.n, "max_n": cfg.max_n, "min_out": cfg.min_out, "max_out": cfg.max_out,
            "weights": [str(w) for w in cfg.weights] if cfg.weights else None,
            "weight_low": cfg.weight_low, "weight_high": cfg.weight_high,
            "weight_denominator": cfg.weight_denominator, "kind": cfg.kind.value,
            "lambda": str(cfg.discount) if cfg.discount is not None else None,
            "threshold": str(cfg.threshold) if cfg.threshold is not None else None,
            "bipartite": cfg.bipartite, "seed": cfg.seed,
        },
    }
    (target / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    logger.info(f"Wrote {args.count} games to {target}")
    return EXIT_OK


def _bench(args: argparse.Namespace, config: Dict[str, Any]) -> List[Dict[str, Any]]:
    cfg = _gen_config(args, config)
    sizes = range(args.n_min, args.n_max + 1)
    return bench_rows(cfg, sizes, args.count, _run_options(args, config))


def cmd_bench(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    rows = _bench(args, config)
    if args.out == "-":
        write_bench_csv(rows, sys.stdout, args.timing)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            write_bench_csv(rows, f, args.timing)
    return EXIT_OK


def cmd_stats(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    summary = summarize(_bench(args, config))
    _write_output(json.dumps(summary, indent=2) + "\n", args.out)
    return EXIT_OK


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--monitor", type=_switch, default=None, metavar="on|off")
    parser.add_argument("--realize", choices=["pass", "vertex", "auto"], default=None)
    parser.add_argument("--fast-int", dest="fast_int", type=_switch, default=None, metavar="on|off")


def _add_gen_flags(parser: argparse.ArgumentParser, sizes: bool = True) -> None:
    parser.add_argument("--kind", choices=[k.value for k in GameKind], default="energy")
    if sizes:
        parser.add_argument("--n", type=int, default=4, help="nodes (or smallest size with --max-n)")
        parser.add_argument("--max-n", dest="max_n", type=int, default=None)
    parser.add_argument("--count", type=int, default=10)
    parser.add_argument("--max-out", dest="max_out", type=int, default=None)
    parser.add_argument("--weights", type=_fraction_list, default=None,
                        help="comma-separated weight set, e.g. --weights=-1,0,1")
    parser.add_argument("--lambda", dest="discount", type=_fraction, default=Fraction(1, 2))
    parser.add_argument("--threshold", type=_fraction, default=Fraction(0))
    parser.add_argument("--bipartite", action="store_true")
    parser.add_argument("--seed", type=_seed, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyval",
                                     description="Polyhedral value iteration for discounted and energy games")
    parser.add_argument("--config", "-c", type=str, default=None, help="Path to configuration file")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one game")
    solve.add_argument("--in", dest="input", default="-")
    solve.add_argument("--out", default="-")
    solve.add_argument("--certificate", action="store_true", help="include the reduction certificate")
    solve.add_argument("--record", default=None, help="write the run record JSON here")
    _add_solver_flags(solve)
    solve.set_defaults(handler=cmd_solve)

    decide = sub.add_parser("decide-mp", help="mean-payoff decision against a threshold")
    decide.add_argument("--in", dest="input", default="-")
    decide.add_argument("--out", default="-")
    decide.add_argument("--threshold", type=_fraction, default=None, metavar="num/den")
    decide.add_argument("--certificate", action="store_true")
    decide.add_argument("--record", default=None)
    _add_solver_flags(decide)
    decide.set_defaults(handler=cmd_decide_mp)

    verify = sub.add_parser("verify", help="compare solvers with brute-force oracles")
    verify.add_argument("--in", dest="input", default="-", help="directory of games (else generate)")
    verify.add_argument("--out", default="-")
    verify.add_argument("--exhaustive", action="store_true", help="every game up to --n nodes")
    verify.add_argument("--jobs", type=int, default=None)
    _add_gen_flags(verify)
    _add_solver_flags(verify)
    verify.set_defaults(handler=cmd_verify)

    gen = sub.add_parser("gen", help="generate seeded random games")
    gen.add_argument("--out", default="-", help="directory, or - for one game per line")
    _add_gen_flags(gen)
    gen.set_defaults(handler=cmd_gen)

    for name, handler in (("bench", cmd_bench), ("stats", cmd_stats)):
        table = sub.add_parser(name, help=f"{name} over random games per size")
        table.add_argument("--out", default="-")
        table.add_argument("--n-min", dest="n_min", type=int, default=2)
        table.add_argument("--n-max", dest="n_max", type=int, default=6)
        table.add_argument("--timing", type=_switch, default=False, metavar="on|off")
        _add_gen_flags(table, sizes=False)
        _add_solver_flags(table)
        table.set_defaults(handler=handler, n=2, max_n=None)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    args = build_parser().parse_args(argv)
    config = load_config(args.config)
    logging_section = config.get("logging", {})
    configure_logging(str(logging_section.get("level", "WARNING")), logging_section.get("file"),
                      bool(logging_section.get("console", True)))

    try:
        return args.handler(args, config)
    except INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantViolation as e:
        print(f"internal check failed: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return EXIT_INTERRUPTED
    except Exception as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        return EXIT_INTERNAL


if __name__ == '__main__':
    sys.exit(main())
