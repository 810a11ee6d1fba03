"""Single runs and solver-versus-oracle sweeps."""

import hashlib
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Tuple

from core.errors import CapExceededError, InvariantViolation
from core.game import GameKind, GameSpec, max_abs_weight
from core.serialization import dumps_canonical, encode_rational
from solvers.discounted import DiscountedOptions, RealizeStrategy, solve_discounted
from solvers.energy import EnergyOptions, WinnerPartition, decide_mean_payoff, solve_energy
from utils.config import HarnessSettings, OracleSettings, SolverSettings
from utils.logger import setup_logger
from utils.trace import dump_failure, game_digest
from verification.oracles import (brute_disc, brute_energy, brute_mean_payoff, shapley_error_bound,
                                  shapley_vi)

logger = setup_logger(__name__)

Output = Dict[str, Any]
SolverFn = Callable[[GameSpec, "RunOptions"], Tuple[Output, int, int, Optional[Dict[str, Any]]]]
OracleFn = Callable[[GameSpec, OracleSettings], Output]

VERIFY_BATCH = 512


@dataclass(frozen=True)
class RunOptions:
    realize: str = "auto"
    vertex_threshold: int = 16
    monitor: bool = True
    fast_int: bool = False
    certificate: bool = False
    threshold: Optional[Fraction] = None

    @classmethod
    def from_settings(cls, settings: SolverSettings, **overrides: Any) -> "RunOptions":
        values = dict(realize=settings.realize, vertex_threshold=settings.vertex_threshold,
                      monitor=settings.monitor, fast_int=settings.fast_int)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["threshold"] = None if self.threshold is None else str(self.threshold)
        return data


@dataclass
class RunRecord:
    input_digest: str
    kind: str
    options: Dict[str, Any]
    iterations: int
    bound: int
    wall_ms: float
    report: Optional[Dict[str, Any]]
    output_digest: str
    output: Output = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def output_digest(output: Output) -> str:
    return hashlib.sha256(dumps_canonical(output).encode("utf-8")).hexdigest()


def encode_values(values: Dict[str, Fraction]) -> Output:
    return {"values": {v: encode_rational(value) for v, value in values.items()}}


def solve_game(spec: GameSpec, options: RunOptions) -> Tuple[Output, int, int, Optional[Dict[str, Any]]]:
    """
    Dispatch on the game kind.

    Returns:
        (output document, iterations, step bound, monitor report as dict)
    """
    if spec.kind is GameKind.DISCOUNTED:
        result = solve_discounted(spec, DiscountedOptions(RealizeStrategy(options.realize),
                                                          options.vertex_threshold, options.monitor))
        report = result.report.to_dict() if result.report else None
        return encode_values(result.values), result.iterations, result.bound, report

    energy_options = EnergyOptions(options.fast_int, options.monitor)
    if spec.kind is GameKind.MEAN_PAYOFF:
        result = decide_mean_payoff(spec, options.threshold, energy_options)
    else:
        result = solve_energy(spec, energy_options)
    output: Output = result.partition.to_dict()
    if options.certificate:
        output["certificate"] = result.certificate.to_dict()
    report = result.report.to_dict() if result.report else None
    return output, result.iterations, result.bound, report


def run_instance(spec: GameSpec, options: RunOptions, solver: Optional[SolverFn] = None) -> RunRecord:
    solver = solver or solve_game
    start = time.perf_counter()
    output, iterations, bound, report = solver(spec, options)
    wall_ms = (time.perf_counter() - start) * 1000
    return RunRecord(game_digest(spec), spec.kind.value, options.to_dict(), iterations, bound,
                     round(wall_ms, 3), report, output_digest(output), output)


def oracle_answer(spec: GameSpec, settings: OracleSettings) -> Output:
    """The brute-force answer in the same shape `solve_game` produces."""
    cap = settings.strategy_cap
    if spec.kind is GameKind.DISCOUNTED:
        return encode_values(brute_disc(spec, cap))
    if spec.kind is GameKind.MEAN_PAYOFF:
        means = brute_mean_payoff(spec, cap)
        return WinnerPartition(tuple(v for v in spec.node_ids if means[v] >= spec.threshold),
                               tuple(v for v in spec.node_ids if means[v] < spec.threshold)).to_dict()
    return brute_energy(spec, cap).to_dict()


def shapley_agrees(spec: GameSpec, values: Output, sweeps: int) -> bool:
    approx = shapley_vi(spec, sweeps)
    # float rounding on top of the contraction bound
    tolerance = shapley_error_bound(spec, sweeps) + 1e-9 * (1 + float(max_abs_weight(spec)))
    return all(abs(approx[v] - float(Fraction(num, den))) <= tolerance
               for v, (num, den) in values["values"].items())


@dataclass
class Verdict:
    index: int
    digest: str
    kind: str
    nodes: int
    iterations: int = 0
    bound: int = 0
    match: bool = False
    monitor_passed: Optional[bool] = None
    detail: str = ""
    trace: Any = None

    @property
    def margin(self) -> int:
        return self.bound - self.iterations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "digest": self.digest[:16],
            "kind": self.kind,
            "nodes": self.nodes,
            "iterations": self.iterations,
            "bound": self.bound,
            "margin": self.margin,
            "match": self.match,
            "monitor_passed": self.monitor_passed,
            "detail": self.detail,
        }


def check_instance(index: int, spec: GameSpec, options: RunOptions, oracles: OracleSettings,
                   solver: Optional[SolverFn] = None, oracle: Optional[OracleFn] = None) -> Verdict:
    """Solve one game, compare it with the oracle; never raises for solver failures."""
    verdict = Verdict(index, game_digest(spec), spec.kind.value, spec.size)
    try:
        output, verdict.iterations, verdict.bound, report = (solver or solve_game)(spec, options)
    except InvariantViolation as e:
        verdict.detail = f"invariant violation: {e}"
        verdict.trace = e.trace
        return verdict
    if report is not None:
        verdict.monitor_passed = bool(report["passed"])

    try:
        expected = (oracle or oracle_answer)(spec, oracles)
    except CapExceededError as e:
        verdict.detail = f"oracle skipped: {e}"
        return verdict

    solved = {k: v for k, v in output.items() if k != "certificate"}
    verdict.match = solved == expected and verdict.monitor_passed is not False
    if solved != expected:
        verdict.detail = "solver and oracle disagree"
        verdict.trace = {"solver": solved, "oracle": expected}
    elif verdict.monitor_passed is False:
        verdict.detail = "monitor bound exceeded"
    elif spec.kind is GameKind.DISCOUNTED and not shapley_agrees(spec, solved, oracles.shapley_sweeps):
        verdict.match = False
        verdict.detail = "shapley iteration outside its error bound"
    return verdict


def _check_task(task: Tuple) -> Verdict:
    return check_instance(*task)


@dataclass
class VerifyReport:
    verdicts: List[Verdict]
    dump: Optional[str] = None

    @property
    def passed(self) -> bool:
        return all(v.match for v in self.verdicts)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "instances": len(self.verdicts),
            "passed": self.passed,
            "mismatches": sum(not v.match for v in self.verdicts),
            "dump": self.dump,
            "verdicts": [v.to_dict() for v in self.verdicts],
        }


def _batches(games: Iterable[GameSpec], size: int) -> Iterator[List[GameSpec]]:
    batch: List[GameSpec] = []
    for spec in games:
        batch.append(spec)
        if len(batch) == size:
            yield batch
            batch = []
    if batch:
        yield batch


def verify_games(games: Iterable[GameSpec], options: RunOptions, oracles: OracleSettings,
                 harness: HarnessSettings, solver: Optional[SolverFn] = None,
                 oracle: Optional[OracleFn] = None) -> VerifyReport:
    """
    Run solver and oracle on every game. Verdicts keep input order whatever the
    job count; the first mismatching game is dumped to `harness.trace_dir`.

    `games` is consumed in batches, so exhaustive sweeps never sit in memory whole.
    """
    verdicts: List[Verdict] = []
    witness: Optional[Tuple[GameSpec, Verdict]] = None
    pool = ProcessPoolExecutor(max_workers=harness.jobs) if harness.jobs > 1 else None
    try:
        for batch in _batches(games, VERIFY_BATCH):
            start = len(verdicts)
            tasks = [(start + i, spec, options, oracles, solver, oracle) for i, spec in enumerate(batch)]
            found = list(pool.map(_check_task, tasks)) if pool else [_check_task(task) for task in tasks]
            verdicts.extend(found)
            if witness is None:
                witness = next(((spec, v) for spec, v in zip(batch, found) if not v.match), None)
    finally:
        if pool:
            pool.shutdown()

    report = VerifyReport(verdicts)
    if witness is not None:
        spec, verdict = witness
        logger.error(f"Instance {verdict.index} failed: {verdict.detail}")
        path = dump_failure(spec, verdict.trace, verdict.detail, harness.trace_dir)
        report.dump = str(path) if path else None
    logger.info(f"Verified {len(verdicts)} games: {'all match' if report.passed else 'MISMATCH'}")
    return report
