"""
Polyhedral value iteration for discounted games.

The iterate x stays inside the optimality polyhedron. Each step solves the DNP
game on the tight edges, moves x along those values until a new edge becomes
tight, and re-realizes the point. The loop stops once the tight subgraph has no
sinks, which is exactly when x solves the optimality equations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Tuple

from core.errors import GameValidationError, InvariantViolation, NotFoundError
from core.game import GameKind, GameSpec, Owner, ensure_valid, is_bipartite, max_abs_weight
from solvers.dnp import PairClass, classify_pair, dnp_solve, instantiate
from solvers.simplex import EQ, GE, LE, LinearConstraint, find_basic_feasible_point
from utils.logger import setup_logger
from verification.monitor import IterationMonitor, MonitorMode, MonitorReport, step_bound

logger = setup_logger(__name__)


class RealizeStrategy(Enum):
    PASS_THROUGH = "pass"
    EXACT_VERTEX = "vertex"
    AUTO = "auto"


@dataclass(frozen=True)
class PolyhedronPoint:
    coords: Dict[str, Fraction]
    tight: FrozenSet[int]

    def __getitem__(self, node: str) -> Fraction:
        return self.coords[node]


@dataclass
class StepReport:
    epsilon: Fraction
    binding: Tuple[int, ...]
    delta: Dict[str, Fraction]
    pre_tight: FrozenSet[int] = frozenset()
    post_tight: FrozenSet[int] = frozenset()


@dataclass
class DiscountedOptions:
    realize: RealizeStrategy = RealizeStrategy.AUTO
    vertex_threshold: int = 16
    monitor: bool = True

    def strategy_for(self, spec: GameSpec) -> RealizeStrategy:
        if self.realize is RealizeStrategy.AUTO:
            if spec.size <= self.vertex_threshold:
                return RealizeStrategy.PASS_THROUGH
            return RealizeStrategy.EXACT_VERTEX
        return self.realize


@dataclass
class DiscountedResult:
    values: Dict[str, Fraction]
    iterations: int
    bound: int
    steps: List[StepReport] = field(default_factory=list)
    report: Optional[MonitorReport] = None


def _require_discounted(spec: GameSpec) -> None:
    ensure_valid(spec)
    if spec.kind is not GameKind.DISCOUNTED:
        raise GameValidationError([f"expected a discounted game, got {spec.kind.value}"])


def edge_slack(spec: GameSpec, x: Dict[str, Fraction], index: int) -> Fraction:
    """Non-negative exactly when edge `index` satisfies its polyhedron inequality."""
    edge = spec.edges[index]
    rhs = edge.weight + spec.discount * x[edge.target]
    if spec.owners[edge.source] is Owner.MAX:
        return x[edge.source] - rhs
    return rhs - x[edge.source]


def tight_edges(spec: GameSpec, x: Dict[str, Fraction]) -> FrozenSet[int]:
    tight = set()
    for index, edge in enumerate(spec.edges):
        slack = edge_slack(spec, x, index)
        if slack < 0:
            raise InvariantViolation(
                "infeasible point",
                f"edge #{index} ({edge.source}->{edge.target}) violated by {-slack}",
                {"edge": index, "slack": str(slack)},
            )
        if slack == 0:
            tight.add(index)
    return frozenset(tight)


def make_point(spec: GameSpec, x: Dict[str, Fraction]) -> PolyhedronPoint:
    return PolyhedronPoint(dict(x), tight_edges(spec, x))


def check_optimality(spec: GameSpec, x: Dict[str, Fraction]) -> bool:
    """True iff x solves x_a = max/min over out-edges of w + lambda * x_b exactly."""
    if any(node not in x for node in spec.node_ids):
        return False
    for node in spec.node_ids:
        options = [spec.edges[i].weight + spec.discount * x[spec.edges[i].target]
                   for i in spec.out_edges[node]]
        best = max(options) if spec.owners[node] is Owner.MAX else min(options)
        if x[node] != best:
            return False
    return True


def initial_point(spec: GameSpec) -> PolyhedronPoint:
    """+W/(1-lambda) on Max nodes and -W/(1-lambda) on Min nodes."""
    bound = max_abs_weight(spec) / (1 - spec.discount)
    x = {node.id: bound if node.owner is Owner.MAX else -bound for node in spec.nodes}
    return make_point(spec, x)


def tight_pairs(spec: GameSpec, tight: FrozenSet[int]) -> FrozenSet[Tuple[str, str]]:
    return frozenset((spec.edges[i].source, spec.edges[i].target) for i in tight)


def feasible_shift(spec: GameSpec, x: PolyhedronPoint) -> Dict[str, Fraction]:
    delta = dnp_solve(spec.owners, tight_pairs(spec, x.tight))
    return {v: instantiate(value, spec.discount) for v, value in delta.items()}


def epsilon_max(spec: GameSpec, x: PolyhedronPoint, delta: Dict[str, Fraction]) -> StepReport:
    """Largest step along `delta` that keeps every edge inequality satisfied."""
    lam = spec.discount
    best: Optional[Fraction] = None
    binding: List[int] = []
    for index, edge in enumerate(spec.edges):
        if index in x.tight:
            continue
        slack = edge_slack(spec, x.coords, index)
        if spec.owners[edge.source] is Owner.MAX:
            rate = lam * delta[edge.target] - delta[edge.source]
        else:
            rate = delta[edge.source] - lam * delta[edge.target]
        if rate <= 0:
            continue
        root = slack / rate
        if best is None or root < best:
            best, binding = root, [index]
        elif root == best:
            binding.append(index)
    if best is None or best <= 0:
        raise InvariantViolation("no finite step", "no edge bounds the shift", {"tight": sorted(x.tight)})
    return StepReport(best, tuple(binding), delta, pre_tight=x.tight)


def _vertex_constraints(spec: GameSpec, required: FrozenSet[int]) -> List[LinearConstraint]:
    constraints = []
    for index, edge in enumerate(spec.edges):
        coeffs: Dict[str, Fraction] = {edge.source: Fraction(1)}
        coeffs[edge.target] = coeffs.get(edge.target, Fraction(0)) - spec.discount
        if index in required:
            relation = EQ
        elif spec.owners[edge.source] is Owner.MAX:
            relation = GE
        else:
            relation = LE
        constraints.append(LinearConstraint(coeffs, relation, edge.weight, label=f"e{index}"))
    return constraints


def realize_graph(spec: GameSpec, required: FrozenSet[int], witness: Optional[PolyhedronPoint],
                  strategy: RealizeStrategy = RealizeStrategy.PASS_THROUGH) -> PolyhedronPoint:
    """
    A point of the optimality polyhedron at which every edge of `required` is tight.

    PASS_THROUGH hands back the witness. EXACT_VERTEX solves the edge system
    with `required` as equalities and returns a basic feasible point.
    """
    if strategy is RealizeStrategy.PASS_THROUGH:
        if witness is None:
            raise ValueError("pass-through realization needs a witness point")
        point = witness
    else:
        coords = find_basic_feasible_point(spec.node_ids, _vertex_constraints(spec, required))
        if coords is None:
            raise NotFoundError(f"no point makes edges {sorted(required)} tight")
        point = make_point(spec, coords)
    if not required <= point.tight:
        raise InvariantViolation("realize lost edges", f"missing {sorted(required - point.tight)}")
    return point


def _shift(x: PolyhedronPoint, delta: Dict[str, Fraction], epsilon: Fraction) -> Dict[str, Fraction]:
    return {v: x.coords[v] + epsilon * delta[v] for v in x.coords}


def solve_discounted(spec: GameSpec, options: Optional[DiscountedOptions] = None) -> DiscountedResult:
    """
    Exact values of a discounted game.

    Raises:
        GameValidationError: the game is not a valid discounted game
        InvariantViolation: an internal check failed; `trace` holds the steps so far
    """
    options = options or DiscountedOptions()
    _require_discounted(spec)
    strategy = options.strategy_for(spec)
    _, bound = step_bound(spec.size, MonitorMode.PLAIN, is_bipartite(spec))
    owners = spec.owners

    x = realize_graph(spec, frozenset(), initial_point(spec), strategy)
    monitor = IterationMonitor(owners, MonitorMode.PLAIN, is_bipartite(spec)) if options.monitor else None
    if monitor:
        monitor.start(tight_pairs(spec, x.tight))

    steps: List[StepReport] = []
    try:
        while True:
            pairs = tight_pairs(spec, x.tight)
            symbolic = dnp_solve(owners, pairs)
            if all(value.sign == 0 for value in symbolic.values()):
                break
            if len(steps) >= bound:
                raise InvariantViolation("iteration bound exceeded", f"{len(steps)} steps, bound {bound}")

            delta = {v: instantiate(value, spec.discount) for v, value in symbolic.items()}
            step = epsilon_max(spec, x, delta)
            y = make_point(spec, _shift(x, delta, step.epsilon))

            for index in x.tight:
                edge = spec.edges[index]
                if (classify_pair(edge.source, edge.target, symbolic, owners) is PairClass.OPTIMAL
                        and index not in y.tight):
                    raise InvariantViolation("optimal edge lost", f"edge #{index} not tight after shift")
            fresh = y.tight - x.tight
            if not fresh:
                raise InvariantViolation("no new tight edge", f"epsilon={step.epsilon}")
            for index in fresh:
                edge = spec.edges[index]
                if not classify_pair(edge.source, edge.target, symbolic, owners).violating:
                    raise InvariantViolation("new edge not violating", f"edge #{index}")

            x = realize_graph(spec, y.tight, y, strategy)
            step.post_tight = x.tight
            steps.append(step)
            logger.debug(f"step {len(steps)}: epsilon={step.epsilon} binding={step.binding} "
                         f"tight={len(x.tight)}")
            if monitor:
                monitor.step(tight_pairs(spec, x.tight))
    except InvariantViolation as e:
        e.trace = [_step_dict(s) for s in steps]
        logger.error(f"Discounted solve failed after {len(steps)} steps: {e}")
        raise

    if not check_optimality(spec, x.coords):
        raise InvariantViolation("not optimal", "final point fails the optimality equations")
    report = monitor.finalize() if monitor else None
    if report is not None and not report.passed:
        raise InvariantViolation("monitor bound", f"{report.total_steps} steps exceed {report.bound}")
    logger.info(f"Discounted game with {spec.size} nodes solved in {len(steps)} iterations "
                f"(bound {bound}, {strategy.value})")
    return DiscountedResult(dict(x.coords), len(steps), bound, steps, report)


def _step_dict(step: StepReport) -> Dict:
    return {
        "epsilon": str(step.epsilon),
        "binding": list(step.binding),
        "delta": {v: str(d) for v, d in step.delta.items()},
        "pre_tight": sorted(step.pre_tight),
        "post_tight": sorted(step.post_tight),
    }
