"""
Energy games by value iteration on the polyhedron of potentials.

Pipeline: eliminate trivial nodes, reduce to a bipartite game, perturb the
weights so no zero cycle survives, then push the positive part of the DNP
values up until no strongly violating edge remains. The nodes with positive
DNP value at the end are exactly Max's winning nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Dict, FrozenSet, List, Optional, Tuple

import networkx as nx

from core.errors import GameValidationError, InvariantViolation
from core.game import GameKind, GameSpec, Owner, ensure_valid, max_abs_weight, weight_zero
from core.weights import LexWeight
from solvers.difference import DifferenceSystem, pratt_realize
from solvers.dnp import PairClass, classify_pair, dnp_solve
from solvers.reduction import ReductionCertificate, bipartite_reduce, eliminate_trivial, remap_paths
from utils.logger import setup_logger
from verification.monitor import IterationMonitor, MonitorMode, MonitorReport, step_bound

logger = setup_logger(__name__)


@dataclass(frozen=True)
class WinnerPartition:
    w_max: Tuple[str, ...]
    w_min: Tuple[str, ...]

    @classmethod
    def from_winners(cls, spec: GameSpec, winners: Dict[str, Owner]) -> "WinnerPartition":
        return cls(tuple(v for v in spec.node_ids if winners[v] is Owner.MAX),
                   tuple(v for v in spec.node_ids if winners[v] is Owner.MIN))

    def winner(self, node: str) -> Owner:
        return Owner.MAX if node in self.w_max else Owner.MIN

    def to_dict(self) -> Dict[str, List[str]]:
        return {"w_max": list(self.w_max), "w_min": list(self.w_min)}


@dataclass
class EnergyOptions:
    integer_fast_path: bool = False
    monitor: bool = True


@dataclass
class EnergyResult:
    partition: WinnerPartition
    certificate: ReductionCertificate
    iterations: int
    bound: int
    report: Optional[MonitorReport] = None
    epsilons: List[Any] = field(default_factory=list)


def perturb(spec: GameSpec) -> GameSpec:
    """Replace every rational weight w by (w, 1); every cycle then has a positive rho part."""
    if any(isinstance(e.weight, LexWeight) for e in spec.edges):
        raise ValueError("game is already perturbed")
    return spec.with_weights([LexWeight(e.weight, 1) for e in spec.edges])


def integer_scale(spec: GameSpec) -> GameSpec:
    """
    Integer stand-in for the perturbation: clear denominators, then
    w -> (n + 1) * w + 1. Cycle signs match the perturbed game.
    """
    scale = math.lcm(*(Fraction(e.weight).denominator for e in spec.edges)) if spec.edges else 1
    factor = (spec.size + 1) * scale
    return spec.with_weights([Fraction(e.weight) * factor + 1 for e in spec.edges])


def potential_slack(spec: GameSpec, x: Dict[str, Any], index: int) -> Any:
    edge = spec.edges[index]
    if spec.owners[edge.source] is Owner.MAX:
        return x[edge.source] - edge.weight - x[edge.target]
    return edge.weight + x[edge.target] - x[edge.source]


def _tight(spec: GameSpec, x: Dict[str, Any], zero: Any) -> FrozenSet[int]:
    tight = set()
    for index, edge in enumerate(spec.edges):
        slack = potential_slack(spec, x, index)
        if slack < zero:
            raise InvariantViolation("infeasible potential", f"edge #{index} ({edge.source}->{edge.target})",
                                     {"edge": index, "slack": str(slack)})
        if slack == zero:
            tight.add(index)
    return frozenset(tight)


def _pairs(spec: GameSpec, tight: FrozenSet[int]) -> FrozenSet[Tuple[str, str]]:
    return frozenset((spec.edges[i].source, spec.edges[i].target) for i in tight)


def _system(spec: GameSpec, equalities: FrozenSet[int], zero: Any) -> DifferenceSystem:
    system = DifferenceSystem(spec.node_ids, zero)
    for index, edge in enumerate(spec.edges):
        if spec.owners[edge.source] is Owner.MAX:
            # x_b - x_a <= -w
            system.add(edge.target, edge.source, -edge.weight, index in equalities)
        else:
            # x_a - x_b <= w
            system.add(edge.source, edge.target, edge.weight, index in equalities)
    return system


def iterate_potentials(game: GameSpec, monitor_on: bool = True) -> Tuple[Dict[str, Owner], int, Optional[MonitorReport], List[Any]]:
    """
    Run the potential iteration on a bipartite game without zero cycles.

    Returns:
        winner per node, iteration count, monitor report, step lengths
    """
    owners = game.owners
    zero = weight_zero(game)
    top = max_abs_weight(game)
    x = {v: top if owners[v] is Owner.MAX else zero for v in game.node_ids}
    _, bound = step_bound(game.size, MonitorMode.STRONG, True)
    monitor = IterationMonitor(owners, MonitorMode.STRONG, True) if monitor_on else None
    epsilons: List[Any] = []

    tight = _tight(game, x, zero)
    if monitor:
        monitor.start(_pairs(game, tight))
    while True:
        pairs = _pairs(game, tight)
        tight_graph = nx.DiGraph()
        tight_graph.add_edges_from(pairs)
        if not nx.is_directed_acyclic_graph(tight_graph):
            raise InvariantViolation("tight cycle", "tight subgraph has a cycle", {"edges": sorted(pairs)})
        delta = dnp_solve(owners, pairs)
        if any(value.sign == 0 for value in delta.values()):
            raise InvariantViolation("zero DNP value", "acyclic tight graph produced a zero value")
        positive = {v for v, value in delta.items() if value.sign > 0}

        for index in tight:
            edge = game.edges[index]
            up_a, up_b = edge.source in positive, edge.target in positive
            if (owners[edge.source] is Owner.MAX and up_b and not up_a) or \
                    (owners[edge.source] is Owner.MIN and up_a and not up_b):
                raise InvariantViolation("shift infeasible", f"tight edge #{index} breaks under the shift")

        violating = [i for i, e in enumerate(game.edges)
                     if classify_pair(e.source, e.target, delta, owners) is PairClass.STRONGLY_VIOLATING]
        if not violating:
            break
        if len(epsilons) >= bound:
            raise InvariantViolation("iteration bound exceeded", f"{len(epsilons)} steps, bound {bound}")

        epsilon = min(potential_slack(game, x, i) for i in violating)
        if not epsilon > zero:
            raise InvariantViolation("no positive step", f"epsilon={epsilon}")
        y = {v: x[v] + epsilon if v in positive else x[v] for v in game.node_ids}
        tight_y = _tight(game, y, zero)
        for index in tight:
            edge = game.edges[index]
            if classify_pair(edge.source, edge.target, delta, owners) is PairClass.OPTIMAL and index not in tight_y:
                raise InvariantViolation("optimal edge lost", f"edge #{index}")
        for index in tight_y - tight:
            edge = game.edges[index]
            if classify_pair(edge.source, edge.target, delta, owners) is not PairClass.STRONGLY_VIOLATING:
                raise InvariantViolation("new edge not strongly violating", f"edge #{index}")

        x = pratt_realize(_system(game, tight_y, zero))
        tight = _tight(game, x, zero)
        if not tight_y <= tight:
            raise InvariantViolation("realize lost edges", f"missing {sorted(tight_y - tight)}")
        epsilons.append(epsilon)
        logger.debug(f"step {len(epsilons)}: epsilon={epsilon} positive={len(positive)} tight={len(tight)}")
        if monitor:
            monitor.step(_pairs(game, tight))

    winners = {v: Owner.MAX if v in positive else Owner.MIN for v in game.node_ids}
    report = monitor.finalize() if monitor else None
    return winners, len(epsilons), report, epsilons


def solve_energy(spec: GameSpec, options: Optional[EnergyOptions] = None) -> EnergyResult:
    """
    Winning regions of an energy game.

    Raises:
        GameValidationError: not a valid energy game
        InvariantViolation: internal check failed (always a bug)
    """
    options = options or EnergyOptions()
    ensure_valid(spec)
    if spec.kind is not GameKind.ENERGY:
        raise GameValidationError([f"expected an energy game, got {spec.kind.value}"])

    remaining, winners, certificate, origin = eliminate_trivial(spec)
    iterations, bound, report, epsilons = 0, 0, None, []
    if remaining.nodes:
        bipartite, paths = bipartite_reduce(remaining)
        remap_paths(paths, origin)
        certificate.paths = paths.paths
        if any(isinstance(e.weight, LexWeight) for e in bipartite.edges):
            # lexicographic input is taken as already perturbed
            game = bipartite
        elif options.integer_fast_path:
            game = integer_scale(bipartite)
        else:
            game = perturb(bipartite)
        try:
            found, iterations, report, epsilons = iterate_potentials(game, options.monitor)
        except InvariantViolation as e:
            e.trace = {"certificate": certificate.to_dict(), "steps": [str(s) for s in epsilons]}
            logger.error(f"Energy solve failed: {e}")
            raise
        winners.update(found)
        _, bound = step_bound(game.size, MonitorMode.STRONG, True)
        if report is not None and not report.passed:
            raise InvariantViolation("monitor bound", f"{report.total_steps} steps exceed {report.bound}")

    partition = WinnerPartition.from_winners(spec, winners)
    logger.info(f"Energy game with {spec.size} nodes: {len(certificate.decisions)} trivial decisions, "
                f"{iterations} iterations, Max wins {len(partition.w_max)}")
    return EnergyResult(partition, certificate, iterations, bound, report, epsilons)


def shift_weights(spec: GameSpec, threshold: Fraction) -> GameSpec:
    """Energy game whose winners are the mean-payoff winners against `threshold`."""
    shifted = spec.with_weights([e.weight - threshold for e in spec.edges], kind=GameKind.ENERGY)
    return replace(shifted, threshold=None)


def decide_mean_payoff(spec: GameSpec, threshold: Optional[Fraction] = None,
                       options: Optional[EnergyOptions] = None) -> EnergyResult:
    """Max wins a node iff its mean-payoff value is at least the threshold."""
    ensure_valid(spec)
    if spec.kind is not GameKind.MEAN_PAYOFF:
        raise GameValidationError([f"expected an mpd game, got {spec.kind.value}"])
    threshold = Fraction(spec.threshold if threshold is None else threshold)
    return solve_energy(shift_weights(spec, threshold), options)
