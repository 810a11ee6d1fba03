"""
Energy game preprocessing: remove trivially decided nodes, then make the game bipartite.

A node is trivial when it only reaches nodes of its own owner; a cycle is
trivial when all its nodes share an owner who likes its sign (non-negative
for Max, negative for Min). Both are decided by one-player analysis and
removed together with the winner's attractor. What is left is collapsed to a
bipartite game whose edges are best owner-controllable paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import total_ordering
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

import networkx as nx

from core.errors import PreconditionError
from core.game import Edge, GameSpec, Owner, weight_zero
from core.serialization import encode_weight
from solvers.difference import find_negative_cycle
from utils.logger import setup_logger

logger = setup_logger(__name__)


@total_ordering
@dataclass(frozen=True)
class _Tagged:
    """Weight paired with an integer tie-breaker, ordered lexicographically."""
    value: Any
    tag: int

    def __add__(self, other: "_Tagged") -> "_Tagged":
        return _Tagged(self.value + other.value, self.tag + other.tag)

    def __lt__(self, other: "_Tagged") -> bool:
        if self.value != other.value:
            return self.value < other.value
        return self.tag < other.tag


@dataclass
class Decision:
    node: str
    winner: Owner
    reason: str
    cycle: Tuple[str, ...] = ()
    removed: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "node": self.node,
            "winner": self.winner.value,
            "reason": self.reason,
            "cycle": list(self.cycle),
            "removed": list(self.removed),
        }


@dataclass
class ReducedEdge:
    source: str
    target: str
    weight: Any
    path_nodes: Tuple[str, ...]
    path_edges: Tuple[int, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "from": self.source,
            "to": self.target,
            "weight": encode_weight(self.weight),
            "path": list(self.path_nodes),
            "edges": list(self.path_edges),
        }


@dataclass
class ReductionCertificate:
    decisions: List[Decision] = field(default_factory=list)
    paths: List[ReducedEdge] = field(default_factory=list)

    def decided(self, owner: Owner) -> List[str]:
        return [v for d in self.decisions if d.winner is owner for v in d.removed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "decisions": [d.to_dict() for d in self.decisions],
            "paths": [p.to_dict() for p in self.paths],
        }


def _graph(spec: GameSpec) -> nx.MultiDiGraph:
    graph = nx.MultiDiGraph()
    graph.add_nodes_from(spec.node_ids)
    graph.add_edges_from((e.source, e.target) for e in spec.edges)
    return graph


def attractor(spec: GameSpec, targets: Set[str], player: Owner) -> Set[str]:
    """Nodes from which `player` can force a visit to `targets`."""
    region = set(targets)
    changed = True
    while changed:
        changed = False
        for node in spec.node_ids:
            if node in region:
                continue
            successors = {spec.edges[i].target for i in spec.out_edges[node]}
            if spec.owners[node] is player:
                wins = bool(successors & region)
            else:
                wins = successors <= region
            if wins:
                region.add(node)
                changed = True
    return region


def _favourable_cycle(spec: GameSpec, start: str, owner: Owner) -> Optional[List[str]]:
    """
    A cycle inside `owner`'s own nodes, reachable from `start` through them,
    whose weight is non-negative (Max) or negative (Min).
    """
    owners = spec.owners
    region = [v for v in spec.node_ids if owners[v] is owner]
    zero = weight_zero(spec)
    arcs = []
    for e in spec.edges:
        if owners[e.source] is owner and owners[e.target] is owner:
            if owner is Owner.MAX:
                # negative in (-w, -length) order iff w >= 0
                arcs.append((e.source, e.target, _Tagged(-e.weight, -1)))
            else:
                arcs.append((e.source, e.target, _Tagged(e.weight, 0)))
    if not arcs:
        return None
    return find_negative_cycle(region, arcs, _Tagged(zero, 0), source=start)


def _next_decision(spec: GameSpec) -> Optional[Decision]:
    graph = _graph(spec)
    owners = spec.owners
    for node in spec.node_ids:
        owner = owners[node]
        cycle = _favourable_cycle(spec, node, owner)
        if cycle is not None:
            return Decision(node, owner, "trivial_cycle", tuple(cycle))
        reach = nx.descendants(graph, node) | {node}
        if all(owners[v] is owner for v in reach):
            # one-player region without a favourable cycle: the opponent wins
            return Decision(node, owner.opponent, "trivial_node")
    return None


def eliminate_trivial(spec: GameSpec) -> Tuple[GameSpec, Dict[str, Owner], ReductionCertificate, Tuple[int, ...]]:
    """
    Repeatedly decide the first trivial node (in node order) and remove its attractor.

    Returns:
        the remaining game, the decided nodes with their winners, the
        certificate, and for each remaining edge its index in `spec`
    """
    certificate = ReductionCertificate()
    decided: Dict[str, Owner] = {}
    current = spec
    origin: Tuple[int, ...] = tuple(range(len(spec.edges)))
    while current.nodes:
        decision = _next_decision(current)
        if decision is None:
            break
        removed = attractor(current, {decision.node, *decision.cycle}, decision.winner)
        decision.removed = tuple(v for v in current.node_ids if v in removed)
        for v in decision.removed:
            decided[v] = decision.winner
        certificate.decisions.append(decision)
        logger.debug(f"{decision.reason} at {decision.node}: {decision.winner.value} wins "
                     f"{len(decision.removed)} nodes")
        keep = [v for v in current.node_ids if v not in removed]
        current, kept = current.restrict(keep)
        origin = tuple(origin[i] for i in kept)
    return current, decided, certificate, origin


def _best_paths(spec: GameSpec, source: str) -> Tuple[Dict[str, Any], Dict[str, int]]:
    """
    Best path weights from `source` through nodes of its owner only: maximal
    for Max, minimal for Min. Ends of paths may be any node.
    """
    owner = spec.owners[source]
    better = (lambda a, b: a > b) if owner is Owner.MAX else (lambda a, b: a < b)
    dist: Dict[str, Any] = {source: weight_zero(spec)}
    pred: Dict[str, int] = {}
    for _ in range(len(spec.nodes) + 1):
        changed = False
        for index, edge in enumerate(spec.edges):
            u = edge.source
            if u not in dist or spec.owners[u] is not owner:
                continue
            candidate = dist[u] + edge.weight
            if edge.target not in dist or better(candidate, dist[edge.target]):
                dist[edge.target] = candidate
                pred[edge.target] = index
                changed = True
        if not changed:
            return dist, pred
    raise PreconditionError(f"unbounded {owner.value}-controllable paths from {source}: "
                            f"a favourable single-owner cycle survived")


def bipartite_reduce(spec: GameSpec) -> Tuple[GameSpec, ReductionCertificate]:
    """
    Collapse owner-controllable paths into direct Max->Min and Min->Max edges.

    Requires that no trivial node or cycle is left (see `eliminate_trivial`).
    """
    owners = spec.owners
    certificate = ReductionCertificate()
    edges: List[Edge] = []
    for source in spec.node_ids:
        dist, pred = _best_paths(spec, source)
        for target in spec.node_ids:
            if target not in dist or owners[target] is owners[source] or target == source:
                continue
            path_edges = []
            v = target
            while v != source:
                index = pred[v]
                path_edges.append(index)
                v = spec.edges[index].source
            path_edges.reverse()
            path_nodes = (source,) + tuple(spec.edges[i].target for i in path_edges)
            edges.append(Edge(source, target, dist[target]))
            certificate.paths.append(ReducedEdge(source, target, dist[target], path_nodes, tuple(path_edges)))
        if not any(e.source == source for e in edges):
            raise PreconditionError(f"node {source} reaches no node of the other owner")
    reduced = GameSpec(spec.nodes, tuple(edges), spec.kind, spec.discount, spec.threshold)
    return reduced, certificate


def remap_paths(certificate: ReductionCertificate, origin: Sequence[int]) -> None:
    """Rewrite path edge indices through `origin` (indices into an enclosing game)."""
    for path in certificate.paths:
        path.path_edges = tuple(origin[i] for i in path.path_edges)
