"""Game model shared by every solver: nodes, owners, weighted edges, game kinds."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Tuple

from core.errors import GameValidationError
from core.weights import LexWeight, WeightValue, magnitude, zero_like


class Owner(Enum):
    MAX = "max"
    MIN = "min"

    @property
    def opponent(self) -> "Owner":
        return Owner.MIN if self is Owner.MAX else Owner.MAX


class GameKind(Enum):
    DISCOUNTED = "discounted"
    ENERGY = "energy"
    MEAN_PAYOFF = "mpd"


@dataclass(frozen=True)
class Node:
    id: str
    owner: Owner


@dataclass(frozen=True)
class Edge:
    """Directed weighted edge. Edges are identified by their index in GameSpec.edges."""
    source: str
    target: str
    weight: WeightValue


@dataclass(frozen=True)
class Violation:
    code: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.code} ({self.subject}): {self.message}"


@dataclass(frozen=True)
class GameSpec:
    """
    Directed multigraph with a Max/Min partition and weighted edges.

    `discount` is set for discounted games, `threshold` for mean-payoff
    decision games. Parallel edges and self-loops are allowed.
    """

    nodes: Tuple[Node, ...]
    edges: Tuple[Edge, ...]
    kind: GameKind
    discount: Optional[Fraction] = None
    threshold: Optional[Fraction] = None

    @cached_property
    def node_ids(self) -> Tuple[str, ...]:
        return tuple(node.id for node in self.nodes)

    @cached_property
    def owners(self) -> Dict[str, Owner]:
        return {node.id: node.owner for node in self.nodes}

    @cached_property
    def out_edges(self) -> Dict[str, Tuple[int, ...]]:
        """Node id -> indices of its outgoing edges, in input order."""
        table: Dict[str, List[int]] = {node.id: [] for node in self.nodes}
        for index, edge in enumerate(self.edges):
            if edge.source in table:
                table[edge.source].append(index)
        return {node_id: tuple(indices) for node_id, indices in table.items()}

    @property
    def size(self) -> int:
        return len(self.nodes)

    def nodes_of(self, owner: Owner) -> Tuple[str, ...]:
        return tuple(node.id for node in self.nodes if node.owner is owner)

    def with_weights(self, weights: List[WeightValue], kind: Optional[GameKind] = None) -> "GameSpec":
        """Same graph, new weights (one per edge, in edge order)."""
        edges = tuple(Edge(e.source, e.target, w) for e, w in zip(self.edges, weights))
        return replace(self, edges=edges, kind=kind or self.kind)

    def restrict(self, keep: List[str]) -> Tuple["GameSpec", Tuple[int, ...]]:
        """
        Subgame induced by `keep`.

        Returns:
            The subgame and, for each of its edges, the index of that edge here.
        """
        kept = set(keep)
        nodes = tuple(node for node in self.nodes if node.id in kept)
        origin = tuple(i for i, e in enumerate(self.edges)
                       if e.source in kept and e.target in kept)
        edges = tuple(self.edges[i] for i in origin)
        return replace(self, nodes=nodes, edges=edges), origin


def build_game(nodes: List[Tuple[str, Owner]], edges: List[Tuple[str, str, WeightValue]],
               kind: GameKind = GameKind.ENERGY, discount=None, threshold=None) -> GameSpec:
    """Convenience constructor used by tests and generators."""
    return GameSpec(
        nodes=tuple(Node(node_id, owner) for node_id, owner in nodes),
        edges=tuple(Edge(s, t, w if isinstance(w, LexWeight) else Fraction(w)) for s, t, w in edges),
        kind=kind,
        discount=None if discount is None else Fraction(discount),
        threshold=None if threshold is None else Fraction(threshold),
    )


def validate(spec: GameSpec) -> List[Violation]:
    """Return every structural violation of `spec`; an empty list means the game is valid."""
    violations: List[Violation] = []
    seen = set()
    for node in spec.nodes:
        if node.id in seen:
            violations.append(Violation("duplicate id", node.id, "node id used more than once"))
        seen.add(node.id)

    domains = set()
    for index, edge in enumerate(spec.edges):
        label = f"edge #{index} ({edge.source}->{edge.target})"
        for end in (edge.source, edge.target):
            if end not in seen:
                violations.append(Violation("unknown node", label, f"endpoint '{end}' is not a node"))
        domains.add(type(edge.weight))

    if len(domains) > 1:
        violations.append(Violation("mixed weights", "edges", "rational and lexicographic weights mixed"))

    out_degree = {node_id: 0 for node_id in seen}
    for edge in spec.edges:
        if edge.source in out_degree:
            out_degree[edge.source] += 1
    for node in spec.nodes:
        if out_degree.get(node.id, 0) == 0:
            violations.append(Violation("sink node", node.id, "node has no outgoing edge"))

    if spec.kind is GameKind.DISCOUNTED:
        if spec.discount is None:
            violations.append(Violation("missing discount", "lambda", "discounted game needs lambda"))
        elif not 0 < spec.discount < 1:
            violations.append(Violation("discount out of range", "lambda",
                                        f"lambda={spec.discount} is not in (0, 1)"))
        if LexWeight in domains:
            violations.append(Violation("lexicographic weights", "edges",
                                        "discounted games need rational weights"))
    if spec.kind is GameKind.MEAN_PAYOFF:
        if spec.threshold is None:
            violations.append(Violation("missing threshold", "threshold", "mpd game needs a threshold"))
        if LexWeight in domains:
            violations.append(Violation("lexicographic weights", "edges",
                                        "mean-payoff games need rational weights"))
    return violations


def ensure_valid(spec: GameSpec) -> GameSpec:
    violations = validate(spec)
    if violations:
        raise GameValidationError(violations)
    return spec


def max_abs_weight(spec: GameSpec) -> WeightValue:
    """Largest edge weight magnitude in the game's own weight domain."""
    if not spec.edges:
        return Fraction(0)
    return max(magnitude(edge.weight) for edge in spec.edges)


def weight_zero(spec: GameSpec) -> WeightValue:
    if not spec.edges:
        return Fraction(0)
    return zero_like(spec.edges[0].weight)


def is_bipartite(spec: GameSpec) -> bool:
    owners = spec.owners
    return all(owners[e.source] is not owners[e.target] for e in spec.edges)
