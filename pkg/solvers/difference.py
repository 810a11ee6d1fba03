"""
Difference constraints over an ordered group, solved with shortest-path potentials.

Only addition, negation and comparison of weights are used, so the same code
runs on Fractions and on LexWeight.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from core.errors import NotFoundError
from utils.logger import setup_logger

logger = setup_logger(__name__)

Arc = Tuple[str, str, Any]


def _relax(arcs: Sequence[Arc], dist: Dict[str, Any], pred: Dict[str, int]) -> Optional[int]:
    """One Bellman-Ford pass in arc order. Returns the index of the last improving arc."""
    last = None
    for index, (u, v, w) in enumerate(arcs):
        if u not in dist:
            continue
        candidate = dist[u] + w
        if v not in dist or candidate < dist[v]:
            dist[v] = candidate
            pred[v] = index
            last = index
    return last


def shortest_potentials(nodes: Sequence[str], arcs: Sequence[Arc], zero: Any,
                        source: Optional[str] = None) -> Tuple[Dict[str, Any], Dict[str, int], Optional[int]]:
    """
    Bellman-Ford from `source`, or from a virtual source joined to every node by
    zero-weight arcs when `source` is None.

    Returns:
        distances, predecessor arc per node, and an arc still improvable after
        the full |V| rounds (None when no negative cycle is reachable)
    """
    dist: Dict[str, Any] = {v: zero for v in nodes} if source is None else {source: zero}
    pred: Dict[str, int] = {}
    for _ in range(len(nodes)):
        if _relax(arcs, dist, pred) is None:
            return dist, pred, None
    witness = _relax(arcs, dist, pred)
    return dist, pred, witness


def find_negative_cycle(nodes: Sequence[str], arcs: Sequence[Arc], zero: Any,
                        source: Optional[str] = None) -> Optional[List[str]]:
    """Nodes of one negative cycle reachable from `source` (any cycle if None), in arc order."""
    dist, pred, witness = shortest_potentials(nodes, arcs, zero, source)
    if witness is None:
        return None
    v = arcs[witness][1]
    # walking back |V| predecessor arcs lands on the cycle
    for _ in range(len(nodes)):
        v = arcs[pred[v]][0]
    cycle = [v]
    u = arcs[pred[v]][0]
    while u != v:
        cycle.append(u)
        u = arcs[pred[u]][0]
    cycle.reverse()
    return cycle


@dataclass(frozen=True)
class DifferenceConstraint:
    """x_left - x_right <= bound, or == bound when `equality`."""
    left: str
    right: str
    bound: Any
    equality: bool = False


@dataclass
class DifferenceSystem:
    variables: Tuple[str, ...]
    zero: Any
    constraints: List[DifferenceConstraint] = field(default_factory=list)

    def add(self, left: str, right: str, bound: Any, equality: bool = False) -> None:
        self.constraints.append(DifferenceConstraint(left, right, bound, equality))

    def arcs(self) -> List[Arc]:
        """x_l <= x_r + c becomes arc r -> l of weight c; equalities add the reverse arc."""
        arcs: List[Arc] = []
        for c in self.constraints:
            arcs.append((c.right, c.left, c.bound))
            if c.equality:
                arcs.append((c.left, c.right, -c.bound))
        return arcs

    def satisfied_by(self, x: Dict[str, Any]) -> bool:
        for c in self.constraints:
            gap = x[c.left] - x[c.right]
            if gap > c.bound or (c.equality and gap != c.bound):
                return False
        return True


def pratt_realize(system: DifferenceSystem) -> Dict[str, Any]:
    """
    Feasible assignment of a difference system, or NotFoundError.

    Potentials are shortest distances from a virtual source pinned at zero,
    with ties broken by constraint order, so the output is reproducible.
    """
    arcs = system.arcs()
    dist, _, witness = shortest_potentials(system.variables, arcs, system.zero)
    if witness is not None:
        cycle = find_negative_cycle(system.variables, arcs, system.zero)
        raise NotFoundError(f"difference system infeasible: negative cycle through {cycle}")
    return {v: dist[v] for v in system.variables}
