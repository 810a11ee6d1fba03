"""
Ground-truth solvers for small games.

Exhaustive positional-strategy enumeration (exact) for discounted, energy and
mean-payoff games, and classical Shapley value iteration (floating point) as a
cross-representation check.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from core.errors import CapExceededError, InvariantViolation
from core.game import GameSpec, Owner, max_abs_weight, weight_zero
from solvers.energy import WinnerPartition
from utils.logger import setup_logger

logger = setup_logger(__name__)

DEFAULT_CAP = 1_000_000


@dataclass(frozen=True)
class PositionalStrategy:
    owner: Owner
    choice: Dict[str, int]

    def __hash__(self) -> int:
        return hash((self.owner, tuple(sorted(self.choice.items()))))


def strategy_count(spec: GameSpec, owner: Owner) -> int:
    count = 1
    for node in spec.nodes_of(owner):
        count *= len(spec.out_edges[node])
    return count


def enumerate_strategies(spec: GameSpec, owner: Owner) -> Iterator[PositionalStrategy]:
    """All positional strategies of `owner`, odometer order over nodes in input order."""
    nodes = spec.nodes_of(owner)
    for picks in product(*(spec.out_edges[v] for v in nodes)):
        yield PositionalStrategy(owner, dict(zip(nodes, picks)))


def _check_cap(count: int, cap: int, what: str) -> None:
    if count > cap:
        raise CapExceededError(f"{what}: {count} strategy combinations exceed cap {cap}")


def _play_values(spec: GameSpec, choice: Dict[str, int]) -> Dict[str, Fraction]:
    """Discounted payoff of every node in the functional graph given by `choice`."""
    lam = spec.discount
    values: Dict[str, Fraction] = {}

    def step(v: str) -> Tuple[Fraction, str]:
        edge = spec.edges[choice[v]]
        return edge.weight, edge.target

    for start in spec.node_ids:
        path: List[str] = []
        position: Dict[str, int] = {}
        v = start
        while v not in values and v not in position:
            position[v] = len(path)
            path.append(v)
            v = step(v)[1]
        if v in position:
            cycle = path[position[v]:]
            total, factor = Fraction(0), Fraction(1)
            for c in cycle:
                total += factor * step(c)[0]
                factor *= lam
            values[cycle[0]] = total / (1 - factor)
            for c in reversed(cycle[1:]):
                w, nxt = step(c)
                values[c] = w + lam * values[nxt]
            path = path[:position[v]]
        for u in reversed(path):
            w, nxt = step(u)
            values[u] = w + lam * values[nxt]
    return values


def _cycle_means(spec: GameSpec, choice: Dict[str, int]) -> Dict[str, Fraction]:
    """Mean weight of the cycle each node eventually loops on."""
    means: Dict[str, Fraction] = {}
    for start in spec.node_ids:
        path: List[str] = []
        position: Dict[str, int] = {}
        v = start
        while v not in means and v not in position:
            position[v] = len(path)
            path.append(v)
            v = spec.edges[choice[v]].target
        if v in position:
            cycle = path[position[v]:]
            mean = sum((spec.edges[choice[c]].weight for c in cycle), Fraction(0)) / len(cycle)
            for c in cycle:
                means[c] = mean
            path = path[:position[v]]
        for u in path:
            means[u] = means[v]
    return means


def _max_min(spec: GameSpec, cap: int, evaluate) -> Dict[str, Fraction]:
    """Per-node max over Max strategies of min over Min strategies; checks it equals min-max."""
    _check_cap(strategy_count(spec, Owner.MAX) * strategy_count(spec, Owner.MIN), cap, "enumeration")
    min_strategies = list(enumerate_strategies(spec, Owner.MIN))
    lower: Dict[str, Fraction] = {}
    upper: List[Dict[str, Fraction]] = [dict() for _ in min_strategies]
    for sigma in enumerate_strategies(spec, Owner.MAX):
        worst: Dict[str, Fraction] = {}
        for j, tau in enumerate(min_strategies):
            values = evaluate(spec, {**sigma.choice, **tau.choice})
            for v, value in values.items():
                if v not in worst or value < worst[v]:
                    worst[v] = value
                if v not in upper[j] or value > upper[j][v]:
                    upper[j][v] = value
        for v, value in worst.items():
            if v not in lower or value > lower[v]:
                lower[v] = value
    for v in spec.node_ids:
        minmax = min(u[v] for u in upper)
        if minmax != lower[v]:
            raise InvariantViolation("not determined", f"node {v}: max-min {lower[v]} != min-max {minmax}")
    return {v: lower[v] for v in spec.node_ids}


def brute_disc(spec: GameSpec, cap: int = DEFAULT_CAP) -> Dict[str, Fraction]:
    """Exact discounted values by enumerating both players' positional strategies."""
    return _max_min(spec, cap, _play_values)


def brute_mean_payoff(spec: GameSpec, cap: int = DEFAULT_CAP) -> Dict[str, Fraction]:
    """Exact mean-payoff values by enumerating both players' positional strategies."""
    return _max_min(spec, cap, _cycle_means)


def _losing_nodes(spec: GameSpec, sigma: PositionalStrategy) -> set:
    """Nodes that reach a negative cycle once Max is fixed to `sigma` (Floyd-Warshall)."""
    ids = spec.node_ids
    index = {v: i for i, v in enumerate(ids)}
    n = len(ids)
    dist: List[List[Optional[Fraction]]] = [[None] * n for _ in range(n)]
    for i, edge in enumerate(spec.edges):
        if spec.owners[edge.source] is Owner.MAX and sigma.choice[edge.source] != i:
            continue
        a, b = index[edge.source], index[edge.target]
        if dist[a][b] is None or edge.weight < dist[a][b]:
            dist[a][b] = edge.weight
    for k in range(n):
        for i in range(n):
            if dist[i][k] is None:
                continue
            for j in range(n):
                if dist[k][j] is None:
                    continue
                through = dist[i][k] + dist[k][j]
                if dist[i][j] is None or through < dist[i][j]:
                    dist[i][j] = through
    zero = weight_zero(spec)
    negative = [k for k in range(n) if dist[k][k] is not None and dist[k][k] < zero]
    return {ids[i] for i in range(n)
            if any(i == k or dist[i][k] is not None for k in negative)}


def brute_energy(spec: GameSpec, cap: int = DEFAULT_CAP) -> WinnerPartition:
    """Max wins v iff some positional strategy leaves no negative cycle reachable from v."""
    _check_cap(strategy_count(spec, Owner.MAX), cap, "energy enumeration")
    winning = set()
    for sigma in enumerate_strategies(spec, Owner.MAX):
        winning |= set(spec.node_ids) - _losing_nodes(spec, sigma)
        if len(winning) == spec.size:
            break
    return WinnerPartition(tuple(v for v in spec.node_ids if v in winning),
                           tuple(v for v in spec.node_ids if v not in winning))


def shapley_vi(spec: GameSpec, sweeps: int) -> Dict[str, float]:
    """Float value iteration from the zero vector, `sweeps` applications of the one-step operator."""
    if sweeps < 1:
        raise ValueError("sweeps must be at least 1")
    ids = spec.node_ids
    index = {v: i for i, v in enumerate(ids)}
    source = np.array([index[e.source] for e in spec.edges], dtype=np.int64)
    target = np.array([index[e.target] for e in spec.edges], dtype=np.int64)
    weight = np.array([float(e.weight) for e in spec.edges], dtype=np.float64)
    is_max = np.array([spec.owners[v] is Owner.MAX for v in ids])
    lam = float(spec.discount)

    x = np.zeros(len(ids), dtype=np.float64)
    for _ in range(sweeps):
        q = weight + lam * x[target]
        hi = np.full(len(ids), -np.inf)
        lo = np.full(len(ids), np.inf)
        np.maximum.at(hi, source, q)
        np.minimum.at(lo, source, q)
        x = np.where(is_max, hi, lo)
    return {v: float(x[index[v]]) for v in ids}


def shapley_error_bound(spec: GameSpec, sweeps: int) -> float:
    lam = float(spec.discount)
    return lam ** sweeps * float(max_abs_weight(spec)) / (1 - lam)
