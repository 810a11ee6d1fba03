"""
Discounted normal play (DNP) games on edge subsets of a game graph.

Values are kept symbolic: (sign, exponent) stands for sign * lambda**exponent,
so solving never depends on the discount factor. Signatures and their
alternating lexicographic order live here too.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from core.game import Owner

Pair = Tuple[str, str]


@dataclass(frozen=True)
class DnpValue:
    sign: int
    exponent: Optional[int] = None

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign}")
        if (self.sign == 0) != (self.exponent is None):
            raise ValueError("zero values carry no exponent, non-zero values need one")

    def key(self) -> Tuple[int, int]:
        # +l^0 > +l^1 > ... > 0 > ... > -l^1 > -l^0
        if self.sign > 0:
            return (2, -self.exponent)
        if self.sign < 0:
            return (0, self.exponent)
        return (1, 0)

    def __str__(self) -> str:
        if self.sign == 0:
            return "0"
        return f"{'+' if self.sign > 0 else '-'}l^{self.exponent}"


ZERO = DnpValue(0)


def symbolic_compare(u: DnpValue, v: DnpValue) -> int:
    """-1, 0 or 1 as u <, =, > v for every discount factor in (0, 1)."""
    ku, kv = u.key(), v.key()
    return (ku > kv) - (ku < kv)


def scale_by_lambda(v: DnpValue) -> DnpValue:
    if v.sign == 0:
        return ZERO
    return DnpValue(v.sign, v.exponent + 1)


def instantiate(v: DnpValue, discount: Fraction) -> Fraction:
    if v.sign == 0:
        return Fraction(0)
    return v.sign * Fraction(discount) ** v.exponent


def _successors(owners: Mapping[str, Owner], pairs: Iterable[Pair]) -> Dict[str, Set[str]]:
    succ: Dict[str, Set[str]] = {node: set() for node in owners}
    for a, b in pairs:
        succ[a].add(b)
    return succ


def _peel(owners: Mapping[str, Owner], succ: Dict[str, Set[str]], favoured: Owner) -> Dict[str, int]:
    """
    Layer levels for the player `favoured` reaches a sink of its opponent.

    Level 0 holds the opponent's sinks. A `favoured` node joins level k once it
    has an edge into the lower levels; an opponent node joins once all its
    (non-empty) edges lead there.
    """
    level = {v: 0 for v in owners if owners[v] is not favoured and not succ[v]}
    k = 0
    while True:
        k += 1
        done = set(level)
        layer = []
        for v in owners:
            if v in done or not succ[v]:
                continue
            if owners[v] is favoured:
                if succ[v] & done:
                    layer.append(v)
            elif succ[v] <= done:
                layer.append(v)
        if not layer:
            return level
        for v in layer:
            level[v] = k


def dnp_solve(owners: Mapping[str, Owner], pairs: Iterable[Pair]) -> Dict[str, DnpValue]:
    """
    Solve the DNP game on the subgraph with node set `owners` and edges `pairs`.

    Min sinks are worth +1 and Max sinks -1; everything that can neither be
    forced to a positive nor a negative sink is worth 0.
    """
    succ = _successors(owners, pairs)
    positive = _peel(owners, succ, Owner.MAX)
    negative = _peel(owners, succ, Owner.MIN)
    values = {}
    for v in owners:
        if v in positive:
            values[v] = DnpValue(1, positive[v])
        elif v in negative:
            values[v] = DnpValue(-1, negative[v])
        else:
            values[v] = ZERO
    return values


def dnp_fixpoint_check(owners: Mapping[str, Owner], pairs: Iterable[Pair],
                       delta: Mapping[str, DnpValue], discount: Fraction) -> bool:
    """Apply the one-step DNP operator to numeric `delta` and test for a fixed point."""
    succ = _successors(owners, pairs)
    numeric = {v: instantiate(delta[v], discount) for v in owners}
    for v, owner in owners.items():
        if not succ[v]:
            image = Fraction(-1) if owner is Owner.MAX else Fraction(1)
        else:
            options = [discount * numeric[b] for b in succ[v]]
            image = max(options) if owner is Owner.MAX else min(options)
        if image != numeric[v]:
            return False
    return True


class PairClass(Enum):
    OPTIMAL = "optimal"
    VIOLATING = "violating"
    STRONGLY_VIOLATING = "strongly_violating"
    NEUTRAL = "neutral"

    @property
    def violating(self) -> bool:
        return self in (PairClass.VIOLATING, PairClass.STRONGLY_VIOLATING)


def classify_pair(a: str, b: str, delta: Mapping[str, DnpValue], owners: Mapping[str, Owner]) -> PairClass:
    """Classify the node pair (a, b) against DNP values; need not be an edge."""
    da, db = delta[a], delta[b]
    order = symbolic_compare(da, scale_by_lambda(db))
    if order == 0:
        return PairClass.OPTIMAL
    if owners[a] is Owner.MAX:
        if order < 0:
            if da.sign < 0 and db.sign > 0:
                return PairClass.STRONGLY_VIOLATING
            return PairClass.VIOLATING
    elif order > 0:
        if da.sign > 0 and db.sign < 0:
            return PairClass.STRONGLY_VIOLATING
        return PairClass.VIOLATING
    return PairClass.NEUTRAL


@dataclass(frozen=True)
class Signature:
    f: Tuple[int, ...]
    g: Tuple[int, ...]


def signature(delta: Mapping[str, DnpValue], owners: Mapping[str, Owner]) -> Signature:
    """
    Count nodes per DNP level.

    f[0] counts +l^0 nodes; the i-th pair of f counts (Max, Min) nodes at
    +l^i. g mirrors this for negative values with the owners swapped.
    """
    n = len(owners)
    if n == 0:
        return Signature((), ())
    f = [0] * (2 * n - 1)
    g = [0] * (2 * n - 1)
    for v, value in delta.items():
        if value.sign == 0:
            continue
        k = value.exponent
        if value.sign > 0:
            vec, first = f, Owner.MAX
        else:
            vec, first = g, Owner.MIN
        if k == 0:
            vec[0] += 1
        else:
            vec[2 * k - 1 if owners[v] is first else 2 * k] += 1
    return Signature(tuple(f), tuple(g))


def alt_lex_compare(u: Sequence[int], v: Sequence[int]) -> int:
    """Lexicographic order, reversed on odd (1-based) coordinates. Returns -1, 0 or 1."""
    if len(u) != len(v):
        raise ValueError(f"length mismatch: {len(u)} vs {len(v)}")
    for index, (x, y) in enumerate(zip(u, v)):
        if x != y:
            bigger = x < y if index % 2 == 0 else x > y
            return 1 if bigger else -1
    return 0


def transformed_signature(v: Sequence[int]) -> Tuple[int, ...]:
    """(-v1, v2 - v3, v4 - v5, ...), compared in standard lexicographic order."""
    if not v:
        return ()
    return (-v[0],) + tuple(v[i] - v[i + 1] for i in range(1, len(v) - 1, 2))


def _truncated_product(p: List[int], q: List[int], cap: int) -> List[int]:
    out = [0] * (cap + 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q[:cap + 1 - i]):
                out[i + j] += a * b
    return out


def count_signature_space(n: int, bipartite: bool, norm_cap: int) -> int:
    """
    Exact number of signature vectors in N^(2n-1) with 1-norm at most `norm_cap`.

    Admissible vectors are zero, or have a positive first coordinate followed
    by t non-zero pairs and then only zeros. With `bipartite` each pair has a
    single admissible coordinate, alternating between the two.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0 <= norm_cap <= n:
        raise ValueError(f"norm_cap must lie in [0, {n}]")
    cap = norm_cap
    # generating functions truncated at degree cap
    head = [0] + [1] * cap
    pair = [0] + [1 if bipartite else k + 1 for k in range(1, cap + 1)]
    total = 1
    series = head
    for _ in range(n):
        total += sum(series)
        series = _truncated_product(series, pair, cap)
        if not any(series):
            break
    return total


def brute_signature_count(n: int, bipartite: bool, norm_cap: int) -> int:
    """Enumerate admissible vectors directly; only for small n."""
    length = 2 * n - 1
    count = 0
    for v in product(range(norm_cap + 1), repeat=length):
        if sum(v) > norm_cap:
            continue
        if v[0] == 0 and any(v):
            continue
        ok = True
        for i in range(1, n - 1):
            if v[2 * i - 1] == 0 and v[2 * i] == 0 and any(v[2 * i + 1:]):
                ok = False
                break
        if ok and bipartite:
            for i in range(1, n):
                if (i % 2 == 0 and v[2 * i - 1]) or (i % 2 == 1 and v[2 * i]):
                    ok = False
                    break
        count += ok
    return count
