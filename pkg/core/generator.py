"""Seeded random games and exhaustive enumeration of small games."""

from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import comb
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import CapExceededError, ConfigError
from core.game import Edge, GameKind, GameSpec, Node, Owner

# Bump when the sampling procedure changes so stored baselines can be told apart
GENERATOR_ID = "numpy-pcg64/v1"
# room for every game with n <= 3, out-degree <= 2 and three weights
ENUMERATION_CAP = 2_000_000


@dataclass(frozen=True)
class GenConfig:
    """
    Shape of a random game.

    `weights`, when given, is the set weights are drawn from; otherwise weights
    are k / weight_denominator for integers k spanning [weight_low, weight_high].
    With `max_n` set, each game draws its size from [n, max_n].
    """

    n: int = 4
    min_out: int = 1
    max_out: int = 2
    weights: Optional[Tuple[Fraction, ...]] = None
    weight_low: int = -10
    weight_high: int = 10
    weight_denominator: int = 1
    kind: GameKind = GameKind.ENERGY
    discount: Optional[Fraction] = None
    threshold: Optional[Fraction] = None
    bipartite: bool = False
    seed: int = 0
    max_n: Optional[int] = None

    def check(self) -> None:
        if self.n < 1:
            raise ConfigError("n must be at least 1")
        if self.max_n is not None and self.max_n < self.n:
            raise ConfigError("max_n must be at least n")
        if self.min_out < 1 or self.max_out < self.min_out:
            raise ConfigError("out-degree range must satisfy 1 <= min_out <= max_out")
        if self.bipartite and self.n < 2:
            raise ConfigError("a bipartite game needs both owners, so n >= 2")
        if self.weights is not None and len(self.weights) == 0:
            raise ConfigError("weight set is empty")
        if self.weights is None and (self.weight_low > self.weight_high or self.weight_denominator < 1):
            raise ConfigError("weight range is empty")
        if self.kind is GameKind.DISCOUNTED and (self.discount is None or not 0 < self.discount < 1):
            raise ConfigError("discounted games need 0 < lambda < 1")
        if self.kind is GameKind.MEAN_PAYOFF and self.threshold is None:
            raise ConfigError("mpd games need a threshold")
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")


def _node_id(i: int) -> str:
    return f"v{i}"


def _draw_weight(cfg: GenConfig, rng: np.random.Generator) -> Fraction:
    if cfg.weights is not None:
        return Fraction(cfg.weights[int(rng.integers(len(cfg.weights)))])
    den = cfg.weight_denominator
    k = int(rng.integers(cfg.weight_low * den, cfg.weight_high * den + 1))
    return Fraction(k, den)


def _make_spec(cfg: GenConfig, nodes: List[Node], edges: List[Edge]) -> GameSpec:
    return GameSpec(
        tuple(nodes), tuple(edges), cfg.kind,
        Fraction(cfg.discount) if cfg.kind is GameKind.DISCOUNTED else None,
        Fraction(cfg.threshold) if cfg.kind is GameKind.MEAN_PAYOFF else None,
    )


def random_game(cfg: GenConfig, rng: Optional[np.random.Generator] = None) -> GameSpec:
    """Random valid game; identical for identical config (and generator state)."""
    cfg.check()
    rng = rng if rng is not None else np.random.Generator(np.random.PCG64(cfg.seed))
    n = cfg.n if cfg.max_n is None else int(rng.integers(cfg.n, cfg.max_n + 1))

    owners = [Owner.MAX if rng.integers(2) == 0 else Owner.MIN for _ in range(n)]
    if cfg.bipartite:
        owners[0], owners[1] = Owner.MAX, Owner.MIN
    nodes = [Node(_node_id(i), owner) for i, owner in enumerate(owners)]

    edges = []
    for i, owner in enumerate(owners):
        candidates = [j for j in range(n) if not cfg.bipartite or owners[j] is not owner]
        degree = int(rng.integers(cfg.min_out, cfg.max_out + 1))
        for _ in range(degree):
            j = candidates[int(rng.integers(len(candidates)))]
            edges.append(Edge(_node_id(i), _node_id(j), _draw_weight(cfg, rng)))
    return _make_spec(cfg, nodes, edges)


def random_games(cfg: GenConfig, count: int) -> Iterator[GameSpec]:
    """`count` games, game i drawn from the i-th child of the config's seed sequence."""
    cfg.check()
    for child in np.random.SeedSequence(cfg.seed).spawn(count):
        yield random_game(cfg, np.random.Generator(np.random.PCG64(child)))


def _edge_multisets(n: int, weights: Sequence[Fraction], min_out: int, max_out: int) -> List[Tuple]:
    options = [(j, Fraction(w)) for j in range(n) for w in sorted(set(Fraction(w) for w in weights))]
    multisets: List[Tuple] = []
    for degree in range(min_out, max_out + 1):
        multisets.extend(combinations_with_replacement(options, degree))
    return multisets


def enumeration_size(n: int, weights: Sequence[Fraction], max_out: int, min_out: int = 1) -> int:
    options = n * len(set(Fraction(w) for w in weights))
    per_node = sum(comb(options + d - 1, d) for d in range(min_out, max_out + 1))
    return 2 ** n * per_node ** n


def enumerate_games(n: int, max_out: int, weights: Sequence[Fraction], discount: Optional[Fraction] = None,
                    kind: Optional[GameKind] = None, cap: int = ENUMERATION_CAP, min_out: int = 1,
                    threshold: Optional[Fraction] = None) -> Iterator[GameSpec]:
    """
    Every game on n nodes with out-degree in [min_out, max_out] and weights from `weights`.

    Order: owner vectors in odometer order (Max before Min, node v0 slowest),
    then per-node edge multisets in odometer order. A multiset lists
    (target, weight) options sorted by target then weight, so parallel edges
    appear once per weight multiset.
    """
    if n < 1 or max_out < min_out or min_out < 1:
        raise ConfigError("enumeration needs n >= 1 and 1 <= min_out <= max_out")
    if not weights:
        raise ConfigError("weight set is empty")
    total = enumeration_size(n, weights, max_out, min_out)
    if total > cap:
        raise CapExceededError(f"enumeration of {total} games exceeds cap {cap}")
    if kind is None:
        kind = GameKind.DISCOUNTED if discount is not None else GameKind.ENERGY
    cfg = replace(GenConfig(n=n, kind=kind), discount=discount, threshold=threshold)

    multisets = _edge_multisets(n, weights, min_out, max_out)
    for owners in product((Owner.MAX, Owner.MIN), repeat=n):
        nodes = [Node(_node_id(i), owner) for i, owner in enumerate(owners)]
        for choice in product(multisets, repeat=n):
            edges = [Edge(_node_id(i), _node_id(j), w)
                     for i, multiset in enumerate(choice) for j, w in multiset]
            yield _make_spec(cfg, nodes, edges)
