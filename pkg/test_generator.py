#!/usr/bin/env python3
"""Seeded random games and exhaustive enumeration."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from core.errors import CapExceededError, ConfigError
from core.game import GameKind, Owner, is_bipartite, validate
from core.generator import GenConfig, enumerate_games, enumeration_size, random_game, random_games
from core.serialization import serialize_game

configs = st.builds(
    GenConfig,
    n=st.integers(min_value=2, max_value=8),
    max_out=st.integers(min_value=1, max_value=3),
    weight_denominator=st.integers(min_value=1, max_value=4),
    bipartite=st.booleans(),
    seed=st.integers(min_value=0, max_value=2 ** 64 - 1),
)


@settings(max_examples=100)
@given(configs)
def test_random_games_are_valid_and_reproducible(cfg):
    spec = random_game(cfg)
    assert validate(spec) == []
    assert spec.size == cfg.n
    assert serialize_game(spec) == serialize_game(random_game(cfg))
    if cfg.bipartite:
        assert is_bipartite(spec)
    for node in spec.node_ids:
        assert cfg.min_out <= len(spec.out_edges[node]) <= cfg.max_out


def test_weight_set_and_kinds():
    weights = (Fraction(-1), Fraction(1, 2))
    cfg = GenConfig(n=5, weights=weights, kind=GameKind.DISCOUNTED, discount=Fraction(9, 10), seed=3)
    spec = random_game(cfg)
    assert spec.discount == Fraction(9, 10)
    assert {e.weight for e in spec.edges} <= set(weights)


def test_stream_is_stable_and_sized():
    cfg = GenConfig(n=2, max_n=6, seed=11)
    first = [serialize_game(g) for g in random_games(cfg, 5)]
    assert first == [serialize_game(g) for g in random_games(cfg, 5)]
    assert len(set(first)) > 1
    assert all(2 <= g.size <= 6 for g in random_games(cfg, 5))
    assert list(random_games(cfg, 0)) == []


@pytest.mark.parametrize("cfg", [
    GenConfig(n=0),
    GenConfig(n=3, min_out=2, max_out=1),
    GenConfig(n=1, bipartite=True),
    GenConfig(n=3, weights=()),
    GenConfig(n=3, kind=GameKind.DISCOUNTED),
    GenConfig(n=3, kind=GameKind.MEAN_PAYOFF),
    GenConfig(n=3, seed=-1),
])
def test_unsatisfiable_configs(cfg):
    with pytest.raises(ConfigError):
        random_game(cfg)


def test_enumeration_order_and_size():
    games = list(enumerate_games(1, 1, [Fraction(0), Fraction(1)]))
    assert len(games) == enumeration_size(1, [0, 1], 1) == 4
    assert [(g.nodes[0].owner, g.edges[0].weight) for g in games] == [
        (Owner.MAX, 0), (Owner.MAX, 1), (Owner.MIN, 0), (Owner.MIN, 1)]
    assert all(validate(g) == [] for g in games)


def test_enumeration_counts_multisets():
    games = list(enumerate_games(2, 2, [Fraction(1)], Fraction(1, 2)))
    # per node: 2 single edges + 3 two-edge multisets
    assert len(games) == 4 * 5 * 5
    assert all(g.kind is GameKind.DISCOUNTED for g in games)


def test_enumeration_cap():
    with pytest.raises(CapExceededError):
        list(enumerate_games(3, 2, [Fraction(-1), Fraction(0), Fraction(1)], cap=1000))


if __name__ == "__main__":
    pytest.main([__file__])
