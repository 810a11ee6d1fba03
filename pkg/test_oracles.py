#!/usr/bin/env python3
"""Brute-force and float oracles."""

from fractions import Fraction

import pytest

from core.errors import CapExceededError
from core.game import GameKind, Owner, build_game
from verification.oracles import (PositionalStrategy, brute_disc, brute_energy, brute_mean_payoff,
                                  enumerate_strategies, shapley_error_bound, shapley_vi, strategy_count)

MAX, MIN = Owner.MAX, Owner.MIN
HALF = Fraction(1, 2)


def branching_game(kind=GameKind.DISCOUNTED):
    return build_game([("a", MAX), ("b", MIN)],
                      [("a", "a", 0), ("a", "b", 1), ("b", "a", -1), ("b", "b", 2)],
                      kind, HALF if kind is GameKind.DISCOUNTED else None)


def test_strategy_enumeration_order():
    spec = branching_game()
    assert strategy_count(spec, MAX) == 2
    assert [s.choice for s in enumerate_strategies(spec, MAX)] == [{"a": 0}, {"a": 1}]
    assert PositionalStrategy(MIN, {"b": 2}) == next(enumerate_strategies(spec, MIN))


def test_discounted_values_by_enumeration():
    spec = build_game([("a", MAX), ("b", MIN)], [("a", "b", 1), ("b", "a", -1)], GameKind.DISCOUNTED, HALF)
    assert brute_disc(spec) == {"a": Fraction(2, 3), "b": Fraction(-2, 3)}


def test_discounted_values_with_choices():
    # Max leaves its zero loop for b; Min answers by going back to a
    assert brute_disc(branching_game()) == {"a": Fraction(2, 3), "b": Fraction(-2, 3)}


def test_mean_payoff_values():
    spec = build_game([("a", MAX), ("b", MIN)], [("a", "b", 1), ("b", "a", -2)])
    assert brute_mean_payoff(spec) == {"a": Fraction(-1, 2), "b": Fraction(-1, 2)}
    assert brute_mean_payoff(branching_game(GameKind.ENERGY)) == {"a": Fraction(0), "b": Fraction(0)}


def test_energy_winners():
    spec = build_game([("a", MAX), ("b", MIN)], [("a", "b", 1), ("b", "a", -1)])
    assert brute_energy(spec).to_dict() == {"w_max": ["a", "b"], "w_min": []}
    losing = build_game([("a", MAX), ("b", MIN)], [("a", "b", 1), ("b", "a", -2), ("b", "b", 0)])
    assert brute_energy(losing).to_dict() == {"w_max": [], "w_min": ["a", "b"]}


def test_caps_are_enforced():
    with pytest.raises(CapExceededError):
        brute_disc(branching_game(), cap=3)
    with pytest.raises(CapExceededError):
        brute_energy(branching_game(GameKind.ENERGY), cap=1)


def test_shapley_converges_within_bound():
    spec = build_game([("a", MAX)], [("a", "a", 1)], GameKind.DISCOUNTED, HALF)
    approx = shapley_vi(spec, 30)
    assert abs(approx["a"] - 2.0) <= shapley_error_bound(spec, 30) + 1e-12
    assert shapley_error_bound(spec, 3) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        shapley_vi(spec, 0)


if __name__ == "__main__":
    pytest.main([__file__])
