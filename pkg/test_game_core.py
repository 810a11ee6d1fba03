#!/usr/bin/env python3
"""Game model, weight domains, validation and the JSON format."""

import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from core.errors import GameFormatError, GameValidationError
from core.game import GameKind, Owner, build_game, ensure_valid, is_bipartite, max_abs_weight, validate
from core.serialization import game_to_dict, parse_game, serialize_game
from core.weights import LexWeight, parse_fraction, zero_like

MAX, MIN = Owner.MAX, Owner.MIN

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
lex_weights = st.builds(LexWeight, fractions, fractions)


def loop_game(weight=1, discount=Fraction(1, 2)):
    return build_game([("a", MAX)], [("a", "a", weight)], GameKind.DISCOUNTED, discount)


def test_minimal_game_is_valid():
    assert validate(loop_game()) == []


def test_sink_node_is_named():
    spec = build_game([("a", MAX), ("b", MIN)], [("a", "b", 1)])
    violations = validate(spec)
    assert [(v.code, v.subject) for v in violations] == [("sink node", "b")]
    with pytest.raises(GameValidationError) as excinfo:
        ensure_valid(spec)
    assert "b" in str(excinfo.value)


def test_discount_out_of_range():
    codes = [v.code for v in validate(loop_game(discount=Fraction(1)))]
    assert codes == ["discount out of range"]


def test_unknown_endpoint_and_missing_threshold():
    spec = build_game([("a", MAX)], [("a", "a", 0), ("a", "z", 1)], GameKind.MEAN_PAYOFF)
    codes = {v.code for v in validate(spec)}
    assert codes == {"unknown node", "missing threshold"}


def test_empty_game_is_valid():
    assert validate(build_game([], [])) == []


def test_max_abs_weight():
    spec = build_game([("a", MAX)], [("a", "a", 1), ("a", "a", -3), ("a", "a", 2)])
    assert max_abs_weight(spec) == 3
    zeros = build_game([("a", MAX)], [("a", "a", 0), ("a", "a", 0)])
    assert max_abs_weight(zeros) == 0
    lex = build_game([("a", MAX)], [("a", "a", LexWeight(1, 1)), ("a", "a", LexWeight(-2, 1))])
    assert max_abs_weight(lex) == LexWeight(2, 1)


def test_is_bipartite():
    two_cycle = build_game([("a", MAX), ("b", MIN)], [("a", "b", 1), ("b", "a", -1)])
    assert is_bipartite(two_cycle)
    assert not is_bipartite(loop_game())


@given(lex_weights, lex_weights)
def test_lex_order_is_lexicographic(u, v):
    assert (u < v) == ((u.base, u.rho) < (v.base, v.rho))
    assert (u + v) - v == u
    assert u + (-u) == zero_like(u)


@given(lex_weights)
def test_lex_magnitude_dominates(u):
    assert u.magnitude() >= u
    assert u.magnitude() >= -u


def test_rational_weight_is_reduced():
    text = '{"kind":"energy","nodes":[{"id":"a","owner":"max"}],' \
           '"edges":[{"from":"a","to":"a","weight":[6,4]}]}'
    spec = parse_game(text.encode("utf-8"))
    weight = spec.edges[0].weight
    assert weight == Fraction(3, 2)
    assert (weight.numerator, weight.denominator) == (3, 2)


def test_round_trip_discounted_and_lex():
    spec = build_game([("a", MAX), ("b", MIN)],
                      [("a", "b", Fraction(-7, 3)), ("b", "a", 2), ("b", "b", 0)],
                      GameKind.DISCOUNTED, Fraction(9, 10))
    assert parse_game(serialize_game(spec)) == spec

    lex = build_game([("a", MAX)], [("a", "a", LexWeight(Fraction(1, 2), 1))])
    assert parse_game(serialize_game(lex)) == lex


def test_canonical_key_order():
    doc = game_to_dict(build_game([("a", MIN)], [("a", "a", 1)], GameKind.MEAN_PAYOFF,
                                  threshold=Fraction(1, 3)))
    assert list(doc) == ["kind", "threshold", "nodes", "edges"]
    assert serialize_game(build_game([("a", MIN)], [("a", "a", 1)])) == \
        b'{"kind":"energy","nodes":[{"id":"a","owner":"min"}],"edges":[{"from":"a","to":"a","weight":[1,1]}]}'


@pytest.mark.parametrize("doc, location", [
    ({"kind": "energy", "nodes": [{"id": "a", "owner": "middle"}], "edges": []}, "$.nodes[0].owner"),
    ({"kind": "energy", "nodes": [{"id": "a", "owner": "max"}, {"id": "a", "owner": "min"}],
      "edges": []}, "$.nodes[1].id"),
    ({"kind": "energy", "nodes": [{"id": "a", "owner": "max"}],
      "edges": [{"from": "a", "to": "a", "weight": [1.5, 1]}]}, "$.edges[0].weight[0]"),
    ({"kind": "energy", "nodes": [{"id": "a", "owner": "max"}],
      "edges": [{"from": "a", "to": "a", "weight": [1, 0]}]}, "$.edges[0].weight[1]"),
    ({"kind": "parity", "nodes": [], "edges": []}, "$.kind"),
])
def test_parse_errors_carry_location(doc, location):
    with pytest.raises(GameFormatError) as excinfo:
        parse_game(json.dumps(doc))
    assert excinfo.value.location == location
    assert str(excinfo.value).startswith(location)


def test_boolean_is_not_an_integer():
    doc = {"kind": "energy", "nodes": [{"id": "a", "owner": "max"}],
           "edges": [{"from": "a", "to": "a", "weight": [True, 1]}]}
    with pytest.raises(GameFormatError):
        parse_game(json.dumps(doc))


def test_malformed_json_reports_line():
    with pytest.raises(GameFormatError) as excinfo:
        parse_game(b'{"kind": "energy",\n "nodes": [}')
    assert excinfo.value.location.startswith("line 2")


def test_parse_fraction():
    assert parse_fraction("3/6") == Fraction(1, 2)
    assert parse_fraction(" -2 ") == -2
    assert parse_fraction("+7/2") == Fraction(7, 2)


@pytest.mark.parametrize("text", ["0.5", "1e-3", "1/2.0", "", "1/", "inf"])
def test_parse_fraction_rejects_decimals(text):
    with pytest.raises(ValueError):
        parse_fraction(text)


if __name__ == "__main__":
    pytest.main([__file__])
