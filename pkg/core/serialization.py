"""JSON game format: parsing with located errors and canonical serialization."""

import json
from fractions import Fraction
from typing import Any, Dict, List, Union

from core.errors import GameFormatError
from core.game import Edge, GameKind, GameSpec, Node, Owner
from core.weights import LexWeight, WeightValue


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def decode_rational(value: Any, location: str) -> Fraction:
    """Decode a `[num, den]` pair into a Fraction in lowest terms."""
    if not isinstance(value, list) or len(value) != 2:
        raise GameFormatError("expected [numerator, denominator]", location)
    for i, part in enumerate(value):
        if not _is_int(part):
            raise GameFormatError(f"non-integer rational component {part!r}", f"{location}[{i}]")
    if value[1] == 0:
        raise GameFormatError("zero denominator", f"{location}[1]")
    return Fraction(value[0], value[1])


def encode_rational(value: Fraction) -> List[int]:
    value = Fraction(value)
    return [value.numerator, value.denominator]


def decode_weight(value: Any, location: str) -> WeightValue:
    if isinstance(value, dict):
        for key in ("base", "rho"):
            if key not in value:
                raise GameFormatError(f"missing '{key}'", location)
        return LexWeight(decode_rational(value["base"], f"{location}.base"),
                         decode_rational(value["rho"], f"{location}.rho"))
    return decode_rational(value, location)


def encode_weight(value: WeightValue) -> Union[List[int], Dict[str, List[int]]]:
    if isinstance(value, LexWeight):
        return {"base": encode_rational(value.base), "rho": encode_rational(value.rho)}
    return encode_rational(value)


def _field(obj: Dict[str, Any], key: str, location: str) -> Any:
    if key not in obj:
        raise GameFormatError(f"missing field '{key}'", location)
    return obj[key]


def game_from_dict(doc: Any) -> GameSpec:
    if not isinstance(doc, dict):
        raise GameFormatError("top level must be an object")

    try:
        kind = GameKind(_field(doc, "kind", "$"))
    except ValueError:
        raise GameFormatError(f"unknown kind {doc['kind']!r}", "$.kind")

    discount = None
    threshold = None
    if "lambda" in doc:
        discount = decode_rational(doc["lambda"], "$.lambda")
    elif kind is GameKind.DISCOUNTED:
        raise GameFormatError("missing field 'lambda'", "$")
    if "threshold" in doc:
        threshold = decode_rational(doc["threshold"], "$.threshold")
    elif kind is GameKind.MEAN_PAYOFF:
        raise GameFormatError("missing field 'threshold'", "$")

    raw_nodes = _field(doc, "nodes", "$")
    if not isinstance(raw_nodes, list):
        raise GameFormatError("expected a list", "$.nodes")
    nodes = []
    seen = set()
    for i, raw in enumerate(raw_nodes):
        where = f"$.nodes[{i}]"
        if not isinstance(raw, dict):
            raise GameFormatError("expected an object", where)
        node_id = _field(raw, "id", where)
        if not isinstance(node_id, str):
            raise GameFormatError("id must be a string", f"{where}.id")
        if node_id in seen:
            raise GameFormatError(f"duplicate id '{node_id}'", f"{where}.id")
        seen.add(node_id)
        try:
            owner = Owner(_field(raw, "owner", where))
        except ValueError:
            raise GameFormatError(f"unknown owner {raw['owner']!r}", f"{where}.owner")
        nodes.append(Node(node_id, owner))

    raw_edges = _field(doc, "edges", "$")
    if not isinstance(raw_edges, list):
        raise GameFormatError("expected a list", "$.edges")
    edges = []
    for i, raw in enumerate(raw_edges):
        where = f"$.edges[{i}]"
        if not isinstance(raw, dict):
            raise GameFormatError("expected an object", where)
        source = _field(raw, "from", where)
        target = _field(raw, "to", where)
        if not isinstance(source, str) or not isinstance(target, str):
            raise GameFormatError("endpoints must be strings", where)
        edges.append(Edge(source, target, decode_weight(_field(raw, "weight", where), f"{where}.weight")))

    return GameSpec(tuple(nodes), tuple(edges), kind, discount, threshold)


def parse_game(text: Union[bytes, str]) -> GameSpec:
    """Parse UTF-8 JSON into a GameSpec. Structural checks are left to `validate`."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise GameFormatError(f"not UTF-8: {e}", f"byte {e.start}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise GameFormatError(f"malformed JSON: {e.msg}", f"line {e.lineno} column {e.colno}")
    return game_from_dict(doc)


def game_to_dict(spec: GameSpec) -> Dict[str, Any]:
    doc: Dict[str, Any] = {"kind": spec.kind.value}
    if spec.discount is not None:
        doc["lambda"] = encode_rational(spec.discount)
    if spec.threshold is not None:
        doc["threshold"] = encode_rational(spec.threshold)
    doc["nodes"] = [{"id": node.id, "owner": node.owner.value} for node in spec.nodes]
    doc["edges"] = [{"from": e.source, "to": e.target, "weight": encode_weight(e.weight)}
                    for e in spec.edges]
    return doc


def dumps_canonical(doc: Any) -> str:
    return json.dumps(doc, ensure_ascii=False, separators=(",", ":"))


def serialize_game(spec: GameSpec) -> bytes:
    """Canonical byte form: keys in schema order, nodes and edges in input order."""
    return dumps_canonical(game_to_dict(spec)).encode("utf-8")
