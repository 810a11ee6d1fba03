"""
Runtime check that a sequence of tight-edge graphs is a DNP games iteration.

Every step must keep the optimal edges of the previous graph, add a
(strongly) violating pair, and move the signature vectors up in the
alternating lexicographic order. The run length is then bounded by the size
of the signature space, which `finalize` checks.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from core.errors import InvariantViolation
from core.game import Owner
from solvers.dnp import (DnpValue, PairClass, Signature, alt_lex_compare, classify_pair,
                         count_signature_space, dnp_solve, signature, transformed_signature)
from utils.logger import setup_logger

logger = setup_logger(__name__)

Pair = Tuple[str, str]


class MonitorMode(Enum):
    PLAIN = "plain"
    STRONG = "strong"


class MonitorViolation(InvariantViolation):
    pass


@dataclass(frozen=True)
class IterationRecord:
    step: int
    edges: FrozenSet[Pair]
    delta: Mapping[str, DnpValue]
    signature: Signature
    transformed: Tuple[Tuple[int, ...], Tuple[int, ...]]
    evidence: Optional[Tuple[str, str, str]] = None


@dataclass
class MonitorReport:
    total_steps: int
    verdicts: List[str]
    signature_space: int
    bound: int
    passed: bool
    mode: str = "plain"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode,
            "total_steps": self.total_steps,
            "verdicts": list(self.verdicts),
            "signature_space": self.signature_space,
            "bound": self.bound,
            "passed": self.passed,
        }


def make_record(step: int, edges: Iterable[Pair], owners: Mapping[str, Owner],
                evidence: Optional[Tuple[str, str, str]] = None) -> IterationRecord:
    edge_set = frozenset(edges)
    delta = dnp_solve(owners, edge_set)
    sig = signature(delta, owners)
    return IterationRecord(step, edge_set, delta, sig,
                           (transformed_signature(sig.f), transformed_signature(sig.g)), evidence)


def record_step(prev: IterationRecord, next_edges: Iterable[Pair], mode: MonitorMode,
                owners: Mapping[str, Owner]) -> IterationRecord:
    """
    Check one iteration step and return the record of the new graph.

    Raises:
        MonitorViolation: naming the failed condition, with witnesses
    """
    next_set = frozenset(next_edges)

    for a, b in sorted(prev.edges):
        if classify_pair(a, b, prev.delta, owners) is PairClass.OPTIMAL and (a, b) not in next_set:
            raise MonitorViolation("optimal edge dropped", f"{a}->{b}", {"edge": [a, b], "step": prev.step + 1})

    evidence = None
    for a, b in sorted(next_set):
        cls = classify_pair(a, b, prev.delta, owners)
        wanted = cls is PairClass.STRONGLY_VIOLATING if mode is MonitorMode.STRONG else cls.violating
        if wanted:
            evidence = (a, b, cls.value)
            break
    if evidence is None:
        name = "no strongly violating pair" if mode is MonitorMode.STRONG else "no violating pair"
        raise MonitorViolation(name, f"step {prev.step + 1}", {"edges": sorted(next_set)})

    record = make_record(prev.step + 1, next_set, owners, evidence)
    cf = alt_lex_compare(record.signature.f, prev.signature.f)
    cg = alt_lex_compare(record.signature.g, prev.signature.g)
    witness = {"f": [prev.signature.f, record.signature.f], "g": [prev.signature.g, record.signature.g]}
    if mode is MonitorMode.STRONG:
        if cf <= 0 or cg <= 0:
            raise MonitorViolation("signature not increasing", "strong step must raise both f and g", witness)
    else:
        if cf < 0 or cg < 0:
            raise MonitorViolation("signature decreased", f"step {record.step}", witness)
        if cf == 0 and cg == 0:
            raise MonitorViolation("signature stalled", f"step {record.step}", witness)

    if cf > 0 and record.transformed[0] < prev.transformed[0]:
        raise MonitorViolation("transformed signature decreased", "f", witness)
    if cg > 0 and record.transformed[1] < prev.transformed[1]:
        raise MonitorViolation("transformed signature decreased", "g", witness)
    return record


def step_bound(n: int, mode: MonitorMode, bipartite: bool) -> Tuple[int, int]:
    """(signature space size, step bound) for a run on n nodes."""
    if n == 0:
        return 1, 0
    if mode is MonitorMode.STRONG:
        space = count_signature_space(n, True, n // 2)
    else:
        space = count_signature_space(n, bipartite, n)
    return space, 2 * space


def finalize(records: List[IterationRecord], mode: MonitorMode, bipartite: bool, n: int) -> MonitorReport:
    steps = max(0, len(records) - 1)
    space, bound = step_bound(n, mode, bipartite)
    verdicts = [f"step {r.step}: {r.evidence[0]}->{r.evidence[1]} {r.evidence[2]}"
                for r in records[1:] if r.evidence]
    return MonitorReport(steps, verdicts, space, bound, steps <= bound, mode.value)


class IterationMonitor:
    """Collects records for one solver run; never touches solver state."""

    def __init__(self, owners: Mapping[str, Owner], mode: MonitorMode, bipartite: bool):
        self.owners = dict(owners)
        self.mode = mode
        self.bipartite = bipartite
        self.records: List[IterationRecord] = []

    def start(self, edges: Iterable[Pair]) -> IterationRecord:
        self.records = [make_record(0, edges, self.owners)]
        return self.records[0]

    def step(self, edges: Iterable[Pair]) -> IterationRecord:
        record = record_step(self.records[-1], edges, self.mode, self.owners)
        self.records.append(record)
        return record

    def finalize(self) -> MonitorReport:
        report = finalize(self.records, self.mode, self.bipartite, len(self.owners))
        if not report.passed:
            logger.error(f"Monitor bound breached: {report.total_steps} > {report.bound}")
        return report
