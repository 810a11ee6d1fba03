"""Benchmark tables (CSV) and per-size iteration statistics (JSON)."""

import csv
from dataclasses import replace
from typing import Any, Dict, Iterable, List, TextIO

from core.generator import GenConfig, random_games
from harness.runner import RunOptions, run_instance
from utils.logger import setup_logger

logger = setup_logger(__name__)

BENCH_COLUMNS = ["n", "instance", "kind", "nodes", "iterations", "bound", "ratio"]


def _ratio(iterations: int, bound: int) -> float:
    return iterations / bound if bound else 0.0


def bench_rows(cfg: GenConfig, sizes: Iterable[int], count: int, options: RunOptions) -> List[Dict[str, Any]]:
    """One row per generated game; games for size n come from the config with n fixed."""
    rows = []
    for n in sizes:
        sized = replace(cfg, n=n, max_n=None)
        for i, spec in enumerate(random_games(sized, count)):
            record = run_instance(spec, options)
            rows.append({
                "n": n,
                "instance": i,
                "kind": record.kind,
                "nodes": spec.size,
                "iterations": record.iterations,
                "bound": record.bound,
                "ratio": f"{_ratio(record.iterations, record.bound):.6f}",
                "wall_ms": f"{record.wall_ms:.3f}",
                "monitor_passed": None if record.report is None else record.report["passed"],
            })
        logger.info(f"Benchmarked {count} games with n={n}")
    return rows


def write_bench_csv(rows: List[Dict[str, Any]], stream: TextIO, timing: bool = False) -> None:
    columns = BENCH_COLUMNS + (["wall_ms"] if timing else [])
    writer = csv.DictWriter(stream, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def summarize(rows: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
    """Per-n count, iteration extremes, worst ratio to the bound, and monitor status."""
    by_n: Dict[int, List[Dict[str, Any]]] = {}
    for row in rows:
        by_n.setdefault(row["n"], []).append(row)
    summary = []
    for n in sorted(by_n):
        group = by_n[n]
        iterations = [row["iterations"] for row in group]
        summary.append({
            "n": n,
            "count": len(group),
            "max_iterations": max(iterations),
            "mean_iterations": round(sum(iterations) / len(iterations), 6),
            "bound": max(row["bound"] for row in group),
            "max_ratio": max(float(row["ratio"]) for row in group),
            "monitor_passed": all(row["monitor_passed"] is not False for row in group),
        })
    return summary
