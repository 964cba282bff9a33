"""Experiment harness: sweep target rates and black-cell patterns, record trials.

One record per (pattern, target rate, trial). With early stopping, a pattern
drops out of the sweep after the first rate at which every trial fails, which
mirrors how generation budgets are probed in practice; summaries count the
skipped cells as failures.
"""

from __future__ import annotations

import csv
import io
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from .grid import GridPattern, PatternPolicy, DEFAULT_POLICY, extract_slots, generate_random_patterns
from .lexicon import WordIndex
from .solver import SolverConfig, solve
from .util import atomic_write_text, derive_seed

CSV_HEADER = [
    "pattern_id",
    "n_black",
    "T",
    "seed",
    "trial",
    "status",
    "success",
    "time_ms",
    "restarts",
    "nodes_expanded",
    "achieved_topic_ratio",
]


class SchemaMismatchError(ValueError):
    pass


class EmptyInputError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    height: int = 7
    width: int = 7
    t_values: tuple[int, ...] = (10, 20, 30, 40, 50, 60, 70, 80, 90, 100)
    black_counts: tuple[int, ...] = (9, 10, 11, 12)
    patterns_per_count: int = 10
    trials_per_cell: int = 1
    seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)
    early_stop: bool = True
    pattern_policy: PatternPolicy = DEFAULT_POLICY

    def __post_init__(self) -> None:
        if not self.t_values or not self.black_counts:
            raise ValueError("t_values and black_counts must be non-empty")
        if self.patterns_per_count < 1 or self.trials_per_cell < 1:
            raise ValueError("patterns_per_count and trials_per_cell must be >= 1")


@dataclass(frozen=True)
class ExperimentRecord:
    pattern_id: str
    n_black: int
    t: int
    seed: int
    trial: int
    status: str
    success: bool
    time_ms: int
    restarts: int
    nodes_expanded: int
    achieved_topic_ratio: float


def _sweep_pattern(
    pattern: GridPattern, config: SweepConfig, index: WordIndex
) -> list[ExperimentRecord]:
    """All records for one pattern, walking target rates from low to high."""
    slotset = extract_slots(pattern, config.pattern_policy)
    n_black = pattern.n_black
    records = []
    for t in sorted(set(config.t_values)):
        any_success = False
        for trial in range(config.trials_per_cell):
            seed = derive_seed(config.seed, pattern.pattern_id, t, trial)
            solver_config = replace(config.solver, target_rate=t, seed=seed)
            result = solve(slotset, index, solver_config)
            any_success = any_success or result.success
            records.append(
                ExperimentRecord(
                    pattern_id=pattern.pattern_id,
                    n_black=n_black,
                    t=t,
                    seed=seed,
                    trial=trial,
                    status=result.status.value,
                    success=result.success,
                    time_ms=result.elapsed_ms,
                    restarts=result.restarts,
                    nodes_expanded=result.nodes_expanded,
                    achieved_topic_ratio=result.achieved_topic_ratio,
                )
            )
        if config.early_stop and not any_success:
            break
    return records


_POOL_INDEX: WordIndex | None = None
_POOL_CONFIG: SweepConfig | None = None


def _pool_init(index: WordIndex, config: SweepConfig) -> None:
    global _POOL_INDEX, _POOL_CONFIG
    _POOL_INDEX = index
    _POOL_CONFIG = config


def _pool_task(pattern: GridPattern) -> list[ExperimentRecord]:
    assert _POOL_INDEX is not None and _POOL_CONFIG is not None
    return _sweep_pattern(pattern, _POOL_CONFIG, _POOL_INDEX)


def default_sweep_patterns(config: SweepConfig) -> list[GridPattern]:
    """The seeded random pattern set implied by a sweep config."""
    patterns = []
    for n_black in config.black_counts:
        patterns.extend(
            generate_random_patterns(
                config.height,
                config.width,
                n_black,
                config.patterns_per_count,
                policy=config.pattern_policy,
                seed=derive_seed(config.seed, "patterns", n_black),
            )
        )
    return patterns


def run_sweep(
    config: SweepConfig,
    index: WordIndex,
    patterns: Sequence[GridPattern] | None = None,
    jobs: int = 1,
) -> list[ExperimentRecord]:
    """Run the full sweep; records come back sorted by (pattern_id, T, trial)."""
    if patterns is None:
        patterns = default_sweep_patterns(config)
    if jobs > 1:
        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_pool_init, initargs=(index, config)
        ) as pool:
            chunks = list(pool.map(_pool_task, patterns))
    else:
        chunks = [_sweep_pattern(p, config, index) for p in patterns]
    records = [record for chunk in chunks for record in chunk]
    records.sort(key=lambda r: (r.pattern_id, r.t, r.trial))
    return records


def five_number(values: Sequence[float]) -> dict[str, float]:
    """min/q1/median/q3/max with linear interpolation."""
    data = sorted(values)
    if len(data) == 1:
        v = data[0]
        return {"min": v, "q1": v, "median": v, "q3": v, "max": v}
    q1, median, q3 = statistics.quantiles(data, n=4, method="inclusive")
    return {"min": data[0], "q1": q1, "median": median, "q3": q3, "max": data[-1]}


@dataclass(frozen=True)
class GroupSummary:
    n_cells: int
    successes: int
    probability: float
    time_ms: dict[str, float] | None


@dataclass(frozen=True)
class SweepSummary:
    by_target_rate: dict[int, GroupSummary]
    by_black_count: dict[int, GroupSummary]

    def to_dict(self) -> dict:
        def dump(groups: dict[int, GroupSummary]) -> dict:
            return {
                str(key): {
                    "n_cells": g.n_cells,
                    "successes": g.successes,
                    "probability": g.probability,
                    "time_ms": g.time_ms,
                }
                for key, g in sorted(groups.items())
            }

        return {
            "by_target_rate": dump(self.by_target_rate),
            "by_black_count": dump(self.by_black_count),
        }


def summarize(records: Sequence[ExperimentRecord]) -> SweepSummary:
    """Success probability and generation-time quantiles per target rate and
    per black-cell count.

    The per-rate denominator is every (pattern, trial) cell seen anywhere in
    the records: a cell missing at some rate was early-stopped, and an
    early-stopped cell is a known failure.
    """
    if not records:
        raise EmptyInputError("no records to summarize")

    all_cells = {(r.pattern_id, r.trial) for r in records}

    by_rate: dict[int, GroupSummary] = {}
    for t in sorted({r.t for r in records}):
        recs = [r for r in records if r.t == t]
        times = [r.time_ms for r in recs if r.success]
        successes = len(times)
        by_rate[t] = GroupSummary(
            n_cells=len(all_cells),
            successes=successes,
            probability=successes / len(all_cells),
            time_ms=five_number(times) if times else None,
        )

    by_black: dict[int, GroupSummary] = {}
    for n_black in sorted({r.n_black for r in records}):
        recs = [r for r in records if r.n_black == n_black]
        times = [r.time_ms for r in recs if r.success]
        successes = len(times)
        by_black[n_black] = GroupSummary(
            n_cells=len(recs),
            successes=successes,
            probability=successes / len(recs),
            time_ms=five_number(times) if times else None,
        )

    return SweepSummary(by_target_rate=by_rate, by_black_count=by_black)


def records_to_csv(records: Sequence[ExperimentRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(
            [
                r.pattern_id,
                r.n_black,
                r.t,
                r.seed,
                r.trial,
                r.status,
                "true" if r.success else "false",
                r.time_ms,
                r.restarts,
                r.nodes_expanded,
                repr(r.achieved_topic_ratio),
            ]
        )
    return buf.getvalue()


def write_records_csv(records: Sequence[ExperimentRecord], path: str | Path) -> None:
    atomic_write_text(path, records_to_csv(records))


def read_records_csv(path: str | Path) -> list[ExperimentRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatchError(f"{path}: empty file") from None
        if header != CSV_HEADER:
            raise SchemaMismatchError(f"{path}: header {header!r} != {CSV_HEADER!r}")
        records = []
        for row in reader:
            if len(row) != len(CSV_HEADER):
                raise SchemaMismatchError(f"{path}: row has {len(row)} fields")
            records.append(
                ExperimentRecord(
                    pattern_id=row[0],
                    n_black=int(row[1]),
                    t=int(row[2]),
                    seed=int(row[3]),
                    trial=int(row[4]),
                    status=row[5],
                    success=row[6] == "true",
                    time_ms=int(row[7]),
                    restarts=int(row[8]),
                    nodes_expanded=int(row[9]),
                    achieved_topic_ratio=float(row[10]),
                )
            )
    return records


def _polyline(points: list[tuple[float, float]]) -> str:
    return " ".join(f"{x:.1f},{y:.1f}" for x, y in points)


def summary_svg(summary: SweepSummary) -> str:
    """A small two-panel chart: success probability and median time by target rate.

    Intentionally dependency-free; the CSV stays the canonical output.
    """
    width, panel_h, pad = 640, 200, 45
    height = 2 * panel_h + 3 * pad
    rates = sorted(summary.by_target_rate)
    if len(rates) < 2:
        x_of = lambda t: width / 2  # noqa: E731
    else:
        lo, hi = rates[0], rates[-1]
        x_of = lambda t: pad + (t - lo) / (hi - lo) * (width - 2 * pad)  # noqa: E731

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<text x="{pad}" y="{pad - 25}">success probability by target rate</text>',
    ]

    prob_points = []
    for t in rates:
        p = summary.by_target_rate[t].probability
        prob_points.append((x_of(t), pad + (1.0 - p) * panel_h))
    parts.append(
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{panel_h}" '
        'fill="none" stroke="#999"/>'
    )
    parts.append(
        f'<polyline points="{_polyline(prob_points)}" fill="none" stroke="#1f77b4" '
        'stroke-width="2"/>'
    )
    for (x, y), t in zip(prob_points, rates):
        parts.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="3" fill="#1f77b4"/>')
        parts.append(f'<text x="{x:.1f}" y="{pad + panel_h + 14}" text-anchor="middle">{t}</text>')

    medians = {
        t: summary.by_target_rate[t].time_ms["median"]
        for t in rates
        if summary.by_target_rate[t].time_ms
    }
    y0 = 2 * pad + panel_h
    parts.append(f'<text x="{pad}" y="{y0 - 25}">median time (ms) over successes</text>')
    parts.append(
        f'<rect x="{pad}" y="{y0}" width="{width - 2 * pad}" height="{panel_h}" '
        'fill="none" stroke="#999"/>'
    )
    if medians:
        top = max(medians.values()) or 1.0
        time_points = [
            (x_of(t), y0 + (1.0 - medians[t] / top) * panel_h) for t in sorted(medians)
        ]
        parts.append(
            f'<polyline points="{_polyline(time_points)}" fill="none" stroke="#d62728" '
            'stroke-width="2"/>'
        )
        for (x, y), t in zip(time_points, sorted(medians)):
            parts.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="3" fill="#d62728"/>')
            parts.append(
                f'<text x="{x:.1f}" y="{y0 + panel_h + 14}" text-anchor="middle">{t}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_summary_svg(summary: SweepSummary, path: str | Path) -> None:
    atomic_write_text(path, summary_svg(summary))
