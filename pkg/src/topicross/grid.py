"""Crossword grid patterns: parsing, slot extraction, validation, random generation.

A pattern is a fixed rectangle of black and white cells. Maximal white runs
(length >= 2 by default) are the slots that receive answer words; a cell shared
by an across and a down slot is a crossing where both answers must agree.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

BLACK = "#"
WHITE = "."


class PatternError(ValueError):
    """Malformed pattern text."""


class EmptyPatternError(PatternError):
    pass


class RaggedRowsError(PatternError):
    pass


class IllegalCharacterError(PatternError):
    pass


class ExhaustedAttemptsError(RuntimeError):
    """Random pattern generation hit its attempt cap before finding enough valid patterns."""


class Orientation(Enum):
    ACROSS = "across"
    DOWN = "down"


@dataclass(frozen=True)
class GridPattern:
    """A fixed black/white cell layout.

    ``cells`` holds one string per row over the alphabet {'#', '.'}.
    Whether the layout is usable (no isolated white cells, etc.) is the
    business of :func:`validate_pattern`, not of construction: degenerate
    layouts such as all-black grids are representable.
    """

    height: int
    width: int
    cells: tuple[str, ...]
    pattern_id: str = ""

    def __post_init__(self) -> None:
        if self.height < 1 or self.width < 1:
            raise PatternError("grid dimensions must be positive")
        if len(self.cells) != self.height:
            raise PatternError(f"expected {self.height} rows, got {len(self.cells)}")
        for r, row in enumerate(self.cells):
            if len(row) != self.width:
                raise RaggedRowsError(f"row {r} has length {len(row)}, expected {self.width}")
            for ch in row:
                if ch not in (BLACK, WHITE):
                    raise IllegalCharacterError(f"illegal cell character {ch!r} in row {r}")

    def is_black(self, row: int, col: int) -> bool:
        return self.cells[row][col] == BLACK

    @property
    def n_black(self) -> int:
        return sum(row.count(BLACK) for row in self.cells)

    def white_cells(self) -> list[tuple[int, int]]:
        return [
            (r, c)
            for r in range(self.height)
            for c in range(self.width)
            if self.cells[r][c] == WHITE
        ]


@dataclass(frozen=True)
class Slot:
    """A maximal white run; receives exactly one answer word."""

    slot_id: int
    orientation: Orientation
    start: tuple[int, int]
    length: int
    cells: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Crossing:
    """A cell shared by an across slot (``slot_a``) and a down slot (``slot_b``)."""

    slot_a: int
    index_a: int
    slot_b: int
    index_b: int
    cell: tuple[int, int]


@dataclass(frozen=True)
class PatternPolicy:
    """Validity rules for patterns. Defaults allow two-letter words and
    require every white cell to sit in at least one slot."""

    min_slot_length: int = 2
    forbid_isolated_white: bool = True
    require_connected: bool = False

    def __post_init__(self) -> None:
        if self.min_slot_length < 2:
            raise ValueError("min_slot_length must be >= 2")


DEFAULT_POLICY = PatternPolicy()


@dataclass(frozen=True)
class SlotSet:
    """All slots of a pattern in canonical order, plus crossing structure.

    Canonical order: across slots row-major by start, then down slots
    row-major by start; ``slot_id`` equals the position in ``slots``.
    ``cell_to_slots`` maps each slotted cell to its (slot_id, index-in-slot)
    memberships, across membership first.
    """

    slots: tuple[Slot, ...]
    crossings: tuple[Crossing, ...]
    cell_to_slots: dict[tuple[int, int], tuple[tuple[int, int], ...]]


@dataclass(frozen=True)
class Violation:
    kind: str
    cells: tuple[tuple[int, int], ...]
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def is_valid(self) -> bool:
        return not self.violations


def parse_pattern(text: str, pattern_id: str = "") -> GridPattern:
    """Parse pattern text ('#' black, '.' white, one row per line).

    An optional leading ``id: <label>`` line names the pattern; it takes
    precedence over the ``pattern_id`` argument.
    """
    lines = text.split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    if lines and lines[0].startswith("id:"):
        pattern_id = lines[0][3:].strip()
        lines = lines[1:]
    if not lines:
        raise EmptyPatternError("pattern text contains no rows")
    return GridPattern(
        height=len(lines), width=len(lines[0]), cells=tuple(lines), pattern_id=pattern_id
    )


def render_pattern(pattern: GridPattern) -> str:
    """Inverse of :func:`parse_pattern`; emits the id line only when set."""
    body = "\n".join(pattern.cells)
    if pattern.pattern_id:
        return f"id: {pattern.pattern_id}\n{body}"
    return body


def parse_pattern_file(text: str) -> list[GridPattern]:
    """Parse a multi-pattern file: blocks separated by one blank line."""
    patterns = []
    for block in text.split("\n\n"):
        if block.strip():
            patterns.append(parse_pattern(block))
    if not patterns:
        raise EmptyPatternError("no patterns in file")
    return patterns


def render_pattern_file(patterns: list[GridPattern]) -> str:
    return "\n\n".join(render_pattern(p) for p in patterns) + "\n"


def _scan_runs(pattern: GridPattern, min_length: int) -> tuple[list, list]:
    """Collect maximal white runs, split into across and down lists."""
    across = []
    for r in range(pattern.height):
        c = 0
        while c < pattern.width:
            if pattern.is_black(r, c):
                c += 1
                continue
            start = c
            while c < pattern.width and not pattern.is_black(r, c):
                c += 1
            if c - start >= min_length:
                across.append(((r, start), tuple((r, j) for j in range(start, c))))
    down = []
    for c in range(pattern.width):
        r = 0
        while r < pattern.height:
            if pattern.is_black(r, c):
                r += 1
                continue
            start = r
            while r < pattern.height and not pattern.is_black(r, c):
                r += 1
            if r - start >= min_length:
                down.append(((start, c), tuple((i, c) for i in range(start, r))))
    down.sort(key=lambda item: item[0])
    return across, down


def extract_slots(pattern: GridPattern, policy: PatternPolicy = DEFAULT_POLICY) -> SlotSet:
    """Extract all slots and crossings of a pattern in canonical order."""
    across_runs, down_runs = _scan_runs(pattern, policy.min_slot_length)

    slots = []
    cell_to_slots: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for orientation, runs in ((Orientation.ACROSS, across_runs), (Orientation.DOWN, down_runs)):
        for start, cells in runs:
            sid = len(slots)
            slots.append(
                Slot(
                    slot_id=sid,
                    orientation=orientation,
                    start=start,
                    length=len(cells),
                    cells=cells,
                )
            )
            for idx, cell in enumerate(cells):
                cell_to_slots.setdefault(cell, []).append((sid, idx))

    crossings = []
    for slot in slots:
        if slot.orientation is not Orientation.ACROSS:
            continue
        for index_a, cell in enumerate(slot.cells):
            for other_id, index_b in cell_to_slots[cell]:
                if other_id != slot.slot_id:
                    crossings.append(
                        Crossing(
                            slot_a=slot.slot_id,
                            index_a=index_a,
                            slot_b=other_id,
                            index_b=index_b,
                            cell=cell,
                        )
                    )

    return SlotSet(
        slots=tuple(slots),
        crossings=tuple(crossings),
        cell_to_slots={cell: tuple(v) for cell, v in cell_to_slots.items()},
    )


def _white_components(pattern: GridPattern) -> list[list[tuple[int, int]]]:
    whites = set(pattern.white_cells())
    components = []
    seen: set[tuple[int, int]] = set()
    for cell in sorted(whites):
        if cell in seen:
            continue
        stack = [cell]
        seen.add(cell)
        component = []
        while stack:
            r, c = stack.pop()
            component.append((r, c))
            for nxt in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                if nxt in whites and nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        components.append(sorted(component))
    return components


def validate_pattern(
    pattern: GridPattern, policy: PatternPolicy = DEFAULT_POLICY
) -> ValidationReport:
    """Check a pattern against the policy; an empty violation list means valid."""
    violations = []
    whites = pattern.white_cells()
    if not whites:
        violations.append(
            Violation(kind="no-white-cells", cells=(), message="pattern has no white cells")
        )
        return ValidationReport(violations=tuple(violations))

    if policy.forbid_isolated_white:
        slotset = extract_slots(pattern, policy)
        uncovered = [cell for cell in whites if cell not in slotset.cell_to_slots]
        for cell in uncovered:
            violations.append(
                Violation(
                    kind="isolated-white",
                    cells=(cell,),
                    message=f"white cell {cell} belongs to no slot of length >= "
                    f"{policy.min_slot_length}",
                )
            )

    if policy.require_connected:
        components = _white_components(pattern)
        if len(components) > 1:
            components.sort(key=len, reverse=True)
            stray = tuple(cell for comp in components[1:] for cell in comp)
            violations.append(
                Violation(
                    kind="disconnected",
                    cells=stray,
                    message=f"white region splits into {len(components)} components",
                )
            )

    return ValidationReport(violations=tuple(violations))


def generate_random_patterns(
    height: int,
    width: int,
    n_black: int,
    count: int,
    policy: PatternPolicy = DEFAULT_POLICY,
    seed: int = 0,
    max_attempts: int = 100_000,
) -> list[GridPattern]:
    """Generate ``count`` distinct valid patterns with exactly ``n_black`` black cells.

    Rejection sampling: black-cell subsets are drawn uniformly and kept only
    when the pattern passes :func:`validate_pattern`. Deterministic for a
    given seed.
    """
    if not 0 <= n_black < height * width:
        raise ValueError(f"n_black must be in [0, {height * width})")
    if count < 1:
        raise ValueError("count must be >= 1")

    rng = random.Random(seed)
    all_cells = height * width
    out: list[GridPattern] = []
    seen: set[tuple[str, ...]] = set()
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > max_attempts:
            raise ExhaustedAttemptsError(
                f"found {len(out)}/{count} valid patterns in {max_attempts} attempts"
            )
        blacks = set(rng.sample(range(all_cells), n_black))
        cells = tuple(
            "".join(BLACK if r * width + c in blacks else WHITE for c in range(width))
            for r in range(height)
        )
        if cells in seen:
            continue
        seen.add(cells)
        pattern = GridPattern(
            height=height,
            width=width,
            cells=cells,
            pattern_id=f"{height}x{width}-b{n_black}-{len(out):03d}",
        )
        if validate_pattern(pattern, policy).is_valid:
            out.append(pattern)
    return out
