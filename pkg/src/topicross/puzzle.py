"""Distributable puzzles: clue selection, independent verification, JSON and text output."""

from __future__ import annotations

import json
from dataclasses import dataclass
from random import Random

from .grid import GridPattern, Orientation, SlotSet, extract_slots, parse_pattern
from .lexicon import Lexicon, Source
from .solver import FillResult, SolverConfig
from .util import derive_seed

GENERATOR_VERSION = "0.1.0"
PLACEHOLDER_CLUE = "Define: {surface}"


class MissingEntryError(KeyError):
    """An assigned answer is absent from the lexicon (index corruption)."""


@dataclass(frozen=True)
class PuzzleEntry:
    slot_id: int
    orientation: Orientation
    row: int
    col: int
    answer: str
    surface: str
    source: Source
    clue: str


@dataclass(frozen=True)
class PuzzleMetadata:
    target_rate: int
    achieved_topic_ratio: float
    seed: int
    elapsed_ms: int
    restarts: int
    generator_version: str = GENERATOR_VERSION


@dataclass(frozen=True)
class Puzzle:
    pattern: GridPattern
    entries: tuple[PuzzleEntry, ...]
    metadata: PuzzleMetadata


@dataclass(frozen=True)
class PuzzleViolation:
    kind: str
    detail: str


@dataclass(frozen=True)
class VerificationReport:
    violations: tuple[PuzzleViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def assemble(
    pattern: GridPattern,
    slotset: SlotSet,
    result: FillResult,
    lexicon: Lexicon,
    clue_seed: int = 0,
) -> Puzzle:
    """Pair each assigned answer with one of its clues.

    The clue is drawn uniformly (seeded) from the entry's clue list; entries
    without clues get the "Define: <surface>" placeholder. Requires a
    successful fill.
    """
    if not result.success:
        raise ValueError(f"cannot assemble from a {result.status.value} result")
    rng = Random(derive_seed(clue_seed, "clues"))
    entries = []
    for slot in slotset.slots:
        answer = result.assignment.get(slot.slot_id)
        if answer is None:
            raise MissingEntryError(f"slot {slot.slot_id} has no assignment")
        lex = lexicon.lookup(answer)
        if lex is None:
            raise MissingEntryError(f"assigned answer {answer!r} not in lexicon")
        clue = rng.choice(lex.clues) if lex.clues else PLACEHOLDER_CLUE.format(surface=lex.surface)
        entries.append(
            PuzzleEntry(
                slot_id=slot.slot_id,
                orientation=slot.orientation,
                row=slot.start[0],
                col=slot.start[1],
                answer=answer,
                surface=lex.surface,
                source=lex.source,
                clue=clue,
            )
        )
    config = result.config or SolverConfig()
    metadata = PuzzleMetadata(
        target_rate=config.target_rate,
        achieved_topic_ratio=result.achieved_topic_ratio,
        seed=config.seed,
        elapsed_ms=result.elapsed_ms,
        restarts=result.restarts,
    )
    return Puzzle(pattern=pattern, entries=tuple(entries), metadata=metadata)


def verify_puzzle(puzzle: Puzzle, lexicon: Lexicon, target_rate: int) -> VerificationReport:
    """Re-check a puzzle from scratch; violations are data, not errors.

    Checks slot coverage, entry geometry, crossing-letter agreement, lexicon
    membership, the duplicate-answer rule, and the topic quota. Deliberately
    independent of the solver: letters are re-placed cell by cell here.
    """
    violations: list[PuzzleViolation] = []
    slotset = extract_slots(puzzle.pattern)
    slots_by_id = {s.slot_id: s for s in slotset.slots}

    seen_ids: set[int] = set()
    for entry in puzzle.entries:
        if entry.slot_id in seen_ids:
            violations.append(
                PuzzleViolation("duplicate-slot", f"slot {entry.slot_id} filled twice")
            )
        seen_ids.add(entry.slot_id)
    for sid in sorted(set(slots_by_id) - seen_ids):
        violations.append(PuzzleViolation("missing-slot", f"slot {sid} has no entry"))

    letters: dict[tuple[int, int], str] = {}
    conflicted: set[tuple[int, int]] = set()
    for entry in puzzle.entries:
        slot = slots_by_id.get(entry.slot_id)
        if slot is None:
            violations.append(
                PuzzleViolation("unknown-slot", f"slot {entry.slot_id} not in pattern")
            )
            continue
        if (
            entry.orientation is not slot.orientation
            or (entry.row, entry.col) != slot.start
        ):
            violations.append(
                PuzzleViolation(
                    "slot-mismatch",
                    f"slot {entry.slot_id}: entry at ({entry.row}, {entry.col}) "
                    f"{entry.orientation.value} does not match the pattern slot",
                )
            )
            continue
        if len(entry.answer) != slot.length:
            violations.append(
                PuzzleViolation(
                    "length-mismatch",
                    f"slot {entry.slot_id}: answer {entry.answer!r} vs length {slot.length}",
                )
            )
            continue
        for i, cell in enumerate(slot.cells):
            have = letters.get(cell)
            if have is None:
                letters[cell] = entry.answer[i]
            elif have != entry.answer[i] and cell not in conflicted:
                conflicted.add(cell)
                violations.append(
                    PuzzleViolation(
                        "crossing-conflict",
                        f"cell {cell}: {have!r} vs {entry.answer[i]!r}",
                    )
                )

    answers = [e.answer for e in puzzle.entries]
    for answer in sorted({a for a in answers if answers.count(a) > 1}):
        violations.append(PuzzleViolation("duplicate-answer", f"{answer!r} used more than once"))

    topic = 0
    for entry in puzzle.entries:
        lex = lexicon.lookup(entry.answer)
        if lex is None:
            violations.append(
                PuzzleViolation("not-in-lexicon", f"{entry.answer!r} is not a known answer")
            )
        if entry.source is Source.TOPIC:
            topic += 1
    total = len(puzzle.entries)
    if total and topic * 100 < target_rate * total:
        violations.append(
            PuzzleViolation(
                "quota",
                f"{topic}/{total} topic answers is below the {target_rate}% target",
            )
        )
    return VerificationReport(violations=tuple(violations))


def serialize_puzzle(puzzle: Puzzle, include_solution: bool = True) -> dict:
    """Puzzle as a JSON-ready dict; set ``include_solution=False`` to omit answers."""
    entries = []
    for entry in puzzle.entries:
        doc = {
            "slot_id": entry.slot_id,
            "orientation": entry.orientation.value,
            "row": entry.row,
            "col": entry.col,
            "clue": entry.clue,
            "source": entry.source.value,
        }
        if include_solution:
            doc["answer"] = entry.answer
            doc["surface"] = entry.surface
        entries.append(doc)
    return {
        "pattern": "\n".join(puzzle.pattern.cells),
        "pattern_id": puzzle.pattern.pattern_id,
        "entries": entries,
        "metadata": {
            "target_rate": puzzle.metadata.target_rate,
            "achieved_topic_ratio": puzzle.metadata.achieved_topic_ratio,
            "seed": puzzle.metadata.seed,
            "elapsed_ms": puzzle.metadata.elapsed_ms,
            "restarts": puzzle.metadata.restarts,
            "generator_version": puzzle.metadata.generator_version,
        },
    }


def puzzle_to_json(puzzle: Puzzle, include_solution: bool = True) -> str:
    return json.dumps(
        serialize_puzzle(puzzle, include_solution),
        ensure_ascii=False,
        sort_keys=True,
        indent=2,
    )


def deserialize_puzzle(doc: dict) -> Puzzle:
    """Inverse of :func:`serialize_puzzle` for documents that include the solution."""
    pattern = parse_pattern(doc["pattern"], pattern_id=doc.get("pattern_id", ""))
    entries = []
    for e in doc["entries"]:
        if "answer" not in e:
            raise ValueError("solution-free puzzle documents cannot be deserialized")
        entries.append(
            PuzzleEntry(
                slot_id=e["slot_id"],
                orientation=Orientation(e["orientation"]),
                row=e["row"],
                col=e["col"],
                answer=e["answer"],
                surface=e.get("surface", e["answer"]),
                source=Source(e["source"]),
                clue=e["clue"],
            )
        )
    md = doc["metadata"]
    metadata = PuzzleMetadata(
        target_rate=md["target_rate"],
        achieved_topic_ratio=md["achieved_topic_ratio"],
        seed=md["seed"],
        elapsed_ms=md["elapsed_ms"],
        restarts=md["restarts"],
        generator_version=md.get("generator_version", GENERATOR_VERSION),
    )
    return Puzzle(pattern=pattern, entries=tuple(entries), metadata=metadata)


def render_text(puzzle: Puzzle, include_solution: bool = True) -> str:
    """Letter grid plus numbered ACROSS/DOWN clue lists.

    Clue numbers follow canonical slot order (across row-major, then down).
    Without the solution, white cells render as '.'.
    """
    letters: dict[tuple[int, int], str] = {}
    slotset = extract_slots(puzzle.pattern)
    slots_by_id = {s.slot_id: s for s in slotset.slots}
    if include_solution:
        for entry in puzzle.entries:
            slot = slots_by_id.get(entry.slot_id)
            if slot is None:
                continue
            for i, cell in enumerate(slot.cells):
                letters[cell] = entry.answer[i]

    lines = []
    for r in range(puzzle.pattern.height):
        row = []
        for c in range(puzzle.pattern.width):
            if puzzle.pattern.is_black(r, c):
                row.append("#")
            else:
                row.append(letters.get((r, c), "."))
        lines.append("".join(row))

    across = []
    down = []
    entries_by_id = {e.slot_id: e for e in puzzle.entries}
    for number, slot in enumerate(slotset.slots, start=1):
        entry = entries_by_id.get(slot.slot_id)
        clue = entry.clue if entry else "(no clue)"
        target = across if slot.orientation is Orientation.ACROSS else down
        target.append(f"{number}. {clue}")

    parts = ["\n".join(lines)]
    if across:
        parts.append("ACROSS\n" + "\n".join(across))
    if down:
        parts.append("DOWN\n" + "\n".join(down))
    return "\n\n".join(parts) + "\n"
