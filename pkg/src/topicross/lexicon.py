"""Answer-word storage: normalization to a grid alphabet, topic/filler tagging,
and a (length, position, letter) index for constrained candidate retrieval.

Topic entries come from the target corpus; filler entries pad the vocabulary
from an external word list. A word that shows up in both keeps the topic tag.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence


class Source(Enum):
    TOPIC = "topic"
    FILLER = "filler"


class UnmappableCharacterError(ValueError):
    """A code point with no mapping, under the 'reject' drop policy."""

    def __init__(self, codepoint: str, surface: str):
        super().__init__(f"cannot normalize {codepoint!r} in {surface!r}")
        self.codepoint = codepoint
        self.surface = surface


class TooShortError(ValueError):
    """Normalization left fewer than two grid characters."""


class LexiconParseError(ValueError):
    def __init__(self, path: str, line: int, reason: str):
        super().__init__(f"{path}:{line}: {reason}")
        self.path = path
        self.line = line


REJECT = "reject"
SKIP = "skip"


@dataclass(frozen=True)
class NormalizationTable:
    """Maps surface code-point sequences onto the grid alphabet.

    Keys may be multi-character; the longest key match wins at each input
    position. Characters already in the output alphabet pass through, so the
    table is idempotent on its own output. Anything else is handled per
    ``drop_policy``: 'reject' raises, 'skip' silently drops the character.
    """

    mappings: dict[str, str]
    drop_policy: str = SKIP
    _alphabet: frozenset[str] = field(init=False, repr=False, compare=False)
    _max_key: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.drop_policy not in (REJECT, SKIP):
            raise ValueError(f"drop_policy must be {REJECT!r} or {SKIP!r}")
        alphabet = frozenset(ch for value in self.mappings.values() for ch in value)
        object.__setattr__(self, "_alphabet", alphabet)
        object.__setattr__(self, "_max_key", max((len(k) for k in self.mappings), default=1))

    def apply(self, surface: str) -> str:
        out = []
        i = 0
        n = len(surface)
        while i < n:
            matched = False
            for k in range(min(self._max_key, n - i), 0, -1):
                segment = surface[i : i + k]
                if segment in self.mappings:
                    out.append(self.mappings[segment])
                    i += k
                    matched = True
                    break
            if matched:
                continue
            ch = surface[i]
            if ch in self._alphabet:
                out.append(ch)
            elif self.drop_policy == REJECT:
                raise UnmappableCharacterError(ch, surface)
            i += 1
        return "".join(out)

    def to_json(self) -> dict:
        return {"mappings": dict(sorted(self.mappings.items())), "drop_policy": self.drop_policy}

    @classmethod
    def from_json(cls, doc: dict) -> NormalizationTable:
        return cls(mappings=dict(doc["mappings"]), drop_policy=doc.get("drop_policy", SKIP))


def _build_default_latin() -> NormalizationTable:
    # Case-fold to uppercase plus diacritic stripping, computed once from
    # Unicode decompositions over the Latin blocks.
    mappings: dict[str, str] = {}
    for code in range(ord("A"), ord("Z") + 1):
        mappings[chr(code)] = chr(code)
    for code in range(ord("a"), ord("z") + 1):
        mappings[chr(code)] = chr(code).upper()
    for code in list(range(0xC0, 0x180)) + list(range(0x180, 0x250)):
        ch = chr(code)
        if not ch.isalpha():
            continue
        stripped = "".join(
            c
            for c in unicodedata.normalize("NFD", ch.upper())
            if not unicodedata.combining(c)
        )
        if stripped and all("A" <= c <= "Z" for c in stripped):
            mappings[ch] = stripped
    mappings.update(
        {
            "ß": "SS",
            "Æ": "AE",
            "æ": "AE",
            "Œ": "OE",
            "œ": "OE",
            "Ø": "O",
            "ø": "O",
            "Đ": "D",
            "đ": "D",
            "Þ": "TH",
            "þ": "TH",
        }
    )
    return NormalizationTable(mappings=mappings, drop_policy=SKIP)


DEFAULT_TABLE = _build_default_latin()


def normalize(surface: str, table: NormalizationTable = DEFAULT_TABLE) -> str:
    """Normalize a surface form into a grid-alphabet answer.

    Raises :class:`UnmappableCharacterError` under the 'reject' policy and
    :class:`TooShortError` when fewer than two characters survive.
    """
    if not surface:
        raise ValueError("surface must be non-empty")
    answer = table.apply(surface)
    if len(answer) < 2:
        raise TooShortError(f"{surface!r} normalizes to {answer!r} (need >= 2 characters)")
    return answer


@dataclass(frozen=True)
class LexiconEntry:
    answer: str
    surface: str
    source: Source
    clues: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(self.answer) < 2:
            raise ValueError(f"answer {self.answer!r} shorter than 2 characters")
        if any(ch.isspace() for ch in self.answer):
            raise ValueError(f"answer {self.answer!r} contains whitespace")


@dataclass(frozen=True)
class IngestStats:
    topic: int
    filler: int
    skipped_short: int = 0
    skipped_unmappable: int = 0
    collisions: int = 0


@dataclass(frozen=True)
class Lexicon:
    """Deduplicated entries, sorted by answer. At most one entry per answer."""

    entries: tuple[LexiconEntry, ...]
    stats: IngestStats
    _by_answer: dict[str, LexiconEntry] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_answer", {e.answer: e for e in self.entries})
        if len(self._by_answer) != len(self.entries):
            raise ValueError("duplicate answers in lexicon")

    def lookup(self, answer: str) -> LexiconEntry | None:
        return self._by_answer.get(answer)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def counts(self) -> tuple[int, int]:
        """(topic, filler) entry totals."""
        topic = sum(1 for e in self.entries if e.source is Source.TOPIC)
        return topic, len(self.entries) - topic


@dataclass(frozen=True)
class RawRecord:
    """One pre-normalization lexicon record as read from a source file."""

    surface: str
    source: Source
    clues: tuple[str, ...] = ()


def read_lexicon_file(path: str | Path) -> list[RawRecord]:
    """Read one lexicon source file.

    ``.jsonl``/``.ndjson`` files hold one ``{"surface", "source", "clues"}``
    object per line; anything else is a plain word list (one filler surface
    per line, ``#`` comments ignored).
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    records = []
    if path.suffix.lower() in (".jsonl", ".ndjson"):
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise LexiconParseError(str(path), lineno, f"bad JSON: {exc}") from exc
            if not isinstance(doc, dict) or "surface" not in doc:
                raise LexiconParseError(str(path), lineno, "object with 'surface' required")
            source_name = doc.get("source", "filler")
            try:
                source = Source(source_name)
            except ValueError as exc:
                raise LexiconParseError(
                    str(path), lineno, f"unknown source {source_name!r}"
                ) from exc
            clues = doc.get("clues", [])
            if not isinstance(clues, list) or not all(isinstance(c, str) for c in clues):
                raise LexiconParseError(str(path), lineno, "'clues' must be a list of strings")
            records.append(RawRecord(surface=doc["surface"], source=source, clues=tuple(clues)))
    else:
        for line in text.splitlines():
            word = line.strip()
            if not word or word.startswith("#"):
                continue
            records.append(RawRecord(surface=word, source=Source.FILLER))
    return records


def ingest_records(
    records: Iterable[RawRecord], table: NormalizationTable = DEFAULT_TABLE
) -> Lexicon:
    """Normalize, deduplicate, and sort records into a Lexicon.

    Collisions on the same answer keep the topic tag when either side has it,
    and union the clue lists in first-seen order. Records that fail
    normalization are skipped and counted, never fatal.
    """
    merged: dict[str, LexiconEntry] = {}
    skipped_short = 0
    skipped_unmappable = 0
    collisions = 0
    for record in records:
        try:
            answer = normalize(record.surface, table)
        except TooShortError:
            skipped_short += 1
            continue
        except UnmappableCharacterError:
            skipped_unmappable += 1
            continue
        existing = merged.get(answer)
        if existing is None:
            merged[answer] = LexiconEntry(
                answer=answer, surface=record.surface, source=record.source, clues=record.clues
            )
            continue
        collisions += 1
        clues = existing.clues + tuple(c for c in record.clues if c not in existing.clues)
        if existing.source is Source.FILLER and record.source is Source.TOPIC:
            merged[answer] = LexiconEntry(
                answer=answer, surface=record.surface, source=Source.TOPIC, clues=clues
            )
        elif clues != existing.clues:
            merged[answer] = replace(existing, clues=clues)
    entries = tuple(merged[a] for a in sorted(merged))
    topic = sum(1 for e in entries if e.source is Source.TOPIC)
    stats = IngestStats(
        topic=topic,
        filler=len(entries) - topic,
        skipped_short=skipped_short,
        skipped_unmappable=skipped_unmappable,
        collisions=collisions,
    )
    return Lexicon(entries=entries, stats=stats)


def ingest_lexicon(
    paths: Sequence[str | Path], table: NormalizationTable = DEFAULT_TABLE
) -> Lexicon:
    """Ingest one or more lexicon files (see :func:`read_lexicon_file`)."""
    records: list[RawRecord] = []
    for path in paths:
        records.extend(read_lexicon_file(path))
    return ingest_records(records, table)


class WordIndex:
    """Candidate retrieval by (length, position, letter) constraints.

    ``by_length[L]`` lists entries of length L in canonical candidate order:
    topic entries first, then lexicographic by answer. ``by_constraint`` maps
    ``(L, position, letter)`` to the positions (into ``by_length[L]``) of the
    entries with that letter there, so the entry set for a constraint is
    ``{by_length[L][i] for i in by_constraint[L, position, letter]}``.
    """

    def __init__(self, lexicon: Lexicon):
        grouped: dict[int, list[LexiconEntry]] = {}
        for entry in lexicon.entries:
            grouped.setdefault(len(entry.answer), []).append(entry)
        self.by_length: dict[int, tuple[LexiconEntry, ...]] = {}
        self.by_constraint: dict[tuple[int, int, str], frozenset[int]] = {}
        self._rank: dict[str, int] = {}
        for length, entries in grouped.items():
            entries.sort(key=lambda e: (e.source is not Source.TOPIC, e.answer))
            self.by_length[length] = tuple(entries)
            sets: dict[tuple[int, int, str], set[int]] = {}
            for pos_in_list, entry in enumerate(entries):
                self._rank[entry.answer] = pos_in_list
                for i, ch in enumerate(entry.answer):
                    sets.setdefault((length, i, ch), set()).add(pos_in_list)
            for key, members in sets.items():
                self.by_constraint[key] = frozenset(members)

    def _intersect(
        self, length: int, fixed: Iterable[tuple[int, str]]
    ) -> frozenset[int] | None:
        """Positions matching all fixed letters, or None for 'no constraints'."""
        sets = []
        for position, letter in fixed:
            if not 0 <= position < length:
                raise ValueError(f"fixed position {position} outside word of length {length}")
            members = self.by_constraint.get((length, position, letter))
            if members is None:
                return frozenset()
            sets.append(members)
        if not sets:
            return None
        sets.sort(key=len)
        result = sets[0]
        for members in sets[1:]:
            result &= members
            if not result:
                break
        return result

    def candidates(
        self,
        length: int,
        fixed: Iterable[tuple[int, str]] = (),
        excluded: frozenset[str] | set[str] = frozenset(),
    ) -> list[LexiconEntry]:
        """Entries of the given length matching every fixed (position, letter)
        and not in ``excluded``, in canonical order."""
        pool = self.by_length.get(length, ())
        matched = self._intersect(length, fixed)
        if matched is None:
            entries: Iterable[LexiconEntry] = pool
        else:
            entries = (pool[i] for i in sorted(matched))
        if excluded:
            return [e for e in entries if e.answer not in excluded]
        return list(entries)

    def count_matches(
        self,
        length: int,
        fixed: Sequence[tuple[int, str]] = (),
        excluded: Iterable[str] = (),
    ) -> int:
        """Candidate count without materializing the list."""
        pool = self.by_length.get(length, ())
        matched = self._intersect(length, fixed)
        count = len(pool) if matched is None else len(matched)
        for answer in excluded:
            if len(answer) != length or answer not in self._rank:
                continue
            if all(answer[pos] == ch for pos, ch in fixed):
                count -= 1
        return count


def build_index(lexicon: Lexicon) -> WordIndex:
    return WordIndex(lexicon)


def candidates(
    index: WordIndex,
    length: int,
    fixed: Iterable[tuple[int, str]] = (),
    excluded: frozenset[str] | set[str] = frozenset(),
) -> list[LexiconEntry]:
    return index.candidates(length, fixed, excluded)
