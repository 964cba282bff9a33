"""Corpus ingestion: keyword occurrence detection and fill-in-the-blank clues.

Keyword detection is pluggable. The built-in extractors either pass through
offsets supplied by an external tagger or run a longest-match gazetteer scan;
swapping in a real NER tool means implementing one ``find`` method.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol, Sequence

from .lexicon import NormalizationTable, DEFAULT_TABLE, normalize

DEFAULT_MASK = "[Answer]"
DEFAULT_TERMINATORS = frozenset(".!?。！？")
DEFAULT_MIN_CLUE_CHARS = 10


class ExtractorUnavailableError(RuntimeError):
    pass


class OffsetOutOfRangeError(ValueError):
    pass


class SentenceTooShortError(ValueError):
    """The masked sentence carries too little context to be a usable clue."""


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str
    pre_tagged_keywords: tuple[tuple[str, int, int], ...] | None = None


@dataclass(frozen=True)
class KeywordOccurrence:
    surface: str
    doc_id: str
    char_start: int
    char_end: int
    sentence_span: tuple[int, int]


@dataclass(frozen=True)
class ClueRecord:
    answer: str
    surface: str
    clue_text: str
    source_doc: str


class KeywordFinder(Protocol):
    def find(self, doc: Document) -> Iterable[tuple[str, int, int]]:
        """Yield (surface, char_start, char_end) matches."""


class PreTaggedExtractor:
    """Pass through offsets already attached to the document by an external tagger."""

    def find(self, doc: Document) -> list[tuple[str, int, int]]:
        tags = doc.pre_tagged_keywords or ()
        out = []
        for surface, start, end in tags:
            if not (0 <= start < end <= len(doc.text)):
                raise OffsetOutOfRangeError(
                    f"{doc.doc_id}: tag ({start}, {end}) outside text of length {len(doc.text)}"
                )
            if doc.text[start:end] != surface:
                raise OffsetOutOfRangeError(
                    f"{doc.doc_id}: text at ({start}, {end}) is "
                    f"{doc.text[start:end]!r}, tag says {surface!r}"
                )
            out.append((surface, start, end))
        out.sort(key=lambda t: (t[1], t[2]))
        return out


class GazetteerExtractor:
    """Longest-match, non-overlapping scan for terms from a fixed list."""

    def __init__(self, terms: Iterable[str]):
        self.by_first: dict[str, list[str]] = {}
        for term in set(terms):
            if term:
                self.by_first.setdefault(term[0], []).append(term)
        for bucket in self.by_first.values():
            bucket.sort(key=len, reverse=True)

    def find(self, doc: Document) -> list[tuple[str, int, int]]:
        text = doc.text
        out = []
        i = 0
        n = len(text)
        while i < n:
            hit = None
            for term in self.by_first.get(text[i], ()):
                if text.startswith(term, i):
                    hit = term
                    break
            if hit is None:
                i += 1
            else:
                out.append((hit, i, i + len(hit)))
                i += len(hit)
        return out


def sentence_spans(
    text: str, terminators: frozenset[str] = DEFAULT_TERMINATORS
) -> list[tuple[int, int]]:
    """Split text into sentence spans covering it entirely.

    A sentence ends at a terminator followed by whitespace or end-of-text.
    This is deliberately crude (abbreviations split); a real segmenter can be
    slotted in upstream by pre-splitting documents.
    """
    spans = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        if text[i] in terminators and (i + 1 == n or text[i + 1].isspace()):
            spans.append((start, i + 1))
            i += 1
            while i < n and text[i].isspace():
                i += 1
            start = i
        else:
            i += 1
    if start < n:
        spans.append((start, n))
    return spans


def _enclosing_span(
    spans: Sequence[tuple[int, int]], start: int, end: int
) -> tuple[int, int]:
    """Smallest run of sentence spans covering [start, end)."""
    lo = hi = None
    for s, e in spans:
        if s <= start < e:
            lo = s
        if s < end <= e:
            hi = e
    if lo is None or hi is None:
        raise OffsetOutOfRangeError(f"offsets ({start}, {end}) not inside any sentence")
    return lo, hi


def extract_keywords(doc: Document, extractor: KeywordFinder) -> list[KeywordOccurrence]:
    """Run the extractor and attach enclosing-sentence spans, in document order."""
    if not doc.text:
        raise ValueError(f"{doc.doc_id}: document text is empty")
    spans = sentence_spans(doc.text)
    occurrences = []
    for surface, start, end in extractor.find(doc):
        occurrences.append(
            KeywordOccurrence(
                surface=surface,
                doc_id=doc.doc_id,
                char_start=start,
                char_end=end,
                sentence_span=_enclosing_span(spans, start, end),
            )
        )
    occurrences.sort(key=lambda o: (o.char_start, o.char_end))
    return occurrences


def generate_clue(
    doc: Document,
    occ: KeywordOccurrence,
    mask_token: str = DEFAULT_MASK,
    table: NormalizationTable = DEFAULT_TABLE,
    min_chars: int = DEFAULT_MIN_CLUE_CHARS,
) -> ClueRecord:
    """Mask the occurrence's sentence into a fill-in-the-blank clue.

    Every occurrence of the surface inside the sentence is masked, so the
    answer can never leak into its own clue. Raises
    :class:`SentenceTooShortError` when the remaining sentence (mask removed)
    is shorter than ``min_chars``.
    """
    start, end = occ.sentence_span
    sentence = doc.text[start:end].strip()
    if occ.surface not in sentence:
        raise OffsetOutOfRangeError(
            f"{doc.doc_id}: occurrence {occ.surface!r} not inside its sentence span"
        )
    clue_text = sentence.replace(occ.surface, mask_token)
    remainder = clue_text.replace(mask_token, "").strip()
    if len(remainder) < min_chars:
        raise SentenceTooShortError(
            f"masked sentence keeps only {len(remainder)} characters (< {min_chars})"
        )
    return ClueRecord(
        answer=normalize(occ.surface, table),
        surface=occ.surface,
        clue_text=clue_text,
        source_doc=occ.doc_id,
    )


@dataclass(frozen=True)
class PipelineStats:
    documents: int
    occurrences: int
    records: int
    clues: int
    skipped_short_clues: int
    skipped_unmappable_keywords: int


@dataclass(frozen=True)
class PipelineResult:
    records: list[dict]
    stats: PipelineStats


def build_topic_lexicon(
    corpus: Sequence[Document],
    extractor: KeywordFinder,
    table: NormalizationTable = DEFAULT_TABLE,
    mask_token: str = DEFAULT_MASK,
    min_chars: int = DEFAULT_MIN_CLUE_CHARS,
) -> PipelineResult:
    """Turn a corpus into topic lexicon records, one per distinct normalized keyword.

    Each record carries every usable clue for the keyword across the corpus,
    sorted by (doc_id, offset); duplicate clue texts collapse. Records are
    sorted by answer, so output is byte-stable across runs.
    """
    if not corpus:
        raise ValueError("corpus must be non-empty")
    per_answer: dict[str, list[tuple[str, int, str, str]]] = {}
    occurrences = 0
    skipped_short = 0
    skipped_unmappable = 0
    for doc in corpus:
        for occ in extract_keywords(doc, extractor):
            occurrences += 1
            try:
                clue = generate_clue(doc, occ, mask_token, table, min_chars)
            except SentenceTooShortError:
                skipped_short += 1
                continue
            except ValueError:
                skipped_unmappable += 1
                continue
            per_answer.setdefault(clue.answer, []).append(
                (occ.doc_id, occ.char_start, occ.surface, clue.clue_text)
            )

    records = []
    n_clues = 0
    for answer in sorted(per_answer):
        hits = sorted(per_answer[answer], key=lambda h: (h[0], h[1]))
        clues = []
        for _, _, _, clue_text in hits:
            if clue_text not in clues:
                clues.append(clue_text)
        n_clues += len(clues)
        records.append({"surface": hits[0][2], "source": "topic", "clues": clues})

    stats = PipelineStats(
        documents=len(corpus),
        occurrences=occurrences,
        records=len(records),
        clues=n_clues,
        skipped_short_clues=skipped_short,
        skipped_unmappable_keywords=skipped_unmappable,
    )
    return PipelineResult(records=records, stats=stats)


def read_corpus_jsonl(path: str | Path) -> list[Document]:
    """Read a corpus file: one {"doc_id", "text", "keywords"?} object per line."""
    docs = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{lineno}: bad JSON: {exc}") from exc
        keywords = None
        if "keywords" in doc:
            keywords = tuple((k["surface"], k["start"], k["end"]) for k in doc["keywords"])
        docs.append(
            Document(doc_id=str(doc["doc_id"]), text=doc["text"], pre_tagged_keywords=keywords)
        )
    return docs


def write_lexicon_jsonl(records: Sequence[dict]) -> str:
    """Serialize pipeline records to the lexicon JSON Lines format."""
    return "".join(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n" for r in records)
