"""Preprocessed per-person page corpus: linked entities and mention queries.

The corpus file carries precomputed page links and text so runs are
reproducible and offline; no live wiki access happens here.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache

from .embeddings import normalize_key
from .errors import DuplicatePersonError, MalformedRecordError

ABSTRACT = "abstract"
FULL_PAGE = "full_page"


@dataclass(frozen=True)
class PageRecord:
    """One person's page: linked entities in document order, plus text."""

    person: str
    linked_entities: tuple[str, ...]
    abstract_text: str = ""
    page_text: str = ""


@dataclass(frozen=True)
class Corpus:
    """Immutable map from normalized person key to PageRecord."""

    records: dict[str, PageRecord] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    def get(self, person: str) -> PageRecord | None:
        return self.records.get(normalize_key(person))


def load_corpus(path) -> Corpus:
    """Load a line-delimited JSON corpus.

    Each line is an object with fields "person" (string), "entities"
    (array of strings, document order), "abstract" and "page" (strings).
    """
    records: dict[str, PageRecord] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecordError(path, line_no, f"invalid JSON: {exc.msg}") from None
            if not isinstance(obj, dict):
                raise MalformedRecordError(path, line_no, "record must be a JSON object")
            try:
                person = obj["person"]
                entities = obj["entities"]
                abstract = obj["abstract"]
                page = obj["page"]
            except KeyError as exc:
                raise MalformedRecordError(path, line_no, f"missing field {exc.args[0]!r}") from None
            if not isinstance(person, str) or not person.strip():
                raise MalformedRecordError(path, line_no, "'person' must be a non-empty string")
            if not isinstance(entities, list) or any(not isinstance(e, str) for e in entities):
                raise MalformedRecordError(path, line_no, "'entities' must be an array of strings")
            if not isinstance(abstract, str) or not isinstance(page, str):
                raise MalformedRecordError(path, line_no, "'abstract' and 'page' must be strings")
            key = normalize_key(person)
            if key in records:
                raise DuplicatePersonError(key, path)
            records[key] = PageRecord(
                person=key,
                linked_entities=tuple(entities),
                abstract_text=abstract,
                page_text=page,
            )
    return Corpus(records)


def surface_form(key: str) -> str:
    """Matching form of an object name: underscores become spaces."""
    return normalize_key(key).replace("_", " ")


@lru_cache(maxsize=4096)
def _phrase_pattern(phrase: str) -> re.Pattern:
    # Letters/digits are word characters; anything else is a boundary, so
    # "art" does not match inside "Artemis". Whitespace in the phrase
    # matches any whitespace run.
    body = r"\s+".join(re.escape(tok) for tok in phrase.split())
    return re.compile(rf"(?<![^\W_]){body}(?![^\W_])", re.IGNORECASE | re.UNICODE)


def mentions(record: PageRecord, obj: str, scope: str = FULL_PAGE) -> bool:
    """Whether the object's surface form occurs in the chosen text scope.

    Case-insensitive whole-phrase match, token-boundary delimited.
    """
    if scope == ABSTRACT:
        text = record.abstract_text
    elif scope == FULL_PAGE:
        text = record.page_text
    else:
        raise ValueError(f"scope must be {ABSTRACT!r} or {FULL_PAGE!r}, got {scope!r}")
    phrase = surface_form(obj)
    if not phrase:
        return False
    return _phrase_pattern(phrase).search(text) is not None


def first_mentioned(record: PageRecord, candidates: list[str]) -> str | None:
    """Candidate whose earliest abstract occurrence starts first, or None.

    Offset ties go to the longer match, then to the lexicographically
    smaller normalized key, so the result is deterministic.
    """
    if not candidates:
        raise ValueError("candidates must be non-empty")
    best = None  # (start, -match_len, key)
    best_key = None
    for cand in candidates:
        phrase = surface_form(cand)
        if not phrase:
            continue
        m = _phrase_pattern(phrase).search(record.abstract_text)
        if m is None:
            continue
        key = normalize_key(cand)
        rank = (m.start(), -(m.end() - m.start()), key)
        if best is None or rank < best:
            best = rank
            best_key = key
    return best_key
