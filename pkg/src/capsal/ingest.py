"""Readers for all corpus artifacts.

Formats (one record per line unless noted):

  captions.jsonl   {"image_id", "language", "text", "text_en"}
  tagged.conllu    10-column CoNLL-U; col 4 = UPOS; per-sentence comment
                   "# caption_key = <image_id>|<language>|<n>"
  presence.jsonl   {"image_id", "roots_present": [...]}
  gold.jsonl       {"caption_key", "synsets": [...]}
  meta.jsonl       {"image_id", "locale"}
  distances.csv    header row of language codes, then square matrix rows

Records violating an invariant are collected as rejects with a reason;
ingestion is lossless modulo rejects.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import DataFormatError

KEY_SEPARATOR = "|"


@dataclass(frozen=True)
class CaptionRecord:
    image_id: str
    language: str
    text: str
    text_en: str
    index: int = 0  # per (image, language) caption number, file order

    @property
    def caption_key(self) -> str:
        return KEY_SEPARATOR.join((self.image_id, self.language, str(self.index)))


@dataclass(frozen=True)
class Token:
    surface: str
    upos: str


@dataclass
class TaggedCaption:
    record: Optional[CaptionRecord]
    caption_key: str
    tokens: list[Token]

    @property
    def text(self) -> str:
        return " ".join(t.surface for t in self.tokens)


@dataclass(frozen=True)
class Reject:
    path: str
    location: str
    reason: str


@dataclass
class IngestReport:
    accepted: int = 0
    rejects: list[Reject] = field(default_factory=list)

    def reject(self, path, location, reason):
        self.rejects.append(Reject(str(path), str(location), reason))

    @property
    def total(self) -> int:
        return self.accepted + len(self.rejects)


def _jsonl_records(path, report: IngestReport):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                report.reject(path, lineno, f"invalid JSON: {exc.msg}")


def read_captions(
    path, excluded_languages: Iterable[str] = (), report: IngestReport = None
) -> tuple[list[CaptionRecord], IngestReport]:
    """Caption records in file order; per-(image, language) indices assigned."""
    report = report if report is not None else IngestReport()
    excluded = set(excluded_languages)
    seen: dict[tuple[str, str], int] = {}
    records = []
    for lineno, obj in _jsonl_records(path, report):
        missing = [k for k in ("image_id", "language", "text_en") if not obj.get(k)]
        if missing:
            report.reject(path, lineno, f"missing field(s): {', '.join(missing)}")
            continue
        language = obj["language"]
        if language in excluded:
            report.reject(path, lineno, f"language {language!r} excluded by config")
            continue
        pair = (obj["image_id"], language)
        index = seen.get(pair, 0)
        seen[pair] = index + 1
        records.append(
            CaptionRecord(
                image_id=obj["image_id"],
                language=language,
                text=obj.get("text", ""),
                text_en=obj["text_en"],
                index=index,
            )
        )
        report.accepted += 1
    return records, report


def read_conllu(path, report: IngestReport = None) -> tuple[list[TaggedCaption], IngestReport]:
    """Tagged sentences keyed by the caption_key comment line."""
    report = report if report is not None else IngestReport()
    sentences = []
    key = None
    tokens: list[Token] = []
    start_line = 1

    def flush(end_line):
        nonlocal key, tokens
        if key is None and not tokens:
            return
        if key is None:
            report.reject(path, start_line, "sentence lacks '# caption_key =' comment")
        elif not tokens:
            report.reject(path, start_line, f"empty sentence for {key}")
        else:
            sentences.append(TaggedCaption(record=None, caption_key=key, tokens=tokens))
            report.accepted += 1
        key = None
        tokens = []

    lineno = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                flush(lineno)
                start_line = lineno + 1
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("caption_key"):
                    _, _, value = body.partition("=")
                    key = value.strip()
                continue
            fields = line.split("\t")
            if len(fields) != 10:
                report.reject(path, lineno, f"expected 10 columns, got {len(fields)}")
                continue
            token_id = fields[0]
            if "-" in token_id or "." in token_id:
                continue  # multiword ranges and empty nodes carry no UPOS of their own
            tokens.append(Token(surface=fields[1], upos=fields[3]))
    flush(lineno + 1)
    return sentences, report


def attach_captions(
    sentences: list[TaggedCaption],
    records: list[CaptionRecord],
    report: IngestReport = None,
) -> tuple[list[TaggedCaption], IngestReport]:
    """Join tagged sentences to caption records by caption key.

    A sentence whose surfaces do not reproduce the English text (modulo
    whitespace) is rejected, as is a sentence without a matching record.
    """
    report = report if report is not None else IngestReport()
    by_key = {r.caption_key: r for r in records}
    joined = []
    for sent in sentences:
        record = by_key.get(sent.caption_key)
        if record is None:
            report.reject("<join>", sent.caption_key, "no caption record for key")
            continue
        squashed = "".join(t.surface for t in sent.tokens)
        if squashed != "".join(record.text_en.split()):
            report.reject(
                "<join>", sent.caption_key, "token surfaces do not match text_en"
            )
            continue
        joined.append(TaggedCaption(record, sent.caption_key, sent.tokens))
        report.accepted += 1
    return joined, report


def read_presence(
    path, known_roots: Iterable[str] = None, report: IngestReport = None
) -> tuple[dict[str, frozenset[str]], IngestReport]:
    """image_id -> set of root synset keys present in the image."""
    report = report if report is not None else IngestReport()
    known = frozenset(known_roots) if known_roots is not None else None
    presence: dict[str, frozenset[str]] = {}
    for lineno, obj in _jsonl_records(path, report):
        image_id = obj.get("image_id")
        roots = obj.get("roots_present")
        if not image_id or not isinstance(roots, list):
            report.reject(path, lineno, "need image_id and roots_present list")
            continue
        if known is not None:
            unknown = sorted(set(roots) - known)
            if unknown:
                report.reject(
                    path, lineno, f"roots not in configured set: {', '.join(unknown)}"
                )
                continue
        presence[image_id] = frozenset(roots)
        report.accepted += 1
    return presence, report


def read_gold(path, report: IngestReport = None) -> tuple[dict[str, frozenset[str]], IngestReport]:
    """caption_key -> gold synset key set."""
    report = report if report is not None else IngestReport()
    gold: dict[str, frozenset[str]] = {}
    for lineno, obj in _jsonl_records(path, report):
        key = obj.get("caption_key")
        synsets = obj.get("synsets")
        if not key or not isinstance(synsets, list):
            report.reject(path, lineno, "need caption_key and synsets list")
            continue
        gold[key] = frozenset(synsets)
        report.accepted += 1
    return gold, report


def read_image_meta(path, report: IngestReport = None) -> tuple[dict[str, str], IngestReport]:
    """image_id -> capture locale (language code)."""
    report = report if report is not None else IngestReport()
    meta: dict[str, str] = {}
    for lineno, obj in _jsonl_records(path, report):
        image_id = obj.get("image_id")
        locale = obj.get("locale")
        if not image_id or not locale:
            report.reject(path, lineno, "need image_id and locale")
            continue
        if image_id in meta:
            report.reject(path, lineno, f"duplicate image_id {image_id}")
            continue
        meta[image_id] = locale
        report.accepted += 1
    return meta, report


@dataclass
class DistanceMatrix:
    labels: list[str]
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        n = len(self.labels)
        if self.values.shape != (n, n):
            raise DataFormatError("<matrix>", 0, "label count does not match dimension")
        if np.any(self.values < 0):
            raise DataFormatError("<matrix>", 0, "negative distances")
        if not np.allclose(self.values, self.values.T, atol=1e-9):
            raise DataFormatError("<matrix>", 0, "matrix is not symmetric")
        if not np.allclose(np.diag(self.values), 0.0, atol=1e-9):
            raise DataFormatError("<matrix>", 0, "diagonal is not zero")

    def reorder(self, labels: list[str]) -> "DistanceMatrix":
        idx = [self.labels.index(l) for l in labels]
        return DistanceMatrix(list(labels), self.values[np.ix_(idx, idx)])

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.labels)
            for row in self.values:
                writer.writerow([format(v, ".12g") for v in row])


def read_distance_matrix(path) -> DistanceMatrix:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise DataFormatError(path, 0, "empty distance matrix file")
    labels = [c.strip() for c in rows[0]]
    n = len(labels)
    if len(rows) != n + 1:
        raise DataFormatError(path, 1, f"expected {n} matrix rows, got {len(rows) - 1}")
    try:
        values = np.array([[float(c) for c in row] for row in rows[1:]])
    except ValueError as exc:
        raise DataFormatError(path, 0, f"non-numeric cell: {exc}") from None
    try:
        return DistanceMatrix(labels, values)
    except DataFormatError as exc:
        raise DataFormatError(path, 0, exc.reason) from None
