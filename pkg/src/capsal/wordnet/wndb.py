"""Parser for WordNet 3.0 noun database files (`wndb` text format).

Reads `index.noun`, `data.noun` and `noun.exc`. Only the noun database is
supported; hypernym structure comes from the "@" (hypernym) and "@i"
(instance hypernym) pointers, hyponym edges are derived so both directions
are consistent by construction. Lines starting with whitespace are
copyright header lines and are skipped.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DataFormatError, IntegrityError
from .tree import Synset, SynsetId, SynsetTree, make_lemma_key

HYPERNYM_SYMBOLS = ("@", "@i")


@dataclass
class _DataLine:
    offset: int
    lemmas: list[str]
    hypernym_offsets: list[int]
    gloss: str


def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip() or raw[0].isspace():
                continue
            yield lineno, raw.rstrip("\n")


def _parse_data_line(path, lineno, line) -> _DataLine:
    head, sep, gloss = line.partition(" | ")
    fields = head.split()
    try:
        offset = int(fields[0])
        ss_type = fields[2]
        if ss_type != "n":
            raise ValueError(f"unexpected ss_type {ss_type!r}")
        w_cnt = int(fields[3], 16)
        pos = 4
        lemmas = []
        for _ in range(w_cnt):
            lemmas.append(fields[pos])
            pos += 2  # skip lex_id
        p_cnt = int(fields[pos])
        pos += 1
        hypernyms = []
        for _ in range(p_cnt):
            symbol, target, target_pos = fields[pos], fields[pos + 1], fields[pos + 2]
            pos += 4  # symbol, offset, pos, source/target
            if symbol in HYPERNYM_SYMBOLS and target_pos == "n":
                hypernyms.append(int(target))
        if not lemmas:
            raise ValueError("no words")
    except (IndexError, ValueError) as exc:
        raise DataFormatError(path, lineno, f"malformed data line: {exc}") from None
    return _DataLine(offset, lemmas, hypernyms, gloss.strip())


def _parse_index_line(path, lineno, line) -> tuple[str, list[int]]:
    fields = line.split()
    try:
        lemma = fields[0]
        if fields[1] != "n":
            raise ValueError(f"unexpected pos {fields[1]!r}")
        synset_cnt = int(fields[2])
        p_cnt = int(fields[3])
        rest = fields[4 + p_cnt :]
        offsets = [int(x) for x in rest[2 : 2 + synset_cnt]]
        if len(offsets) != synset_cnt:
            raise ValueError("synset count does not match offsets")
    except (IndexError, ValueError) as exc:
        raise DataFormatError(path, lineno, f"malformed index line: {exc}") from None
    return lemma, offsets


def _parse_exceptions(path) -> dict[str, tuple[str, ...]]:
    exceptions: dict[str, tuple[str, ...]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip() or raw[0].isspace():
                continue
            fields = raw.split()
            if len(fields) < 2:
                raise DataFormatError(path, lineno, "exception line needs >= 2 fields")
            # a line may list several base forms; all are tried in order
            exceptions[fields[0]] = tuple(fields[1:])
    return exceptions


def parse_wordnet(index_file, data_file, exceptions_file) -> SynsetTree:
    """Build a SynsetTree from WordNet 3.0 noun database files."""
    staged: dict[int, _DataLine] = {}
    for lineno, line in _data_lines(data_file):
        entry = _parse_data_line(data_file, lineno, line)
        if entry.offset in staged:
            raise DataFormatError(
                data_file, lineno, f"duplicate synset offset {entry.offset:08d}"
            )
        staged[entry.offset] = entry

    index: dict[str, list[int]] = {}
    for lineno, line in _data_lines(index_file):
        lemma, offsets = _parse_index_line(index_file, lineno, line)
        for off in offsets:
            if off not in staged:
                raise IntegrityError(
                    f"{index_file}: lemma {lemma!r} references missing offset {off:08d}"
                )
        index[lemma] = offsets

    # lemma keys: first lemma plus its 1-based position in the index entry
    ids: dict[int, SynsetId] = {}
    for offset, entry in staged.items():
        first = entry.lemmas[0].lower()
        senses = index.get(first)
        if senses is None or offset not in senses:
            raise IntegrityError(
                f"synset {offset:08d} first lemma {first!r} missing from index"
            )
        ids[offset] = SynsetId(make_lemma_key(first, senses.index(offset) + 1), offset)

    synsets: dict[SynsetId, Synset] = {}
    for offset, entry in staged.items():
        for hop in entry.hypernym_offsets:
            if hop not in staged:
                raise IntegrityError(
                    f"synset {offset:08d} has dangling hypernym offset {hop:08d}"
                )
        synsets[ids[offset]] = Synset(
            id=ids[offset],
            lemmas=list(entry.lemmas),
            gloss=entry.gloss,
            hypernyms=[ids[h] for h in entry.hypernym_offsets],
        )
    for sid, syn in synsets.items():
        for hyp in syn.hypernyms:
            synsets[hyp].hyponyms.append(sid)

    lemma_index = {
        lemma.lower(): [ids[off] for off in offsets]
        for lemma, offsets in index.items()
    }
    exceptions = _parse_exceptions(exceptions_file)

    tree = SynsetTree(synsets, lemma_index, exceptions)
    tree.check_acyclic()
    return tree
