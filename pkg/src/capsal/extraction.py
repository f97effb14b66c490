"""Noun-phrase extraction, synset mapping and sense disambiguation.

A caption is scanned for maximal runs of NOUN/PROPN tokens. Each run is
looked up in the synset tree (multiword first, backing off by dropping
the leftmost token, since English noun compounds are head-final). Senses
whose hypernym closure misses the inventory are discarded; the survivors
are reported as the deepest inventory synset on their closure. When more
than one distinct inventory synset remains, a scorer ranks masked-caption
substitutions and the argmax wins.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol

from .ingest import TaggedCaption
from .inventory import SynsetInventory
from .wordnet.tree import SynsetId, SynsetTree, sense_number

log = logging.getLogger(__name__)

NOUN_TAGS = frozenset({"NOUN", "PROPN"})
SLOT = "{SLOT}"


@dataclass(frozen=True)
class NounPhrase:
    tokens: tuple[str, ...]
    span: tuple[int, int]  # inclusive token indices

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class Candidate:
    synset: SynsetId  # the WordNet sense the phrase may denote
    inventory_synset: SynsetId  # deepest inventory synset on its closure
    representative: str  # phrase substituted during disambiguation


@dataclass(frozen=True)
class DisambiguationRequest:
    caption_text: str
    span: tuple[int, int]  # character range of the ambiguous phrase
    candidates: tuple[Candidate, ...]

    @property
    def template(self) -> str:
        start, end = self.span
        return self.caption_text[:start] + SLOT + self.caption_text[end:]


class DisambiguationScorer(Protocol):
    def score(self, request: DisambiguationRequest) -> list[float]: ...


class FirstSenseScorer:
    """Fallback scorer: prefers the lowest WordNet sense number."""

    name = "fallback"

    def score(self, request: DisambiguationRequest) -> list[float]:
        return [-float(sense_number(c.synset)) for c in request.candidates]


@dataclass
class ExtractionResult:
    caption_key: str
    mentions: list[tuple[tuple[int, int], SynsetId]]
    closure: set[SynsetId]


def extract_noun_phrases(caption: TaggedCaption) -> list[NounPhrase]:
    """Maximal runs of consecutive noun tokens, left to right."""
    phrases = []
    run_start = None
    for i, token in enumerate(caption.tokens):
        if token.upos in NOUN_TAGS:
            if run_start is None:
                run_start = i
        elif run_start is not None:
            phrases.append(_phrase(caption, run_start, i - 1))
            run_start = None
    if run_start is not None:
        phrases.append(_phrase(caption, run_start, len(caption.tokens) - 1))
    return phrases


def _phrase(caption: TaggedCaption, start: int, end: int) -> NounPhrase:
    return NounPhrase(
        tokens=tuple(t.surface for t in caption.tokens[start : end + 1]),
        span=(start, end),
    )


def representative_phrase(synset: SynsetId, overrides: dict[str, str] = None) -> str:
    if overrides and synset.lemma_key in overrides:
        return overrides[synset.lemma_key]
    lemma = synset.lemma_key.rsplit(".n.", 1)[0]
    return lemma.replace("_", " ")


def deepest_inventory_synset(
    tree: SynsetTree, inventory: SynsetInventory, sid: SynsetId
) -> Optional[SynsetId]:
    """Deepest inventory synset among the sense and its ancestors."""
    hits = ({sid} | tree.ancestors(sid)) & set(inventory.entries)
    if not hits:
        return None
    return max(hits, key=lambda s: (tree.depth(s), s.lemma_key))


def map_phrase(
    tree: SynsetTree,
    inventory: SynsetInventory,
    phrase: NounPhrase,
    overrides: dict[str, str] = None,
) -> list[Candidate]:
    """Inventory candidates for a noun phrase, in sense order.

    The full phrase is looked up first; while it is unknown, the leftmost
    token is dropped. Candidates mapping to the same inventory synset are
    collapsed onto the lowest sense.
    """
    tokens = list(phrase.tokens)
    senses: list[SynsetId] = []
    while tokens:
        senses = tree.lookup(" ".join(tokens))
        if senses:
            break
        tokens = tokens[1:]
    candidates = []
    seen_inventory = set()
    for sid in senses:
        inv = deepest_inventory_synset(tree, inventory, sid)
        if inv is None or inv in seen_inventory:
            continue
        seen_inventory.add(inv)
        candidates.append(
            Candidate(sid, inv, representative_phrase(sid, overrides))
        )
    return candidates


def resolve(request: DisambiguationRequest, scorer: DisambiguationScorer) -> Candidate:
    """Highest-scoring candidate; ties go to the lowest sense number."""
    scores = scorer.score(request)
    if len(scores) != len(request.candidates):
        raise ValueError(
            f"scorer returned {len(scores)} scores for "
            f"{len(request.candidates)} candidates"
        )
    ranked = sorted(
        zip(scores, request.candidates, range(len(scores))),
        key=lambda item: (-item[0], sense_number(item[1].synset), item[2]),
    )
    return ranked[0][1]


@dataclass
class ResilientScorer:
    """Delegates to a primary scorer, falling back on failure."""

    primary: DisambiguationScorer
    fallback: DisambiguationScorer = field(default_factory=FirstSenseScorer)
    degradations: int = 0

    def score(self, request: DisambiguationRequest) -> list[float]:
        try:
            return self.primary.score(request)
        except Exception as exc:
            self.degradations += 1
            log.warning("scorer degraded to fallback: %s", exc)
            return self.fallback.score(request)


def _char_span(caption: TaggedCaption, phrase: NounPhrase) -> tuple[int, int]:
    start_tok, end_tok = phrase.span
    prefix = " ".join(t.surface for t in caption.tokens[:start_tok])
    start = len(prefix) + 1 if prefix else 0
    length = len(" ".join(t.surface for t in caption.tokens[start_tok : end_tok + 1]))
    return start, start + length


def extract_caption(
    tree: SynsetTree,
    inventory: SynsetInventory,
    caption: TaggedCaption,
    scorer: DisambiguationScorer,
    overrides: dict[str, str] = None,
) -> ExtractionResult:
    """Resolve all noun phrases of one caption and ancestor-close them."""
    mentions = []
    closure: set[SynsetId] = set()
    inventory_ids = set(inventory.entries)
    for phrase in extract_noun_phrases(caption):
        candidates = map_phrase(tree, inventory, phrase, overrides)
        if not candidates:
            continue
        if len(candidates) == 1:
            chosen = candidates[0]
        else:
            request = DisambiguationRequest(
                caption_text=caption.text,
                span=_char_span(caption, phrase),
                candidates=tuple(candidates),
            )
            try:
                chosen = resolve(request, scorer)
            except Exception as exc:
                log.warning(
                    "phrase %r in %s skipped: %s", phrase.text, caption.caption_key, exc
                )
                continue
        mentions.append((phrase.span, chosen.inventory_synset))
        closure.add(chosen.inventory_synset)
        closure |= tree.ancestors(chosen.inventory_synset) & inventory_ids
    return ExtractionResult(caption.caption_key, mentions, closure)


def bootstrap_mappings(
    tree: SynsetTree, captions: list[TaggedCaption]
) -> list[tuple[str, SynsetId]]:
    """First-pass phrase mapping used to build instantiation counts.

    No inventory exists yet, so every known noun phrase maps to its
    first sense (fallback disambiguation) over the whole tree.
    """
    mappings = []
    for caption in captions:
        for phrase in extract_noun_phrases(caption):
            tokens = list(phrase.tokens)
            while tokens:
                senses = tree.lookup(" ".join(tokens))
                if senses:
                    mappings.append((phrase.text, senses[0]))
                    break
                tokens = tokens[1:]
    return mappings


# ------------------------------------------------------------------
# serialization

def span_str(span: tuple[int, int]) -> str:
    return f"{span[0]}:{span[1]}"


def result_to_json(result: ExtractionResult) -> str:
    obj = {
        "caption_key": result.caption_key,
        "mentions": [
            [span_str(span), sid.lemma_key] for span, sid in result.mentions
        ],
        "closure": sorted(s.lemma_key for s in result.closure),
    }
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def write_results(results: list[ExtractionResult], path):
    with open(path, "w", encoding="utf-8") as fh:
        for result in sorted(results, key=lambda r: r.caption_key):
            fh.write(result_to_json(result) + "\n")


def read_results(path, tree: SynsetTree) -> list[ExtractionResult]:
    results = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            mentions = []
            for span, key in obj["mentions"]:
                start, _, end = span.partition(":")
                mentions.append(((int(start), int(end)), tree.resolve(key)))
            results.append(
                ExtractionResult(
                    caption_key=obj["caption_key"],
                    mentions=mentions,
                    closure={tree.resolve(k) for k in obj["closure"]},
                )
            )
    return results
