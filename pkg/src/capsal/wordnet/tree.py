"""In-memory noun synset tree with taxonomy queries and lemma lookup.

The tree is built once (from WordNet database files or a serialized
artifact), optionally edited, and then treated as read-only. All query
caches are invalidated by structural mutation, so concurrent readers are
safe only after editing has finished.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Union

from ..errors import IntegrityError

TREE_FORMAT = "capsal-tree/1"

# WordNet noun detachment rules, tried in order (suffix, replacement).
NOUN_DETACHMENTS = (
    ("s", ""),
    ("ses", "s"),
    ("xes", "x"),
    ("zes", "z"),
    ("ches", "ch"),
    ("shes", "sh"),
    ("men", "man"),
    ("ies", "y"),
)


class SynsetId(NamedTuple):
    """Identifier of a noun synset: 'lemma.n.NN' key plus database offset."""

    lemma_key: str
    offset: int

    def __str__(self):
        return self.lemma_key


@dataclass
class Synset:
    id: SynsetId
    lemmas: list[str]
    gloss: str
    hypernyms: list[SynsetId] = field(default_factory=list)
    hyponyms: list[SynsetId] = field(default_factory=list)


SynsetRef = Union[SynsetId, str]


def make_lemma_key(lemma: str, sense_number: int) -> str:
    return f"{lemma.lower()}.n.{sense_number:02d}"


def sense_number(ref: SynsetRef) -> int:
    """Sense number encoded in a 'lemma.n.NN' key."""
    key = ref.lemma_key if isinstance(ref, SynsetId) else ref
    return int(key.rsplit(".", 1)[1])


def normalize_phrase(phrase: str) -> str:
    """Lowercase and join words with underscores for index lookup."""
    return "_".join(phrase.lower().split())


class SynsetTree:
    """Noun synsets keyed by id, with a lemma index and exception map.

    ``lemma_index`` preserves WordNet sense order; ``exceptions`` maps
    irregular inflections to their base forms (noun.exc). Hypernym and
    hyponym edges are kept mutually consistent at all times.
    """

    def __init__(
        self,
        synsets: dict[SynsetId, Synset],
        lemma_index: dict[str, list[SynsetId]],
        exceptions: dict[str, tuple[str, ...]],
    ):
        self.synsets = synsets
        self.lemma_index = lemma_index
        self.exceptions = exceptions
        self._by_key = {sid.lemma_key: sid for sid in synsets}
        self._by_offset = {sid.offset: sid for sid in synsets}
        self._depth_cache: dict[SynsetId, int] = {}
        self._ancestor_cache: dict[SynsetId, frozenset[SynsetId]] = {}

    def __len__(self):
        return len(self.synsets)

    def __contains__(self, ref: SynsetRef) -> bool:
        if isinstance(ref, SynsetId):
            return ref in self.synsets
        return ref in self._by_key

    def invalidate_caches(self):
        self._depth_cache.clear()
        self._ancestor_cache.clear()

    def resolve(self, ref: SynsetRef) -> SynsetId:
        """Resolve a lemma key or SynsetId to the tree's SynsetId."""
        if isinstance(ref, SynsetId):
            if ref not in self.synsets:
                raise IntegrityError(f"synset not in tree: {ref.lemma_key}")
            return ref
        try:
            return self._by_key[ref]
        except KeyError:
            raise IntegrityError(f"synset not in tree: {ref}") from None

    def get(self, ref: SynsetRef) -> Synset:
        return self.synsets[self.resolve(ref)]

    def by_offset(self, offset: int) -> SynsetId:
        try:
            return self._by_offset[offset]
        except KeyError:
            raise IntegrityError(f"no synset at offset {offset:08d}") from None

    # ------------------------------------------------------------------
    # lemma lookup

    def _morph_forms(self, form: str) -> list[str]:
        """Candidate base forms: exact, exception bases, detachments."""
        forms = []
        if form in self.lemma_index:
            forms.append(form)
        for base in self.exceptions.get(form, ()):
            if base in self.lemma_index and base not in forms:
                forms.append(base)
        for suffix, repl in NOUN_DETACHMENTS:
            if form.endswith(suffix) and len(form) > len(suffix):
                candidate = form[: -len(suffix)] + repl
                if candidate in self.lemma_index and candidate not in forms:
                    forms.append(candidate)
        return forms

    def lookup(self, phrase: str) -> list[SynsetId]:
        """All synsets a phrase may denote, in WordNet sense order.

        Unknown phrases yield an empty list; never raises.
        """
        norm = normalize_phrase(phrase)
        if not norm:
            return []
        out: list[SynsetId] = []
        for form in self._morph_forms(norm):
            for sid in self.lemma_index[form]:
                if sid not in out:
                    out.append(sid)
        return out

    # ------------------------------------------------------------------
    # taxonomy queries

    def canonical_hypernym(self, ref: SynsetRef) -> Optional[SynsetId]:
        """First-listed hypernym; the edge used for depth and paths."""
        syn = self.get(ref)
        return syn.hypernyms[0] if syn.hypernyms else None

    def depth(self, ref: SynsetRef) -> int:
        """Edge count from the top node along the canonical chain."""
        sid = self.resolve(ref)
        chain = []
        cur: Optional[SynsetId] = sid
        while cur is not None and cur not in self._depth_cache:
            if cur in chain:
                raise IntegrityError(f"hypernym cycle at {cur.lemma_key}")
            chain.append(cur)
            cur = self.canonical_hypernym(cur)
        base = self._depth_cache[cur] if cur is not None else -1
        for node in reversed(chain):
            base += 1
            self._depth_cache[node] = base
        return self._depth_cache[sid]

    def hypernym_path(self, ref: SynsetRef) -> list[SynsetId]:
        """Canonical chain from the top node down to the synset."""
        sid = self.resolve(ref)
        path = [sid]
        seen = {sid}
        cur = self.canonical_hypernym(sid)
        while cur is not None:
            if cur in seen:
                raise IntegrityError(f"hypernym cycle at {cur.lemma_key}")
            path.append(cur)
            seen.add(cur)
            cur = self.canonical_hypernym(cur)
        path.reverse()
        return path

    def ancestors(self, ref: SynsetRef) -> frozenset[SynsetId]:
        """All strict ancestors over every hypernym edge (the closure)."""
        sid = self.resolve(ref)
        cached = self._ancestor_cache.get(sid)
        if cached is not None:
            return cached
        out: set[SynsetId] = set()
        stack = list(self.synsets[sid].hypernyms)
        while stack:
            cur = stack.pop()
            if cur in out:
                continue
            out.add(cur)
            cached = self._ancestor_cache.get(cur)
            if cached is not None:
                out.update(cached)
            else:
                stack.extend(self.synsets[cur].hypernyms)
        result = frozenset(out)
        self._ancestor_cache[sid] = result
        return result

    def is_descendant(self, ref: SynsetRef, ancestor: SynsetRef) -> bool:
        return self.resolve(ancestor) in self.ancestors(ref)

    def root_of(
        self, ref: SynsetRef, roots: Iterable[SynsetRef]
    ) -> Optional[SynsetId]:
        """The unique configured root on the closure (self included).

        Returns None when no root is reachable; raises IntegrityError when
        two distinct roots are reachable (an ontology edit must
        disambiguate).
        """
        sid = self.resolve(ref)
        root_ids = {self.resolve(r) for r in roots}
        hits = ({sid} | self.ancestors(sid)) & root_ids
        if not hits:
            return None
        if len(hits) > 1:
            names = ", ".join(sorted(h.lemma_key for h in hits))
            raise IntegrityError(
                f"{sid.lemma_key} reaches multiple roots: {names}"
            )
        return next(iter(hits))

    def path_to_ancestor(self, ref: SynsetRef, ancestor: SynsetRef) -> list[SynsetId]:
        """Deterministic path from `ancestor` down to the synset.

        At each step upward the first-listed hypernym that still reaches
        `ancestor` is taken; on single-hypernym chains this is the
        canonical path.
        """
        sid = self.resolve(ref)
        top = self.resolve(ancestor)
        path = [sid]
        cur = sid
        while cur != top:
            nxt = None
            for hyp in self.synsets[cur].hypernyms:
                if hyp == top or top in self.ancestors(hyp):
                    nxt = hyp
                    break
            if nxt is None:
                raise IntegrityError(
                    f"{top.lemma_key} is not an ancestor of {sid.lemma_key}"
                )
            path.append(nxt)
            cur = nxt
        path.reverse()
        return path

    def check_acyclic(self):
        """Depth-first check over hypernym edges; raises on a cycle."""
        WHITE, GRAY, BLACK = 0, 1, 2
        color = dict.fromkeys(self.synsets, WHITE)
        for start in self.synsets:
            if color[start] != WHITE:
                continue
            stack = [(start, iter(self.synsets[start].hypernyms))]
            color[start] = GRAY
            while stack:
                node, edges = stack[-1]
                advanced = False
                for nxt in edges:
                    if color[nxt] == GRAY:
                        raise IntegrityError(
                            f"hypernym cycle through {nxt.lemma_key}"
                        )
                    if color[nxt] == WHITE:
                        color[nxt] = GRAY
                        stack.append((nxt, iter(self.synsets[nxt].hypernyms)))
                        advanced = True
                        break
                if not advanced:
                    color[node] = BLACK
                    stack.pop()

    def check_consistent(self):
        """Verify hypernym/hyponym edges mirror each other."""
        for sid, syn in self.synsets.items():
            for hyp in syn.hypernyms:
                if hyp not in self.synsets:
                    raise IntegrityError(
                        f"dangling hypernym {hyp.lemma_key} on {sid.lemma_key}"
                    )
                if sid not in self.synsets[hyp].hyponyms:
                    raise IntegrityError(
                        f"missing hyponym backlink {hyp.lemma_key} -> {sid.lemma_key}"
                    )
            for hypo in syn.hyponyms:
                if hypo not in self.synsets:
                    raise IntegrityError(
                        f"dangling hyponym {hypo.lemma_key} on {sid.lemma_key}"
                    )
                if sid not in self.synsets[hypo].hypernyms:
                    raise IntegrityError(
                        f"missing hypernym backlink {hypo.lemma_key} -> {sid.lemma_key}"
                    )
        for form, sids in self.lemma_index.items():
            for sid in sids:
                if sid not in self.synsets:
                    raise IntegrityError(
                        f"lemma index entry {form!r} references missing {sid.lemma_key}"
                    )

    # ------------------------------------------------------------------
    # serialization

    def save(self, path):
        payload = {
            "format": TREE_FORMAT,
            "synsets": [
                {
                    "key": sid.lemma_key,
                    "offset": sid.offset,
                    "lemmas": syn.lemmas,
                    "gloss": syn.gloss,
                    "hypernyms": [h.lemma_key for h in syn.hypernyms],
                }
                for sid, syn in sorted(self.synsets.items(), key=lambda kv: kv[0].offset)
            ],
            "lemma_index": {
                form: [s.lemma_key for s in sids]
                for form, sids in sorted(self.lemma_index.items())
            },
            "exceptions": {
                form: list(bases) for form, bases in sorted(self.exceptions.items())
            },
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "SynsetTree":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("format") != TREE_FORMAT:
            raise IntegrityError(f"{path}: unknown tree format {payload.get('format')!r}")
        ids = {
            entry["key"]: SynsetId(entry["key"], entry["offset"])
            for entry in payload["synsets"]
        }
        synsets: dict[SynsetId, Synset] = {}
        for entry in payload["synsets"]:
            sid = ids[entry["key"]]
            synsets[sid] = Synset(
                id=sid,
                lemmas=list(entry["lemmas"]),
                gloss=entry["gloss"],
                hypernyms=[ids[k] for k in entry["hypernyms"]],
            )
        for sid, syn in synsets.items():
            for hyp in syn.hypernyms:
                synsets[hyp].hyponyms.append(sid)
        lemma_index = {
            form: [ids[k] for k in keys]
            for form, keys in payload["lemma_index"].items()
        }
        exceptions = {
            form: tuple(bases) for form, bases in payload["exceptions"].items()
        }
        tree = cls(synsets, lemma_index, exceptions)
        tree.check_consistent()
        return tree
