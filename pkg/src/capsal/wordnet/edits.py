"""Declarative ontology edits: remove / unify / relocate synsets.

Edit scripts are plain text, one edit per line, applied top to bottom:

    # comment
    remove snake.n.02
    unify food.n.02 food.n.01
    relocate couple.n.01 person.n.01
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from ..errors import DataFormatError, IntegrityError
from .tree import SynsetId, SynsetTree


class EditKind(enum.Enum):
    REMOVE_SENSE = "remove"
    UNIFY = "unify"
    RELOCATE = "relocate"


@dataclass(frozen=True)
class OntologyEdit:
    kind: EditKind
    subject: str
    target: Optional[str] = None

    def __str__(self):
        if self.target is None:
            return f"{self.kind.value} {self.subject}"
        return f"{self.kind.value} {self.subject} {self.target}"


_ARITY = {EditKind.REMOVE_SENSE: 1, EditKind.UNIFY: 2, EditKind.RELOCATE: 2}


def parse_edit_script(path) -> list[OntologyEdit]:
    edits = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            try:
                kind = EditKind(fields[0])
            except ValueError:
                raise DataFormatError(path, lineno, f"unknown edit {fields[0]!r}") from None
            if len(fields) != _ARITY[kind] + 1:
                raise DataFormatError(
                    path, lineno, f"{kind.value} takes {_ARITY[kind]} synset argument(s)"
                )
            edits.append(
                OntologyEdit(kind, fields[1], fields[2] if len(fields) > 2 else None)
            )
    return edits


def _unlink_from_hypernyms(tree: SynsetTree, sid: SynsetId):
    for hyp in tree.synsets[sid].hypernyms:
        tree.synsets[hyp].hyponyms.remove(sid)


def _remove_sense(tree: SynsetTree, sid: SynsetId):
    syn = tree.synsets[sid]
    # reattach orphaned hyponyms to the removed synset's hypernyms
    for hypo in list(syn.hyponyms):
        child = tree.synsets[hypo]
        child.hypernyms.remove(sid)
        for hyp in syn.hypernyms:
            if hyp not in child.hypernyms:
                child.hypernyms.append(hyp)
                tree.synsets[hyp].hyponyms.append(hypo)
    _unlink_from_hypernyms(tree, sid)
    _drop_index_entries(tree, sid)
    del tree.synsets[sid]
    del tree._by_key[sid.lemma_key]
    del tree._by_offset[sid.offset]


def _drop_index_entries(tree: SynsetTree, sid: SynsetId, replacement: SynsetId = None):
    for form in [lemma.lower() for lemma in tree.synsets[sid].lemmas]:
        sids = tree.lemma_index.get(form)
        if sids is None or sid not in sids:
            continue
        if replacement is not None and replacement not in sids:
            sids[sids.index(sid)] = replacement
        else:
            sids.remove(sid)
        if not sids:
            del tree.lemma_index[form]


def _unify(tree: SynsetTree, sid: SynsetId, target: SynsetId):
    syn = tree.synsets[sid]
    tgt = tree.synsets[target]
    for hypo in list(syn.hyponyms):
        child = tree.synsets[hypo]
        child.hypernyms[child.hypernyms.index(sid)] = target
        tgt.hyponyms.append(hypo)
    _unlink_from_hypernyms(tree, sid)
    _drop_index_entries(tree, sid, replacement=target)
    for lemma in syn.lemmas:
        if lemma not in tgt.lemmas:
            tgt.lemmas.append(lemma)
    del tree.synsets[sid]
    del tree._by_key[sid.lemma_key]
    del tree._by_offset[sid.offset]


def _relocate(tree: SynsetTree, sid: SynsetId, target: SynsetId):
    _unlink_from_hypernyms(tree, sid)
    tree.synsets[sid].hypernyms = [target]
    tree.synsets[target].hyponyms.append(sid)


def apply_edits(tree: SynsetTree, edits: list[OntologyEdit]) -> SynsetTree:
    """Apply edits in order, rejecting any edit that breaks the tree.

    The tree is modified in place and returned; treat it as immutable
    afterwards.
    """
    for edit in edits:
        if edit.subject not in tree:
            raise IntegrityError(f"edit '{edit}': missing subject {edit.subject}")
        subject = tree.resolve(edit.subject)
        target = None
        if edit.target is not None:
            if edit.target not in tree:
                raise IntegrityError(f"edit '{edit}': missing target {edit.target}")
            target = tree.resolve(edit.target)
            if target == subject:
                raise IntegrityError(f"edit '{edit}': subject equals target")
            if tree.is_descendant(target, subject):
                raise IntegrityError(f"edit '{edit}' would create a hypernym cycle")

        if edit.kind is EditKind.REMOVE_SENSE:
            if edit.target is not None:
                raise IntegrityError(f"edit '{edit}': remove takes no target")
            _remove_sense(tree, subject)
        elif edit.kind is EditKind.UNIFY:
            _unify(tree, subject, target)
        elif edit.kind is EditKind.RELOCATE:
            _relocate(tree, subject, target)
        tree.invalidate_caches()
        try:
            tree.check_acyclic()
        except IntegrityError:
            raise IntegrityError(f"edit '{edit}' creates a hypernym cycle") from None
    return tree
