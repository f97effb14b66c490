"""Selection of the root / explicit / implicit synset inventory.

Roots come from an external whitelist of visually identifiable categories;
explicit synsets are root descendants with enough directly mapped noun
phrases; implicit synsets complete the paths between the two.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import DataFormatError, IntegrityError
from .wordnet.tree import SynsetId, SynsetTree


class SynsetRole(enum.Enum):
    ROOT = "root"
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"


@dataclass(frozen=True)
class Thresholds:
    root_min_count: int = 100
    explicit_min_count: int = 100


@dataclass
class InstantiationCounts:
    """Phrase-mapping tallies: direct hits and hypernym-closure subtree hits."""

    direct: Counter = field(default_factory=Counter)
    subtree: Counter = field(default_factory=Counter)


def count_instantiations(
    tree: SynsetTree, phrase_mappings: Iterable[tuple[str, SynsetId]]
) -> InstantiationCounts:
    """Tally resolved phrase mappings onto synsets and all their ancestors."""
    counts = InstantiationCounts()
    for _phrase, sid in phrase_mappings:
        sid = tree.resolve(sid)
        counts.direct[sid] += 1
        counts.subtree[sid] += 1
        for ancestor in tree.ancestors(sid):
            counts.subtree[ancestor] += 1
    return counts


@dataclass
class SynsetInventory:
    entries: dict[SynsetId, SynsetRole]
    roots: frozenset[SynsetId]
    thresholds: Thresholds

    def __contains__(self, sid: SynsetId) -> bool:
        return sid in self.entries

    def __len__(self):
        return len(self.entries)

    def with_role(self, role: SynsetRole) -> set[SynsetId]:
        return {sid for sid, r in self.entries.items() if r is role}

    def root_map(self, tree: SynsetTree) -> dict[SynsetId, SynsetId]:
        """Entity -> unique root assignment for every inventory entry."""
        return {sid: tree.root_of(sid, self.roots) for sid in self.entries}

    def save(self, path):
        rows = sorted(
            (sid.lemma_key, role.value) for sid, role in self.entries.items()
        )
        with open(path, "w", encoding="utf-8") as fh:
            for key, role in rows:
                fh.write(f"{key}\t{role}\n")

    @classmethod
    def load(cls, path, tree: SynsetTree, thresholds: Thresholds = None) -> "SynsetInventory":
        entries: dict[SynsetId, SynsetRole] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                fields = line.split("\t")
                if len(fields) != 2:
                    raise DataFormatError(path, lineno, "expected 'synset<TAB>role'")
                key, role = fields
                try:
                    entries[tree.resolve(key)] = SynsetRole(role)
                except ValueError:
                    raise DataFormatError(path, lineno, f"unknown role {role!r}") from None
        roots = frozenset(s for s, r in entries.items() if r is SynsetRole.ROOT)
        return cls(entries, roots, thresholds or Thresholds())


def read_root_candidates(path, tree: SynsetTree = None) -> list[str]:
    """Root whitelist: one synset key per line, '#' comments.

    Keys absent from `tree` (when given) raise, since a missing candidate
    is a configuration error rather than data noise.
    """
    out = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            out.append(line)
    if tree is not None:
        missing = [key for key in out if key not in tree]
        if missing:
            raise IntegrityError(f"root candidates not in tree: {', '.join(missing)}")
    return out


def select_inventory(
    tree: SynsetTree,
    counts: InstantiationCounts,
    root_candidates: Iterable[str],
    thresholds: Thresholds = Thresholds(),
) -> SynsetInventory:
    """Pick roots, explicit descendants and path-closing implicit synsets."""
    candidates = [tree.resolve(c) for c in root_candidates]
    qualifying = {
        c for c in candidates if counts.subtree.get(c, 0) >= thresholds.root_min_count
    }
    roots = {
        c
        for c in qualifying
        if not any(q in tree.ancestors(c) for q in qualifying if q != c)
    }

    entries: dict[SynsetId, SynsetRole] = {r: SynsetRole.ROOT for r in roots}
    explicit = []
    for sid, n in counts.direct.items():
        if n < thresholds.explicit_min_count or sid in roots:
            continue
        root = tree.root_of(sid, roots)
        if root is None:
            continue
        entries[sid] = SynsetRole.EXPLICIT
        explicit.append((sid, root))

    for sid, root in explicit:
        for node in tree.path_to_ancestor(sid, root):
            if node not in entries:
                entries[node] = SynsetRole.IMPLICIT

    return SynsetInventory(entries, frozenset(roots), thresholds)
