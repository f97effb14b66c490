"""Presence filtering and validation against gold annotations.

Filtering drops every extracted synset whose root category was not marked
as visible in the image. Validation micro-averages precision and recall
over the caption keys that carry gold annotations; both sides are
compared as ancestor-closed synset sets, which keeps the comparison fair
across hierarchy levels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError, IntegrityError
from .extraction import ExtractionResult
from .inventory import SynsetInventory
from .wordnet.tree import SynsetId, SynsetTree

MISSING_POLICIES = ("error", "keep", "drop")


@dataclass
class FilteredResult:
    caption_key: str
    mentions: list[tuple[tuple[int, int], SynsetId]]
    closure: set[SynsetId]


def filter_result(
    result: ExtractionResult,
    presence: dict[str, frozenset[str]],
    inventory: SynsetInventory,
    tree: SynsetTree,
    missing_policy: str = "error",
) -> FilteredResult:
    """Restrict a result to synsets whose root is present in the image.

    `missing_policy` governs images without a presence annotation:
    "error" aborts, "keep" passes the result through unchanged (with the
    caller expected to warn), "drop" empties it.
    """
    if missing_policy not in MISSING_POLICIES:
        raise ConfigError(f"unknown missing-annotation policy {missing_policy!r}")
    image_id = result.caption_key.split("|", 1)[0]
    roots_present = presence.get(image_id)
    if roots_present is None:
        if missing_policy == "error":
            raise IntegrityError(
                f"no presence annotation for image {image_id!r} "
                f"(caption {result.caption_key})"
            )
        if missing_policy == "keep":
            return FilteredResult(result.caption_key, list(result.mentions), set(result.closure))
        return FilteredResult(result.caption_key, [], set())

    def root_ok(sid: SynsetId) -> bool:
        root = tree.root_of(sid, inventory.roots)
        if root is None:
            raise IntegrityError(f"{sid.lemma_key} has no root in the inventory")
        return root.lemma_key in roots_present

    mentions = [(span, sid) for span, sid in result.mentions if root_ok(sid)]
    closure = {sid for sid in result.closure if root_ok(sid)}
    return FilteredResult(result.caption_key, mentions, closure)


def filter_results(
    results: list[ExtractionResult],
    presence: dict[str, frozenset[str]],
    inventory: SynsetInventory,
    tree: SynsetTree,
    missing_policy: str = "error",
) -> list[FilteredResult]:
    return [
        filter_result(r, presence, inventory, tree, missing_policy) for r in results
    ]


@dataclass
class CaptionScore:
    caption_key: str
    true_positives: int
    predicted: int
    gold: int


@dataclass
class ValidationReport:
    true_positives: int = 0
    predicted_count: int = 0
    gold_count: int = 0
    per_caption: list[CaptionScore] = field(default_factory=list)

    @property
    def precision(self) -> float:
        return self.true_positives / self.predicted_count if self.predicted_count else 1.0

    @property
    def recall(self) -> float:
        return self.true_positives / self.gold_count if self.gold_count else 1.0

    def to_dict(self) -> dict:
        return {
            "true_positives": self.true_positives,
            "predicted_count": self.predicted_count,
            "gold_count": self.gold_count,
            "precision": self.precision,
            "recall": self.recall,
            "per_caption": [
                {
                    "caption_key": c.caption_key,
                    "true_positives": c.true_positives,
                    "predicted": c.predicted,
                    "gold": c.gold,
                }
                for c in self.per_caption
            ],
        }

    def table(self) -> str:
        lines = [
            f"{'caption':<30} {'tp':>4} {'pred':>5} {'gold':>5}",
            "-" * 47,
        ]
        for c in self.per_caption:
            lines.append(
                f"{c.caption_key:<30} {c.true_positives:>4} {c.predicted:>5} {c.gold:>5}"
            )
        lines.append("-" * 47)
        lines.append(
            f"{'total':<30} {self.true_positives:>4} {self.predicted_count:>5} "
            f"{self.gold_count:>5}"
        )
        lines.append(f"precision {self.precision:.4f}  recall {self.recall:.4f}")
        return "\n".join(lines)


def validate(
    predicted: dict[str, frozenset[str]], gold: dict[str, frozenset[str]]
) -> ValidationReport:
    """Micro-averaged precision/recall over gold-annotated captions."""
    report = ValidationReport()
    for key in sorted(gold):
        gold_set = gold[key]
        predicted_set = predicted.get(key, frozenset())
        tp = len(predicted_set & gold_set)
        report.true_positives += tp
        report.predicted_count += len(predicted_set)
        report.gold_count += len(gold_set)
        report.per_caption.append(CaptionScore(key, tp, len(predicted_set), len(gold_set)))
    return report
