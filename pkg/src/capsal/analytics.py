"""Saliency tensor construction and the downstream corpus analyses:
language distances, global saliency, pairwise language comparisons,
granularity histograms and entity counts.

Cells of the saliency tensor are caption fractions, so every value is a
rational with the per-(language, image) caption count as denominator.
(language, image) slices without captions are absent, never zero.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import DataError, IntegrityError
from .filtering import FilteredResult
from .ingest import KEY_SEPARATOR, CaptionRecord, DistanceMatrix
from .statkit import (
    MantelResult,
    PearsonResult,
    bonferroni,
    mantel,
    pearson_test,
    wilcoxon_signed_rank,
)

DEPTH_BAND = (5, 10)


@dataclass
class CaptionIndex:
    """Caption counts per (language, image), built from caption records."""

    languages: list[str]
    images: list[str]
    counts: np.ndarray  # (L, I) int

    @classmethod
    def from_records(cls, records: Iterable[CaptionRecord]) -> "CaptionIndex":
        tally: Counter = Counter()
        for record in records:
            tally[(record.language, record.image_id)] += 1
        languages = sorted({lang for lang, _ in tally})
        images = sorted({img for _, img in tally})
        counts = np.zeros((len(languages), len(images)), dtype=int)
        lang_idx = {l: i for i, l in enumerate(languages)}
        image_idx = {im: i for i, im in enumerate(images)}
        for (lang, img), n in tally.items():
            counts[lang_idx[lang], image_idx[img]] = n
        return cls(languages, images, counts)


def split_caption_key(key: str) -> tuple[str, str, int]:
    image_id, language, index = key.split(KEY_SEPARATOR)
    return image_id, language, int(index)


@dataclass
class SaliencyTensor:
    languages: list[str]
    entities: list[str]
    images: list[str]
    values: np.ndarray  # (L, O, I) float
    counts: np.ndarray  # (L, I) caption counts; 0 marks an absent slice

    def __post_init__(self):
        self._lang = {l: i for i, l in enumerate(self.languages)}
        self._entity = {e: i for i, e in enumerate(self.entities)}
        self._image = {im: i for i, im in enumerate(self.images)}

    def language_index(self, language: str) -> int:
        try:
            return self._lang[language]
        except KeyError:
            raise DataError(f"unknown language {language!r}") from None

    def present(self) -> np.ndarray:
        return self.counts > 0


def build_tensor(
    filtered: Iterable[FilteredResult],
    entities: Iterable[str],
    caption_index: CaptionIndex,
) -> SaliencyTensor:
    """Fraction of captions per (language, entity, image) mentioning the
    entity (ancestors included via the closure)."""
    languages = caption_index.languages
    images = caption_index.images
    entities = sorted(entities)
    lang_idx = {l: i for i, l in enumerate(languages)}
    image_idx = {im: i for i, im in enumerate(images)}
    entity_idx = {e: i for i, e in enumerate(entities)}

    hits = np.zeros((len(languages), len(entities), len(images)), dtype=int)
    for result in filtered:
        image_id, language, _ = split_caption_key(result.caption_key)
        li = lang_idx.get(language)
        ii = image_idx.get(image_id)
        if li is None or ii is None:
            raise DataError(
                f"filtered result {result.caption_key} references unknown caption"
            )
        for sid in result.closure:
            oi = entity_idx.get(sid.lemma_key)
            if oi is None:
                raise IntegrityError(
                    f"{sid.lemma_key} not among the tensor entities"
                )
            hits[li, oi, ii] += 1

    counts = caption_index.counts
    if np.any(hits > counts[:, None, :]):
        raise IntegrityError("entity mentioned more often than captions exist")
    values = np.zeros(hits.shape, dtype=float)
    np.divide(hits, counts[:, None, :], out=values, where=counts[:, None, :] > 0)
    return SaliencyTensor(languages, entities, images, values, counts.copy())


# ------------------------------------------------------------------
# language distances

def saliency_distance(tensor: SaliencyTensor, lang_a: str, lang_b: str) -> float:
    """Euclidean distance over (entity, image) cells present in both."""
    a = tensor.language_index(lang_a)
    b = tensor.language_index(lang_b)
    common = (tensor.counts[a] > 0) & (tensor.counts[b] > 0)
    diff = tensor.values[a][:, common] - tensor.values[b][:, common]
    return float(np.sqrt(np.sum(diff * diff)))


def saliency_distance_matrix(tensor: SaliencyTensor) -> DistanceMatrix:
    n = len(tensor.languages)
    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = saliency_distance(tensor, tensor.languages[i], tensor.languages[j])
            values[i, j] = values[j, i] = d
    return DistanceMatrix(list(tensor.languages), values)


def correlate_typology(
    saliency_dm: DistanceMatrix,
    typology_dm: DistanceMatrix,
    permutations: int,
    seed: int,
) -> tuple[MantelResult, list[str], list[str]]:
    """Mantel test over the languages shared by both matrices.

    Returns the result, the common labels used, and the labels dropped
    from either side.
    """
    common = [l for l in saliency_dm.labels if l in typology_dm.labels]
    dropped = sorted(
        (set(saliency_dm.labels) | set(typology_dm.labels)) - set(common)
    )
    if len(common) < 3:
        raise DataError(
            f"only {len(common)} languages shared by the distance matrices"
        )
    result = mantel(
        saliency_dm.reorder(common),
        typology_dm.reorder(common),
        permutations=permutations,
        seed=seed,
    )
    return result, common, dropped


# ------------------------------------------------------------------
# global saliency

@dataclass
class GlobalSaliency:
    languages: list[str]
    entities: list[str]
    values: np.ndarray  # (L, O) mean saliency over I_o
    present: np.ndarray  # (L, O) bool: any I_o image captioned in l
    n_cells: np.ndarray  # (L, O) number of (image) cells averaged


def image_sets(
    entities: Iterable[str],
    root_map: dict[str, str],
    presence: dict[str, frozenset[str]],
    images: list[str],
) -> dict[str, np.ndarray]:
    """Boolean image masks I_o: where each entity's root is present."""
    masks = {}
    image_pos = {im: i for i, im in enumerate(images)}
    for entity in entities:
        root = root_map.get(entity)
        if root is None:
            raise IntegrityError(f"no root assignment for {entity}")
        mask = np.zeros(len(images), dtype=bool)
        for image_id, roots in presence.items():
            pos = image_pos.get(image_id)
            if pos is not None and root in roots:
                mask[pos] = True
        masks[entity] = mask
    return masks


def global_saliency(
    tensor: SaliencyTensor,
    presence: dict[str, frozenset[str]],
    root_map: dict[str, str],
) -> GlobalSaliency:
    """Mean saliency across the images where each entity is visible."""
    masks = image_sets(tensor.entities, root_map, presence, tensor.images)
    L, O = len(tensor.languages), len(tensor.entities)
    values = np.zeros((L, O))
    present = np.zeros((L, O), dtype=bool)
    n_cells = np.zeros((L, O), dtype=int)
    captioned = tensor.counts > 0
    for oi, entity in enumerate(tensor.entities):
        for li in range(L):
            cells = masks[entity] & captioned[li]
            n = int(cells.sum())
            n_cells[li, oi] = n
            if n:
                present[li, oi] = True
                values[li, oi] = float(tensor.values[li, oi, cells].mean())
    return GlobalSaliency(
        list(tensor.languages), list(tensor.entities), values, present, n_cells
    )


@dataclass
class SpreadRow:
    entity: str
    mean: float
    std: float
    n_languages: int


def saliency_spread(gs: GlobalSaliency, weighting: str = "language") -> list[SpreadRow]:
    """Per-entity mean and cross-language standard deviation.

    `weighting` picks the mean: "language" averages the per-language
    values equally, "cell" weights them by the number of images behind
    each. The standard deviation is always across languages.
    """
    if weighting not in ("language", "cell"):
        raise ValueError(f"unknown weighting {weighting!r}")
    rows = []
    for oi, entity in enumerate(gs.entities):
        mask = gs.present[:, oi]
        if not mask.any():
            continue
        vals = gs.values[mask, oi]
        if weighting == "language":
            mean = float(vals.mean())
        else:
            weights = gs.n_cells[mask, oi]
            mean = float(np.average(vals, weights=weights))
        rows.append(
            SpreadRow(entity, mean, float(vals.std()), int(mask.sum()))
        )
    rows.sort(key=lambda r: (-r.std, r.entity))
    return rows


# ------------------------------------------------------------------
# pairwise language comparison

@dataclass
class ComparisonRow:
    entity: str
    saliency_a: float
    saliency_b: float
    ratio: Optional[float]  # saliency_a / saliency_b; None when undefined
    n_pairs: int
    p: Optional[float]
    significant: bool = False
    note: str = ""


def compare_languages(
    tensor: SaliencyTensor,
    presence: dict[str, frozenset[str]],
    root_map: dict[str, str],
    lang_a: str,
    lang_b: str,
    entities: Iterable[str] = None,
    alpha: float = 0.05,
    exact_cutoff: int = 25,
) -> tuple[list[ComparisonRow], Optional[float]]:
    """Saliency ratios plus Wilcoxon significance per entity.

    The test pairs per-image saliency values over the images in I_o
    captioned in both languages; Bonferroni m is the number of entities
    actually tested. Returns the rows (ratio-descending) and the
    adjusted alpha (None when nothing was testable).
    """
    entities = list(entities) if entities is not None else list(tensor.entities)
    gs = global_saliency(tensor, presence, root_map)
    ai = tensor.language_index(lang_a)
    bi = tensor.language_index(lang_b)
    masks = image_sets(entities, root_map, presence, tensor.images)
    captioned = tensor.counts > 0
    entity_pos = {e: i for i, e in enumerate(tensor.entities)}

    rows = []
    for entity in entities:
        oi = entity_pos.get(entity)
        if oi is None:
            raise DataError(f"entity {entity!r} not in tensor")
        sal_a = float(gs.values[ai, oi]) if gs.present[ai, oi] else math.nan
        sal_b = float(gs.values[bi, oi]) if gs.present[bi, oi] else math.nan
        if math.isnan(sal_a) or math.isnan(sal_b):
            rows.append(
                ComparisonRow(entity, sal_a, sal_b, None, 0, None, note="no visible images")
            )
            continue
        if sal_b > 0:
            ratio = sal_a / sal_b
        elif sal_a > 0:
            ratio = math.inf
        else:
            ratio = None
        common = masks[entity] & captioned[ai] & captioned[bi]
        n_pairs = int(common.sum())
        if n_pairs < 2:
            rows.append(
                ComparisonRow(
                    entity, sal_a, sal_b, ratio, n_pairs, None, note="insufficient pairs"
                )
            )
            continue
        x = tensor.values[ai, oi, common]
        y = tensor.values[bi, oi, common]
        if np.all(x == y):
            rows.append(
                ComparisonRow(
                    entity, sal_a, sal_b, ratio, n_pairs, 1.0, note="no differences"
                )
            )
            continue
        result = wilcoxon_signed_rank(x, y, exact_cutoff=exact_cutoff)
        rows.append(ComparisonRow(entity, sal_a, sal_b, ratio, n_pairs, result.p))

    tested = [row for row in rows if row.p is not None]
    adjusted = None
    if tested:
        adjusted, flags = bonferroni([row.p for row in tested], alpha=alpha)
        for row, flag in zip(tested, flags):
            row.significant = flag

    def sort_key(row: ComparisonRow):
        if row.ratio is None:
            return -math.inf
        return row.ratio

    rows.sort(key=sort_key, reverse=True)
    return rows, adjusted


# ------------------------------------------------------------------
# granularity

@dataclass
class DepthHistogram:
    per_language: dict[str, Counter]
    band: tuple[int, int] = DEPTH_BAND

    def total(self, language: str) -> int:
        return sum(self.per_language.get(language, Counter()).values())

    def central_share(self, language: str) -> float:
        counts = self.per_language.get(language, Counter())
        total = sum(counts.values())
        if not total:
            return 0.0
        low, high = self.band
        central = sum(n for depth, n in counts.items() if low <= depth <= high)
        return central / total

    def summary(self) -> dict[str, dict]:
        return {
            lang: {
                "mentions": self.total(lang),
                "central_share": self.central_share(lang),
                "concentrated": self.central_share(lang) > 0.5,
            }
            for lang in sorted(self.per_language)
        }


def depth_histogram(
    filtered: Iterable[FilteredResult], tree, band: tuple[int, int] = DEPTH_BAND
) -> DepthHistogram:
    """Mention-depth histogram per language.

    Depths come from the resolved mention synsets, not the closures;
    closing first would mechanically inflate the shallow levels.
    """
    per_language: dict[str, Counter] = {}
    for result in filtered:
        _, language, _ = split_caption_key(result.caption_key)
        counter = per_language.setdefault(language, Counter())
        for _span, sid in result.mentions:
            counter[tree.depth(sid)] += 1
    return DepthHistogram(per_language, band)


# ------------------------------------------------------------------
# entity counts

@dataclass
class EntityCountRow:
    language: str
    home_mean: Optional[float]
    abroad_mean: Optional[float]
    n_home_captions: int
    n_abroad_captions: int


def entity_counts(
    filtered: Iterable[FilteredResult], meta: dict[str, str]
) -> list[EntityCountRow]:
    """Mean mentions per caption, split by home versus abroad images.

    An image is "home" for a language when its capture locale equals that
    language; mention counts use the resolved mentions, not closures.
    """
    sums: dict[tuple[str, bool], list] = {}
    for result in filtered:
        image_id, language, _ = split_caption_key(result.caption_key)
        locale = meta.get(image_id)
        if locale is None:
            raise DataError(f"no image metadata for {image_id!r}")
        at_home = locale == language
        bucket = sums.setdefault((language, at_home), [0, 0])
        bucket[0] += len(result.mentions)
        bucket[1] += 1

    languages = sorted({lang for lang, _ in sums})
    rows = []
    for language in languages:
        home = sums.get((language, True))
        abroad = sums.get((language, False))
        rows.append(
            EntityCountRow(
                language=language,
                home_mean=home[0] / home[1] if home else None,
                abroad_mean=abroad[0] / abroad[1] if abroad else None,
                n_home_captions=home[1] if home else 0,
                n_abroad_captions=abroad[1] if abroad else 0,
            )
        )
    return rows


def home_abroad_correlation(rows: list[EntityCountRow]) -> PearsonResult:
    """Pearson correlation across languages of home vs abroad means."""
    pairs = [
        (row.home_mean, row.abroad_mean)
        for row in rows
        if row.home_mean is not None and row.abroad_mean is not None
    ]
    if len(pairs) < 3:
        raise DataError("need at least 3 languages with home and abroad images")
    home, abroad = zip(*pairs)
    try:
        return pearson_test(home, abroad)
    except ValueError as exc:
        raise DataError(f"correlation not computable: {exc}") from None


def per_locale_counts(
    filtered: Iterable[FilteredResult], meta: dict[str, str], locale: str
) -> dict[str, float]:
    """Mean mentions per caption, per language, over one capture locale."""
    sums: dict[str, list] = {}
    for result in filtered:
        image_id, language, _ = split_caption_key(result.caption_key)
        image_locale = meta.get(image_id)
        if image_locale is None:
            raise DataError(f"no image metadata for {image_id!r}")
        if image_locale != locale:
            continue
        bucket = sums.setdefault(language, [0, 0])
        bucket[0] += len(result.mentions)
        bucket[1] += 1
    return {lang: total / n for lang, (total, n) in sorted(sums.items())}
