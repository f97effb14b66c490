"""Delimited report tables for the analysis outputs.

Long-format CSVs are plot-ready: one observation per row, stable column
order, languages and entities sorted, floats rendered with repr-shortest
formatting so identical inputs produce identical bytes.
"""

from __future__ import annotations

import csv
import json
from collections import Counter

from .analytics import (
    ComparisonRow,
    DepthHistogram,
    EntityCountRow,
    GlobalSaliency,
    SpreadRow,
)
from .statkit import MantelResult, PearsonResult


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_global_saliency_csv(gs: GlobalSaliency, path):
    rows = []
    for li, language in enumerate(gs.languages):
        for oi, entity in enumerate(gs.entities):
            if gs.present[li, oi]:
                rows.append(
                    (language, entity, gs.values[li, oi], gs.n_cells[li, oi])
                )
    _write_csv(path, ("language", "entity", "global_saliency", "n_images"), rows)


def write_spread_csv(rows: list[SpreadRow], path):
    _write_csv(
        path,
        ("entity", "mean", "std", "n_languages"),
        [(r.entity, r.mean, r.std, r.n_languages) for r in rows],
    )


def write_comparison_csv(rows: list[ComparisonRow], lang_a, lang_b, path):
    def ratio_fmt(row):
        if row.ratio is None:
            return ""
        if row.ratio == float("inf"):
            return "inf"
        return row.ratio

    _write_csv(
        path,
        (
            "entity",
            f"saliency_{lang_a}",
            f"saliency_{lang_b}",
            "ratio",
            "n_pairs",
            "wilcoxon_p",
            "significant",
            "note",
        ),
        [
            (
                r.entity,
                r.saliency_a,
                r.saliency_b,
                ratio_fmt(r),
                r.n_pairs,
                r.p,
                str(r.significant).lower(),
                r.note,
            )
            for r in rows
        ],
    )


def write_depth_histogram_csv(hist: DepthHistogram, path):
    rows = []
    for language in sorted(hist.per_language):
        counter: Counter = hist.per_language[language]
        for depth in sorted(counter):
            rows.append((language, depth, counter[depth]))
    _write_csv(path, ("language", "depth", "mentions"), rows)


def write_entity_counts_csv(rows: list[EntityCountRow], path):
    _write_csv(
        path,
        ("language", "home_mean", "abroad_mean", "n_home_captions", "n_abroad_captions"),
        [
            (r.language, r.home_mean, r.abroad_mean, r.n_home_captions, r.n_abroad_captions)
            for r in rows
        ],
    )


def write_locale_counts_csv(means_by_locale: dict[str, dict[str, float]], path):
    locales = sorted(means_by_locale)
    languages = sorted({l for means in means_by_locale.values() for l in means})
    rows = []
    for language in languages:
        rows.append(
            [language] + [means_by_locale[loc].get(language) for loc in locales]
        )
    _write_csv(path, ["language"] + [f"mean_in_{loc}_zone" for loc in locales], rows)


def mantel_result_dict(name: str, result: MantelResult, labels: list[str], dropped: list[str]) -> dict:
    return {
        "matrix": name,
        "r": result.r,
        "p": result.p,
        "permutations": result.permutations,
        "seed": result.seed,
        "n_languages": len(labels),
        "languages": labels,
        "dropped": dropped,
    }


def pearson_result_dict(result: PearsonResult) -> dict:
    return {"r": result.r, "p": result.p, "n_languages": result.n}


def write_json(payload, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")
