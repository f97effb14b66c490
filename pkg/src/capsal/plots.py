"""Figure rendering for the report path.

Renders the violin plot of global saliency, the per-language depth
histograms and the entity-count scatters next to the CSV tables. PNG
metadata is pinned so identical data produces identical bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import numpy as np
import matplotlib.pyplot as plt

from .analytics import DepthHistogram, EntityCountRow, GlobalSaliency

PNG_METADATA = {"Software": "capsal"}

plt.rcParams.update(
    {
        "figure.dpi": 110,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "font.size": 9,
    }
)


def _save(fig, path):
    fig.savefig(path, metadata=PNG_METADATA, bbox_inches="tight")
    plt.close(fig)
    return path


def render_saliency_violin(gs: GlobalSaliency, path, entities: list[str] = None):
    """Distribution of per-language global saliency for each entity."""
    chosen = entities if entities is not None else gs.entities
    series = []
    labels = []
    for entity in chosen:
        oi = gs.entities.index(entity)
        values = gs.values[gs.present[:, oi], oi]
        if values.size:
            series.append(values)
            labels.append(entity.replace(".n.", "."))
    order = np.argsort([-s.mean() for s in series], kind="stable")
    series = [series[i] for i in order]
    labels = [labels[i] for i in order]

    fig, ax = plt.subplots(figsize=(max(6, 0.45 * len(series)), 4))
    if series:
        parts = ax.violinplot(series, showmedians=True, widths=0.8)
        for body in parts["bodies"]:
            body.set_alpha(0.6)
    ax.set_xticks(range(1, len(labels) + 1))
    ax.set_xticklabels(labels, rotation=75, ha="right")
    ax.set_ylabel("global saliency")
    ax.set_ylim(-0.02, 1.02)
    return _save(fig, path)


def render_depth_histogram(hist: DepthHistogram, path):
    """Mention counts per tree depth, one line per language."""
    fig, ax = plt.subplots(figsize=(6, 4))
    depths = sorted({d for c in hist.per_language.values() for d in c})
    for language in sorted(hist.per_language):
        counter = hist.per_language[language]
        ax.plot(
            depths,
            [counter.get(d, 0) for d in depths],
            marker="o",
            markersize=3,
            label=language,
        )
    low, high = hist.band
    ax.axvspan(low, high, color="0.85", zorder=0)
    ax.set_xlabel("synset depth")
    ax.set_ylabel("mentions")
    if hist.per_language:
        ax.legend(fontsize=7, ncol=2)
    return _save(fig, path)


def render_home_abroad_scatter(rows: list[EntityCountRow], path):
    """Mean entity mentions at home versus abroad, identity line dashed."""
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    xs, ys, labels = [], [], []
    for row in rows:
        if row.home_mean is None or row.abroad_mean is None:
            continue
        xs.append(row.home_mean)
        ys.append(row.abroad_mean)
        labels.append(row.language)
    ax.scatter(xs, ys, s=18)
    for x, y, label in zip(xs, ys, labels):
        ax.annotate(label, (x, y), fontsize=7, xytext=(2, 2), textcoords="offset points")
    if xs:
        lo = min(min(xs), min(ys)) * 0.95
        hi = max(max(xs), max(ys)) * 1.05
        ax.plot([lo, hi], [lo, hi], linestyle="--", color="0.5", linewidth=1)
    ax.set_xlabel("mean mentions, home images")
    ax.set_ylabel("mean mentions, abroad images")
    return _save(fig, path)


def render_locale_scatter(
    means_a: dict[str, float], means_b: dict[str, float], locale_a: str, locale_b: str, path
):
    """Per-language mention means in one capture zone versus another."""
    languages = sorted(set(means_a) & set(means_b))
    xs = [means_a[l] for l in languages]
    ys = [means_b[l] for l in languages]
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ax.scatter(xs, ys, s=18)
    for x, y, label in zip(xs, ys, languages):
        ax.annotate(label, (x, y), fontsize=7, xytext=(2, 2), textcoords="offset points")
    if xs:
        lo = min(min(xs), min(ys)) * 0.95
        hi = max(max(xs), max(ys)) * 1.05
        ax.plot([lo, hi], [lo, hi], linestyle="--", color="0.5", linewidth=1)
    ax.set_xlabel(f"mean mentions, {locale_a}-zone images")
    ax.set_ylabel(f"mean mentions, {locale_b}-zone images")
    return _save(fig, path)
