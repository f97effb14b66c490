"""Command-line pipeline: each subcommand wraps one stage and writes its
artifacts plus a manifest into the output directory.

    capsal build-ontology -c pipeline.cfg
    capsal select-inventory -c pipeline.cfg
    capsal extract -c pipeline.cfg
    capsal filter -c pipeline.cfg
    capsal validate -c pipeline.cfg
    capsal analyze saliency|mantel|compare|granularity|counts ...
    capsal report -c pipeline.cfg

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__, analytics, plots, reports
from .config import PipelineConfig
from .errors import CapsalError, ConfigError, DataError, IntegrityError
from .extraction import (
    FirstSenseScorer,
    ResilientScorer,
    extract_caption,
    bootstrap_mappings,
    read_results,
    write_results,
)
from .filtering import filter_results, validate as validate_sets
from .ingest import (
    IngestReport,
    attach_captions,
    read_captions,
    read_conllu,
    read_distance_matrix,
    read_gold,
    read_image_meta,
    read_presence,
)
from .inventory import (
    SynsetInventory,
    SynsetRole,
    Thresholds,
    count_instantiations,
    read_root_candidates,
    select_inventory,
)
from .manifest import file_sha256, input_changes, write_manifest
from .scorer_client import RemoteScorer
from .statkit import wilcoxon_signed_rank  # noqa: F401  (re-exported for scripting)
from .wordnet import apply_edits, parse_edit_script, parse_wordnet
from .wordnet.tree import SynsetTree

ONTOLOGY = "ontology.json"
INVENTORY = "inventory.tsv"
COUNTS_TABLE = "instantiation_counts.tsv"
EXTRACTION = "extraction.jsonl"
FILTERED = "filtered.jsonl"

STAGE_PRODUCERS = {
    ONTOLOGY: "build-ontology",
    INVENTORY: "select-inventory",
    COUNTS_TABLE: "select-inventory",
    EXTRACTION: "extract",
    FILTERED: "filter",
}


class CliParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _artifact(config: PipelineConfig, name: str) -> Path:
    path = Path(config.output_dir) / name
    if not path.exists():
        producer = STAGE_PRODUCERS.get(name, "an earlier stage")
        raise DataError(
            f"missing artifact {path}; run `capsal {producer}` first"
        )
    return path


def _write_rejects(config: PipelineConfig, stage: str, report: IngestReport):
    path = Path(config.output_dir) / f"{stage}.rejects.txt"
    with open(path, "w", encoding="utf-8") as fh:
        for reject in report.rejects:
            fh.write(f"{reject.path}:{reject.location}: {reject.reason}\n")
    if report.rejects:
        print(f"{len(report.rejects)} record(s) rejected; see {path}", file=sys.stderr)
    return path


def _finish_stage(config, stage, inputs, outputs, parameters):
    in_hashes = {name: file_sha256(p) for name, p in sorted(inputs.items())}
    for note in input_changes(config.output_dir, stage, in_hashes):
        print(f"note: {note}", file=sys.stderr)
    write_manifest(
        config.output_dir, stage, inputs, outputs, parameters, config.config_hash()
    )
    for name, path in sorted(outputs.items()):
        print(f"wrote {name}: {path}")


def _load_corpus(config: PipelineConfig, stage: str):
    report = IngestReport()
    records, _ = read_captions(
        config.captions, excluded_languages=config.excluded_languages, report=report
    )
    sentences, _ = read_conllu(config.tagged, report=report)
    joined, _ = attach_captions(sentences, records, report=report)
    _write_rejects(config, stage, report)
    return records, joined


def _load_tree(config: PipelineConfig) -> SynsetTree:
    return SynsetTree.load(_artifact(config, ONTOLOGY))


def _load_inventory(config: PipelineConfig, tree: SynsetTree) -> SynsetInventory:
    thresholds = Thresholds(config.root_min_count, config.explicit_min_count)
    return SynsetInventory.load(_artifact(config, INVENTORY), tree, thresholds)


def _make_scorer(config: PipelineConfig):
    if config.scorer == "fallback":
        return FirstSenseScorer()
    return ResilientScorer(primary=RemoteScorer(config.scorer))


# ------------------------------------------------------------------
# stages

def cmd_build_ontology(config: PipelineConfig) -> int:
    config.validate(("wordnet_dir",))
    wndir = Path(config.wordnet_dir)
    index, data, exc = wndir / "index.noun", wndir / "data.noun", wndir / "noun.exc"
    for path in (index, data, exc):
        if not path.exists():
            raise ConfigError(f"wordnet file missing: {path}")
    edit_script = config.effective_edit_script()
    tree = parse_wordnet(index, data, exc)
    parsed = len(tree)
    edits = parse_edit_script(edit_script)
    apply_edits(tree, edits)
    print(f"parsed {parsed} synsets; {len(edits)} edits applied; {len(tree)} remain")

    out = Path(config.output_dir) / ONTOLOGY
    tree.save(out)
    _finish_stage(
        config,
        "build-ontology",
        inputs={"index.noun": index, "data.noun": data, "noun.exc": exc,
                "edit_script": edit_script},
        outputs={ONTOLOGY: out},
        parameters={"synsets": len(tree), "edits": len(edits)},
    )
    return 0


def cmd_select_inventory(config: PipelineConfig) -> int:
    config.validate(("captions", "tagged"))
    tree = _load_tree(config)
    records, joined = _load_corpus(config, "select-inventory")
    mappings = bootstrap_mappings(tree, joined)
    counts = count_instantiations(tree, mappings)
    candidates_path = config.effective_root_candidates()
    candidates = read_root_candidates(candidates_path, tree)
    thresholds = Thresholds(config.root_min_count, config.explicit_min_count)
    inventory = select_inventory(tree, counts, candidates, thresholds)

    out = Path(config.output_dir) / INVENTORY
    inventory.save(out)
    counts_out = Path(config.output_dir) / COUNTS_TABLE
    with open(counts_out, "w", encoding="utf-8") as fh:
        for sid in sorted(counts.subtree, key=lambda s: s.lemma_key):
            fh.write(
                f"{sid.lemma_key}\t{counts.direct.get(sid, 0)}\t{counts.subtree[sid]}\n"
            )
    roles = {role.value: len(inventory.with_role(role)) for role in SynsetRole}
    print(
        f"inventory: {len(inventory)} synsets "
        f"({roles['root']} root, {roles['explicit']} explicit, "
        f"{roles['implicit']} implicit) from {len(mappings)} phrase mappings"
    )
    _finish_stage(
        config,
        "select-inventory",
        inputs={
            ONTOLOGY: Path(config.output_dir) / ONTOLOGY,
            "captions": config.captions,
            "tagged": config.tagged,
            "root_candidates": candidates_path,
        },
        outputs={INVENTORY: out, COUNTS_TABLE: counts_out},
        parameters={
            "captions": len(records),
            "root_min_count": thresholds.root_min_count,
            "explicit_min_count": thresholds.explicit_min_count,
        },
    )
    return 0


def cmd_extract(config: PipelineConfig) -> int:
    config.validate(("captions", "tagged"))
    tree = _load_tree(config)
    inventory = _load_inventory(config, tree)
    _records, joined = _load_corpus(config, "extract")
    scorer = _make_scorer(config)

    jobs = config.effective_jobs()
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(
                pool.map(
                    lambda caption: extract_caption(tree, inventory, caption, scorer),
                    joined,
                )
            )
    else:
        results = [extract_caption(tree, inventory, c, scorer) for c in joined]

    out = Path(config.output_dir) / EXTRACTION
    write_results(results, out)
    mentions = sum(len(r.mentions) for r in results)
    degradations = getattr(scorer, "degradations", 0)
    print(f"extracted {mentions} mentions from {len(results)} captions")
    if degradations:
        print(f"scorer degraded to fallback {degradations} time(s)", file=sys.stderr)
    _finish_stage(
        config,
        "extract",
        inputs={
            ONTOLOGY: Path(config.output_dir) / ONTOLOGY,
            INVENTORY: Path(config.output_dir) / INVENTORY,
            "captions": config.captions,
            "tagged": config.tagged,
        },
        outputs={EXTRACTION: out},
        parameters={
            "scorer": config.scorer,
            "captions": len(results),
            "mentions": mentions,
            "scorer_degradations": degradations,
        },
    )
    return 0


def cmd_filter(config: PipelineConfig) -> int:
    config.validate(("presence",))
    tree = _load_tree(config)
    inventory = _load_inventory(config, tree)
    results = read_results(_artifact(config, EXTRACTION), tree)
    report = IngestReport()
    presence, _ = read_presence(
        config.presence,
        known_roots=[r.lemma_key for r in inventory.roots],
        report=report,
    )
    _write_rejects(config, "filter", report)
    filtered = filter_results(
        results, presence, inventory, tree, missing_policy=config.missing_presence
    )
    out = Path(config.output_dir) / FILTERED
    write_results(filtered, out)
    kept = sum(len(r.closure) for r in filtered)
    total = sum(len(r.closure) for r in results)
    print(f"filter kept {kept} of {total} closure synsets")
    _finish_stage(
        config,
        "filter",
        inputs={
            ONTOLOGY: Path(config.output_dir) / ONTOLOGY,
            INVENTORY: Path(config.output_dir) / INVENTORY,
            EXTRACTION: Path(config.output_dir) / EXTRACTION,
            "presence": config.presence,
        },
        outputs={FILTERED: out},
        parameters={"missing_presence": config.missing_presence},
    )
    return 0


def cmd_validate(config: PipelineConfig) -> int:
    config.validate(("gold",))
    tree = _load_tree(config)
    inventory = _load_inventory(config, tree)
    filtered = read_results(_artifact(config, FILTERED), tree)
    report = IngestReport()
    gold_raw, _ = read_gold(config.gold, report=report)
    _write_rejects(config, "validate", report)

    inventory_ids = set(inventory.entries)

    def close(keys):
        closed = set()
        for key in keys:
            sid = tree.resolve(key)
            closed.add(sid.lemma_key)
            closed.update(
                a.lemma_key for a in tree.ancestors(sid) & inventory_ids
            )
        return frozenset(closed)

    gold = {key: close(synsets) for key, synsets in gold_raw.items()}
    predicted = {
        r.caption_key: frozenset(s.lemma_key for s in r.closure) for r in filtered
    }
    validation = validate_sets(predicted, gold)

    json_out = Path(config.output_dir) / "validation.json"
    reports.write_json(validation.to_dict(), json_out)
    table_out = Path(config.output_dir) / "validation.txt"
    table_out.write_text(validation.table() + "\n", encoding="utf-8")
    print(
        f"precision {validation.precision:.4f}  recall {validation.recall:.4f} "
        f"({validation.true_positives} matches)"
    )
    _finish_stage(
        config,
        "validate",
        inputs={
            FILTERED: Path(config.output_dir) / FILTERED,
            "gold": config.gold,
        },
        outputs={"validation.json": json_out, "validation.txt": table_out},
        parameters={"gold_captions": len(gold)},
    )
    return 0


# ------------------------------------------------------------------
# analyses

def _analysis_bundle(config: PipelineConfig, need_presence=True):
    config.validate(("captions",))
    tree = _load_tree(config)
    inventory = _load_inventory(config, tree)
    filtered = read_results(_artifact(config, FILTERED), tree)
    records, _ = read_captions(
        config.captions, excluded_languages=config.excluded_languages
    )
    index = analytics.CaptionIndex.from_records(records)
    entities = [sid.lemma_key for sid in inventory.entries]
    tensor = analytics.build_tensor(filtered, entities, index)
    presence = None
    root_map = {
        sid.lemma_key: root.lemma_key
        for sid, root in inventory.root_map(tree).items()
    }
    if need_presence:
        config.validate(("presence",))
        presence, _ = read_presence(
            config.presence, known_roots=[r.lemma_key for r in inventory.roots]
        )
    return tree, inventory, filtered, tensor, presence, root_map


def _analysis_inputs(config: PipelineConfig) -> dict:
    return {
        ONTOLOGY: Path(config.output_dir) / ONTOLOGY,
        INVENTORY: Path(config.output_dir) / INVENTORY,
        FILTERED: Path(config.output_dir) / FILTERED,
        "captions": config.captions,
    }


def cmd_analyze_saliency(config: PipelineConfig) -> int:
    _tree, inventory, _filtered, tensor, presence, root_map = _analysis_bundle(config)
    gs = analytics.global_saliency(tensor, presence, root_map)
    spread_rows = analytics.saliency_spread(gs, weighting=config.weighting)

    gs_out = Path(config.output_dir) / "global_saliency.csv"
    reports.write_global_saliency_csv(gs, gs_out)
    spread_out = Path(config.output_dir) / "saliency_spread.csv"
    reports.write_spread_csv(spread_rows, spread_out)

    root_keys = {r.lemma_key for r in inventory.roots}
    root_rows = [r for r in spread_rows if r.entity in root_keys]
    by_mean = sorted(root_rows, key=lambda r: -r.mean)[:3]
    if by_mean:
        summary = ", ".join(f"{r.entity} {r.mean:.3f}" for r in by_mean)
        print(f"most salient roots: {summary}")
    inputs = _analysis_inputs(config)
    inputs["presence"] = config.presence
    _finish_stage(
        config,
        "analyze-saliency",
        inputs=inputs,
        outputs={"global_saliency.csv": gs_out, "saliency_spread.csv": spread_out},
        parameters={"weighting": config.weighting},
    )
    return 0


def cmd_analyze_mantel(config: PipelineConfig) -> int:
    if not config.distances:
        raise ConfigError("no distance matrices configured (distance.<name> = path)")
    _tree, _inv, _filtered, tensor, _presence, _root_map = _analysis_bundle(
        config, need_presence=False
    )
    saliency_dm = analytics.saliency_distance_matrix(tensor)
    dm_out = Path(config.output_dir) / "saliency_distances.csv"
    saliency_dm.save(dm_out)

    results = {}
    for name in sorted(config.distances):
        typology_dm = read_distance_matrix(config.distances[name])
        result, labels, dropped = analytics.correlate_typology(
            saliency_dm, typology_dm, config.permutations, config.seed
        )
        results[name] = reports.mantel_result_dict(name, result, labels, dropped)
        print(f"mantel {name}: r={result.r:.4f} p={result.p:.4f}")

    mantel_out = Path(config.output_dir) / "mantel.json"
    reports.write_json(results, mantel_out)
    inputs = _analysis_inputs(config)
    for name, path in config.distances.items():
        inputs[f"distance.{name}"] = path
    _finish_stage(
        config,
        "analyze-mantel",
        inputs=inputs,
        outputs={"saliency_distances.csv": dm_out, "mantel.json": mantel_out},
        parameters={"permutations": config.permutations, "seed": config.seed},
    )
    return 0


def cmd_analyze_compare(config: PipelineConfig, lang_a: str, lang_b: str, parent: str = None) -> int:
    tree, inventory, _filtered, tensor, presence, root_map = _analysis_bundle(config)
    if parent is not None:
        parent_id = tree.resolve(parent)
        entities = sorted(
            sid.lemma_key
            for sid in inventory.entries
            if tree.is_descendant(sid, parent_id)
        )
        if not entities:
            raise DataError(f"no inventory synsets below {parent}")
        suffix = f"_{parent.split('.')[0]}"
    else:
        entities = sorted(r.lemma_key for r in inventory.roots)
        suffix = ""
    rows, adjusted = analytics.compare_languages(
        tensor,
        presence,
        root_map,
        lang_a,
        lang_b,
        entities=entities,
        alpha=config.alpha,
        exact_cutoff=config.exact_cutoff,
    )
    out = Path(config.output_dir) / f"compare_{lang_a}_{lang_b}{suffix}.csv"
    reports.write_comparison_csv(rows, lang_a, lang_b, out)
    significant = [r.entity for r in rows if r.significant]
    print(
        f"compared {len(rows)} entities ({lang_a} vs {lang_b}); "
        f"significant after Bonferroni: {', '.join(significant) or 'none'}"
    )
    inputs = _analysis_inputs(config)
    inputs["presence"] = config.presence
    _finish_stage(
        config,
        f"analyze-compare-{lang_a}-{lang_b}{suffix}",
        inputs=inputs,
        outputs={out.name: out},
        parameters={
            "lang_a": lang_a,
            "lang_b": lang_b,
            "parent": parent,
            "alpha": config.alpha,
            "adjusted_alpha": adjusted,
        },
    )
    return 0


def cmd_analyze_granularity(config: PipelineConfig) -> int:
    tree, _inv, filtered, _tensor, _presence, _root_map = _analysis_bundle(
        config, need_presence=False
    )
    hist = analytics.depth_histogram(filtered, tree)
    csv_out = Path(config.output_dir) / "depth_histogram.csv"
    reports.write_depth_histogram_csv(hist, csv_out)
    summary_out = Path(config.output_dir) / "depth_summary.json"
    reports.write_json(hist.summary(), summary_out)
    for language, stats in hist.summary().items():
        print(
            f"{language}: {stats['mentions']} mentions, "
            f"{stats['central_share']:.2f} within depths {hist.band[0]}-{hist.band[1]}"
        )
    _finish_stage(
        config,
        "analyze-granularity",
        inputs=_analysis_inputs(config),
        outputs={"depth_histogram.csv": csv_out, "depth_summary.json": summary_out},
        parameters={"band": list(hist.band)},
    )
    return 0


def cmd_analyze_counts(config: PipelineConfig) -> int:
    config.validate(("meta",))
    _tree, _inv, filtered, _tensor, _presence, _root_map = _analysis_bundle(
        config, need_presence=False
    )
    meta, meta_report = read_image_meta(config.meta)
    _write_rejects(config, "analyze-counts", meta_report)
    rows = analytics.entity_counts(filtered, meta)
    csv_out = Path(config.output_dir) / "entity_counts.csv"
    reports.write_entity_counts_csv(rows, csv_out)

    payload = {}
    try:
        correlation = analytics.home_abroad_correlation(rows)
        payload["home_abroad"] = reports.pearson_result_dict(correlation)
        print(
            f"home/abroad correlation: r={correlation.r:.4f} p={correlation.p:.3g} "
            f"over {correlation.n} languages"
        )
    except DataError as exc:
        payload["home_abroad"] = {"error": str(exc)}
        print(f"home/abroad correlation unavailable: {exc}", file=sys.stderr)

    locale_means = {}
    if config.locale_pair:
        for locale in config.locale_pair:
            means = analytics.per_locale_counts(filtered, meta, locale)
            if means:
                locale_means[locale] = means
        if locale_means:
            locale_out = Path(config.output_dir) / "locale_counts.csv"
            reports.write_locale_counts_csv(locale_means, locale_out)
            payload["locale_means"] = locale_means
    json_out = Path(config.output_dir) / "entity_counts.json"
    reports.write_json(payload, json_out)

    outputs = {"entity_counts.csv": csv_out, "entity_counts.json": json_out}
    if locale_means:
        outputs["locale_counts.csv"] = Path(config.output_dir) / "locale_counts.csv"
    inputs = _analysis_inputs(config)
    inputs["meta"] = config.meta
    _finish_stage(
        config,
        "analyze-counts",
        inputs=inputs,
        outputs=outputs,
        parameters={"locale_pair": list(config.locale_pair or ())},
    )
    return 0


def cmd_report(config: PipelineConfig) -> int:
    """All analyses plus rendered figures and a JSON summary."""
    cmd_analyze_saliency(config)
    if config.distances:
        cmd_analyze_mantel(config)
    cmd_analyze_granularity(config)
    if config.meta and Path(config.meta).exists():
        cmd_analyze_counts(config)

    tree, inventory, filtered, tensor, presence, root_map = _analysis_bundle(config)
    gs = analytics.global_saliency(tensor, presence, root_map)
    hist = analytics.depth_histogram(filtered, tree)

    figures_dir = Path(config.output_dir) / "figures"
    figures_dir.mkdir(parents=True, exist_ok=True)
    figures = {}
    root_keys = sorted(r.lemma_key for r in inventory.roots)
    figures["saliency_violin"] = plots.render_saliency_violin(
        gs, figures_dir / "saliency_violin.png", entities=root_keys
    )
    figures["depth_histogram"] = plots.render_depth_histogram(
        hist, figures_dir / "depth_histogram.png"
    )
    if config.meta and Path(config.meta).exists():
        meta, _ = read_image_meta(config.meta)
        rows = analytics.entity_counts(filtered, meta)
        figures["home_abroad"] = plots.render_home_abroad_scatter(
            rows, figures_dir / "entity_counts_home_abroad.png"
        )
        if config.locale_pair:
            locale_a, locale_b = config.locale_pair
            means_a = analytics.per_locale_counts(filtered, meta, locale_a)
            means_b = analytics.per_locale_counts(filtered, meta, locale_b)
            if means_a and means_b:
                figures["locale_scatter"] = plots.render_locale_scatter(
                    means_a,
                    means_b,
                    locale_a,
                    locale_b,
                    figures_dir / "entity_counts_locales.png",
                )

    spread_rows = analytics.saliency_spread(gs, weighting=config.weighting)
    root_rows = [r for r in spread_rows if r.entity in set(root_keys)]
    summary = {
        "toolkit_version": __version__,
        "languages": tensor.languages,
        "entities": len(tensor.entities),
        "images": len(tensor.images),
        "most_salient_roots": [
            {"entity": r.entity, "mean": r.mean}
            for r in sorted(root_rows, key=lambda r: -r.mean)[:5]
        ],
        "highest_spread_roots": [
            {"entity": r.entity, "std": r.std} for r in root_rows[:5]
        ],
        "figures": {
            name: str(Path(path).relative_to(config.output_dir))
            for name, path in sorted(figures.items())
        },
    }
    summary_out = Path(config.output_dir) / "summary.json"
    reports.write_json(summary, summary_out)
    print(f"report complete: {summary_out}")
    for name, path in sorted(figures.items()):
        print(f"figure {name}: {path}")
    return 0


# ------------------------------------------------------------------
# argument parsing

def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("-c", "--config", help="pipeline configuration file")
    parser.add_argument("--output-dir", help="artifact directory")
    parser.add_argument("--seed", type=int, help="random seed")
    parser.add_argument("--permutations", type=int, help="mantel permutations")
    parser.add_argument("--jobs", type=int, help="worker threads (0 = cores)")
    parser.add_argument("--scorer", help='scorer endpoint or "fallback"')
    parser.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override any configuration key",
    )


def _config_from_args(args) -> PipelineConfig:
    if args.config:
        if not Path(args.config).exists():
            raise ConfigError(f"config file not found: {args.config}")
        config = PipelineConfig.from_file(args.config)
    else:
        config = PipelineConfig()
    for flag in ("output_dir", "seed", "permutations", "jobs", "scorer"):
        value = getattr(args, flag, None)
        if value is not None:
            config.set_option(flag, str(value))
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        config.set_option(key.strip(), value.strip())
    Path(config.output_dir).mkdir(parents=True, exist_ok=True)
    return config


def build_parser() -> CliParser:
    parser = CliParser(
        prog="capsal",
        description="Entity saliency analytics for multilingual image captions.",
    )
    parser.add_argument("--version", action="version", version=f"capsal {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    stages = {
        "build-ontology": "parse WordNet noun files and apply ontology edits",
        "select-inventory": "select root/explicit/implicit synsets from the corpus",
        "extract": "extract and disambiguate entity mentions per caption",
        "filter": "drop synsets whose root is absent from the image",
        "validate": "score filtered extractions against gold annotations",
        "report": "run all analyses, render figures, write summary.json",
    }
    handlers = {
        "build-ontology": cmd_build_ontology,
        "select-inventory": cmd_select_inventory,
        "extract": cmd_extract,
        "filter": cmd_filter,
        "validate": cmd_validate,
        "report": cmd_report,
    }
    for name, desc in stages.items():
        p = sub.add_parser(name, help=desc, description=desc)
        _add_common(p)
        p.set_defaults(handler=lambda args, f=handlers[name]: f(_config_from_args(args)))

    analyze = sub.add_parser("analyze", help="run a single analysis")
    analyze_sub = analyze.add_subparsers(dest="analysis", required=True, parser_class=CliParser)
    for name, desc, handler in (
        ("saliency", "global saliency table and cross-language spread",
         cmd_analyze_saliency),
        ("mantel", "saliency distances vs typological distance matrices",
         cmd_analyze_mantel),
        ("granularity", "mention depth histogram per language",
         cmd_analyze_granularity),
        ("counts", "entity counts: home vs abroad and per-locale means",
         cmd_analyze_counts),
    ):
        p = analyze_sub.add_parser(name, help=desc, description=desc)
        _add_common(p)
        p.set_defaults(handler=lambda args, f=handler: f(_config_from_args(args)))

    compare = analyze_sub.add_parser(
        "compare", help="saliency ratios and significance for a language pair"
    )
    _add_common(compare)
    compare.add_argument("--lang-a", required=True)
    compare.add_argument("--lang-b", required=True)
    compare.add_argument(
        "--parent", help="restrict to inventory synsets below this synset"
    )
    compare.set_defaults(
        handler=lambda args: cmd_analyze_compare(
            _config_from_args(args), args.lang_a, args.lang_b, args.parent
        )
    )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except ConfigError as exc:
        print(f"capsal: config error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"capsal: data error: {exc}", file=sys.stderr)
        return 2
    except IntegrityError as exc:
        print(f"capsal: integrity error: {exc}", file=sys.stderr)
        return 3
    except CapsalError as exc:
        print(f"capsal: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
