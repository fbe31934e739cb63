"""Command-line entry points for the scoring and survey pipeline."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import CacheMissError, ConceptGaugeError
from .ingest import (SemanticTypeFilter, corpus_stats, filter_language,
                     filter_semantic_types, parse_concepts_file,
                     write_concepts)
from .optimize import ObjectiveSpec, run_strategy
from .reliability import (krippendorff_alpha, matrix_from_records,
                          metric_agreement, read_ratings_csv)
from .scoring import (BucketThresholds, Weights, read_scored, rescore_rows,
                      write_scored)
from .survey import SurveySample, ingest_ratings, iteration_report, read_sample
from .workspace import (FIXED, QUANTILE, RunConfig, Workspace,
                        read_config_file, run_scoring)

logger = logging.getLogger(__name__)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file; flags override it")
    parser.add_argument("--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conceptgauge",
        description="Score candidate medical concepts and fit factor weights "
                    "against expert ratings.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse, filter and summarize a concept table")
    _add_common(p)
    p.add_argument("--concepts", help="4-column tab-separated concept file")
    p.add_argument("--exclude-types", help="semantic types to drop, one per line")
    p.add_argument("--lang", default="ENG")
    p.add_argument("--out", help="filtered concept file")
    p.add_argument("--stats-out", help="write the stats summary here too")

    p = sub.add_parser("score", help="compute factor and goodness scores")
    _add_common(p)
    p.add_argument("--concepts")
    p.add_argument("--pubmed-cache")
    p.add_argument("--translations")
    p.add_argument("--dictionary")
    p.add_argument("--stems")
    p.add_argument("--tag-lexicon")
    p.add_argument("--pretagged")
    p.add_argument("--weights", help="W1,W2,W3,W4 (default 22,27,31,15)")
    p.add_argument("--bucket-mode", choices=[QUANTILE, FIXED])
    p.add_argument("--thresholds", help="LOWER,UPPER for fixed bucket mode")
    p.add_argument("--max-word-count", type=int)
    p.add_argument("--max-count", type=int)
    p.add_argument("--offline", action="store_true", default=None,
                   help="forbid network use; caches must be complete")
    p.add_argument("--online", dest="offline", action="store_false",
                   help="allow live lookups for cache misses")
    p.add_argument("--out", help="scored output file")

    p = sub.add_parser("optimize", help="fit weights against a reference rater")
    _add_common(p)
    p.add_argument("--scored", help="scored file from the score command")
    p.add_argument("--ratings", help="RATER_ID,CUI,LEVEL csv")
    p.add_argument("--rater", help="reference rater id")
    p.add_argument("--strategy", choices=["grid", "random", "smbo"],
                   default="smbo")
    p.add_argument("--step", type=int, default=10, help="grid step")
    p.add_argument("--budget", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init-points", type=int, default=20)
    p.add_argument("--bucket-mode", choices=[QUANTILE, FIXED])
    p.add_argument("--thresholds")
    p.add_argument("--trace-out", help="write the evaluation trace here")

    p = sub.add_parser("sample", help="draw a 50-concept survey sample")
    _add_common(p)
    p.add_argument("--scored")
    p.add_argument("--pool-size", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--iteration", type=int, default=1)
    p.add_argument("--out", help="sample file CUI<TAB>TERM")
    p.add_argument("--workdir", help="also register the round in this workspace")
    p.add_argument("--weights")
    p.add_argument("--bucket-mode", choices=[QUANTILE, FIXED])
    p.add_argument("--thresholds")

    p = sub.add_parser("agree", help="Krippendorff's alpha for a ratings file")
    _add_common(p)
    p.add_argument("--ratings")
    p.add_argument("--scored", help="include the metric as one more rater")
    p.add_argument("--level", choices=["nominal", "ordinal"], default="nominal")

    p = sub.add_parser("report", help="per-iteration agreement report")
    _add_common(p)
    p.add_argument("--sample")
    p.add_argument("--ratings")
    p.add_argument("--scored")
    p.add_argument("--weights")
    p.add_argument("--iteration", type=int, default=1)
    p.add_argument("--bucket-mode", choices=[QUANTILE, FIXED])
    p.add_argument("--thresholds")
    p.add_argument("--json", dest="json_out", help="also write the JSON report")

    p = sub.add_parser("serve", help="run the survey HTTP service")
    _add_common(p)
    p.add_argument("--workdir")
    p.add_argument("--port", type=int)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui-dir", help="also serve this directory as the web UI")

    return parser


def _config_values(args) -> dict[str, str]:
    if getattr(args, "config", None):
        return read_config_file(args.config)
    return {}


def _resolve(args, config: dict[str, str], key: str, default=None):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _require(args, config, key: str):
    value = _resolve(args, config, key)
    if value is None:
        raise ConceptGaugeError(f"missing required option --{key.replace('_', '-')}")
    return value


def _parse_thresholds(text: str | None) -> BucketThresholds | None:
    if not text:
        return None
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ConceptGaugeError(f"expected LOWER,UPPER thresholds, got {text!r}")
    return BucketThresholds(float(parts[0]), float(parts[1]))


def _run_config(args, config: dict[str, str]) -> RunConfig:
    weights_text = _resolve(args, config, "weights")
    offline = _resolve(args, config, "offline", True)
    if isinstance(offline, str):
        offline = offline.lower() in ("1", "true", "yes")
    max_word_count = _resolve(args, config, "max_word_count")
    max_count = _resolve(args, config, "max_count")
    return RunConfig(
        concepts=_resolve(args, config, "concepts"),
        pubmed_cache=_resolve(args, config, "pubmed_cache"),
        translations=_resolve(args, config, "translations"),
        dictionary=_resolve(args, config, "dictionary"),
        stems=_resolve(args, config, "stems"),
        tag_lexicon=_resolve(args, config, "tag_lexicon"),
        pretagged=_resolve(args, config, "pretagged"),
        weights=Weights.parse(weights_text) if weights_text else RunConfig.weights,
        bucket_mode=_resolve(args, config, "bucket_mode", QUANTILE),
        thresholds=_parse_thresholds(_resolve(args, config, "thresholds")),
        offline=bool(offline),
        seed=int(_resolve(args, config, "seed", 0) or 0),
        pool_size=int(_resolve(args, config, "pool_size", 100) or 100),
        port=int(_resolve(args, config, "port", 8077) or 8077),
        max_word_count=int(max_word_count) if max_word_count is not None else None,
        max_count=int(max_count) if max_count is not None else None,
    )


def cmd_ingest(args) -> int:
    config = _config_values(args)
    concepts_path = _require(args, config, "concepts")
    out_path = _require(args, config, "out")
    flt = (SemanticTypeFilter.from_file(_resolve(args, config, "exclude_types"))
           if _resolve(args, config, "exclude_types")
           else SemanticTypeFilter.default())
    concepts = parse_concepts_file(concepts_path)
    if not concepts:
        raise ConceptGaugeError(f"no concepts parsed from {concepts_path}")
    by_type = filter_semantic_types(concepts, flt)
    retained = filter_language(by_type, _resolve(args, config, "lang", "ENG"))
    write_concepts(retained, out_path)

    lines = [
        f"parsed\t{len(concepts)}",
        f"after_semantic_filter\t{len(by_type)}",
        f"retained\t{len(retained)}",
    ]
    if retained:
        stats = corpus_stats(retained)
        lines.append(f"max_word_count\t{stats.max_word_count}")
    else:
        print("warning: no concepts retained", file=sys.stderr)
    summary = "\n".join(lines) + "\n"
    sys.stdout.write(summary)
    stats_out = _resolve(args, config, "stats_out")
    if stats_out:
        Path(stats_out).write_text(summary, encoding="utf-8")
    return 0


def cmd_score(args) -> int:
    config = _config_values(args)
    run = _run_config(args, config)
    concepts_path = _require(args, config, "concepts")
    out_path = _require(args, config, "out")
    concepts = parse_concepts_file(concepts_path)
    try:
        scored, buckets = run_scoring(run, concepts)
    except CacheMissError as exc:
        print("missing cache entries:", file=sys.stderr)
        for term in exc.terms:
            print(f"  {term}", file=sys.stderr)
        return 1
    write_scored(scored, buckets, out_path)
    print(f"scored {len(scored)} concepts -> {out_path}")
    return 0


def cmd_optimize(args) -> int:
    config = _config_values(args)
    run = _run_config(args, config)
    rows = read_scored(_require(args, config, "scored"))
    triples = read_ratings_csv(_require(args, config, "ratings"))
    rater = _resolve(args, config, "rater")
    if rater is not None:
        triples = [t for t in triples if t[0] == rater]
        if not triples:
            raise ConceptGaugeError(f"no ratings for rater {rater!r}")
    reference = matrix_from_records(triples)
    spec = ObjectiveSpec.from_scored_rows(rows, reference,
                                          run.bucket_thresholds())
    trace = run_strategy(
        spec, args.strategy, step=args.step, budget=args.budget,
        seed=args.seed, init_points=args.init_points)
    print(f"strategy\t{trace.strategy}")
    print(f"evaluations\t{len(trace.evaluations)}")
    print(f"best_weights\t{trace.best_weights}")
    print(f"best_value\t{trace.best_value:.6f}")
    if trace.near_optimal:
        print(f"near_optimal_count\t{len(trace.near_optimal)}")
    trace_out = _resolve(args, config, "trace_out")
    if trace_out:
        trace.write(trace_out)
    return 0


def cmd_sample(args) -> int:
    config = _config_values(args)
    run = _run_config(args, config)
    rows = read_scored(_require(args, config, "scored"))
    seed = int(_resolve(args, config, "seed", run.seed) or 0)
    pool_size = int(_resolve(args, config, "pool_size", run.pool_size))
    workdir = _resolve(args, config, "workdir")
    if workdir:
        run.pool_size = pool_size
        ws = Workspace(workdir, run)
        sample = ws.start_iteration(rows, run.weights, seed,
                                    iteration=args.iteration)
        print(f"iteration {sample.iteration} sampled into {workdir}")
        out_path = _resolve(args, config, "out")
        if out_path:
            from .survey import export_sample
            export_sample(sample, out_path)
        return 0
    from .survey import export_sample, sample_survey
    sample = sample_survey(rows, pool_size, seed, args.iteration)
    out_path = _require(args, config, "out")
    export_sample(sample, out_path)
    print(f"sampled {len(sample.concepts)} concepts -> {out_path}")
    return 0


def cmd_agree(args) -> int:
    config = _config_values(args)
    triples = read_ratings_csv(_require(args, config, "ratings"))
    matrix = matrix_from_records(triples)
    scored_path = _resolve(args, config, "scored")
    if scored_path:
        rows = read_scored(scored_path)
        buckets = {r.cui: r.bucket for r in rows}
        result = metric_agreement(buckets, matrix, level=args.level)
    else:
        result = krippendorff_alpha(matrix, level=args.level)
    print(str(result))
    return 0


def cmd_report(args) -> int:
    config = _config_values(args)
    run = _run_config(args, config)
    rows = read_scored(_require(args, config, "scored"))
    pairs = read_sample(_require(args, config, "sample"))
    sample = SurveySample(
        iteration=args.iteration,
        concepts=tuple(cui for cui, _ in pairs),
        pool_tags={},
        seed=run.seed,
        terms=dict(pairs),
    )
    ratings = ingest_ratings(_require(args, config, "ratings"),
                             known_cuis=sample.concepts)
    report = iteration_report(sample, ratings, rows, run.weights,
                              run.bucket_thresholds())
    sys.stdout.write(report.to_text())
    json_out = _resolve(args, config, "json_out")
    if json_out:
        report.write_json(json_out)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = _config_values(args)
    run = _run_config(args, config)
    workdir = _require(args, config, "workdir")
    ws = Workspace(workdir, run)
    app = create_app(ws, static_dir=_resolve(args, config, "ui_dir"))
    port = int(_resolve(args, config, "port", run.port))
    uvicorn.run(app, host=args.host, port=port)
    return 0


COMMANDS = {
    "ingest": cmd_ingest,
    "score": cmd_score,
    "optimize": cmd_optimize,
    "sample": cmd_sample,
    "agree": cmd_agree,
    "report": cmd_report,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConceptGaugeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
