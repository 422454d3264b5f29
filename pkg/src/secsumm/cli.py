"""Command-line entry point: ``secsumm analyze|summarize|evaluate|baseline``.

Every flag can also come from a JSON config file (``--config``) whose keys
are the flag names with dashes turned into underscores.  Flags given on
the command line win over the file.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

from . import __version__
from .analysis import (
    read_contribution_csv,
    section_contribution,
    write_contribution_csv,
    write_plot_data,
)
from .assemble import (
    AssemblyError,
    WeightConfig,
    assemble_longsumm,
    lead150_laysumm,
    manifest_record,
    write_manifest,
)
from .budget import DEFAULT_CUTOFF, LAYSUMM_BUDGET_WORDS, LONGSUMM_BUDGET_WORDS
from .evaluate import (
    evaluate_pairs,
    format_table,
    match_ids,
    read_text_dir,
    write_per_doc_csv,
    write_report_csv,
)
from .extract import SCORER_KINDS, ExternalScoreError, ScorerSpec
from .ingest import FORMATS, IngestError, Paper, parse_paper
from .postproc import PASSES, postprocess
from .rouge import RougeConfig

logger = logging.getLogger("secsumm")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3


class ConfigError(Exception):
    pass


class DataError(Exception):
    pass


# ---------------------------------------------------------------------------
# corpus loading

def detect_format(obj) -> str:
    if isinstance(obj, dict) and ("abstractText" in obj or "metadata" in obj):
        return "science_parse"
    if isinstance(obj, dict) and "abstract" in obj:
        return "laysumm"
    return "science_parse"


def load_paper(path: str | Path, fmt: str = "auto") -> Paper:
    path = Path(path)
    raw = path.read_bytes()
    if fmt == "auto":
        try:
            fmt = detect_format(json.loads(raw.decode("utf-8-sig")))
        except (ValueError, UnicodeDecodeError):
            fmt = "science_parse"  # let parse_paper report the offset
    return parse_paper(raw, fmt, default_id=path.stem)


def corpus_files(directory: str | Path) -> list[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError(f"not a directory: {directory}")
    return sorted(p for p in directory.iterdir() if p.is_file() and p.suffix == ".json")


def _load_one(args: tuple[str, str]):
    path, fmt = args
    try:
        return load_paper(path, fmt), None
    except (IngestError, OSError) as exc:
        return None, f"{path}: {exc}"


def _pool_map(fn, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def load_corpus(directory: str | Path, fmt: str = "auto", workers: int = 1) -> tuple[list[Paper], list[str]]:
    files = corpus_files(directory)
    results = _pool_map(_load_one, [(str(p), fmt) for p in files], workers)
    papers = [p for p, _ in results if p is not None]
    errors = [e for _, e in results if e is not None]
    for err in errors:
        logger.error("%s", err)
    seen: set[str] = set()
    for p in papers:
        if p.id in seen:
            raise DataError(f"duplicate paper id {p.id!r} in {directory}")
        seen.add(p.id)
    return sorted(papers, key=lambda p: p.id), errors


# ---------------------------------------------------------------------------
# summarize

@dataclass(frozen=True)
class SummarizeOptions:
    task: str
    baseline: str
    hard_150: bool
    budget_words: int
    weights: WeightConfig
    scorer: ScorerSpec
    rouge: RougeConfig
    postproc: tuple[str, ...]
    strict_unicode: bool
    abstract_fallback: bool


def summarize_paper(paper: Paper, opts: SummarizeOptions, gold: str | None = None):
    """Summary draft, cleanup report and manifest record for one paper."""
    if opts.task == "laysumm" and opts.baseline == "lead150":
        draft = lead150_laysumm(paper, opts.budget_words, hard=opts.hard_150, fallback=opts.abstract_fallback)
    else:
        draft = assemble_longsumm(paper, opts.weights, opts.scorer, opts.budget_words, gold=gold,
                                  config=opts.rouge, task=opts.task)
    report = None
    if opts.postproc:
        draft, report = postprocess(draft, opts.postproc, transliterate_chars=not opts.strict_unicode)
    return draft, report, manifest_record(draft, report)


def _summarize_job(job):
    paper, opts, gold = job
    try:
        draft, _, record = summarize_paper(paper, opts, gold)
    except (AssemblyError, ExternalScoreError, ValueError) as exc:
        return paper.id, None, None, str(exc)
    return paper.id, draft.text, record, None


# ---------------------------------------------------------------------------
# argument parsing

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with default values for any flag")
    p.add_argument("--format", choices=("auto",) + FORMATS, default="auto", help="input paper layout")
    p.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--rouge-stemming", action="store_true", help="Porter-stem tokens before scoring")
    p.add_argument("--rouge-stopwords", action="store_true", help="drop stopwords before scoring")
    p.add_argument("--rouge-l-mode", choices=("sequence", "union"), default="sequence")
    p.add_argument("-v", "--verbose", action="count", default=0)


def _add_pipeline(p: argparse.ArgumentParser) -> None:
    p.add_argument("--task", choices=("longsumm", "laysumm"), default="longsumm")
    p.add_argument("--baseline", choices=("lead150", "none"), default=None,
                   help="laysumm only: lead150 (default) or the section pipeline")
    p.add_argument("--hard-150", action="store_true", help="Lead-150: cut at the literal word limit")
    p.add_argument("--abstract-fallback", action="store_true",
                   help="Lead-150: use the first body section when a paper has no abstract")
    p.add_argument("--cutoff", type=float, default=DEFAULT_CUTOFF, help="ROUGE-1 section cutoff (0-100)")
    p.add_argument("--budget-words", type=int, default=None,
                   help=f"summary budget (default {LONGSUMM_BUDGET_WORDS} longsumm, {LAYSUMM_BUDGET_WORDS} laysumm)")
    p.add_argument("--scorer", choices=SCORER_KINDS, default="centrality")
    p.add_argument("--external-scores", help="CSV/JSONL file of external sentence scores")
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--sim-threshold", type=float, default=0.0)
    p.add_argument("--idf", action="store_true", help="centrality: idf-weight the similarity vectors")
    p.add_argument("--weight-mode", choices=("gold", "prior"), default="prior")
    p.add_argument("--weight-axis", choices=("f1", "recall"), default="f1")
    p.add_argument("--prior-table", help="contribution CSV written by 'analyze'")
    p.add_argument("--gold", help="directory of gold summaries (<id>.txt)")
    p.add_argument("--postproc", default="", help=f"comma list of passes from {','.join(PASSES)}, or 'all'")
    p.add_argument("--strict-unicode", action="store_true",
                   help="delete non-ASCII characters instead of transliterating them")
    p.add_argument("--out", required=True, help="output directory for <id>.txt files")
    p.add_argument("--manifest", help="manifest path (default <out>/manifest.jsonl)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="secsumm", description="Section-aware extractive summarization of papers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="per-heading ROUGE overlap between sections and gold summaries")
    p.add_argument("corpus", help="directory of paper JSON files")
    p.add_argument("gold_dir", help="directory of gold summaries named <id>.txt")
    p.add_argument("--metric-axis", choices=("f1", "recall"), default="f1")
    p.add_argument("--min-heading-freq", type=float, default=0.05)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--plot-data", help="also write the long-format per-heading series here")
    _add_common(p)

    p = sub.add_parser("summarize", help="write one summary per paper")
    p.add_argument("corpus")
    _add_pipeline(p)
    _add_common(p)

    p = sub.add_parser("baseline", help="Lead-150 baseline over the abstracts")
    p.add_argument("corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--budget-words", type=int, default=LAYSUMM_BUDGET_WORDS)
    p.add_argument("--sentence-complete", action="store_true",
                   help="stop at the last whole sentence instead of the literal word limit")
    p.add_argument("--abstract-fallback", action="store_true")
    p.add_argument("--gold", help="if given, evaluate the baseline against this directory")
    _add_common(p)

    p = sub.add_parser("evaluate", help="ROUGE table of system summaries against gold summaries")
    p.add_argument("system_dir")
    p.add_argument("gold_dir")
    p.add_argument("--label", help="method name for the table row (default: system dir name)")
    p.add_argument("--out", help="report CSV path")
    p.add_argument("--append", action="store_true", help="add the row to an existing report CSV")
    p.add_argument("--per-doc", help="per-document CSV path")
    _add_common(p)
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    # read --config before the full parse so the file can satisfy required flags
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known_args, _ = pre.parse_known_args(argv)
    command = next((a for a in argv if a in COMMANDS), None)
    if not known_args.config or command is None:
        return parser.parse_args(argv)
    try:
        with open(known_args.config, encoding="utf-8") as fh:
            values = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {known_args.config}: {exc}") from exc
    if not isinstance(values, dict):
        raise ConfigError("config file must hold a JSON object")
    subparser = next(
        a for a in parser._subparsers._group_actions if isinstance(a, argparse._SubParsersAction)
    ).choices[command]
    known = {a.dest for a in subparser._actions}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown config keys for '{command}': {unknown}")
    for a in subparser._actions:
        if a.dest in values:
            a.required = False
    subparser.set_defaults(**values)
    return parser.parse_args(argv)


def _rouge_config(args) -> RougeConfig:
    return RougeConfig(stemming=args.rouge_stemming, remove_stopwords=args.rouge_stopwords,
                       rouge_l_mode=args.rouge_l_mode)


def _metadata(args, **extra) -> dict:
    meta = {k: v for k, v in sorted(vars(args).items()) if k not in ("verbose", "workers", "config")}
    meta["version"] = __version__
    meta.update(extra)
    return meta


# ---------------------------------------------------------------------------
# commands

def cmd_analyze(args) -> int:
    config = _rouge_config(args)
    if not 0 <= args.min_heading_freq <= 1:
        raise ConfigError("--min-heading-freq must lie in [0, 1]")
    papers, _ = load_corpus(args.corpus, args.format, args.workers)
    gold = read_text_dir(args.gold_dir) if Path(args.gold_dir).is_dir() else None
    if gold is None:
        raise DataError(f"not a directory: {args.gold_dir}")
    matched = [p for p in papers if p.id in gold]
    if not matched:
        raise DataError("no paper id matches a gold summary file")
    rows = section_contribution(matched, gold, args.metric_axis, args.min_heading_freq, config)
    meta = {
        "metric_axis": args.metric_axis,
        "candidate": "section",
        "reference": "gold",
        "min_heading_freq": args.min_heading_freq,
        "n_papers": len(matched),
        "rouge": json.dumps(asdict(config), sort_keys=True),
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_contribution_csv(rows, fh, meta)
    else:
        write_contribution_csv(rows, sys.stdout, meta)
    if args.plot_data:
        with open(args.plot_data, "w", encoding="utf-8", newline="") as fh:
            write_plot_data(rows, fh)
    return EXIT_OK


def _postproc_passes(value: str) -> tuple[str, ...]:
    if not value:
        return ()
    if value == "all":
        return PASSES
    passes = tuple(x.strip() for x in value.split(",") if x.strip())
    bad = [x for x in passes if x not in PASSES]
    if bad:
        raise ConfigError(f"unknown --postproc passes {bad}; choose from {PASSES}")
    return passes


def _summarize_options(args, baseline: str) -> SummarizeOptions:
    budget = args.budget_words
    if budget is None:
        budget = LAYSUMM_BUDGET_WORDS if args.task == "laysumm" else LONGSUMM_BUDGET_WORDS
    if budget < 1:
        raise ConfigError("--budget-words must be >= 1")
    if args.cutoff < 0:
        raise ConfigError("--cutoff must be non-negative")
    prior = None
    needs_pipeline = not (args.task == "laysumm" and baseline == "lead150")
    if needs_pipeline and args.weight_mode == "prior":
        if not args.prior_table:
            raise ConfigError("--weight-mode prior needs --prior-table")
        try:
            with open(args.prior_table, encoding="utf-8") as fh:
                prior = tuple(read_contribution_csv(fh))
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"cannot read prior table: {exc}") from exc
        if not prior:
            raise ConfigError("prior table has no rows")
    if needs_pipeline and (args.weight_mode == "gold" or args.scorer == "oracle") and not args.gold:
        raise ConfigError("gold weights and the oracle scorer need --gold")
    params: dict = {}
    if args.scorer == "centrality":
        params = {"damping": args.damping, "sim_threshold": args.sim_threshold, "idf": args.idf}
    elif args.scorer == "external":
        if not args.external_scores:
            raise ConfigError("--scorer external needs --external-scores")
        if not Path(args.external_scores).is_file():
            raise ConfigError(f"external score file not found: {args.external_scores}")
        params = {"path": str(Path(args.external_scores).resolve())}
    try:
        scorer = ScorerSpec(args.scorer, params)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return SummarizeOptions(
        task=args.task,
        baseline=baseline,
        hard_150=args.hard_150,
        budget_words=budget,
        weights=WeightConfig(args.weight_mode, args.cutoff, args.weight_axis, prior),
        scorer=scorer,
        rouge=_rouge_config(args),
        postproc=_postproc_passes(args.postproc),
        strict_unicode=args.strict_unicode,
        abstract_fallback=args.abstract_fallback,
    )


def run_summarize(args, opts: SummarizeOptions) -> int:
    papers, load_errors = load_corpus(args.corpus, args.format, args.workers)
    if not papers and not load_errors:
        raise DataError(f"no paper JSON files in {args.corpus}")
    gold = read_text_dir(args.gold) if args.gold else {}
    jobs = [(p, opts, gold.get(p.id)) for p in papers]
    results = _pool_map(_summarize_job, jobs, args.workers)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records = []
    n_fail = len(load_errors)
    for paper_id, text, record, err in sorted(results, key=lambda r: r[0]):
        if err is not None:
            logger.error("%s: %s", paper_id, err)
            n_fail += 1
            continue
        (out / f"{paper_id}.txt").write_text(text + "\n", encoding="utf-8")
        records.append(record)
    manifest = Path(args.manifest) if getattr(args, "manifest", None) else out / "manifest.jsonl"
    write_manifest(records, manifest)
    meta_path = manifest.with_suffix(".meta.json")
    meta_path.write_text(json.dumps(_metadata(args, options=_options_dict(opts)), indent=2, sort_keys=True,
                                    default=str) + "\n", encoding="utf-8")
    logger.info("wrote %d summaries to %s (%d failed)", len(records), out, n_fail)
    if not records:
        raise DataError("every paper failed")
    return EXIT_OK


def _options_dict(opts: SummarizeOptions) -> dict:
    d = asdict(opts)
    if d["weights"]["prior_table"] is not None:
        d["weights"]["prior_table"] = f"{len(d['weights']['prior_table'])} rows"
    return d


def cmd_summarize(args) -> int:
    baseline = args.baseline or ("lead150" if args.task == "laysumm" else "none")
    if baseline == "lead150" and args.task != "laysumm":
        raise ConfigError("--baseline lead150 applies to --task laysumm only")
    return run_summarize(args, _summarize_options(args, baseline))


def cmd_baseline(args) -> int:
    if args.budget_words < 1:
        raise ConfigError("--budget-words must be >= 1")
    opts = SummarizeOptions(
        task="laysumm", baseline="lead150", hard_150=not args.sentence_complete,
        budget_words=args.budget_words, weights=WeightConfig(), scorer=ScorerSpec("lead"),
        rouge=_rouge_config(args), postproc=(), strict_unicode=False,
        abstract_fallback=args.abstract_fallback,
    )
    code = run_summarize(args, opts)
    if args.gold:
        report = _evaluate_dirs(args.out, args.gold, "Lead-150 baseline", _rouge_config(args), args)
        print(format_table(report.rows))
    return code


def _evaluate_dirs(system_dir, gold_dir, label, config, args):
    for d in (system_dir, gold_dir):
        if not Path(d).is_dir():
            raise DataError(f"not a directory: {d}")
    system = read_text_dir(system_dir)
    gold = read_text_dir(gold_dir)
    pairs = match_ids(system, gold)
    if not pairs:
        raise DataError("no system file matches a gold summary")
    return evaluate_pairs(pairs, label, config, _metadata(args, n_docs=len(pairs)))


def cmd_evaluate(args) -> int:
    label = args.label or Path(args.system_dir).resolve().name
    report = _evaluate_dirs(args.system_dir, args.gold_dir, label, _rouge_config(args), args)
    print(format_table(report.rows))
    if args.out:
        out = Path(args.out)
        exists = out.exists() and out.stat().st_size > 0
        with open(out, "a" if args.append else "w", encoding="utf-8", newline="") as fh:
            write_report_csv(report.rows, fh, header=not (args.append and exists))
        meta_path = out.with_suffix(".meta.jsonl")
        with open(meta_path, "a" if args.append else "w", encoding="utf-8") as fh:
            fh.write(json.dumps({"method": label, **report.run_metadata}, sort_keys=True, default=str) + "\n")
    if args.per_doc:
        with open(args.per_doc, "w", encoding="utf-8", newline="") as fh:
            write_per_doc_csv(report.per_doc or [], fh)
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "summarize": cmd_summarize,
    "baseline": cmd_baseline,
    "evaluate": cmd_evaluate,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config_file(parser, argv)
    except ConfigError as exc:
        print(f"secsumm: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if args.workers < 1:
        print("secsumm: config error: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"secsumm: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"secsumm: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
