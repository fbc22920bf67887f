"""``discourse-lens`` command line.

Exit codes: 0 success, 1 invalid corpus data (validation, schema or label
errors; mismatched reports), 2 usage errors (bad flags, unreadable files,
invalid configuration).
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .errors import ConfigInvalid, CorpusIOError, DiscourseLensError, InvalidPair, ValidationFailed
from .ingest import CorpusSource, parse_corpus
from .multiview import (
    bigram_relation_distribution,
    bigram_instances,
    extract_instances,
    lexical_marker_share,
    parse_pattern,
    talkmove_to_none_da_distribution,
    triple_none_da_distribution,
)
from .report import (
    AnalysisConfig,
    compare,
    dist_section,
    dumps_canonical,
    emit_dot,
    emit_gaps_csv,
    emit_heatmap_csv,
    filtered_section,
    full_report,
    load_report,
    matrix_section,
    pair_key,
    render_summary,
    report_bytes,
    round_float,
    round_fraction,
    round_ratio,
    topk_section,
)
from .sequence import filter_transitions, gap_histogram, gap_matrix, tnone_gap_statistic, transition_counts
from .unigram import crosstab_talkmove_dialogueact, dialogue_act_distribution, talk_move_distribution
from .vocab import is_none, load_vocabulary

log = logging.getLogger("discourse_lens")

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2


def _fraction(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"{text} is outside [0, 1]")
    return value


def _positive(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _pair(text):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or not all(parts):
        raise argparse.ArgumentTypeError(f"expected A,B, got {text!r}")
    return tuple(parts)


GLOBAL_DEFAULTS = {
    "threads": 1, "strict": False, "talkmove_vocab": None, "da_vocab": None,
    "relation_vocab": None, "verbose": False,
}


def _common():
    # defaults are suppressed so that a flag given before the subcommand is not
    # overwritten by the subparser; main() fills in GLOBAL_DEFAULTS afterwards
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = p.add_argument_group("global options")
    g.add_argument("--threads", type=_positive, help="worker threads for per-session scans (default 1)")
    g.add_argument("--strict", action="store_true", help="unknown labels and crossing edges are errors")
    g.add_argument("--talkmove-vocab", metavar="FILE")
    g.add_argument("--da-vocab", metavar="FILE")
    g.add_argument("--relation-vocab", metavar="FILE")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def _corpus_inputs(p, positional=False):
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    if positional:
        p.add_argument("paths", nargs="+", help="corpus files (jsonl) or directories (csv)")
    else:
        p.add_argument("--in", dest="paths", action="extend", nargs="+", required=True, metavar="PATH",
                       help="corpus files (jsonl) or directories (csv)")
    p.add_argument("--corpus-id", help="defaults to the sorted input file stems")


def _config_flags(p):
    d = AnalysisConfig()
    g = p.add_argument_group("analysis configuration")
    g.add_argument("--transition-threshold", "--threshold", type=_fraction, default=d.transition_threshold)
    g.add_argument("--gap-min-share", "--min-share", type=_fraction, default=d.gap_min_share)
    g.add_argument("--topk-talkmove-das", type=_positive, default=d.topk_talkmove_das)
    g.add_argument("--topk-none-das", type=_positive, default=d.topk_none_das)
    g.add_argument("--coverage-targets", type=lambda s: tuple(_fraction(x) for x in s.split(",")),
                   default=d.coverage_targets, metavar="F,F")
    g.add_argument("--da-display-min-share", type=_fraction, default=d.da_display_min_share)
    g.add_argument("--include-continuation-in-crosstab", action="store_true")
    g.add_argument("--markers", type=lambda s: tuple(m for m in s.split(",") if m.strip()),
                   default=d.markers, metavar="WORD[,WORD]")


def _config(args) -> AnalysisConfig:
    return AnalysisConfig(
        transition_threshold=args.transition_threshold,
        gap_min_share=args.gap_min_share,
        topk_talkmove_das=args.topk_talkmove_das,
        topk_none_das=args.topk_none_das,
        coverage_targets=args.coverage_targets,
        da_display_min_share=args.da_display_min_share,
        exclude_continuation_in_crosstab=not args.include_continuation_in_crosstab,
        markers=args.markers,
    )


def _vocab(args):
    return load_vocabulary(args.talkmove_vocab, args.da_vocab, args.relation_vocab)


def _load(args, vocab):
    strictness = "strict" if args.strict else "lenient"
    corpus, report = parse_corpus(CorpusSource(args.format, args.paths, strictness), vocab,
                                  args.corpus_id, args.threads)
    for issue in report.warnings:
        log.debug("warning %s %s: %s", issue.code, issue.location, issue.message)
    if report.warnings:
        log.info("%d validation warning(s)", len(report.warnings))
    if not report.ok:
        raise ValidationFailed(report)
    return corpus


def _write(out, text):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def cmd_validate(args):
    vocab = _vocab(args)
    strictness = "strict" if args.strict else "lenient"
    try:
        _, report = parse_corpus(CorpusSource(args.format, args.paths, strictness), vocab,
                                 args.corpus_id, args.threads)
    except ValidationFailed as exc:
        report = exc.report
    for issue in report.issues:
        print(f"{issue.severity}\t{issue.code}\t{issue.location}\t{issue.message}")
    print(f"{len(report.errors)} error(s), {len(report.warnings)} warning(s)", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_unigram(args):
    vocab = _vocab(args)
    corpus = _load(args, vocab)
    out = {"corpus_id": corpus.corpus_id, "view": args.view}
    k = args.top_k
    if args.view == "talkmove":
        d = talk_move_distribution(corpus, args.role, vocab, args.threads)
        out.update(role=args.role, distribution=dist_section(d))
        if k:
            out["top_k"] = topk_section(d, k, args.coverage)
    elif args.view == "da":
        d = dialogue_act_distribution(corpus, args.min_share_display, args.threads)
        out["distribution"] = dist_section(d)
        out["display"] = {
            "min_share": round_float(args.min_share_display),
            "labels": {label: {"count": c, "share": round_ratio(c, d.total)} for label, c, _ in d.display()},
        }
        if k:
            out["top_k"] = topk_section(d, k, args.coverage)
    else:
        ct = crosstab_talkmove_dialogueact(corpus, args.exclude_continuation, vocab, args.threads)
        rows = {}
        for move in ct.row_labels:
            rows[move] = dist_section(ct.row(move))
            if k:
                rows[move]["top_k"] = topk_section(ct.row(move), k, args.coverage)
        out.update(exclude_continuation=ct.exclude_continuation, rows=rows)
    _write(args.out, dumps_canonical(out))
    return EXIT_OK


def cmd_transitions(args):
    vocab = _vocab(args)
    corpus = _load(args, vocab)
    m = transition_counts(corpus, args.collapse_none, vocab, args.threads)
    f = filter_transitions(m, args.threshold)
    out = {"corpus_id": corpus.corpus_id, "matrix": matrix_section(m), "filtered": filtered_section(f)}
    _write(args.out, dumps_canonical(out))
    if args.dot:
        _write(args.dot, emit_dot(f, args.grouping))
    return EXIT_OK


def cmd_gaps(args):
    vocab = _vocab(args)
    corpus = _load(args, vocab)
    g = gap_matrix(corpus, args.min_share, vocab, args.threads)
    _write(args.out, emit_gaps_csv(g))
    if args.heatmap:
        _write(args.heatmap, emit_heatmap_csv(g))
    return EXIT_OK


def cmd_multiview(args):
    vocab = _vocab(args)
    corpus = _load(args, vocab)
    tm_j, tm_k = args.pair
    for label in args.pair:
        if label not in vocab.talk_moves:
            raise InvalidPair(f"{label!r} is not a talk move")
    direct = transition_counts(corpus, False, vocab, args.threads)
    rels = bigram_relation_distribution(corpus, tm_j, tm_k, args.threads)
    out = {
        "corpus_id": corpus.corpus_id,
        "pair": pair_key(tm_j, tm_k),
        "transition": {
            "count": direct.count(tm_j, tm_k),
            "probability": round_ratio(direct.count(tm_j, tm_k), int(direct.row_totals[vocab.talk_moves.index(tm_j)])),
        },
        "bigram_relations": {"instances": len(bigram_instances(corpus, tm_j, tm_k)), **dist_section(rels)},
        "talkmove_to_none_acts": dist_section(talkmove_to_none_da_distribution(corpus, tm_j, args.threads)),
    }
    if not is_none(tm_j) and not is_none(tm_k):
        triple = triple_none_da_distribution(corpus, tm_j, tm_k, args.threads)
        out["triple_none_acts"] = {**dist_section(triple), "top_k": topk_section(triple, args.top_k, args.coverage)}
        h = gap_histogram(corpus, tm_j, tm_k, vocab, args.threads)
        stat = tnone_gap_statistic(h, args.min_share)
        out["gap"] = {
            "histogram": [[n, c] for n, c in h.entries],
            "value": round_fraction(stat.exact_value),
            "retained_instances": stat.retained_instances,
            "excluded": [[n, c] for n, c in stat.excluded_entries],
        }
    _write(args.out, dumps_canonical(out))
    return EXIT_OK


def cmd_lexical(args):
    vocab = _vocab(args)
    corpus = _load(args, vocab)
    position = {"leading": "leading_token", "any": "any_token"}[args.position]
    res = lexical_marker_share(corpus, args.pair, args.markers, position)
    out = {
        "corpus_id": corpus.corpus_id,
        "pair": pair_key(*args.pair),
        "markers": list(args.markers),
        "position": position,
        "instances": res.instances,
        "matched": len(res.matched),
        "share": round_ratio(len(res.matched), res.instances),
        "matches": [{"session_id": b.session_id, "indices": [b.first_index, b.second_index]} for b in res.matched],
    }
    _write(args.out, dumps_canonical(out))
    return EXIT_OK


def cmd_examples(args):
    vocab = _vocab(args)
    corpus = _load(args, vocab)
    try:
        pattern = parse_pattern(args.pattern)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    excerpts = extract_instances(corpus, pattern, args.limit, args.context)
    _write(args.out, dumps_canonical([e.to_dict() for e in excerpts]))
    return EXIT_OK


def cmd_report(args):
    vocab = _vocab(args)
    config = _config(args)
    corpus = _load(args, vocab)
    strictness = "strict" if args.strict else "lenient"
    report = full_report(corpus, config, vocab, args.threads, strictness)
    if args.out in (None, "-"):
        sys.stdout.buffer.write(report_bytes(report))
    else:
        Path(args.out).write_bytes(report_bytes(report))
        sys.stderr.write(render_summary(report))
    if args.dot_dir:
        d = Path(args.dot_dir)
        d.mkdir(parents=True, exist_ok=True)
        direct = transition_counts(corpus, False, vocab, args.threads)
        collapsed = transition_counts(corpus, True, vocab, args.threads)
        f = filter_transitions(direct, config.transition_threshold)
        for grouping in ("all", "to_teacher", "to_student"):
            (d / f"transitions_{grouping}.dot").write_bytes(emit_dot(f, grouping).encode("utf-8"))
        # collapsed sequences are drawn without a threshold
        (d / "collapsed_all.dot").write_bytes(emit_dot(filter_transitions(collapsed, 0.0), "all").encode("utf-8"))
    if args.heatmaps_dir:
        d = Path(args.heatmaps_dir)
        d.mkdir(parents=True, exist_ok=True)
        g = gap_matrix(corpus, config.gap_min_share, vocab, args.threads)
        (d / "gaps_heatmap.csv").write_bytes(emit_heatmap_csv(g).encode("utf-8"))
        (d / "gaps.csv").write_bytes(emit_gaps_csv(g).encode("utf-8"))
        (d / "transitions_direct.csv").write_bytes(
            emit_heatmap_csv(transition_counts(corpus, False, vocab, args.threads)).encode("utf-8"))
        (d / "transitions_collapsed.csv").write_bytes(
            emit_heatmap_csv(transition_counts(corpus, True, vocab, args.threads)).encode("utf-8"))
    return EXIT_OK


def cmd_compare(args):
    a = load_report(Path(args.a).read_text(encoding="utf-8"))
    b = load_report(Path(args.b).read_text(encoding="utf-8"))
    _write(args.out, dumps_canonical(compare(a, b).to_dict()))
    return EXIT_OK


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="discourse-lens", description=__doc__.splitlines()[0],
                                     parents=[common])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check corpus files")
    _corpus_inputs(p, positional=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("unigram", parents=[common], help="label distributions")
    _corpus_inputs(p)
    p.add_argument("--view", choices=("talkmove", "da", "crosstab"), default="talkmove")
    p.add_argument("--role", choices=("teacher", "student"))
    p.add_argument("--exclude-continuation", action="store_true")
    p.add_argument("--top-k", type=_positive)
    p.add_argument("--coverage", type=_fraction, default=0.5)
    p.add_argument("--min-share-display", type=_fraction, default=AnalysisConfig().da_display_min_share)
    p.add_argument("--out")
    p.set_defaults(func=cmd_unigram)

    p = sub.add_parser("transitions", parents=[common], help="bigram transition matrix and edges")
    _corpus_inputs(p)
    p.add_argument("--collapse-none", action="store_true")
    p.add_argument("--threshold", type=_fraction, default=AnalysisConfig().transition_threshold)
    p.add_argument("--dot", metavar="FILE")
    p.add_argument("--grouping", choices=("all", "to_teacher", "to_student"), default="all")
    p.add_argument("--out")
    p.set_defaults(func=cmd_transitions)

    p = sub.add_parser("gaps", parents=[common], help="intervening T-None gap matrix (CSV)")
    _corpus_inputs(p)
    p.add_argument("--min-share", type=_fraction, default=AnalysisConfig().gap_min_share)
    p.add_argument("--heatmap", metavar="FILE")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gaps)

    p = sub.add_parser("multiview", parents=[common], help="relations and None acts for one pair")
    _corpus_inputs(p)
    p.add_argument("--pair", type=_pair, required=True, metavar="A,B")
    p.add_argument("--min-share", type=_fraction, default=AnalysisConfig().gap_min_share)
    p.add_argument("--top-k", type=_positive, default=AnalysisConfig().topk_none_das)
    p.add_argument("--coverage", type=_fraction, default=AnalysisConfig().coverage_targets[1])
    p.add_argument("--out")
    p.set_defaults(func=cmd_multiview)

    p = sub.add_parser("lexical", parents=[common], help="marker-word share over a bigram")
    _corpus_inputs(p)
    p.add_argument("--pair", type=_pair, required=True, metavar="A,B")
    p.add_argument("--markers", type=lambda s: tuple(m for m in s.split(",") if m.strip()), default=("so",))
    p.add_argument("--position", choices=("leading", "any"), default="leading")
    p.add_argument("--out")
    p.set_defaults(func=cmd_lexical)

    p = sub.add_parser("examples", parents=[common], help="excerpts matching a pattern")
    _corpus_inputs(p)
    p.add_argument("--pattern", required=True, help="bigram:A,B | triple:A,B | act:MOVE,ACT")
    p.add_argument("--limit", type=_positive, default=10)
    p.add_argument("--context", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_examples)

    p = sub.add_parser("report", parents=[common], help="full canonical analysis report")
    _corpus_inputs(p)
    _config_flags(p)
    p.add_argument("--out")
    p.add_argument("--dot-dir")
    p.add_argument("--heatmaps-dir")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("compare", parents=[common], help="deltas between two reports")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    for key, value in GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ValidationFailed as exc:
        for issue in exc.report.errors:
            print(f"error\t{issue.code}\t{issue.location}\t{issue.message}", file=sys.stderr)
        return EXIT_INVALID
    except (ConfigInvalid, CorpusIOError, InvalidPair, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DiscourseLensError, ValueError) as exc:
        code = getattr(exc, "code", "ERROR")
        print(f"error: {code}: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, ValueError) else EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
