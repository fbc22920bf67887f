"""Canonical analysis report, corpus comparison, DOT and CSV renderers.

Counts are accumulated as integers and every ratio is rounded once, at
formatting time, half-to-even: 6 fractional digits in reports, 4 in CSV
tables. Report JSON is emitted with sorted keys so that identical inputs give
identical bytes.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction

from . import __version__
from .errors import ConfigInvalid, ConfigMismatch, ValidationFailed
from .model import Corpus, validate_corpus
from .multiview import NO_EDGE, bigram_relation_table, lexical_table, talkmove_to_none_table, triple_table
from .sequence import (
    GAP_UNIT,
    FilteredTransitions,
    GapMatrix,
    TransitionMatrix,
    filter_transitions,
    gap_matrix,
    transition_counts,
)
from .unigram import (
    BELOW_THRESHOLD,
    Distribution,
    crosstab_talkmove_dialogueact,
    dialogue_act_distribution,
    talk_move_distribution,
    top_k_with_coverage,
)
from .vocab import DEFAULT_VOCABULARY, is_none

REPORT_PLACES = 6
TABLE_PLACES = 4

NOTES = (
    "Transition probabilities are P(to | from) normalised over all successors of the source move; "
    "the split by receiving role is a display grouping. Re-normalising within each role quadrant "
    "would give larger per-panel values and is not computed.",
    "Transition and gap thresholds are applied to unrounded probabilities and shares.",
    f"Gap values are in units of {GAP_UNIT}; gap lengths whose share of a pair's instances is below "
    "min_share are dropped first.",
)


def round_ratio(num: int, den: int, places: int = REPORT_PLACES) -> Decimal:
    """``num / den`` rounded half-to-even at ``places`` digits, exactly. ``den == 0`` gives 0."""
    if den == 0:
        return Decimal(0).scaleb(-places)
    frac = Fraction(num, den)
    q, r = divmod(frac.numerator * 10 ** places, frac.denominator)
    if 2 * r > frac.denominator or (2 * r == frac.denominator and q % 2):
        q += 1
    return Decimal(q).scaleb(-places)


def round_fraction(x: Fraction, places: int = REPORT_PLACES) -> Decimal:
    return round_ratio(x.numerator, x.denominator, places)


def round_float(x: float, places: int = REPORT_PLACES) -> Decimal:
    return Decimal(repr(x)).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN)


def fmt(d: Decimal) -> str:
    return format(d, "f")


@dataclass(frozen=True)
class AnalysisConfig:
    transition_threshold: float = 0.10
    gap_min_share: float = 0.05
    topk_talkmove_das: int = 3
    topk_none_das: int = 7
    coverage_targets: tuple = (0.50, 0.75)
    da_display_min_share: float = 0.005
    exclude_continuation_in_crosstab: bool = True
    markers: tuple = ("so",)

    def __post_init__(self):
        object.__setattr__(self, "coverage_targets", tuple(self.coverage_targets))
        object.__setattr__(self, "markers", tuple(self.markers))
        fractions = (self.transition_threshold, self.gap_min_share, self.da_display_min_share,
                     *self.coverage_targets)
        for x in fractions:
            if not 0 <= x < 1:
                raise ConfigInvalid(f"fraction {x} outside [0, 1)")
        for k in (self.topk_talkmove_das, self.topk_none_das):
            if int(k) != k or k < 1:
                raise ConfigInvalid(f"top-k value {k} must be a positive integer")
        if len(self.coverage_targets) != 2 or min(self.coverage_targets) <= 0:
            raise ConfigInvalid("coverage_targets needs two positive fractions (talk moves, None moves)")
        if not self.markers or not all(m.strip() for m in self.markers):
            raise ConfigInvalid("markers must be non-empty words")

    def to_report(self) -> dict:
        out = {}
        for key, value in asdict(self).items():
            if isinstance(value, bool) or isinstance(value, int):
                out[key] = value
            elif isinstance(value, float):
                out[key] = round_float(value)
            elif key == "coverage_targets":
                out[key] = [round_float(v) for v in value]
            else:
                out[key] = list(value)
        return out


def dist_section(d: Distribution) -> dict:
    total = d.total
    return {
        "total": total,
        "labels": {label: {"count": c, "share": round_ratio(c, total)} for label, c in zip(d.labels, d.counts)},
        "order": list(d.labels),
    }


def topk_section(d: Distribution, k: int, target: float) -> dict:
    top = top_k_with_coverage(d, k, target)
    covered = sum(d.count(label) for label in top.labels)
    return {
        "k": k,
        "coverage_target": round_float(target),
        "labels": list(top.labels),
        "achieved_coverage": round_ratio(covered, d.total),
        "target_met": top.target_met,
    }


def pair_key(a, b) -> str:
    return f"{a} -> {b}"


def matrix_section(m: TransitionMatrix) -> dict:
    rows = {}
    totals = m.row_totals
    for i, source in enumerate(m.labels):
        total = int(totals[i])
        cells = {}
        if total:
            for j, target in enumerate(m.labels):
                c = int(m.counts[i, j])
                cells[target] = {"count": c, "probability": round_ratio(c, total)}
        rows[source] = {"total": total, "to": cells}
    return {"mode": m.mode, "total": int(m.counts.sum()), "rows": rows}


def filtered_section(f: FilteredTransitions) -> dict:
    return {
        "threshold": round_float(f.threshold),
        "edges": {
            pair_key(e.source, e.target): {
                "count": e.count,
                "probability": round_ratio(e.count, e.row_total),
                "receiver_role": e.receiver_role,
            }
            for e in f.edges
        },
    }


def gaps_section(g: GapMatrix) -> dict:
    cells, absent = {}, []
    for (j, k), stat in sorted(g.cells.items()):
        if stat is None:
            absent.append(pair_key(j, k))
            continue
        cells[pair_key(j, k)] = {
            "value": round_fraction(stat.exact_value),
            "retained_instances": stat.retained_instances,
            "total_instances": stat.total_instances,
            "excluded": [[gap, c] for gap, c in stat.excluded_entries],
        }
    return {"min_share": round_float(g.min_share), "unit": GAP_UNIT, "cells": cells, "absent": absent}


def full_report(corpus: Corpus, config: AnalysisConfig | None = None, vocab=None, threads=1,
                strictness="lenient") -> dict:
    """Every analytic on ``corpus`` assembled into one canonical report dict.

    The corpus is validated first; error-severity issues raise
    ``ValidationFailed``. The ``digest`` field is the SHA-256 of the canonical
    bytes of the rest of the report.
    """
    config = config or AnalysisConfig()
    vocab = vocab or DEFAULT_VOCABULARY
    validation = validate_corpus(corpus, strictness, vocab)
    if not validation.ok:
        raise ValidationFailed(validation)
    k_move, k_none = config.topk_talkmove_das, config.topk_none_das
    cov_move, cov_none = config.coverage_targets

    def topk_for(move, d):
        return topk_section(d, k_none, cov_none) if is_none(move) else topk_section(d, k_move, cov_move)

    da = dialogue_act_distribution(corpus, config.da_display_min_share, threads)
    da_section = dist_section(da)
    da_section["display"] = {
        "min_share": round_float(config.da_display_min_share),
        "labels": {label: {"count": c, "share": round_ratio(c, da.total)} for label, c, _ in da.display()},
    }
    unigram = {
        "talk_moves": dist_section(talk_move_distribution(corpus, None, vocab, threads)),
        "talk_moves_by_role": {
            role: dist_section(talk_move_distribution(corpus, role, vocab, threads)) for role in ("student", "teacher")
        },
        "dialogue_acts": da_section,
    }

    ct = crosstab_talkmove_dialogueact(corpus, config.exclude_continuation_in_crosstab, vocab, threads)
    crosstab = {
        "exclude_continuation": ct.exclude_continuation,
        "rows": {move: {**dist_section(ct.row(move)), "top_k": topk_for(move, ct.row(move))} for move in ct.row_labels},
    }

    direct = transition_counts(corpus, False, vocab, threads)
    collapsed = transition_counts(corpus, True, vocab, threads)
    transitions = {
        "direct": matrix_section(direct),
        "collapsed": matrix_section(collapsed),
        "filtered": filtered_section(filter_transitions(direct, config.transition_threshold)),
    }

    relations = {}
    for (j, k), (n, rels) in sorted(bigram_relation_table(corpus, threads).items()):
        relations[pair_key(j, k)] = {"instances": n, **dist_section(Distribution.from_counts(rels))}
    to_none = {}
    for move, acts in sorted(talkmove_to_none_table(corpus, threads).items()):
        d = Distribution.from_counts(acts)
        to_none[move] = {**dist_section(d), "top_k": topk_section(d, k_none, cov_none)}
    triples = {}
    for (j, k), acts in sorted(triple_table(corpus, threads).items()):
        d = Distribution.from_counts(acts)
        triples[pair_key(j, k)] = {**dist_section(d), "top_k": topk_section(d, k_none, cov_none)}

    lexical = {"markers": list(config.markers), "pairs": {}}
    for (j, k), (n, leading, anywhere) in sorted(lexical_table(corpus, config.markers, threads).items()):
        lexical["pairs"][pair_key(j, k)] = {
            "instances": n,
            "leading_token": round_ratio(leading, n),
            "any_token": round_ratio(anywhere, n),
        }

    report = {
        "corpus_id": corpus.corpus_id,
        "tool_version": __version__,
        "config": config.to_report(),
        "summary": {
            "sessions": len(corpus.sessions),
            "utterances": corpus.n_utterances,
            "discourse_edges": corpus.n_edges,
        },
        "unigram": unigram,
        "crosstab": crosstab,
        "transitions": transitions,
        "gaps": gaps_section(gap_matrix(corpus, config.gap_min_share, vocab, threads)),
        "multiview": {
            "no_edge_label": NO_EDGE,
            "bigram_relations": relations,
            "talkmove_to_none_acts": to_none,
            "triple_none_acts": triples,
        },
        "lexical": lexical,
        "notes": list(NOTES),
        "below_threshold_label": BELOW_THRESHOLD,
    }
    report["digest"] = report_digest(report)
    return report


def _encode(obj, indent, depth, out):
    pad = " " * (indent * (depth + 1))
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, Decimal):
        out.append(fmt(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(obj):
            out.append(pad)
            _encode(item, indent, depth + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(" " * (indent * depth) + "]")
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj)
        for i, key in enumerate(keys):
            out.append(pad + json.dumps(key, ensure_ascii=False) + ": ")
            _encode(obj[key], indent, depth + 1, out)
            out.append(",\n" if i < len(keys) - 1 else "\n")
        out.append(" " * (indent * depth) + "}")
    else:
        # floats are rejected: every ratio must pass through the rounding helpers
        raise TypeError(f"cannot canonically encode {type(obj).__name__}")


def dumps_canonical(obj, indent=2) -> str:
    out: list[str] = []
    _encode(obj, indent, 0, out)
    out.append("\n")
    return "".join(out)


def report_digest(report: dict) -> str:
    body = {k: v for k, v in report.items() if k != "digest"}
    return "sha256:" + hashlib.sha256(dumps_canonical(body).encode("utf-8")).hexdigest()


def report_bytes(report: dict) -> bytes:
    return dumps_canonical(report).encode("utf-8")


def load_report(text: str) -> dict:
    return json.loads(text, parse_float=Decimal)


FRACTION_KEYS = frozenset({"share", "probability", "achieved_coverage", "leading_token", "any_token"})
_SKIP_TOP = frozenset({"corpus_id", "tool_version", "config", "digest", "notes"})


def _flatten(report: dict) -> dict:
    """``path -> number`` for every numeric leaf reachable through dicts only."""
    out = {}

    def walk(node, path):
        for key, value in node.items():
            p = f"{path}/{key}" if path else key
            if isinstance(value, dict):
                walk(value, p)
            elif isinstance(value, (int, Decimal)) and not isinstance(value, bool):
                out[p] = value

    walk({k: v for k, v in report.items() if k not in _SKIP_TOP}, "")
    return out


@dataclass
class DeltaReport:
    """Aligned scalar differences ``b - a``; shares also in percentage points."""

    corpus_a: str
    corpus_b: str
    entries: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"corpus_a": self.corpus_a, "corpus_b": self.corpus_b, "tool_version": __version__,
                "deltas": self.entries}

    def delta(self, path):
        return self.entries[path]


def compare(a: dict, b: dict) -> DeltaReport:
    if a.get("tool_version") != b.get("tool_version"):
        raise ConfigMismatch(f"tool versions differ: {a.get('tool_version')} vs {b.get('tool_version')}")
    if dumps_canonical(a.get("config")) != dumps_canonical(b.get("config")):
        raise ConfigMismatch("reports were produced with different configurations")
    fa, fb = _flatten(a), _flatten(b)
    entries = {}
    for path in sorted(fa.keys() | fb.keys()):
        va, vb = fa.get(path), fb.get(path)
        entry = {"a": va, "b": vb}
        if va is None or vb is None:
            entry["one_sided"] = "a" if vb is None else "b"
        else:
            diff = vb - va
            entry["difference"] = diff
            if path.rsplit("/", 1)[-1] in FRACTION_KEYS:
                entry["points"] = diff * 100
        entries[path] = entry
    return DeltaReport(a.get("corpus_id", ""), b.get("corpus_id", ""), entries)


def _penwidth(count, row_total, threshold) -> Decimal:
    p = Fraction(count, row_total)
    t = Fraction(repr(float(threshold)))
    width = Fraction(5) if t >= 1 else 1 + 4 * (p - t) / (1 - t)
    return round_fraction(width, 2)


def emit_dot(f: FilteredTransitions, grouping="all", name="transitions") -> str:
    """GraphViz digraph of filtered transitions.

    Edge labels are whole percentages; ``penwidth`` grows linearly from 1.0 at
    the threshold to 5.0 at probability 1. ``grouping`` keeps edges received
    by the teacher (``to_teacher``), by students (``to_student``) or ``all``.
    """
    roles = {"all": None, "to_teacher": "teacher", "to_student": "student"}
    if grouping not in roles:
        raise ValueError(f"unknown grouping {grouping!r}")
    keep = roles[grouping]
    edges = sorted((e for e in f.edges if keep is None or e.receiver_role == keep),
                   key=lambda e: (e.source, e.target))
    nodes = sorted({e.source for e in edges} | {e.target for e in edges})
    lines = [f'digraph "{name}" {{']
    for node in nodes:
        lines.append(f'  "{node}";')
    for e in edges:
        pct = fmt(round_ratio(100 * e.count, e.row_total, 0))
        width = fmt(_penwidth(e.count, e.row_total, f.threshold))
        lines.append(f'  "{e.source}" -> "{e.target}" [label="{pct}%", penwidth={width}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_heatmap_csv(matrix) -> str:
    """Square table with a header of target labels; absent cells are empty."""
    if isinstance(matrix, GapMatrix):
        labels = matrix.labels

        def cell(j, k):
            stat = matrix.cells[(j, k)]
            return "" if stat is None else fmt(round_fraction(stat.exact_value, TABLE_PLACES))
    elif isinstance(matrix, TransitionMatrix):
        labels = matrix.labels
        totals = {label: int(t) for label, t in zip(labels, matrix.row_totals)}

        def cell(j, k):
            if not totals[j]:
                return ""
            return fmt(round_ratio(matrix.count(j, k), totals[j], TABLE_PLACES))
    else:
        raise TypeError(f"cannot render {type(matrix).__name__} as a heatmap")
    lines = [",".join(["from", *labels])]
    for j in labels:
        lines.append(",".join([j, *(cell(j, k) for k in labels)]))
    return "\n".join(lines) + "\n"


def emit_gaps_csv(g: GapMatrix) -> str:
    """Long-form ``from,to,value,retained_instances``; absent pairs have empty fields."""
    lines = ["from,to,value,retained_instances"]
    for j in g.labels:
        for k in g.labels:
            stat = g.cells[(j, k)]
            if stat is None:
                lines.append(f"{j},{k},,")
            else:
                lines.append(f"{j},{k},{fmt(round_fraction(stat.exact_value, TABLE_PLACES))},{stat.retained_instances}")
    return "\n".join(lines) + "\n"


def render_summary(report: dict) -> str:
    """Short human-readable digest of a report; every number is read from ``report``."""
    s = report["summary"]
    out = [
        f"corpus {report['corpus_id']}: {s['sessions']} sessions, {s['utterances']} utterances, "
        f"{s['discourse_edges']} discourse edges",
        "talk moves:",
    ]
    tm = report["unigram"]["talk_moves"]
    for label in tm["order"]:
        entry = tm["labels"][label]
        if entry["count"]:
            pct = (entry["share"] * 100).quantize(Decimal("0.01"), rounding=ROUND_HALF_EVEN)
            out.append(f"  {label:<10} {entry['count']:>7}  {fmt(pct)}%")
    edges = report["transitions"]["filtered"]["edges"]
    out.append(f"transitions at or above {fmt(report['transitions']['filtered']['threshold'])}: {len(edges)}")
    for pair, e in edges.items():
        out.append(f"  {pair:<22} {fmt(e['probability'])}")
    cells = report["gaps"]["cells"]
    out.append(f"gap cells present: {len(cells)} ({report['gaps']['unit']})")
    out.append(f"digest {report['digest']}")
    return "\n".join(out) + "\n"
