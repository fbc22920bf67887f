"""Corpus file formats: JSONL (one session per line) and CSV.

JSONL line::

    {"session_id": str, "domain": "teaching"|"tutoring"|"other",
     "utterances": [{"idx": int, "speaker": "teacher"|"student",
                     "speaker_id": str (optional), "text": str,
                     "talk_move": str, "dialogue_act": str}, ...],
     "discourse_edges": [{"source": int, "target": int, "relation": str}, ...]}

CSV corpora live in a directory holding ``utterances.csv``
(``session_id,idx,speaker,speaker_id,text,talk_move,dialogue_act``),
``edges.csv`` (``session_id,source,target,relation``) and optionally
``sessions.csv`` (``session_id,domain``), which carries session order, domain
and sessions with no utterances. Without it sessions appear in first-seen
order with domain ``other``.

Serialization is canonical: sessions in corpus order, utterances by index,
edges by ``(source, target, relation)``, keys in the order shown above,
LF line endings.
"""
from __future__ import annotations

import csv
import io
import json
import re
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .errors import CorpusIOError, LabelError, SchemaError, ValidationFailed
from .model import (
    Corpus,
    DiscourseEdge,
    Domain,
    Session,
    SpeakerRole,
    Strictness,
    Utterance,
    ValidationIssue,
    ValidationReport,
    validate_corpus,
)
from .vocab import DEFAULT_VOCABULARY, Vocabulary

UTTERANCE_HEADER = ["session_id", "idx", "speaker", "speaker_id", "text", "talk_move", "dialogue_act"]
EDGE_HEADER = ["session_id", "source", "target", "relation"]
SESSION_HEADER = ["session_id", "domain"]

_INT = re.compile(r"-?[0-9]+")

CsvPayload = namedtuple("CsvPayload", ["utterances", "edges", "sessions"])


@dataclass(frozen=True)
class CorpusSource:
    format: str
    paths: tuple
    strictness: str = "lenient"

    def __post_init__(self):
        if self.format not in ("jsonl", "csv"):
            raise ValueError(f"unknown corpus format {self.format!r}")
        object.__setattr__(self, "paths", tuple(str(p) for p in self.paths))
        if not self.paths:
            raise ValueError("CorpusSource needs at least one path")
        Strictness(self.strictness)


class _Labels:
    """Label checking shared by both parsers.

    Strict mode raises on unknown labels; lenient mode maps unknown dialogue
    acts to the vocabulary's "other" tag and records a warning. Unknown talk
    moves and relations are left for validation to report.
    """

    def __init__(self, vocab: Vocabulary, strict: bool, path):
        self.vocab = vocab
        self.strict = strict
        self.path = path
        self.moves = set(vocab.talk_moves)
        self.acts = set(vocab.dialogue_acts)
        self.relations = set(vocab.relations)
        self.report = ValidationReport()

    def talk_move(self, label, line):
        label = label.strip()
        if self.strict and label not in self.moves:
            raise LabelError(line, label, "talk_move", self.path)
        return label

    def dialogue_act(self, label, line, session_id, idx):
        label = label.strip()
        if label not in self.acts:
            if self.strict:
                raise LabelError(line, label, "dialogue_act", self.path)
            self.report.issues.append(ValidationIssue(
                "warning", "UNKNOWN_DIALOGUE_ACT", f"session={session_id} utterance={idx}",
                f"dialogue act {label!r} mapped to {self.vocab.other_act!r} (line {line})"))
            return self.vocab.other_act
        return label

    def relation(self, label, line):
        label = label.strip()
        if self.strict and label not in self.relations:
            raise LabelError(line, label, "relation", self.path)
        return label


def _require(obj, key, kind, line, path, optional=False):
    if key not in obj:
        if optional:
            return None
        raise SchemaError(line, None, f"missing field {key!r}", path)
    value = obj[key]
    if optional and value is None:
        return None
    if kind is int:
        ok = type(value) is int
    else:
        ok = isinstance(value, kind)
    if not ok:
        raise SchemaError(line, None, f"field {key!r} must be {kind.__name__}", path)
    if kind is str:
        try:
            value.encode("utf-8")
        except UnicodeEncodeError:
            raise SchemaError(line, None, f"field {key!r} holds an unpaired surrogate", path) from None
    return value


def _speaker(value, line, path, column=None):
    try:
        return SpeakerRole.parse(value.strip())
    except ValueError:
        raise SchemaError(line, column, f"unknown speaker {value!r}", path) from None


def _domain(value, line, path, column=None):
    try:
        return Domain(value.strip())
    except ValueError:
        raise SchemaError(line, column, f"unknown domain {value!r}", path) from None


def _assemble(session_id, domain, utterances, edges, line, path):
    utterances = sorted(utterances, key=lambda u: u.index)
    for prev, cur in zip(utterances, utterances[1:]):
        if prev.index == cur.index:
            raise SchemaError(line, None, f"duplicate utterance index {cur.index} in session {session_id!r}", path)
    return Session(session_id, domain, tuple(utterances), tuple(edges))


def _parse_jsonl_line(raw: str, line: int, labels: _Labels, path) -> Session:
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaError(line, exc.colno, f"invalid JSON: {exc.msg}", path) from None
    except ValueError as exc:
        # e.g. integer literals beyond the interpreter's digit limit
        raise SchemaError(line, None, f"invalid JSON value: {exc}", path) from None
    except RecursionError:
        raise SchemaError(line, None, "JSON nested too deeply", path) from None
    if not isinstance(obj, dict):
        raise SchemaError(line, 1, "session line must be a JSON object", path)
    session_id = _require(obj, "session_id", str, line, path)
    domain = _domain(_require(obj, "domain", str, line, path), line, path)
    raw_utts = _require(obj, "utterances", list, line, path)
    raw_edges = _require(obj, "discourse_edges", list, line, path)

    utterances = []
    for u in raw_utts:
        if not isinstance(u, dict):
            raise SchemaError(line, None, "utterance must be a JSON object", path)
        idx = _require(u, "idx", int, line, path)
        if idx < 0:
            raise SchemaError(line, None, f"negative utterance index {idx}", path)
        speaker = _speaker(_require(u, "speaker", str, line, path), line, path)
        speaker_id = _require(u, "speaker_id", str, line, path, optional=True)
        text = _require(u, "text", str, line, path)
        move = labels.talk_move(_require(u, "talk_move", str, line, path), line)
        act = labels.dialogue_act(_require(u, "dialogue_act", str, line, path), line, session_id, idx)
        utterances.append(Utterance(idx, speaker, text, move, act, speaker_id or None))

    edges = []
    for e in raw_edges:
        if not isinstance(e, dict):
            raise SchemaError(line, None, "discourse edge must be a JSON object", path)
        source = _require(e, "source", int, line, path)
        target = _require(e, "target", int, line, path)
        relation = labels.relation(_require(e, "relation", str, line, path), line)
        edges.append(DiscourseEdge(source, target, relation))
    return _assemble(session_id, domain, utterances, edges, line, path)


def parse_jsonl_text(text: str, vocab=None, strict=False, path=None):
    """Sessions and label warnings from JSONL text."""
    labels = _Labels(vocab or DEFAULT_VOCABULARY, strict, path)
    sessions = []
    for lineno, raw in enumerate(text.split("\n"), 1):
        if not raw.strip():
            continue
        sessions.append(_parse_jsonl_line(raw, lineno, labels, path))
    return sessions, labels.report


def _decode(data: bytes, path) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = data.count(b"\n", 0, exc.start) + 1
        col = exc.start - (data.rfind(b"\n", 0, exc.start) + 1) + 1
        raise SchemaError(line, col, "invalid UTF-8", path) from None


def _csv_rows(text: str, header: list[str], path):
    reader = csv.reader(io.StringIO(text, newline=""), strict=True)
    try:
        first = next(reader, None)
        if first is None:
            return
        if [h.strip() for h in first] != header:
            raise SchemaError(1, None, f"expected header {','.join(header)}", path)
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise SchemaError(reader.line_num, None, f"expected {len(header)} fields, got {len(row)}", path)
            yield reader.line_num, row
    except csv.Error as exc:
        raise SchemaError(reader.line_num, None, f"malformed CSV: {exc}", path) from None


def _csv_int(value, line, column, name, path):
    value = value.strip()
    if not _INT.fullmatch(value):
        raise SchemaError(line, column, f"{name} must be an integer, got {value[:40]!r}", path)
    try:
        return int(value)
    except ValueError:
        raise SchemaError(line, column, f"{name} has too many digits", path) from None


def parse_csv_text(utterances_text: str, edges_text: str = "", sessions_text: str | None = None,
                   vocab=None, strict=False, path=None):
    labels = _Labels(vocab or DEFAULT_VOCABULARY, strict, path)
    order: list[str] = []
    domains: dict[str, Domain] = {}
    if sessions_text is not None:
        for line, row in _csv_rows(sessions_text, SESSION_HEADER, f"{path}/sessions.csv" if path else None):
            sid = row[0]
            if sid in domains:
                raise SchemaError(line, 1, f"session {sid!r} listed twice", path)
            domains[sid] = _domain(row[1], line, path, 2)
            order.append(sid)
    declared = sessions_text is not None

    utts: dict[str, list[Utterance]] = {sid: [] for sid in order}
    first_line: dict[str, int] = {}
    upath = f"{path}/utterances.csv" if path else None
    for line, row in _csv_rows(utterances_text, UTTERANCE_HEADER, upath):
        sid, idx, speaker, speaker_id, text, move, act = row
        if sid not in utts:
            if declared:
                raise SchemaError(line, 1, f"session {sid!r} missing from sessions.csv", upath)
            utts[sid] = []
            order.append(sid)
        first_line.setdefault(sid, line)
        idx = _csv_int(idx, line, 2, "idx", upath)
        if idx < 0:
            raise SchemaError(line, 2, f"negative utterance index {idx}", upath)
        utts[sid].append(Utterance(
            idx, _speaker(speaker, line, upath, 3), text,
            labels.talk_move(move, line), labels.dialogue_act(act, line, sid, idx), speaker_id or None))

    edges: dict[str, list[DiscourseEdge]] = {}
    epath = f"{path}/edges.csv" if path else None
    for line, row in _csv_rows(edges_text, EDGE_HEADER, epath):
        sid = row[0]
        if sid not in utts:
            raise SchemaError(line, 1, f"edge refers to unknown session {sid!r}", epath)
        edges.setdefault(sid, []).append(DiscourseEdge(
            _csv_int(row[1], line, 2, "source", epath),
            _csv_int(row[2], line, 3, "target", epath),
            labels.relation(row[3], line)))

    sessions = [
        _assemble(sid, domains.get(sid, Domain.OTHER), utts[sid], edges.get(sid, []),
                  first_line.get(sid, 0), upath)
        for sid in order
    ]
    return sessions, labels.report


def _read(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as exc:
        raise CorpusIOError(f"cannot read {path}: {exc}") from exc


def _csv_files(path: Path):
    """(utterances, edges, sessions) paths for a CSV corpus directory or its utterances file."""
    if path.is_dir():
        base = path
        utt = base / "utterances.csv"
    else:
        base = path.parent
        utt = path
    return utt, base / "edges.csv", base / "sessions.csv"


def _parse_one(path: str, fmt: str, vocab, strict):
    p = Path(path)
    if fmt == "jsonl":
        return parse_jsonl_text(_decode(_read(p), path), vocab, strict, path)
    utt, edge, sess = _csv_files(p)
    if not utt.exists():
        raise CorpusIOError(f"{utt} not found")
    edges_text = _decode(_read(edge), str(edge)) if edge.exists() else ""
    sessions_text = _decode(_read(sess), str(sess)) if sess.exists() else None
    return parse_csv_text(_decode(_read(utt), str(utt)), edges_text, sessions_text, vocab, strict, path)


def default_corpus_id(paths) -> str:
    # independent of path order so that reordering inputs does not change reports
    return "+".join(sorted(Path(p).stem or Path(p).name for p in paths))


def parse_corpus(source: CorpusSource, vocab: Vocabulary | None = None, corpus_id: str | None = None,
                 threads: int = 1):
    """Parse every path of ``source`` into one corpus plus its validation report.

    Files are parsed concurrently; the merged corpus keeps the declared path
    order. In strict mode unknown labels raise ``LabelError`` and any other
    validation error raises ``ValidationFailed``.
    """
    vocab = vocab or DEFAULT_VOCABULARY
    strict = Strictness(source.strictness) is Strictness.STRICT
    if threads > 1 and len(source.paths) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda p: _parse_one(p, source.format, vocab, strict), source.paths))
    else:
        parts = [_parse_one(p, source.format, vocab, strict) for p in source.paths]

    sessions = []
    report = ValidationReport()
    for found, label_report in parts:
        sessions.extend(found)
        report.extend(label_report)
    corpus = Corpus(corpus_id or default_corpus_id(source.paths), tuple(sessions))
    report.extend(validate_corpus(corpus, source.strictness, vocab))
    if strict and not report.ok:
        raise ValidationFailed(report)
    return corpus, report


def parse_bytes(data: bytes, fmt: str = "jsonl", vocab=None, strict=False, corpus_id="corpus",
                edges: bytes = b"", sessions: bytes | None = None):
    """Parse an in-memory corpus. Raises only ``DiscourseLensError`` subclasses."""
    if fmt == "jsonl":
        found, report = parse_jsonl_text(_decode(data, None), vocab, strict)
    elif fmt == "csv":
        found, report = parse_csv_text(
            _decode(data, None), _decode(edges, None),
            None if sessions is None else _decode(sessions, None), vocab, strict)
    else:
        raise ValueError(f"unknown corpus format {fmt!r}")
    corpus = Corpus(corpus_id, tuple(found))
    report.extend(validate_corpus(corpus, "strict" if strict else "lenient", vocab))
    if strict and not report.ok:
        raise ValidationFailed(report)
    return corpus, report


def _session_record(s: Session) -> dict:
    utterances = []
    for u in sorted(s.utterances, key=lambda u: u.index):
        rec = {"idx": u.index, "speaker": SpeakerRole(u.speaker).value}
        if u.speaker_id is not None:
            rec["speaker_id"] = u.speaker_id
        rec.update(text=u.text, talk_move=u.talk_move, dialogue_act=u.dialogue_act)
        utterances.append(rec)
    return {
        "session_id": s.session_id,
        "domain": Domain(s.domain).value,
        "utterances": utterances,
        "discourse_edges": [
            {"source": e.source, "target": e.target, "relation": e.relation} for e in sorted(s.edges)
        ],
    }


def _csv_field(value) -> str:
    # csv.writer only quotes characters of its own line terminator, so a bare
    # "\r" would slip through unquoted; quote by hand instead.
    text = str(value)
    if "\x00" in text:
        raise ValueError("CSV cannot carry NUL characters")
    if any(ch in text for ch in ',"\r\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


def _csv_bytes(header, rows) -> bytes:
    lines = [",".join(header)]
    lines.extend(",".join(_csv_field(v) for v in row) for row in rows)
    return ("\n".join(lines) + "\n").encode("utf-8")


def serialize_corpus(corpus: Corpus, fmt: str = "jsonl"):
    """Canonical bytes for ``jsonl``; a ``CsvPayload`` of three files for ``csv``."""
    if fmt == "jsonl":
        lines = [
            json.dumps(_session_record(s), ensure_ascii=False, separators=(",", ":")) + "\n"
            for s in corpus.sessions
        ]
        return "".join(lines).encode("utf-8")
    if fmt != "csv":
        raise ValueError(f"unknown corpus format {fmt!r}")
    utt_rows, edge_rows = [], []
    for s in corpus.sessions:
        for u in sorted(s.utterances, key=lambda u: u.index):
            utt_rows.append([s.session_id, u.index, SpeakerRole(u.speaker).value, u.speaker_id or "",
                             u.text, u.talk_move, u.dialogue_act])
        for e in sorted(s.edges):
            edge_rows.append([s.session_id, e.source, e.target, e.relation])
    return CsvPayload(
        _csv_bytes(UTTERANCE_HEADER, utt_rows),
        _csv_bytes(EDGE_HEADER, edge_rows),
        _csv_bytes(SESSION_HEADER, [[s.session_id, Domain(s.domain).value] for s in corpus.sessions]),
    )


def write_corpus(corpus: Corpus, fmt: str, dest) -> None:
    dest = Path(dest)
    payload = serialize_corpus(corpus, fmt)
    if fmt == "jsonl":
        dest.write_bytes(payload)
        return
    dest.mkdir(parents=True, exist_ok=True)
    (dest / "utterances.csv").write_bytes(payload.utterances)
    (dest / "edges.csv").write_bytes(payload.edges)
    (dest / "sessions.csv").write_bytes(payload.sessions)
