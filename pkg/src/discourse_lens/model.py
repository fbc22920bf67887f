"""Annotated dialogue data model and structural validation."""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from enum import Enum

from .vocab import DEFAULT_VOCABULARY, Vocabulary, role_prefix


class SpeakerRole(str, Enum):
    TEACHER = "teacher"
    STUDENT = "student"

    @classmethod
    def _missing_(cls, value):
        # tutors are analysed under the teacher role
        return cls.TEACHER if value == "tutor" else None

    @classmethod
    def parse(cls, value: str) -> "SpeakerRole":
        return cls(value)


class Domain(str, Enum):
    TEACHING = "teaching"
    TUTORING = "tutoring"
    OTHER = "other"


class Strictness(str, Enum):
    STRICT = "strict"
    LENIENT = "lenient"


@dataclass(frozen=True)
class Utterance:
    index: int
    speaker: SpeakerRole
    text: str
    talk_move: str
    dialogue_act: str
    speaker_id: str | None = None


@dataclass(frozen=True, order=True)
class DiscourseEdge:
    source: int
    target: int
    relation: str


@dataclass(frozen=True)
class Session:
    session_id: str
    domain: Domain
    utterances: tuple[Utterance, ...]
    edges: tuple[DiscourseEdge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "domain", Domain(self.domain))
        object.__setattr__(self, "utterances", tuple(self.utterances))
        # set semantics with a canonical order; duplicates are kept so that
        # validation can report them
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))

    def __len__(self):
        return len(self.utterances)

    @property
    def moves(self) -> list[str]:
        return [u.talk_move for u in self.utterances]


@dataclass(frozen=True)
class Corpus:
    corpus_id: str
    sessions: tuple[Session, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sessions", tuple(self.sessions))

    @property
    def n_utterances(self) -> int:
        return sum(len(s.utterances) for s in self.sessions)

    @property
    def n_edges(self) -> int:
        return sum(len(s.edges) for s in self.sessions)


@dataclass(frozen=True)
class ValidationIssue:
    severity: str  # "error" | "warning"
    code: str
    location: str
    message: str


@dataclass
class ValidationReport:
    issues: list[ValidationIssue] = field(default_factory=list)

    @property
    def errors(self) -> list[ValidationIssue]:
        return [i for i in self.issues if i.severity == "error"]

    @property
    def warnings(self) -> list[ValidationIssue]:
        return [i for i in self.issues if i.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def extend(self, other: "ValidationReport") -> None:
        self.issues.extend(other.issues)

    def to_dict(self) -> dict:
        return {
            "errors": len(self.errors),
            "warnings": len(self.warnings),
            "issues": [
                {"severity": i.severity, "code": i.code, "location": i.location, "message": i.message}
                for i in self.issues
            ],
        }


def crossing_pairs(edges) -> list[tuple[DiscourseEdge, DiscourseEdge]]:
    """Edge pairs a->b, c->d with a < c < b < d."""
    spans = sorted({(e.source, e.target) for e in edges if e.source < e.target})
    sources = [a for a, _ in spans]
    by_span: dict[tuple[int, int], list[DiscourseEdge]] = {}
    for e in edges:
        by_span.setdefault((e.source, e.target), []).append(e)
    found = []
    for a, b in spans:
        lo = bisect.bisect_right(sources, a)
        hi = bisect.bisect_left(sources, b)
        for c, d in spans[lo:hi]:
            if d > b:
                for e1 in by_span[(a, b)]:
                    for e2 in by_span[(c, d)]:
                        found.append((e1, e2))
    return found


def validate_session(session: Session, strictness="lenient", vocab: Vocabulary | None = None) -> ValidationReport:
    """All invariant violations of one session; never raises."""
    vocab = vocab or DEFAULT_VOCABULARY
    strict = Strictness(strictness) is Strictness.STRICT
    report = ValidationReport()
    sid = session.session_id

    def add(severity, code, location, message):
        report.issues.append(ValidationIssue(severity, code, f"session={sid} {location}".strip(), message))

    talk_moves = set(vocab.talk_moves)
    acts = set(vocab.dialogue_acts)
    relations = set(vocab.relations)
    label_severity = "error" if strict else "warning"

    seen_idx = set()
    for pos, u in enumerate(session.utterances):
        loc = f"utterance={u.index}"
        if u.index in seen_idx:
            add("error", "DUPLICATE_INDEX", loc, f"utterance index {u.index} repeated")
        seen_idx.add(u.index)
        if u.index != pos:
            add("error", "INDEX_NOT_CONSECUTIVE", loc, f"expected index {pos}, found {u.index}")
        if u.talk_move not in talk_moves:
            add("error", "UNKNOWN_TALK_MOVE", loc, f"talk move {u.talk_move!r} not in vocabulary")
        elif role_prefix(u.talk_move) != SpeakerRole(u.speaker).value:
            add("error", "ROLE_MOVE_MISMATCH", loc,
                f"{SpeakerRole(u.speaker).value} utterance labelled {u.talk_move}")
        if u.dialogue_act not in acts:
            add(label_severity, "UNKNOWN_DIALOGUE_ACT", loc, f"dialogue act {u.dialogue_act!r} not in vocabulary")

    n = len(session.utterances)
    seen_edges = set()
    for e in session.edges:
        loc = f"edge={e.source}->{e.target}"
        key = (e.source, e.target, e.relation)
        if key in seen_edges:
            add("error", "EDGE_DUPLICATE", loc, f"duplicate edge with relation {e.relation}")
        seen_edges.add(key)
        if e.source == e.target:
            add("error", "EDGE_SELF_LOOP", loc, "edge attaches an utterance to itself")
        elif e.source > e.target:
            add("error", "EDGE_BACKWARD", loc, "edge source must precede its target")
        for end in (e.source, e.target):
            if not 0 <= end < n:
                add("error", "EDGE_DANGLING", loc, f"endpoint {end} outside 0..{n - 1}")
                break
        if e.relation not in relations:
            add(label_severity, "UNKNOWN_RELATION", loc, f"relation {e.relation!r} not in vocabulary")

    crossing_severity = "error" if strict else "warning"
    for e1, e2 in crossing_pairs(session.edges):
        add(crossing_severity, "CROSSING_EDGES", f"edge={e1.source}->{e1.target}",
            f"crosses edge {e2.source}->{e2.target}")
    return report


def validate_corpus(corpus: Corpus, strictness="lenient", vocab: Vocabulary | None = None) -> ValidationReport:
    report = ValidationReport()
    seen = set()
    for s in corpus.sessions:
        if s.session_id in seen:
            report.issues.append(ValidationIssue(
                "error", "DUPLICATE_SESSION_ID", f"session={s.session_id}", "session id repeated in corpus"))
        seen.add(s.session_id)
        report.extend(validate_session(s, strictness, vocab))
    return report
