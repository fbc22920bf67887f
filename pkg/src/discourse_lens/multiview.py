"""Joins across the three annotation views.

* discourse relations carried by adjacent talk-move pairs,
* dialogue acts of T-None utterances that follow a talk move or sit between
  two talk moves,
* lexical marker shares (e.g. utterances opening with "so"),
* excerpt extraction for qualitative reading.

Single-pair functions delegate to the ``*_table`` functions, which cover all
pairs in one pass over the corpus.
"""
from __future__ import annotations

import unicodedata
from collections import Counter
from dataclasses import dataclass

from ._parallel import count_sessions, map_sessions
from .errors import InvalidPair
from .model import Corpus, Utterance
from .unigram import Distribution
from .vocab import T_NONE, is_none

NO_EDGE = "⟨no-edge⟩"


@dataclass(frozen=True)
class BigramInstance:
    session_id: str
    first_index: int
    second_index: int
    first_move: str
    second_move: str
    relations: tuple[str, ...] = ()

    @property
    def relation(self):
        return self.relations[0] if self.relations else None


@dataclass(frozen=True)
class TripleInstance:
    session_id: str
    indices: tuple[int, int, int]
    intervening_act: str


def _edge_lookup(session):
    rels: dict[tuple[int, int], list[str]] = {}
    for e in session.edges:
        rels.setdefault((e.source, e.target), []).append(e.relation)
    return {k: tuple(sorted(set(v))) for k, v in rels.items()}


def iter_bigrams(session):
    rels = _edge_lookup(session)
    utts = session.utterances
    for a, b in zip(utts, utts[1:]):
        yield BigramInstance(session.session_id, a.index, b.index, a.talk_move, b.talk_move,
                             rels.get((a.index, b.index), ()))


def bigram_instances(corpus: Corpus, tm_j: str, tm_k: str) -> list[BigramInstance]:
    return [b for s in corpus.sessions for b in iter_bigrams(s)
            if b.first_move == tm_j and b.second_move == tm_k]


def bigram_relation_table(corpus: Corpus, threads=1) -> dict:
    """``(tm_j, tm_k) -> (instance count, relation Counter)`` for every adjacent pair seen.

    An instance without a forward edge between exactly those two utterances
    tallies ``NO_EDGE``. When several relations link the same two utterances
    each one is tallied, so the tally total can exceed the instance count.
    """
    def scan(session):
        instances, tallies = Counter(), Counter()
        for b in iter_bigrams(session):
            pair = (b.first_move, b.second_move)
            instances[pair] += 1
            for rel in b.relations or (NO_EDGE,):
                tallies[pair + (rel,)] += 1
        return instances, tallies

    instances, tallies = Counter(), Counter()
    for i, t in map_sessions(scan, corpus.sessions, threads):
        instances.update(i)
        tallies.update(t)
    table = {pair: (n, Counter()) for pair, n in instances.items()}
    for (j, k, rel), n in tallies.items():
        table[(j, k)][1][rel] = n
    return table


def bigram_relation_distribution(corpus: Corpus, tm_j: str, tm_k: str, threads=1) -> Distribution:
    _, rels = bigram_relation_table(corpus, threads).get((tm_j, tm_k), (0, Counter()))
    return Distribution.from_counts(rels)


def talkmove_to_none_table(corpus: Corpus, threads=1) -> dict:
    """``tm_j -> Counter`` of dialogue acts on T-None utterances directly after ``tm_j``."""
    def scan(session):
        found = Counter()
        utts = session.utterances
        for a, b in zip(utts, utts[1:]):
            if b.talk_move == T_NONE:
                found[(a.talk_move, b.dialogue_act)] += 1
        return found

    table: dict[str, Counter] = {}
    for (move, act), n in count_sessions(scan, corpus.sessions, threads).items():
        table.setdefault(move, Counter())[act] += n
    return table


def talkmove_to_none_da_distribution(corpus: Corpus, tm_j: str, threads=1) -> Distribution:
    return Distribution.from_counts(talkmove_to_none_table(corpus, threads).get(tm_j, Counter()))


def iter_triples(session):
    utts = session.utterances
    for a, mid, b in zip(utts, utts[1:], utts[2:]):
        if mid.talk_move == T_NONE and not is_none(a.talk_move) and not is_none(b.talk_move):
            yield (a, mid, b)


def triple_table(corpus: Corpus, threads=1) -> dict:
    """``(tm_j, tm_k) -> Counter`` of acts on a single T-None between two talk moves."""
    def scan(session):
        return Counter((a.talk_move, b.talk_move, mid.dialogue_act) for a, mid, b in iter_triples(session))

    table: dict[tuple[str, str], Counter] = {}
    for (j, k, act), n in count_sessions(scan, corpus.sessions, threads).items():
        table.setdefault((j, k), Counter())[act] += n
    return table


def triple_instances(corpus: Corpus, tm_j: str, tm_k: str) -> list[TripleInstance]:
    _check_pair(tm_j, tm_k)
    return [
        TripleInstance(s.session_id, (a.index, mid.index, b.index), mid.dialogue_act)
        for s in corpus.sessions
        for a, mid, b in iter_triples(s)
        if a.talk_move == tm_j and b.talk_move == tm_k
    ]


def _check_pair(tm_j, tm_k):
    for label in (tm_j, tm_k):
        if is_none(label):
            raise InvalidPair(f"{label} cannot anchor a triple pattern")


def triple_none_da_distribution(corpus: Corpus, tm_j: str, tm_k: str, threads=1) -> Distribution:
    _check_pair(tm_j, tm_k)
    return Distribution.from_counts(triple_table(corpus, threads).get((tm_j, tm_k), Counter()))


def _strip_punct(token: str) -> str:
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, strip punctuation from token ends; no stemming."""
    tokens = (_strip_punct(t) for t in text.lower().split())
    return [t for t in tokens if t]


@dataclass(frozen=True)
class LexicalShare:
    share: float
    instances: int
    matched: tuple[BigramInstance, ...]


def _marker_hit(text, wanted, position):
    tokens = tokenize(text)
    if position == "leading_token":
        return bool(tokens) and tokens[0] in wanted
    return any(t in wanted for t in tokens)


def _marker_set(markers):
    wanted = {t for m in markers for t in tokenize(m)}
    if not wanted:
        raise ValueError("markers must contain at least one word")
    return wanted


def lexical_marker_share(corpus: Corpus, pattern, markers, position="leading_token") -> LexicalShare:
    """Share of ``pattern`` bigrams whose second utterance contains a marker.

    ``pattern`` is a ``(first_move, second_move)`` pair; ``position`` is
    ``leading_token`` (first token only) or ``any_token``.
    """
    wanted = _marker_set(markers)
    if position not in ("leading_token", "any_token"):
        raise ValueError(f"unknown position {position!r}")
    tm_j, tm_k = pattern
    instances = 0
    matched = []
    for session in corpus.sessions:
        rels = None
        utts = session.utterances
        for a, b in zip(utts, utts[1:]):
            if a.talk_move != tm_j or b.talk_move != tm_k:
                continue
            instances += 1
            if _marker_hit(b.text, wanted, position):
                rels = rels if rels is not None else _edge_lookup(session)
                matched.append(BigramInstance(session.session_id, a.index, b.index, a.talk_move,
                                              b.talk_move, rels.get((a.index, b.index), ())))
    share = len(matched) / instances if instances else 0.0
    return LexicalShare(share, instances, tuple(matched))


def lexical_table(corpus: Corpus, markers, threads=1) -> dict:
    """``(tm_j, tm_k) -> (instances, leading-token hits, any-token hits)`` for every adjacent pair."""
    wanted = _marker_set(markers)

    def scan(session):
        found = Counter()
        utts = session.utterances
        for a, b in zip(utts, utts[1:]):
            pair = (a.talk_move, b.talk_move)
            found[pair + ("n",)] += 1
            tokens = tokenize(b.text)
            if tokens and tokens[0] in wanted:
                found[pair + ("leading",)] += 1
            if any(t in wanted for t in tokens):
                found[pair + ("any",)] += 1
        return found

    merged = count_sessions(scan, corpus.sessions, threads)
    return {
        (j, k): (n, merged[(j, k, "leading")], merged[(j, k, "any")])
        for (j, k, kind), n in merged.items() if kind == "n"
    }


@dataclass(frozen=True)
class BigramPattern:
    tm_j: str
    tm_k: str
    width = 2

    def matches(self, utts, i):
        return utts[i].talk_move == self.tm_j and utts[i + 1].talk_move == self.tm_k


@dataclass(frozen=True)
class TriplePattern:
    tm_j: str
    tm_k: str
    width = 3

    def __post_init__(self):
        _check_pair(self.tm_j, self.tm_k)

    def matches(self, utts, i):
        return (utts[i].talk_move == self.tm_j and utts[i + 1].talk_move == T_NONE
                and utts[i + 2].talk_move == self.tm_k)


@dataclass(frozen=True)
class MoveWithActPattern:
    talk_move: str
    dialogue_act: str
    width = 1

    def matches(self, utts, i):
        return utts[i].talk_move == self.talk_move and utts[i].dialogue_act == self.dialogue_act


def parse_pattern(text: str):
    """``bigram:A,B`` | ``triple:A,B`` | ``act:MOVE,ACT``."""
    kind, _, rest = text.partition(":")
    parts = [p.strip() for p in rest.split(",")]
    if len(parts) != 2 or not all(parts):
        raise ValueError(f"pattern {text!r} needs two comma-separated labels")
    if kind == "bigram":
        return BigramPattern(*parts)
    if kind == "triple":
        return TriplePattern(*parts)
    if kind in ("act", "move_with_act"):
        return MoveWithActPattern(*parts)
    raise ValueError(f"unknown pattern kind {kind!r}")


@dataclass(frozen=True)
class Excerpt:
    session_id: str
    match_start: int
    match_end: int  # inclusive
    start: int
    end: int  # inclusive, after context padding
    utterances: tuple[Utterance, ...]
    relations_in: tuple = ()  # per utterance, "Relation<-source" for incoming edges

    def to_dict(self):
        return {
            "session_id": self.session_id,
            "match": [self.match_start, self.match_end],
            "span": [self.start, self.end],
            "utterances": [
                {"idx": u.index, "speaker": u.speaker.value, "text": u.text,
                 "talk_move": u.talk_move, "dialogue_act": u.dialogue_act,
                 "relations_in": list(rels)}
                for u, rels in zip(self.utterances, self.relations_in)
            ],
        }


def extract_instances(corpus: Corpus, pattern, limit=10, context_window=0) -> list[Excerpt]:
    """Up to ``limit`` matches in (session, index) order, padded by ``context_window``
    utterances each side and clipped to the session."""
    if limit < 1:
        raise ValueError("limit must be at least 1")
    if context_window < 0:
        raise ValueError("context_window must be non-negative")
    out = []
    for session in corpus.sessions:
        utts = session.utterances
        incoming: dict[int, list[str]] = {}
        for e in session.edges:
            incoming.setdefault(e.target, []).append(f"{e.relation}<-{e.source}")
        for i in range(len(utts) - pattern.width + 1):
            if not pattern.matches(utts, i):
                continue
            lo = max(0, i - context_window)
            hi = min(len(utts) - 1, i + pattern.width - 1 + context_window)
            window = utts[lo:hi + 1]
            excerpt = Excerpt(session.session_id, utts[i].index, utts[i + pattern.width - 1].index,
                              utts[lo].index, utts[hi].index, tuple(window),
                              tuple(tuple(sorted(incoming.get(u.index, ()))) for u in window))
            out.append(excerpt)
            if len(out) == limit:
                return out
    return out
