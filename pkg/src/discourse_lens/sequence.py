"""Sequential statistics over talk moves.

Bigram transition matrices (direct, or with None utterances deleted first),
threshold-filtered transition edge lists, and the intervening T-None gap
statistic: for a talk-move pair, 100 times the mean number of consecutive
T-None utterances separating them, after dropping gap lengths whose share of
the pair's instances falls below ``min_share``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _backend
from ._parallel import count_sessions, map_sessions
from .errors import InvalidPair
from .model import Corpus
from .vocab import DEFAULT_VOCABULARY, T_NONE, is_none, role_prefix

GAP_UNIT = "expected intervening T-None x 100"


def encode_moves(session, index: dict[str, int]) -> np.ndarray:
    return np.fromiter((index[u.talk_move] for u in session.utterances), dtype=np.int32,
                       count=len(session.utterances))


def _none_mask(vocab) -> np.ndarray:
    return np.array([is_none(m) for m in vocab.talk_moves], dtype=np.uint8)


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    labels: tuple[str, ...]
    counts: np.ndarray
    mode: str

    def __eq__(self, other):
        if not isinstance(other, TransitionMatrix):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.counts, other.counts)

    @property
    def row_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def probabilities(self) -> np.ndarray:
        """Row conditionals P(to | from); all-zero rows stay zero."""
        totals = self.row_totals[:, None]
        with np.errstate(invalid="ignore", divide="ignore"):
            probs = self.counts / np.where(totals == 0, 1, totals)
        return probs

    def _ij(self, source, target):
        return self.labels.index(source), self.labels.index(target)

    def count(self, source, target) -> int:
        i, j = self._ij(source, target)
        return int(self.counts[i, j])

    def probability(self, source, target) -> float:
        i, j = self._ij(source, target)
        total = int(self.counts[i].sum())
        return int(self.counts[i, j]) / total if total else 0.0


@dataclass(frozen=True)
class TransitionEdge:
    source: str
    target: str
    probability: float
    receiver_role: str
    count: int
    row_total: int


@dataclass(frozen=True)
class FilteredTransitions:
    edges: tuple[TransitionEdge, ...]
    threshold: float


@dataclass(frozen=True)
class GapHistogram:
    pair: tuple[str, str]
    entries: tuple[tuple[int, int], ...]  # (gap length, count), ascending gap length

    @property
    def total_instances(self) -> int:
        return sum(c for _, c in self.entries)

    def count_at(self, gap) -> int:
        return dict(self.entries).get(gap, 0)


@dataclass(frozen=True)
class GapStatistic:
    pair: tuple[str, str]
    value: float
    retained_instances: int
    weighted_gap_sum: int
    excluded_entries: tuple[tuple[int, int], ...]
    total_instances: int

    @property
    def exact_value(self) -> Fraction:
        if not self.retained_instances:
            return Fraction(0)
        return Fraction(100 * self.weighted_gap_sum, self.retained_instances)


@dataclass(frozen=True)
class GapMatrix:
    labels: tuple[str, ...]
    cells: dict  # (from, to) -> GapStatistic, or None when the pair never occurs
    min_share: float

    def cell(self, source, target):
        return self.cells[(source, target)]


def transition_counts(corpus: Corpus, collapse_none=False, vocab=None, threads=1) -> TransitionMatrix:
    """Bigram counts of consecutive talk moves within each session.

    With ``collapse_none`` the None-labelled utterances are deleted from each
    session before pairing, so talk moves separated only by None utterances
    become adjacent.
    """
    vocab = vocab or DEFAULT_VOCABULARY
    index = vocab.move_index()
    mask = _none_mask(vocab).astype(bool)
    n = len(vocab.talk_moves)
    kernels = _backend.kernels

    def count(session):
        codes = encode_moves(session, index)
        if collapse_none:
            codes = np.ascontiguousarray(codes[~mask[codes]])
        counts = np.zeros((n, n), dtype=np.int64)
        kernels.add_bigrams(codes, counts)
        return counts

    total = np.zeros((n, n), dtype=np.int64)
    for part in map_sessions(count, corpus.sessions, threads):
        total += part
    return TransitionMatrix(vocab.talk_moves, total, "collapsed" if collapse_none else "direct")


def filter_transitions(m: TransitionMatrix, threshold=0.10) -> FilteredTransitions:
    """Edges whose conditional probability is at least ``threshold``.

    Probabilities stay globally normalised per source row; the receiver role
    (from the target's prefix) is only a grouping key for display. The
    comparison is exact against the threshold's shortest decimal form, so a
    count of 1 in 10 passes a threshold of 0.1.
    """
    if not 0 <= threshold <= 1:
        raise ValueError("threshold must lie in [0, 1]")
    cut = Fraction(repr(float(threshold)))
    edges = []
    totals = m.row_totals
    for i, source in enumerate(m.labels):
        row_total = int(totals[i])
        if not row_total:
            continue
        for j, target in enumerate(m.labels):
            c = int(m.counts[i, j])
            if c and Fraction(c, row_total) >= cut:
                edges.append(TransitionEdge(source, target, c / row_total, role_prefix(target), c, row_total))
    edges.sort(key=lambda e: (e.source, e.target))
    return FilteredTransitions(tuple(edges), threshold)


def gap_histograms(corpus: Corpus, vocab=None, threads=1) -> dict:
    """Gap-length counters for every ordered pair of non-None talk moves.

    Each non-None utterance is paired with the next utterance that is not
    T-None; if that one carries a non-None move the pair gains one instance at
    the number of T-None utterances in between. Any other label, S-None
    included, breaks the pattern.
    """
    vocab = vocab or DEFAULT_VOCABULARY
    index = vocab.move_index()
    mask = _none_mask(vocab)
    tnone = index[T_NONE]
    n_moves = len(vocab.talk_moves)
    kernels = _backend.kernels

    def scan(session):
        rows = kernels.gap_instances(encode_moves(session, index), mask, tnone)
        if not len(rows):
            return Counter()
        # one integer key per (from, to, gap) row, then a 1-D unique
        span = int(rows[:, 2].max()) + 1
        packed = (rows[:, 0] * n_moves + rows[:, 1]) * span + rows[:, 2]
        keys, counts = np.unique(packed, return_counts=True)
        pairs, gaps = np.divmod(keys, span)
        found = zip(*np.divmod(pairs, n_moves), gaps)
        return Counter(dict(zip(((int(j), int(k), int(g)) for j, k, g in found), counts.tolist())))

    merged = count_sessions(scan, corpus.sessions, threads)
    labels = vocab.talk_moves
    out: dict[tuple[str, str], Counter] = {}
    for (j, k, gap), c in merged.items():
        out.setdefault((labels[j], labels[k]), Counter())[gap] += c
    return out


def _check_pair(tm_j, tm_k, vocab):
    for label in (tm_j, tm_k):
        if is_none(label):
            raise InvalidPair(f"{label} cannot anchor a gap pattern")
        if label not in vocab.talk_moves:
            raise InvalidPair(f"{label!r} is not a talk move")


def gap_histogram(corpus: Corpus, tm_j: str, tm_k: str, vocab=None, threads=1) -> GapHistogram:
    vocab = vocab or DEFAULT_VOCABULARY
    _check_pair(tm_j, tm_k, vocab)
    found = gap_histograms(corpus, vocab, threads).get((tm_j, tm_k), Counter())
    return GapHistogram((tm_j, tm_k), tuple(sorted(found.items())))


def tnone_gap_statistic(h: GapHistogram, min_share=0.05) -> GapStatistic:
    """100 x mean gap length over the gap lengths that survive ``min_share``.

    A gap length is dropped when its count is below ``min_share`` of the
    pair's instances (measured before any dropping). Nothing retained gives 0.
    """
    if not 0 <= min_share < 1:
        raise ValueError("min_share must lie in [0, 1)")
    total = h.total_instances
    cut = Fraction(repr(float(min_share)))
    retained, excluded = [], []
    for gap, c in h.entries:
        (excluded if Fraction(c, total) < cut else retained).append((gap, c))
    kept = sum(c for _, c in retained)
    weighted = sum(gap * c for gap, c in retained)
    value = float(Fraction(100 * weighted, kept)) if kept else 0.0
    return GapStatistic(h.pair, value, kept, weighted, tuple(excluded), total)


def gap_matrix(corpus: Corpus, min_share=0.05, vocab=None, threads=1) -> GapMatrix:
    """Gap statistic for every ordered pair of non-None moves; absent pairs map to None."""
    vocab = vocab or DEFAULT_VOCABULARY
    hists = gap_histograms(corpus, vocab, threads)
    labels = vocab.non_none_moves
    cells = {}
    for j in labels:
        for k in labels:
            found = hists.get((j, k))
            if not found:
                cells[(j, k)] = None
                continue
            cells[(j, k)] = tnone_gap_statistic(GapHistogram((j, k), tuple(sorted(found.items()))), min_share)
    return GapMatrix(labels, cells, min_share)
