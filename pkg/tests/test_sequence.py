import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from corpora import corpora, corpus_strategy, make_corpus, oracle_gap_histogram, oracle_transitions
from discourse_lens import (
    InvalidPair,
    filter_transitions,
    gap_histogram,
    gap_matrix,
    tnone_gap_statistic,
    transition_counts,
)
from discourse_lens.sequence import GapHistogram, TransitionMatrix, gap_histograms
from discourse_lens.vocab import TALK_MOVES

FIXTURE = ["T-PRA", "T-None", "T-None", "S-MClaim", "T-PRA", "S-MClaim"]


def test_direct_and_collapsed_counts():
    c = make_corpus(["T-KET", "S-None", "S-MClaim"])
    m = transition_counts(c)
    assert m.counts.sum() == 2
    assert m.count("T-KET", "S-None") == 1 and m.count("S-None", "S-MClaim") == 1
    assert m.probability("T-KET", "S-None") == 1.0
    col = transition_counts(c, collapse_none=True)
    assert col.counts.sum() == 1 and col.count("T-KET", "S-MClaim") == 1


def test_single_utterance_session():
    assert transition_counts(make_corpus(["T-KET"])).counts.sum() == 0


def _row_matrix(row):
    counts = np.zeros((12, 12), dtype=np.int64)
    for target, c in row.items():
        counts[TALK_MOVES.index("T-KET"), TALK_MOVES.index(target)] = c
    return TransitionMatrix(TALK_MOVES, counts, "direct")


def test_filter_examples():
    m = _row_matrix({"S-None": 6, "S-MClaim": 3, "T-PRA": 1})
    kept = {(e.source, e.target) for e in filter_transitions(m, 0.10).edges}
    assert kept == {("T-KET", "S-None"), ("T-KET", "S-MClaim"), ("T-KET", "T-PRA")}
    assert [e.target for e in filter_transitions(m, 0.35).edges] == ["S-None"]
    assert len(filter_transitions(m, 0).edges) == 3
    roles = {e.target: e.receiver_role for e in filter_transitions(m).edges}
    assert roles["T-PRA"] == "teacher" and roles["S-None"] == "student"


def test_fixture_histogram_and_value():
    c = make_corpus(FIXTURE)
    h = gap_histogram(c, "T-PRA", "S-MClaim")
    assert h.entries == ((0, 1), (2, 1)) and h.total_instances == 2
    stat = tnone_gap_statistic(h)
    assert stat.value == 100.0 and stat.exact_value == 100
    assert gap_histogram(c, "T-PRA", "S-ProEvi").entries == ()


def test_s_none_interrupts():
    h = gap_histogram(make_corpus(["T-PRA", "S-None", "S-MClaim"]), "T-PRA", "S-MClaim")
    assert h.entries == ()


def test_statistic_examples():
    assert tnone_gap_statistic(GapHistogram(("a", "b"), ((0, 100),)), 0.5).value == 0.0
    s = tnone_gap_statistic(GapHistogram(("a", "b"), ((0, 97), (5, 3))))
    assert s.value == 0.0 and s.excluded_entries == ((5, 3),) and s.retained_instances == 97
    # exactly at min_share is kept
    s = tnone_gap_statistic(GapHistogram(("a", "b"), ((0, 95), (1, 5))))
    assert s.exact_value == Fraction(100 * 5, 100)


def test_none_pair_rejected():
    with pytest.raises(InvalidPair):
        gap_histogram(make_corpus(FIXTURE), "T-None", "S-MClaim")
    with pytest.raises(InvalidPair):
        gap_histogram(make_corpus(FIXTURE), "T-PRA", "nope")


def test_gap_matrix():
    g = gap_matrix(make_corpus(FIXTURE))
    assert len(g.labels) == 10
    assert g.cell("T-PRA", "S-MClaim").value == 100.0
    assert g.cell("S-MClaim", "T-PRA").value == 0.0
    assert g.cell("T-KET", "T-KET") is None
    present = {k for k, v in g.cells.items() if v is not None}
    assert present == {("T-PRA", "S-MClaim"), ("S-MClaim", "T-PRA")}


def test_none_free_corpus_gaps_are_zero():
    for c in corpora(4, 20, none_free=True):
        for stat in gap_matrix(c).cells.values():
            assert stat is None or stat.value == 0.0


@settings(max_examples=150)
@given(corpus_strategy(max_len=40))
def test_histograms_match_oracle(corpus):
    found = gap_histograms(corpus)
    for (j, k), counter in found.items():
        assert dict(counter) == oracle_gap_histogram(corpus, j, k)
    assert sum(sum(c.values()) for c in found.values()) == sum(
        sum(oracle_gap_histogram(corpus, j, k).values())
        for j in TALK_MOVES for k in TALK_MOVES if "None" not in j + k
    )


@given(corpus_strategy())
def test_transitions_match_oracle(corpus):
    for collapse in (False, True):
        m = transition_counts(corpus, collapse_none=collapse)
        expected = oracle_transitions(corpus, collapse)
        got = {(a, b): m.count(a, b) for a in TALK_MOVES for b in TALK_MOVES if m.count(a, b)}
        assert got == dict(expected)
        probs = m.probabilities
        for i, total in enumerate(m.row_totals):
            assert total == 0 or abs(probs[i].sum() - 1) < 1e-9


def test_threads_agree():
    rng = random.Random(9)
    from corpora import random_corpus
    c = random_corpus(rng, max_utterances=500, max_sessions=10)
    assert transition_counts(c) == transition_counts(c, threads=4)
    assert gap_histograms(c) == gap_histograms(c, threads=4)
