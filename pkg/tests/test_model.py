from hypothesis import given

from corpora import corpus_strategy, make_session
from discourse_lens import ConfigInvalid, load_vocabulary, validate_session, vocabulary
from discourse_lens.model import Corpus, DiscourseEdge, Session, SpeakerRole, Utterance, crossing_pairs, validate_corpus
from discourse_lens.vocab import is_continuation, is_none

import pytest


def codes(report, severity=None):
    return [i.code for i in report.issues if severity is None or i.severity == severity]


def test_vocabulary_sizes_and_order():
    assert len(vocabulary("talk_move")) == 12
    assert len(vocabulary("dialogue_act")) == 43
    assert len(vocabulary("relation")) == 16
    for view in ("talk_move", "dialogue_act", "relation"):
        labels = vocabulary(view)
        assert labels == sorted(labels)
        assert labels == vocabulary(view)


def test_label_predicates():
    nones = [m for m in vocabulary("talk_move") if is_none(m)]
    assert nones == ["S-None", "T-None"]
    assert is_continuation("+") and not is_continuation("sd")
    assert sum(m.startswith("T-") for m in vocabulary("talk_move")) == 7


def test_duplicate_vocab_file_rejected(tmp_path):
    f = tmp_path / "das.txt"
    f.write_text("sd\nqw\nsd\n")
    with pytest.raises(ConfigInvalid):
        load_vocabulary(da_path=f)


def test_custom_relation_vocab(tmp_path):
    f = tmp_path / "rels.txt"
    f.write_text(" Elaboration \nContrast\n\n")
    assert load_vocabulary(relation_path=f).relations == ("Contrast", "Elaboration")


def test_backward_edge():
    s = make_session("x", ["T-KET", "S-None", "T-None", "S-MClaim"], edges=[(3, 1, "Comment")])
    assert "EDGE_BACKWARD" in codes(validate_session(s), "error")


def test_self_loop_and_dangling():
    s = make_session("x", ["T-KET", "S-None"], edges=[(1, 1, "Comment"), (0, 5, "Comment")])
    found = codes(validate_session(s), "error")
    assert "EDGE_SELF_LOOP" in found and "EDGE_DANGLING" in found


def test_role_move_mismatch():
    u = Utterance(0, SpeakerRole.TEACHER, "hi", "S-MClaim", "sd")
    s = Session("x", "teaching", (u,))
    assert codes(validate_session(s), "error") == ["ROLE_MOVE_MISMATCH"]


def test_crossing_edges_lenient_vs_strict():
    # a=0, c=1, b=2, d=3: 0 < 1 < 2 < 3
    s = make_session("x", ["T-KET"] * 4, edges=[(0, 2, "Comment"), (1, 3, "Comment")])
    lenient = validate_session(s, "lenient")
    strict = validate_session(s, "strict")
    assert codes(lenient, "warning") == ["CROSSING_EDGES"] and lenient.ok
    assert codes(strict, "error") == ["CROSSING_EDGES"]


@pytest.mark.parametrize("edges, crossing", [
    ([(0, 2), (1, 3)], 1),
    ([(0, 3), (1, 2)], 0),   # nested
    ([(0, 1), (1, 2)], 0),   # shared endpoint
    ([(0, 2), (2, 4)], 0),
    ([(0, 2), (1, 3), (1, 4)], 2),
    ([(1, 3), (0, 2)], 1),
])
def test_crossing_predicate(edges, crossing):
    es = [DiscourseEdge(a, b, "Comment") for a, b in edges]
    brute = sum(1 for e in es for f in es if e.source < f.source < e.target < f.target)
    assert len(crossing_pairs(es)) == brute == crossing


def test_unknown_labels():
    u = Utterance(0, SpeakerRole.TEACHER, "hi", "T-KET", "zz")
    s = Session("x", "teaching", (u, Utterance(1, SpeakerRole.STUDENT, "", "S-None", "sd")),
                (DiscourseEdge(0, 1, "Nope"),))
    assert set(codes(validate_session(s, "lenient"), "warning")) == {"UNKNOWN_DIALOGUE_ACT", "UNKNOWN_RELATION"}
    assert set(codes(validate_session(s, "strict"), "error")) == {"UNKNOWN_DIALOGUE_ACT", "UNKNOWN_RELATION"}
    bad = Session("y", "teaching", (Utterance(0, SpeakerRole.TEACHER, "", "T-XYZ", "sd"),))
    assert codes(validate_session(bad, "lenient"), "error") == ["UNKNOWN_TALK_MOVE"]


def test_index_gap_and_duplicate_session():
    s = Session("x", "teaching", (Utterance(1, SpeakerRole.TEACHER, "", "T-KET", "sd"),))
    assert "INDEX_NOT_CONSECUTIVE" in codes(validate_session(s))
    c = Corpus("c", (make_session("a", ["T-KET"]), make_session("a", ["T-KET"])))
    assert "DUPLICATE_SESSION_ID" in codes(validate_corpus(c))


def test_duplicate_edge_reported():
    s = make_session("x", ["T-KET", "S-None"], edges=[(0, 1, "Comment"), (0, 1, "Comment")])
    assert "EDGE_DUPLICATE" in codes(validate_session(s))


@given(corpus_strategy())
def test_generated_corpora_have_no_structural_errors(corpus):
    for s in corpus.sessions:
        report = validate_session(s, "lenient")
        assert report.ok
        assert validate_session(s, "lenient") == report
        n = len(s.utterances)
        assert len(s.edges) <= n * (n - 1) // 2 * 16
