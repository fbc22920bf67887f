import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpora import corpus_strategy, make_session, random_corpus
from discourse_lens import (
    CorpusSource,
    DiscourseLensError,
    LabelError,
    SchemaError,
    ValidationFailed,
    parse_bytes,
    parse_corpus,
    serialize_corpus,
)
from discourse_lens.ingest import write_corpus
from discourse_lens.model import Corpus

TWO_UTT = (
    '{"session_id": "s1", "domain": "tutoring", "utterances": ['
    '{"idx": 0, "speaker": "teacher", "text": "What is 3 x 4?", "talk_move": "T-PRA", "dialogue_act": "qw"}, '
    '{"idx": 1, "speaker": "student", "speaker_id": "S7", "text": "12", "talk_move": "S-MClaim", "dialogue_act": "sd"}], '
    '"discourse_edges": [{"source": 0, "target": 1, "relation": "Question-Answer_pair"}]}\n'
)


def test_empty_file(tmp_path):
    f = tmp_path / "empty.jsonl"
    f.write_bytes(b"")
    corpus, report = parse_corpus(CorpusSource("jsonl", [f]))
    assert corpus.sessions == () and report.issues == []


def test_two_utterance_line():
    corpus, report = parse_bytes(TWO_UTT.encode())
    assert report.ok and report.issues == []
    (s,) = corpus.sessions
    assert len(s.utterances) == 2 and len(s.edges) == 1
    assert s.utterances[1].speaker_id == "S7" and s.utterances[0].speaker_id is None
    assert s.domain.value == "tutoring"


def test_duplicate_index_is_schema_error():
    line = TWO_UTT.replace('"idx": 1', '"idx": 0')
    with pytest.raises(SchemaError) as exc:
        parse_bytes(line.encode())
    assert "index 0" in str(exc.value)


def test_tutor_speaker_maps_to_teacher():
    corpus, _ = parse_bytes(TWO_UTT.replace('"speaker": "teacher"', '"speaker": "tutor"').encode())
    assert corpus.sessions[0].utterances[0].speaker.value == "teacher"


def test_labels_trimmed_case_sensitive():
    corpus, report = parse_bytes(TWO_UTT.replace('"T-PRA"', '" T-PRA\\t"').encode())
    assert corpus.sessions[0].utterances[0].talk_move == "T-PRA" and report.ok
    _, report = parse_bytes(TWO_UTT.replace('"T-PRA"', '"t-pra"').encode())
    assert [i.code for i in report.errors] == ["UNKNOWN_TALK_MOVE"]


def test_unknown_act_lenient_maps_to_other_strict_raises():
    line = TWO_UTT.replace('"qw"', '"QW"').encode()
    corpus, report = parse_bytes(line)
    assert corpus.sessions[0].utterances[0].dialogue_act == "fo_o_fw_by_bc"
    assert [i.code for i in report.warnings] == ["UNKNOWN_DIALOGUE_ACT"]
    with pytest.raises(LabelError) as exc:
        parse_bytes(line, strict=True)
    assert exc.value.label == "QW" and exc.value.line == 1


def test_strict_aborts_on_crossing(tmp_path):
    s = make_session("x", ["T-KET"] * 4, edges=[(0, 2, "Comment"), (1, 3, "Comment")])
    f = tmp_path / "c.jsonl"
    write_corpus(Corpus("c", (s,)), "jsonl", f)
    _, report = parse_corpus(CorpusSource("jsonl", [f], "lenient"))
    assert report.ok and report.warnings
    with pytest.raises(ValidationFailed):
        parse_corpus(CorpusSource("jsonl", [f], "strict"))


def test_schema_error_position():
    with pytest.raises(SchemaError) as exc:
        parse_bytes(TWO_UTT.encode() + b'{"session_id": 3}\n')
    assert exc.value.line == 2
    with pytest.raises(SchemaError) as exc:
        parse_bytes(b"\n{not json")
    assert exc.value.line == 2 and exc.value.column == 2


def test_missing_file_is_io_error(tmp_path):
    with pytest.raises(DiscourseLensError) as exc:
        parse_corpus(CorpusSource("jsonl", [tmp_path / "nope.jsonl"]))
    assert exc.value.code == "IO_ERROR"


def test_multi_file_order_and_parallel(tmp_path):
    rng = random.Random(3)
    parts = [random_corpus(rng, corpus_id=f"p{i}") for i in range(4)]
    paths = []
    for i, c in enumerate(parts):
        c = Corpus(c.corpus_id, tuple(s.__class__(f"{i}-{s.session_id}", s.domain, s.utterances, s.edges)
                                       for s in c.sessions))
        parts[i] = c
        p = tmp_path / f"part{i}.jsonl"
        write_corpus(c, "jsonl", p)
        paths.append(p)
    serial, _ = parse_corpus(CorpusSource("jsonl", paths))
    threaded, _ = parse_corpus(CorpusSource("jsonl", paths), threads=4)
    assert serial == threaded
    assert [s.session_id for s in serial.sessions] == [s.session_id for c in parts for s in c.sessions]


def test_empty_serialization():
    assert serialize_corpus(Corpus("e"), "jsonl") == b""


def test_serialization_is_canonical():
    corpus, _ = parse_bytes(TWO_UTT.encode())
    out = serialize_corpus(corpus, "jsonl").decode()
    rec = json.loads(out)
    assert list(rec) == ["session_id", "domain", "utterances", "discourse_edges"]
    assert list(rec["utterances"][1]) == ["idx", "speaker", "speaker_id", "text", "talk_move", "dialogue_act"]
    assert out.endswith("\n") and "\r" not in out
    assert all(line == line.rstrip() for line in out.splitlines())


def _reparse_csv(payload, **kw):
    return parse_bytes(payload.utterances, "csv", edges=payload.edges, sessions=payload.sessions, **kw)[0]


@settings(max_examples=200)
@given(corpus_strategy(text=st.text(max_size=20)))
def test_round_trip_jsonl_and_csv(corpus):
    data = serialize_corpus(corpus, "jsonl")
    again, _ = parse_bytes(data, corpus_id=corpus.corpus_id)
    assert again == corpus
    assert serialize_corpus(again, "jsonl") == data
    if any("\x00" in u.text for s in corpus.sessions for u in s.utterances):
        with pytest.raises(ValueError):
            serialize_corpus(corpus, "csv")
        return
    payload = serialize_corpus(corpus, "csv")
    assert _reparse_csv(payload, corpus_id=corpus.corpus_id) == corpus


def test_csv_directory_round_trip(tmp_path):
    corpus = random_corpus(random.Random(11), corpus_id="dir")
    write_corpus(corpus, "csv", tmp_path / "dir")
    parsed, _ = parse_corpus(CorpusSource("csv", [tmp_path / "dir"]))
    assert parsed == corpus


def test_csv_without_sessions_file():
    utts = (b"session_id,idx,speaker,speaker_id,text,talk_move,dialogue_act\n"
            b'b,0,student,,"so, we",S-None,b\na,0,teacher,T,hi,T-KET,ad\n')
    corpus, _ = parse_bytes(utts, "csv")
    assert [s.session_id for s in corpus.sessions] == ["b", "a"]
    assert corpus.sessions[0].utterances[0].text == "so, we"
    assert corpus.sessions[0].domain.value == "other"


def test_csv_bad_header_and_int():
    with pytest.raises(SchemaError):
        parse_bytes(b"a,b\n", "csv")
    with pytest.raises(SchemaError) as exc:
        parse_bytes(b"session_id,idx,speaker,speaker_id,text,talk_move,dialogue_act\nx,--1,teacher,,t,T-KET,sd\n", "csv")
    assert exc.value.column == 2


@settings(max_examples=300)
@given(st.binary(max_size=300))
def test_parse_total_on_bytes(data):
    for fmt in ("jsonl", "csv"):
        try:
            parse_bytes(data, fmt)
        except DiscourseLensError:
            pass


@settings(max_examples=300)
@given(st.text(alphabet='{}[]":,0123456789-abcdefghijklmnopqrstuvwxyz_ \n\\', max_size=200))
def test_parse_total_on_json_like_text(text):
    try:
        parse_bytes(text.encode())
    except DiscourseLensError:
        pass


def test_huge_and_odd_values():
    for bad in (b'{"session_id":"a","domain":"other","utterances":[{"idx":' + b"9" * 5000 + b'}],"discourse_edges":[]}',
                b"[" * 100000,
                b'{"session_id":"\\ud800","domain":"other","utterances":[],"discourse_edges":[]}',
                b'{"session_id":"a","domain":"other","utterances":[{"idx":true}],"discourse_edges":[]}'):
        with pytest.raises(DiscourseLensError):
            parse_bytes(bad)
