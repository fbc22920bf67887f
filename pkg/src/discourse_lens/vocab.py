"""Label vocabularies for the three annotation views.

Talk moves carry their speaker role in the prefix (``T-`` teacher/tutor,
``S-`` student); each role has one ``*-None`` catch-all for utterances that
match no talk move.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigInvalid

TEACHER_PREFIX = "T-"
STUDENT_PREFIX = "S-"
T_NONE = "T-None"
S_NONE = "S-None"

TALK_MOVES = (
    "T-KET", "T-GSR", "T-RES", "T-REV", "T-PRR", "T-PRA", T_NONE,
    "S-MClaim", "S-ProEvi", "S-RelTo", "S-AskMI", S_NONE,
)

CONTINUATION = "+"

# Flattened SWBD-DAMSL clusters. Abandoned and uninterpretable utterances
# share the "%" tag, which leaves 42 distinct clusters.
SWBD_DAMSL_TAGS = (
    "sd", "b", "sv", "aa", "%", "ba", "qy", "x", "ny", "fc", "qw", "nn",
    "bk", "h", "qy^d", "fo_o_fw_by_bc", "bh", "^q", "bf", "na", "ad", "^2",
    "b^m", "qo", "qh", "^h", "ar", "ng", "br", "no", "fp", "qrr", "arp_nd",
    "t3", "oo_co_cc", "t1", "bd", "aap_am", "^g", "qw^d", "fa", "ft",
)
DIALOGUE_ACTS = SWBD_DAMSL_TAGS + (CONTINUATION,)

# the SWBD-DAMSL "Other" cluster
DEFAULT_OTHER_ACT = "fo_o_fw_by_bc"

RELATIONS = (
    "Comment", "Clarification_question", "Elaboration", "Acknowledgement",
    "Continuation", "Explanation", "Conditional", "Question-Answer_pair",
    "Alternation", "Q-Elab", "Result", "Background", "Narration",
    "Correction", "Parallel", "Contrast",
)

VIEWS = ("talk_move", "dialogue_act", "relation")


def is_none(label: str) -> bool:
    return label.endswith("-None") and label[:2] in (TEACHER_PREFIX, STUDENT_PREFIX)


def is_continuation(label: str) -> bool:
    return label == CONTINUATION


def role_prefix(label: str) -> str | None:
    if label.startswith(TEACHER_PREFIX):
        return "teacher"
    if label.startswith(STUDENT_PREFIX):
        return "student"
    return None


def _checked(labels, view) -> tuple[str, ...]:
    seen = set()
    for label in labels:
        if label in seen:
            raise ConfigInvalid(f"duplicate {view} label {label!r}")
        seen.add(label)
    if not labels:
        raise ConfigInvalid(f"empty {view} vocabulary")
    return tuple(sorted(labels))


@dataclass(frozen=True)
class Vocabulary:
    """Closed label sets, each stored in lexicographic order."""

    talk_moves: tuple[str, ...]
    dialogue_acts: tuple[str, ...]
    relations: tuple[str, ...]
    other_act: str = DEFAULT_OTHER_ACT

    @classmethod
    def build(cls, talk_moves=TALK_MOVES, dialogue_acts=DIALOGUE_ACTS, relations=RELATIONS):
        tms = _checked(list(talk_moves), "talk_move")
        for label in tms:
            if role_prefix(label) is None:
                raise ConfigInvalid(f"talk move {label!r} lacks a T-/S- role prefix")
        if T_NONE not in tms:
            raise ConfigInvalid(f"talk move vocabulary must contain {T_NONE}")
        das = _checked(list(dialogue_acts), "dialogue_act")
        rels = _checked(list(relations), "relation")
        if "Other" in das:
            other = "Other"
        elif DEFAULT_OTHER_ACT in das:
            other = DEFAULT_OTHER_ACT
        else:
            raise ConfigInvalid(
                f"dialogue act vocabulary needs an 'Other' or {DEFAULT_OTHER_ACT!r} tag"
            )
        return cls(tms, das, rels, other)

    def labels(self, view: str) -> tuple[str, ...]:
        if view == "talk_move":
            return self.talk_moves
        if view == "dialogue_act":
            return self.dialogue_acts
        if view == "relation":
            return self.relations
        raise ValueError(f"unknown view {view!r}")

    @property
    def non_none_moves(self) -> tuple[str, ...]:
        return tuple(m for m in self.talk_moves if not is_none(m))

    def move_index(self) -> dict[str, int]:
        return {m: i for i, m in enumerate(self.talk_moves)}


DEFAULT_VOCABULARY = Vocabulary.build()


def vocabulary(view: str, vocab: Vocabulary | None = None) -> list[str]:
    """Canonical ordered label list for one view."""
    return list((vocab or DEFAULT_VOCABULARY).labels(view))


def read_label_file(path) -> list[str]:
    """One label per line, UTF-8; blank lines and surrounding whitespace ignored."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigInvalid(f"cannot read vocabulary file {path}: {exc}") from exc
    return [line.strip() for line in text.splitlines() if line.strip()]


def load_vocabulary(talkmove_path=None, da_path=None, relation_path=None) -> Vocabulary:
    if talkmove_path is None and da_path is None and relation_path is None:
        return DEFAULT_VOCABULARY
    return Vocabulary.build(
        read_label_file(talkmove_path) if talkmove_path else TALK_MOVES,
        read_label_file(da_path) if da_path else DIALOGUE_ACTS,
        read_label_file(relation_path) if relation_path else RELATIONS,
    )
