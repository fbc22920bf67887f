"""Label frequency distributions and talk-move x dialogue-act cross-tabs."""
from __future__ import annotations

from collections import Counter, namedtuple
from dataclasses import dataclass

from ._parallel import count_sessions
from .model import Corpus, SpeakerRole
from .vocab import DEFAULT_VOCABULARY, is_continuation

BELOW_THRESHOLD = "⟨below-threshold⟩"

TopK = namedtuple("TopK", ["labels", "achieved_coverage", "target_met"])


@dataclass(frozen=True)
class Distribution:
    """Counts per label, ordered by descending count then label.

    Shares are ``count / total``; with a zero total every share is 0.
    """

    labels: tuple[str, ...]
    counts: tuple[int, ...]
    display_min_share: float = 0.0

    @classmethod
    def from_counts(cls, counts, support=(), display_min_share=0.0):
        merged = Counter({label: 0 for label in support})
        merged.update(counts)
        items = sorted(merged.items(), key=lambda kv: (-kv[1], kv[0]))
        return cls(tuple(k for k, _ in items), tuple(v for _, v in items), display_min_share)

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def shares(self) -> tuple[float, ...]:
        total = self.total
        if total == 0:
            return tuple(0.0 for _ in self.counts)
        return tuple(c / total for c in self.counts)

    def count(self, label) -> int:
        try:
            return self.counts[self.labels.index(label)]
        except ValueError:
            return 0

    def share(self, label) -> float:
        total = self.total
        return self.count(label) / total if total else 0.0

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.shares))

    def __len__(self):
        return len(self.labels)

    def display(self, min_share=None):
        """``(label, count, share)`` rows with small labels pooled into one bucket.

        Only the presentation is affected; ``counts`` keep every label.
        """
        min_share = self.display_min_share if min_share is None else min_share
        rows, pooled = [], 0
        for label, count, share in zip(self.labels, self.counts, self.shares):
            if share < min_share:
                pooled += count
            else:
                rows.append((label, count, share))
        if pooled:
            rows.append((BELOW_THRESHOLD, pooled, pooled / self.total))
        return rows


@dataclass(frozen=True)
class CrossTab:
    row_labels: tuple[str, ...]
    rows: dict
    exclude_continuation: bool

    def row(self, talk_move) -> Distribution:
        return self.rows[talk_move]


def talk_move_distribution(corpus: Corpus, role_filter=None, vocab=None, threads=1) -> Distribution:
    """Talk-move counts over all utterances, or over one speaker role.

    Every vocabulary move is listed, zero-count ones included, so that
    distributions of different corpora align label by label.
    """
    vocab = vocab or DEFAULT_VOCABULARY
    role = SpeakerRole(role_filter) if role_filter is not None else None

    def count(session):
        return Counter(u.talk_move for u in session.utterances if role is None or u.speaker == role)

    support = vocab.talk_moves
    if role is not None:
        prefix = "T-" if role is SpeakerRole.TEACHER else "S-"
        support = tuple(m for m in support if m.startswith(prefix))
    return Distribution.from_counts(count_sessions(count, corpus.sessions, threads), support)


def dialogue_act_distribution(corpus: Corpus, min_share_display=0.0, threads=1) -> Distribution:
    if not 0 <= min_share_display < 1:
        raise ValueError("min_share_display must lie in [0, 1)")

    def count(session):
        return Counter(u.dialogue_act for u in session.utterances)

    total = count_sessions(count, corpus.sessions, threads)
    return Distribution.from_counts(total, display_min_share=min_share_display)


def crosstab_talkmove_dialogueact(corpus: Corpus, exclude_continuation=True, vocab=None, threads=1) -> CrossTab:
    """Dialogue-act distribution within each talk move.

    With ``exclude_continuation`` the continuation-tagged utterances are
    dropped before counting, from numerator and denominator alike.
    """
    vocab = vocab or DEFAULT_VOCABULARY

    def count(session):
        return Counter(
            (u.talk_move, u.dialogue_act)
            for u in session.utterances
            if not (exclude_continuation and is_continuation(u.dialogue_act))
        )

    pairs = count_sessions(count, corpus.sessions, threads)
    per_move = {m: Counter() for m in vocab.talk_moves}
    for (move, act), n in pairs.items():
        per_move.setdefault(move, Counter())[act] += n
    rows = {m: Distribution.from_counts(c) for m, c in per_move.items()}
    return CrossTab(tuple(sorted(rows)), rows, exclude_continuation)


def top_k_with_coverage(d: Distribution, k: int, coverage_target: float) -> TopK:
    """The ``k`` most frequent labels and the share of the total they cover.

    >>> d = Distribution.from_counts({"a": 4, "b": 3, "c": 2, "d": 1})
    >>> top_k_with_coverage(d, 3, 0.5)
    TopK(labels=('a', 'b', 'c'), achieved_coverage=0.9, target_met=True)
    """
    if k < 1:
        raise ValueError("k must be positive")
    if not 0 < coverage_target <= 1:
        raise ValueError("coverage_target must lie in (0, 1]")
    # zero-count labels never make the ranking
    ranked = [(label, c) for label, c in zip(d.labels, d.counts) if c > 0][:k]
    total = d.total
    covered = sum(c for _, c in ranked) / total if total else 0.0
    return TopK(tuple(label for label, _ in ranked), covered, covered >= coverage_target)
