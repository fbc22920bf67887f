"""Multi-view analytics for annotated teaching and tutoring dialogue."""

__version__ = "0.1.0"

from ._backend import BACKEND  # noqa: E402
from .errors import (  # noqa: E402
    ConfigInvalid,
    ConfigMismatch,
    CorpusIOError,
    DiscourseLensError,
    InvalidPair,
    LabelError,
    SchemaError,
    ValidationFailed,
)
from .ingest import CorpusSource, parse_bytes, parse_corpus, serialize_corpus  # noqa: E402
from .model import (  # noqa: E402
    Corpus,
    DiscourseEdge,
    Domain,
    Session,
    SpeakerRole,
    Utterance,
    ValidationReport,
    validate_corpus,
    validate_session,
)
from .multiview import (  # noqa: E402
    bigram_relation_distribution,
    extract_instances,
    lexical_marker_share,
    talkmove_to_none_da_distribution,
    triple_none_da_distribution,
)
from .report import AnalysisConfig, compare, emit_dot, emit_heatmap_csv, full_report  # noqa: E402
from .sequence import (  # noqa: E402
    filter_transitions,
    gap_histogram,
    gap_matrix,
    tnone_gap_statistic,
    transition_counts,
)
from .unigram import (  # noqa: E402
    Distribution,
    crosstab_talkmove_dialogueact,
    dialogue_act_distribution,
    talk_move_distribution,
    top_k_with_coverage,
)
from .vocab import Vocabulary, load_vocabulary, vocabulary  # noqa: E402

__all__ = [
    "__version__",
    "BACKEND",
    "ConfigInvalid",
    "ConfigMismatch",
    "CorpusIOError",
    "DiscourseLensError",
    "InvalidPair",
    "LabelError",
    "SchemaError",
    "ValidationFailed",
    "CorpusSource",
    "parse_bytes",
    "parse_corpus",
    "serialize_corpus",
    "Corpus",
    "DiscourseEdge",
    "Domain",
    "Session",
    "SpeakerRole",
    "Utterance",
    "ValidationReport",
    "validate_corpus",
    "validate_session",
    "bigram_relation_distribution",
    "extract_instances",
    "lexical_marker_share",
    "talkmove_to_none_da_distribution",
    "triple_none_da_distribution",
    "AnalysisConfig",
    "compare",
    "emit_dot",
    "emit_heatmap_csv",
    "full_report",
    "filter_transitions",
    "gap_histogram",
    "gap_matrix",
    "tnone_gap_statistic",
    "transition_counts",
    "Distribution",
    "crosstab_talkmove_dialogueact",
    "dialogue_act_distribution",
    "talk_move_distribution",
    "top_k_with_coverage",
    "Vocabulary",
    "load_vocabulary",
    "vocabulary",
]
