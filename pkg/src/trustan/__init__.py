"""Trust/distrust analytics over threaded social-media discussions.

Pipeline: ingest posts -> split sentences -> filter entity mentions ->
label each mention support/attack/none -> weekly trust and distrust
series, slopes and ratio profiles -> two-candidate winner prediction,
with CSV and SVG reports.
"""

from .adapter_client import PROTOCOL_VERSION, HttpAdapter, StdioAdapter
from .classify import (
    EthosLabel,
    LabeledMention,
    Lexicon,
    classify_corpus,
    classify_external,
    classify_lexicon,
)
from .errors import (
    AdapterCrash,
    AdapterError,
    AdapterProtocolError,
    AdapterTimeout,
    ChartError,
    ConfigError,
    FetchError,
    IngestError,
    InsufficientData,
    TrustanError,
)
from .forecast import (
    INCONCLUSIVE,
    Prediction,
    TrendVerdict,
    predict_winner,
    trend_verdict,
)
from .ingest import (
    Corpus,
    CorpusBuilder,
    Post,
    fetch_thread,
    flatten_thread,
    load_corpus,
    load_posts_file,
    persist_corpus,
)
from .sentences import (
    AliasMap,
    MentionSentence,
    Sentence,
    corpus_sentences,
    filter_mentions,
    pipeline_stats,
    post_sentences,
    split_sentences,
)
from .trends import (
    EventMarker,
    WeekIndex,
    WeeklyCounts,
    WeeklySeries,
    bin_weekly,
    default_events,
    proportion_series,
    ratio_series,
    slope_series,
    trust_profile,
)

__version__ = "0.1.0"
