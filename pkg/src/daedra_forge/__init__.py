"""daedra-forge: corpus engineering and evaluation pipeline for VAERS
safety-report severity classification.

Pipeline stages, each its own module:

- :mod:`~daedra_forge.corpus_ingest`  streaming VAERS CSV -> JSONL corpus
- :mod:`~daedra_forge.labels`         the 8-class outcome-set encoding
- :mod:`~daedra_forge.splitter`       stratified train/test/validation split
- :mod:`~daedra_forge.tokenizer`      domain WordPiece training + tokenizing
- :mod:`~daedra_forge.baseline_model` bag-of-tokens softmax classifier
- :mod:`~daedra_forge.evaluation`     per-class / averaged / per-event metrics
- :mod:`~daedra_forge.selection`      candidate comparison and selection
- :mod:`~daedra_forge.manifest`       hashed run manifests
- :mod:`~daedra_forge.cli`            the ``daedra-forge`` command
"""

from .corpus_ingest import (
    CorpusStats,
    IngestError,
    ParseStats,
    RawReport,
    Report,
    corpus_stats,
    derive_outcomes,
    filter_reports,
    parse_vaers_csv,
    read_reports_jsonl,
    write_reports_jsonl,
)
from .determinism import ALGORITHM_ID, derive_seed, deterministic_shuffle
from .labels import (
    CLASS_NAMES,
    NUM_CLASSES,
    EventKind,
    OutcomeSet,
    decode_class,
    encode_class,
    events_of,
)
from .splitter import (
    AgeBand,
    Partition,
    SplitAssignment,
    StratumKey,
    age_quintiles,
    stratified_split,
    stratified_subsample,
    stratum_of,
    subsample_reports,
)
from .tokenizer import (
    EncodedText,
    Vocabulary,
    VocabularyError,
    detokenize,
    encode,
    load_vocab,
    pretokenize,
    save_vocab,
    tokenize,
    train_wordpiece,
)
from .baseline_model import (
    AdamState,
    Checkpoint,
    ModelParams,
    NonFiniteGradientError,
    TrainConfig,
    adam_step,
    featurize,
    forward,
    load_checkpoint,
    loss_and_grad,
    predict,
    save_checkpoint,
    train,
)
from .evaluation import (
    Averages,
    ClassMetrics,
    ConfusionCounts,
    MetricsReport,
    SetCombinationTable,
    classwise_report,
    confusion_for_class,
    metrics_to_dict,
    micro_f1,
    prf,
    set_combination_table,
)
from .selection import (
    CandidateConfig,
    ComparisonRow,
    run_comparison,
    select_best,
)
from .manifest import RunManifest, sha256_file, verify_manifest

__version__ = "0.1.0"
