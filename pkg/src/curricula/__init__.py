"""curricula: curriculum-learning scheduling for sequence-model training.

Difficulty scoring (duration / loss / WER / teacher transfer, with uniform
mixing), pacing schedules over growing data subsets, a padding-aware
training-time cost model, matched-pairs significance testing, and a
deterministic toy sequence learner to drive end-to-end experiments.
"""

from .corpus import (
    Corpus,
    CorpusSpec,
    ManifestError,
    UtteranceRecord,
    generate_corpus,
    load_corpus,
    load_manifest,
    save_corpus,
    save_manifest,
    segment_corpus,
    segment_utterance,
)
from .learner import (
    ExampleFeedback,
    NonFiniteLossError,
    ToyModel,
    TrainConfig,
    decode,
    evaluate,
    example_loss,
    load_model,
    save_model,
    train_epoch,
    train_teacher,
)
from .metrics import (
    AlignmentCounts,
    PairedErrorSample,
    cer,
    corpus_error_rate,
    edit_distance,
    levenshtein,
    mapsswe,
    wer,
)
from .pacing import (
    PacingParams,
    PacingSchedule,
    ScoringContext,
    build_schedule,
    hours_seen,
    pacing_fraction,
    sample_subset,
)
from .runner import (
    ExperimentConfig,
    RunReport,
    StrategyRun,
    compare_strategies,
    emit_report,
    load_config,
    load_report,
    run_experiment,
)
from .scoring import (
    EpochPlan,
    ScoreEntry,
    ScoreTable,
    ScoringError,
    Strategy,
    StrategyKind,
    TieBreak,
    UnsupportedStrategyError,
    epoch_order,
    order_by_scores,
    parse_strategy,
    score_duration,
    transfer_scores,
    uniform_mix,
)
from .timecost import CostParams, OverheadReport, overhead_table, padding_cost, wall_cost

__version__ = "0.1.0"

__all__ = [
    "AlignmentCounts",
    "Corpus",
    "CorpusSpec",
    "CostParams",
    "EpochPlan",
    "ExampleFeedback",
    "ExperimentConfig",
    "ManifestError",
    "NonFiniteLossError",
    "OverheadReport",
    "PacingParams",
    "PacingSchedule",
    "PairedErrorSample",
    "RunReport",
    "ScoreEntry",
    "ScoreTable",
    "ScoringContext",
    "ScoringError",
    "Strategy",
    "StrategyKind",
    "StrategyRun",
    "TieBreak",
    "ToyModel",
    "TrainConfig",
    "UnsupportedStrategyError",
    "UtteranceRecord",
    "build_schedule",
    "cer",
    "compare_strategies",
    "corpus_error_rate",
    "decode",
    "edit_distance",
    "emit_report",
    "epoch_order",
    "evaluate",
    "example_loss",
    "generate_corpus",
    "hours_seen",
    "levenshtein",
    "load_config",
    "load_corpus",
    "load_manifest",
    "load_model",
    "load_report",
    "mapsswe",
    "order_by_scores",
    "overhead_table",
    "pacing_fraction",
    "padding_cost",
    "parse_strategy",
    "run_experiment",
    "sample_subset",
    "save_corpus",
    "save_manifest",
    "save_model",
    "score_duration",
    "segment_corpus",
    "segment_utterance",
    "train_epoch",
    "train_teacher",
    "transfer_scores",
    "uniform_mix",
    "wall_cost",
    "wer",
]
