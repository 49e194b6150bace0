"""Scoring, reward shaping, corpus building, and length/accuracy metrics
for chain-of-thought traces."""
from .answers import (
    NormalizedAnswer,
    answers_equivalent,
    count_correct_occurrences,
    first_correct_prefix,
    normalize_answer,
)
from .corpus import BuildMode, build_sft_corpus, build_sft_corpus_list, reformat_trace, select_shortest_correct
from .errors import (
    ConfigError,
    CotscopeError,
    DataError,
    DatasetMismatch,
    DomainError,
    DuplicateSample,
    EmptyBaseline,
    InputError,
    MissingTokenCount,
    NoFinalAnswer,
    SidecarMissing,
)
from .metrics import (
    CountHistogram,
    DominanceResult,
    LengthSummary,
    MethodPoint,
    ProblemAggregate,
    StratumStats,
    aggregate_problems,
    auc_oaa,
    dataset_accuracy,
    difficulty_strata,
    dominance,
    dominates,
    intermediate_answer_distribution,
    length_distribution,
    length_reduction,
    macro_average,
    oaa_at,
    oaa_grid,
    run_metrics,
    t_max_from_baseline,
)
from .parsing import (
    Tokenizer,
    TokenizerMode,
    TokenizerSpec,
    count_tokens,
    extract_answer_spans,
    has_unclosed_think,
    parse_segments,
)
from .records import (
    AnswerSpan,
    CorpusStats,
    RewardConfig,
    RunMetrics,
    SampleGroup,
    ScoredTrace,
    Segment,
    SegmentKind,
    TraceRecord,
    Violation,
    read_jsonl,
    read_scored_traces,
    read_trace_records,
    record_to_json,
    scored_to_json,
    validate_record,
    validate_records,
    validate_scored,
    with_gold_answer,
)
from .rewards import (
    GROUP_SCHEMES,
    RewardBreakdown,
    RewardScheme,
    adaptive_length_penalty,
    adaptive_reward,
    correctness_reward,
    grpo_advantages,
    hard_length_reward,
    load_reward_config,
    normalized_length_reward,
    score_group,
    soft_length_reward,
    twyn_reward,
)
from .scoring import final_answer_candidate, score_record

__version__ = "0.1.0"
