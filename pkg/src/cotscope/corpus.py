"""Build supervised fine-tuning corpora from sampled traces.

Two levers, composable: rejection keeps each problem's shortest correct
sample untouched, and reformatting rewrites a kept trace to the think
block followed immediately by the final answer, dropping the summary
restatement between them. Both are deterministic: the same input bytes
produce the same output bytes.
"""
from __future__ import annotations

import logging
from dataclasses import replace
from enum import Enum
from typing import Callable, Generator, Iterable, Sequence

from .errors import DataError, NoFinalAnswer
from .parsing import Tokenizer, TokenizerMode, TokenizerSpec, count_tokens, parse_segments
from .records import CorpusStats, ScoredTrace, SegmentKind, TraceRecord
from .scoring import score_record

logger = logging.getLogger(__name__)


class BuildMode(str, Enum):
    REJECTION = "rejection"
    REFORMAT = "reformat"
    REJECTION_THEN_REFORMAT = "rejection_then_reformat"


def select_shortest_correct(samples: Sequence[ScoredTrace]) -> ScoredTrace | None:
    """The correct sample with minimal total length; ties go to the lowest index."""
    best: ScoredTrace | None = None
    for scored in samples:
        if not scored.correct:
            continue
        if best is None or (scored.length_total, scored.sample_index) < (
            best.length_total,
            best.sample_index,
        ):
            best = scored
    return best


def reformat_trace(record: TraceRecord, tokenizer: Tokenizer | TokenizerSpec | None = None) -> TraceRecord:
    """Rewrite a trace to think block plus final answer, nothing else.

    The think delimiters are kept; summary and any leading text are
    dropped; token_count is recomputed for the new response. Raises
    NoFinalAnswer when the response has no final answer segment.
    """
    tok = tokenizer if isinstance(tokenizer, Tokenizer) else Tokenizer(tokenizer)
    segments = parse_segments(record.response)
    final = next((s for s in segments if s.kind is SegmentKind.FINAL_ANSWER), None)
    if final is None:
        raise NoFinalAnswer(f"record {record.key!r} has no final answer segment")
    think = next((s for s in segments if s.kind is SegmentKind.THINK), None)
    new_response = (think.text(record.response) if think is not None else "") + final.text(record.response)
    if tok.spec.mode is TokenizerMode.UNICODE_WORDS:
        new_count: int | None = count_tokens(new_response)
    else:
        # counts in foreign units are rescaled by size; recounting is impossible
        old_len = len(record.response)
        total = tok.length_of(record)
        new_count = max(1, round(total * len(new_response) / old_len)) if old_len else total
    tags = dict(record.tags or {})
    tags["reformatted"] = "true"
    return replace(record, response=new_response, token_count=new_count, tags=tags)


def _grouped(records: Iterable[TraceRecord]) -> Generator[tuple[tuple[str, str], list[TraceRecord]], None, None]:
    """Group consecutive records by (dataset_id, problem_id).

    Memory stays bounded by the largest group. A key that reappears
    after its group closed means the input was not grouped; that is a
    consistency error, not something to silently mis-count.
    """
    seen: set[tuple[str, str]] = set()
    current_key: tuple[str, str] | None = None
    bucket: list[TraceRecord] = []
    for record in records:
        key = (record.dataset_id, record.problem_id)
        if key != current_key:
            if bucket:
                yield current_key, bucket
            if key in seen:
                raise DataError(f"records for {key!r} are not contiguous in the input")
            seen.add(key)
            current_key = key
            bucket = []
        bucket.append(record)
    if bucket:
        yield current_key, bucket


def build_sft_corpus(
    records: Iterable[TraceRecord],
    mode: BuildMode,
    *,
    tokenizer: Tokenizer | TokenizerSpec | None = None,
    lambda_: float = 1.0,
    on_skip: Callable[[TraceRecord, str], None] | None = None,
) -> Generator[TraceRecord, None, CorpusStats]:
    """Yield corpus records and return CorpusStats when exhausted.

    Input must be grouped by (dataset_id, problem_id). Records that
    fail scoring or reformatting are skipped, reported through
    ``on_skip``, and counted in the stats.
    """
    mode = BuildMode(mode)
    tok = tokenizer if isinstance(tokenizer, Tokenizer) else Tokenizer(tokenizer)

    problems_in = 0
    problems_kept = 0
    samples_in = 0
    skipped = 0
    sum_tokens_in = 0
    n_tokens_in = 0
    sum_tokens_out = 0
    n_tokens_out = 0

    def _skip(record: TraceRecord, reason: str) -> None:
        nonlocal skipped
        skipped += 1
        logger.warning("skipping record %r: %s", record.key, reason)
        if on_skip is not None:
            on_skip(record, reason)

    for (_, _), group in _grouped(records):
        problems_in += 1
        scored_pairs: list[tuple[TraceRecord, ScoredTrace]] = []
        for record in group:
            samples_in += 1
            try:
                scored = score_record(record, tok, lambda_=lambda_)
            except Exception as exc:  # per-record failures never abort the build
                _skip(record, f"scoring failed: {exc}")
                continue
            scored_pairs.append((record, scored))
            sum_tokens_in += scored.length_total
            n_tokens_in += 1

        emitted_any = False
        if mode in (BuildMode.REJECTION, BuildMode.REJECTION_THEN_REFORMAT):
            by_index = {s.sample_index: r for r, s in scored_pairs}
            selected = select_shortest_correct([s for _, s in scored_pairs])
            if selected is not None:
                out: TraceRecord | None = by_index[selected.sample_index]
                out_length = selected.length_total
                if mode is BuildMode.REJECTION_THEN_REFORMAT:
                    try:
                        out = reformat_trace(out, tok)
                        out_length = out.token_count if out.token_count is not None else 0
                    except NoFinalAnswer as exc:
                        _skip(out, str(exc))
                        out = None
                if out is not None:
                    emitted_any = True
                    sum_tokens_out += out_length
                    n_tokens_out += 1
                    yield out
        else:
            for record, scored in scored_pairs:
                if not scored.correct:
                    continue
                try:
                    out = reformat_trace(record, tok)
                except NoFinalAnswer as exc:
                    _skip(record, str(exc))
                    continue
                emitted_any = True
                sum_tokens_out += out.token_count if out.token_count is not None else 0
                n_tokens_out += 1
                yield out
        if emitted_any:
            problems_kept += 1

    mean_in = sum_tokens_in / n_tokens_in if n_tokens_in else 0.0
    mean_out = sum_tokens_out / n_tokens_out if n_tokens_out else 0.0
    reduction = 1.0 - mean_out / mean_in if mean_in > 0 else 0.0
    return CorpusStats(
        problems_in=problems_in,
        problems_kept=problems_kept,
        samples_in=samples_in,
        mean_tokens_in=mean_in,
        mean_tokens_out=mean_out,
        reduction_fraction=reduction,
        records_skipped=skipped,
    )


def build_sft_corpus_list(
    records: Iterable[TraceRecord],
    mode: BuildMode,
    *,
    tokenizer: Tokenizer | TokenizerSpec | None = None,
    lambda_: float = 1.0,
    on_skip: Callable[[TraceRecord, str], None] | None = None,
) -> tuple[list[TraceRecord], CorpusStats]:
    """Non-streaming convenience wrapper around build_sft_corpus."""
    gen = build_sft_corpus(records, mode, tokenizer=tokenizer, lambda_=lambda_, on_skip=on_skip)
    out: list[TraceRecord] = []
    while True:
        try:
            out.append(next(gen))
        except StopIteration as stop:
            return out, stop.value
