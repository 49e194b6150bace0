"""End-to-end scoring of trace records against their gold answers."""
from __future__ import annotations

from typing import Sequence

from .answers import (
    answers_equivalent,
    count_correct_occurrences,
    first_correct_prefix,
    normalize_answer,
)
from .errors import DataError
from .parsing import (
    Tokenizer,
    TokenizerMode,
    TokenizerSpec,
    _last_answer_line,
    count_tokens,
    extract_answer_spans,
    has_unclosed_think,
    parse_segments,
    proportional_token_end,
)
from .records import (
    AnswerSpan,
    ScoredTrace,
    Segment,
    SegmentKind,
    TraceRecord,
    validate_scored,
)
from .rewards import adaptive_length_penalty


def final_answer_candidate(
    response: str, segments: Sequence[Segment], spans: Sequence[AnswerSpan]
) -> AnswerSpan | None:
    """The answer the trace actually commits to.

    This is the last extracted span inside the final_answer segment or,
    when that segment carries no boxed expression, the value of its
    explicit answer line.
    """
    final_seg = next((s for s in segments if s.kind is SegmentKind.FINAL_ANSWER), None)
    if final_seg is None:
        return None
    inside = [sp for sp in spans if final_seg.start < sp.end <= final_seg.end]
    if inside:
        return inside[-1]
    seg_text = response[final_seg.start : final_seg.end]
    hit = _last_answer_line(seg_text)
    if hit is None:
        return None
    raw, rel_end = hit
    end = final_seg.start + rel_end
    return AnswerSpan(
        raw=raw,
        normalized=normalize_answer(raw).text_form,
        end=end,
        token_end=count_tokens(response[:end]),
    )


def score_record(
    record: TraceRecord,
    tokenizer: Tokenizer | TokenizerSpec | None = None,
    *,
    lambda_: float = 1.0,
) -> ScoredTrace:
    """Parse, match, and reward one record.

    Correctness requires the final answer to match gold and the format
    gate to pass: a final_answer segment exists, and if the response
    opens a think block the block is closed. The adaptive penalty and
    the first-correct length always share the tokenizer's units.
    """
    tok = tokenizer if isinstance(tokenizer, Tokenizer) else Tokenizer(tokenizer)
    response = record.response
    segments = parse_segments(response)
    spans = extract_answer_spans(response)
    length_total = tok.length_of(record)
    spans = tok.respan(record, spans, length_total)

    candidates = list(spans)
    final_span = final_answer_candidate(response, segments, spans)
    if final_span is not None and all(final_span.end != s.end for s in spans):
        if tok.spec.mode is not TokenizerMode.UNICODE_WORDS:
            final_span = AnswerSpan(
                raw=final_span.raw,
                normalized=final_span.normalized,
                end=final_span.end,
                token_end=proportional_token_end(final_span.end, len(response), length_total),
            )
        candidates.append(final_span)
        candidates.sort(key=lambda s: s.end)
    elif final_span is not None:
        # the committed answer is one of the extracted spans; use the remapped one
        final_span = next(s for s in candidates if s.end == final_span.end)

    gold = normalize_answer(record.gold_answer)
    format_ok = any(s.kind is SegmentKind.FINAL_ANSWER for s in segments) and not has_unclosed_think(response)
    final_matches = final_span is not None and answers_equivalent(
        normalize_answer(final_span.raw), gold
    )
    correct = bool(format_ok and final_matches)

    length_first_correct = first_correct_prefix(candidates, gold)
    intermediate_count = count_correct_occurrences(candidates, gold)
    r_l = adaptive_length_penalty(length_total, length_first_correct, correct)
    r_c = 1.0 if correct else 0.0

    scored = ScoredTrace(
        problem_id=record.problem_id,
        dataset_id=record.dataset_id,
        sample_index=record.sample_index,
        correct=correct,
        length_total=length_total,
        length_first_correct=length_first_correct,
        reward_correctness=r_c,
        reward_length_penalty=r_l,
        reward_total=r_c - lambda_ * r_l,
        intermediate_correct_count=intermediate_count,
        difficulty=record.difficulty,
    )
    violations = validate_scored(scored)
    if violations:
        raise DataError(
            f"scoring {record.key!r} broke invariants: " + "; ".join(str(v) for v in violations)
        )
    return scored
