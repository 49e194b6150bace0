"""Response segmentation, answer-span extraction, and token counting.

A response splits into at most four ordered, non-overlapping segments
that together cover every character: optional leading text before a
think block (``other``), the first well-formed think block including
its delimiters (``think``), the text between the block and the final
answer region (``summary``), and the final answer region itself
(``final_answer``). Later ``<think>`` tags are literal text. With no
think delimiters the whole response splits into summary/final_answer;
an unclosed ``<think>`` swallows everything from the tag onward.
"""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, replace
from enum import Enum

from .answers import normalize_answer
from .errors import DataError, MissingTokenCount, SidecarMissing
from .records import AnswerSpan, Segment, SegmentKind, TraceRecord

logger = logging.getLogger(__name__)

THINK_OPEN = "<think>"
THINK_CLOSE = "</think>"

# a maximal run of letters/digits is one token; every other
# non-whitespace character is one token by itself
_TOKEN_RE = re.compile(r"[^\W_]+|\S")

_FINAL_MARKER_RE = re.compile(r"(?i)(?:\*\*\s*)?final\s+answer")
_MARKER_GAP_RE = re.compile(r"[\s$*:=.\-]*")
_ANSWER_LINE_RE = re.compile(
    r"(?im)^\s*(?:\*\*\s*)?(?:final\s+answer|answer)\b\s*(?:\*\*)?\s*[:=]?\s*(?P<value>.+?)\s*$"
)


class TokenizerMode(str, Enum):
    PROVIDED_COUNTS = "provided_counts"
    UNICODE_WORDS = "unicode_words"
    EXTERNAL_MAP = "external_map"


@dataclass(frozen=True)
class TokenizerSpec:
    """How lengths are measured: trusted counts, built-in words, or a sidecar."""

    mode: TokenizerMode = TokenizerMode.UNICODE_WORDS
    external_map: str | None = None


def count_tokens(text: str, spec: TokenizerSpec | None = None) -> int:
    """Count tokens of a text under the built-in word tokenizer.

    Only the unicode_words mode can count arbitrary text; the other two
    modes carry lengths per record and are resolved by ``Tokenizer``.
    """
    if spec is not None and spec.mode is not TokenizerMode.UNICODE_WORDS:
        raise ValueError(f"count_tokens cannot count text in mode {spec.mode.value}")
    return len(_TOKEN_RE.findall(text))


def _iter_boxed(text: str) -> list[tuple[int, int, int, int]]:
    """Locate balanced \\boxed{...} occurrences.

    Returns (command_start, content_start, content_end, end) tuples in
    document order; candidates with unbalanced braces are skipped with
    a warning and the scan resumes inside them.
    """
    out: list[tuple[int, int, int, int]] = []
    i = 0
    n = len(text)
    while True:
        i = text.find("\\boxed", i)
        if i == -1:
            return out
        j = i + len("\\boxed")
        if j >= n or text[j] != "{":
            logger.warning("boxed command without brace at offset %d", i)
            i = j
            continue
        depth = 0
        k = j
        while k < n:
            c = text[k]
            if c == "{":
                depth += 1
            elif c == "}":
                depth -= 1
                if depth == 0:
                    break
            k += 1
        if k >= n:
            logger.warning("unbalanced braces in boxed expression at offset %d", i)
            i = j
            continue
        out.append((i, j + 1, k, k + 1))
        i = k + 1


def _last_answer_line(text: str) -> tuple[str, int] | None:
    """Value and end offset of the last line written as an explicit answer."""
    last = None
    for m in _ANSWER_LINE_RE.finditer(text):
        last = m
    if last is None:
        return None
    return last.group("value"), last.end("value")


def _split_tail(response: str, lo: int, hi: int) -> list[tuple[SegmentKind, int, int]]:
    """Split the post-think region into summary and final_answer."""
    region = response[lo:hi]
    if not region:
        return []
    final_start: int | None = None
    boxed = _iter_boxed(region)
    if boxed:
        cmd_start = boxed[-1][0]
        final_start = cmd_start
        # pull an immediately preceding "Final Answer" marker into the region
        for m in _FINAL_MARKER_RE.finditer(region, 0, cmd_start):
            if m.end() <= cmd_start and _MARKER_GAP_RE.fullmatch(region, m.end(), cmd_start):
                final_start = m.start()
    else:
        last = None
        for m in _ANSWER_LINE_RE.finditer(region):
            last = m
        if last is not None:
            final_start = last.start()
    if final_start is None:
        return [(SegmentKind.SUMMARY, lo, hi)]
    out: list[tuple[SegmentKind, int, int]] = []
    if final_start > 0:
        out.append((SegmentKind.SUMMARY, lo, lo + final_start))
    out.append((SegmentKind.FINAL_ANSWER, lo + final_start, hi))
    return out


def parse_segments(response: str) -> list[Segment]:
    """Segment a response; the segments tile the full text in order."""
    if not response:
        return []
    regions: list[tuple[SegmentKind, int, int]] = []
    i = response.find(THINK_OPEN)
    if i == -1:
        regions.extend(_split_tail(response, 0, len(response)))
    else:
        if i > 0:
            regions.append((SegmentKind.OTHER, 0, i))
        j = response.find(THINK_CLOSE, i + len(THINK_OPEN))
        if j == -1:
            regions.append((SegmentKind.THINK, i, len(response)))
        else:
            close_end = j + len(THINK_CLOSE)
            regions.append((SegmentKind.THINK, i, close_end))
            regions.extend(_split_tail(response, close_end, len(response)))
    bounds = sorted({s for _, s, _ in regions} | {e for _, _, e in regions})
    counts = {b: count_tokens(response[:b]) for b in bounds}
    return [
        Segment(kind, start, end, counts[start], counts[end])
        for kind, start, end in regions
        if end > start
    ]


def has_unclosed_think(response: str) -> bool:
    i = response.find(THINK_OPEN)
    return i != -1 and response.find(THINK_CLOSE, i + len(THINK_OPEN)) == -1


def extract_answer_spans(response: str) -> list[AnswerSpan]:
    """Every boxed answer in document order, with token-end prefixes.

    When the response contains no boxed expression at all, the last
    line phrased as an explicit answer supplies one fallback span.
    Token ends are counted with the built-in word tokenizer; callers
    working in another tokenizer mode remap them afterwards.
    """
    found = _iter_boxed(response)
    spans: list[AnswerSpan] = []
    for _, content_start, content_end, end in found:
        raw = response[content_start:content_end]
        spans.append(
            AnswerSpan(
                raw=raw,
                normalized=normalize_answer(raw).text_form,
                end=end,
                token_end=count_tokens(response[:end]),
            )
        )
    if spans:
        return spans
    hit = _last_answer_line(response)
    if hit is not None:
        raw, end = hit
        return [
            AnswerSpan(
                raw=raw,
                normalized=normalize_answer(raw).text_form,
                end=end,
                token_end=count_tokens(response[:end]),
            )
        ]
    return []


def proportional_token_end(char_end: int, char_len: int, length_total: int) -> int:
    """Scale a character offset to token units when recounting is impossible."""
    if char_len <= 0 or length_total <= 0:
        return 1
    scaled = round(length_total * char_end / char_len)
    return max(1, min(length_total, scaled))


class Tokenizer:
    """Resolves record lengths and span token ends for one spec."""

    def __init__(self, spec: TokenizerSpec | None = None) -> None:
        self.spec = spec or TokenizerSpec()
        self._sidecar: dict[tuple[str, str, int], dict] | None = None

    def _sidecar_entry(self, record: TraceRecord) -> dict:
        if self._sidecar is None:
            path = self.spec.external_map
            if not path:
                raise SidecarMissing("external_map mode requires a sidecar path")
            table: dict[tuple[str, str, int], dict] = {}
            try:
                fp = open(path, encoding="utf-8")
            except OSError as exc:
                raise SidecarMissing(f"cannot read sidecar: {exc}") from None
            with fp:
                for line in fp:
                    line = line.strip()
                    if not line:
                        continue
                    entry = json.loads(line)
                    key = (entry["problem_id"], entry["dataset_id"], entry["sample_index"])
                    table[key] = entry
            self._sidecar = table
        entry = self._sidecar.get(record.key)
        if entry is None:
            raise SidecarMissing(f"no sidecar entry for {record.key!r}")
        return entry

    def length_of(self, record: TraceRecord) -> int:
        mode = self.spec.mode
        if mode is TokenizerMode.UNICODE_WORDS:
            return count_tokens(record.response)
        if mode is TokenizerMode.PROVIDED_COUNTS:
            if record.token_count is None:
                raise MissingTokenCount(f"record {record.key!r} has no token_count")
            return record.token_count
        entry = self._sidecar_entry(record)
        return int(entry["token_count"])

    def respan(self, record: TraceRecord, spans: list[AnswerSpan], length_total: int) -> list[AnswerSpan]:
        """Remap span token ends from word units into this spec's units."""
        mode = self.spec.mode
        if mode is TokenizerMode.UNICODE_WORDS or not spans:
            return spans
        if mode is TokenizerMode.PROVIDED_COUNTS:
            char_len = len(record.response)
            return [
                replace(s, token_end=proportional_token_end(s.end, char_len, length_total))
                for s in spans
            ]
        entry = self._sidecar_entry(record)
        ends = entry.get("answer_token_ends")
        if not isinstance(ends, list) or len(ends) != len(spans):
            raise DataError(f"sidecar answer_token_ends for {record.key!r} does not match extracted spans")
        for e in ends:
            if not 1 <= int(e) <= length_total:
                raise DataError(f"sidecar token end {e} outside [1, {length_total}] for {record.key!r}")
        return [replace(s, token_end=int(e)) for s, e in zip(spans, ends)]
