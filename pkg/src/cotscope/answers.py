"""Answer normalization and equivalence for verifiable grading.

Normalization is a fixed pipeline over the raw answer string; the
numeric form, when the normalized text parses as a number, is an exact
rational so that 0.5, 1/2, and 50% all compare equal without float
round-off. Two answers are equivalent when both have numeric forms and
those are equal, otherwise when their text forms are byte-identical.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .records import AnswerSpan

_WS_RE = re.compile(r"\s+")
_THOUSANDS_RE = re.compile(r"(?<=\d),(?=\d{3}(?!\d))")
_MC_LETTER_RE = re.compile(r"\(([a-z])\)")
_INT_RE = re.compile(r"[+-]?\d+")
_DECIMAL_RE = re.compile(r"[+-]?(?:\d+\.\d+|\.\d+)")
_FRACTION_RE = re.compile(r"([+-]?\d+)\s*/\s*([+-]?\d+)")

# commands whose balanced-brace argument replaces the whole command
_UNWRAP_COMMANDS = ("\\boxed", "\\textbf", "\\text")


@dataclass(frozen=True)
class NormalizedAnswer:
    """Canonical string plus an exact rational when the string is numeric."""

    text_form: str
    numeric_form: Optional[Fraction]


def _find_balanced(text: str, start: int) -> int | None:
    """Return the index of the brace closing the one at ``start``, or None."""
    depth = 0
    for i in range(start, len(text)):
        c = text[i]
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                return i
    return None


def _unwrap_commands(text: str) -> str:
    """Replace every \\boxed{X}, \\textbf{X}, \\text{X} by X, to fixpoint."""
    changed = True
    while changed:
        changed = False
        for cmd in _UNWRAP_COMMANDS:
            i = text.find(cmd + "{")
            while i != -1:
                close = _find_balanced(text, i + len(cmd))
                if close is None:
                    break
                text = text[:i] + text[i + len(cmd) + 1 : close] + text[close + 1 :]
                changed = True
                i = text.find(cmd + "{")
    return text


def _convert_frac(text: str) -> str:
    """Rewrite \\frac{a}{b} as a/b, innermost first."""
    while True:
        i = text.find("\\frac{")
        if i == -1:
            return text
        num_close = _find_balanced(text, i + len("\\frac"))
        if num_close is None or num_close + 1 >= len(text) or text[num_close + 1] != "{":
            return text
        den_close = _find_balanced(text, num_close + 1)
        if den_close is None:
            return text
        num = text[i + len("\\frac{") : num_close]
        den = text[num_close + 2 : den_close]
        text = text[:i] + num + "/" + den + text[den_close + 1 :]


def _strip_dollars(text: str) -> str:
    text = text.strip()
    while text.startswith("$") or text.endswith("$"):
        text = text.strip("$").strip()
    return text


def _parse_rational(text: str) -> Optional[Fraction]:
    if text.endswith("%"):
        inner = text[:-1].strip()
        value = _parse_rational(inner)
        return value / 100 if value is not None else None
    if _INT_RE.fullmatch(text):
        return Fraction(int(text))
    if _DECIMAL_RE.fullmatch(text):
        return Fraction(text)
    m = _FRACTION_RE.fullmatch(text)
    if m:
        den = int(m.group(2))
        if den == 0:
            return None
        return Fraction(int(m.group(1)), den)
    return None


def normalize_answer(raw: str) -> NormalizedAnswer:
    """Run the normalization pipeline and attempt an exact rational parse.

    The pipeline, in order: strip surrounding whitespace and dollar
    delimiters; unwrap \\boxed, \\textbf, \\text and drop \\left,
    \\right, \\!; collapse internal whitespace; remove thousands commas
    inside digit runs; lowercase; rewrite \\frac{a}{b} as a/b; trim
    trailing periods; unwrap a lone parenthesised choice letter. The
    result is idempotent: normalizing a text form returns it unchanged.
    """
    s = _strip_dollars(raw)
    s = _unwrap_commands(s)
    for cmd in ("\\left", "\\right", "\\!"):
        s = s.replace(cmd, "")
    s = _strip_dollars(s)
    s = _WS_RE.sub(" ", s).strip()
    s = _THOUSANDS_RE.sub("", s)
    s = s.lower()
    s = _convert_frac(s)
    s = s.rstrip(".").strip()
    m = _MC_LETTER_RE.fullmatch(s)
    if m:
        s = m.group(1)
    if not s:
        # keep a stable non-empty text form for junk like "$" or "\\boxed{}"
        s = _WS_RE.sub(" ", raw).strip().lower()
    return NormalizedAnswer(text_form=s, numeric_form=_parse_rational(s))


def answers_equivalent(a: NormalizedAnswer, b: NormalizedAnswer) -> bool:
    """Numeric equality when both sides are numeric, else exact text match."""
    if a.numeric_form is not None and b.numeric_form is not None:
        return a.numeric_form == b.numeric_form
    return a.text_form == b.text_form


def first_correct_prefix(spans: Sequence[AnswerSpan], gold: NormalizedAnswer) -> int | None:
    """Token length of the shortest prefix containing a gold-equivalent span."""
    for span in spans:
        if answers_equivalent(normalize_answer(span.raw), gold):
            return span.token_end
    return None


def count_correct_occurrences(spans: Sequence[AnswerSpan], gold: NormalizedAnswer) -> int:
    return sum(1 for span in spans if answers_equivalent(normalize_answer(span.raw), gold))
