"""Walk through what the scorer sees in a single reasoning trace.

Run from the repository root:  python3 demos/01_parse_and_score.py
"""
from pathlib import Path

from cotscope import (
    TraceRecord,
    extract_answer_spans,
    parse_segments,
    read_trace_records,
    score_record,
)

RESPONSE = (
    "<think>Pair the terms: 1+9, 2+8, 3+7. Each pair is 10, so \\boxed{30}."
    " Wait, there are also 4+6 and the lone 5, giving \\boxed{45}.</think>"
    " Summing 1 through 9 pairs up neatly. **Final Answer** \\boxed{45}"
)

print("=== the raw response ===")
print(RESPONSE)

# Every character belongs to exactly one segment, in reading order.
print("\n=== segments ===")
for seg in parse_segments(RESPONSE):
    snippet = RESPONSE[seg.start : seg.end]
    if len(snippet) > 48:
        snippet = snippet[:45] + "..."
    print(
        f"  {seg.kind.value:<12} chars [{seg.start:>3}, {seg.end:>3})"
        f"  tokens [{seg.token_start:>3}, {seg.token_end:>3})  {snippet!r}"
    )

# Answer spans are every committed value in order, not just the last.
# The earliest one matching gold stops the length clock; the one in the
# final-answer region decides correctness.
print("\n=== answer spans ===")
for span in extract_answer_spans(RESPONSE):
    print(f"  raw={span.raw!r:<6} normalized={span.normalized!r:<6} token_end={span.token_end}")

record = TraceRecord(
    problem_id="sum-1-to-9",
    dataset_id="demo",
    sample_index=0,
    prompt="What is 1 + 2 + ... + 9?",
    gold_answer="45",
    response=RESPONSE,
)
scored = score_record(record)
print("\n=== scored ===")
print(f"  correct                    {scored.correct}")
print(f"  length_total               {scored.length_total}")
print(f"  length_first_correct       {scored.length_first_correct}")
print(f"  intermediate_correct_count {scored.intermediate_correct_count}")
print(f"  reward_length_penalty      {scored.reward_length_penalty:.4f}")
print(f"  reward_total               {scored.reward_total:.4f}")
print("\nThe model self-corrected inside the think block, then kept going;")
print("only the tail after the first 45 is charged to the penalty.")

# The repository ships three hand-written traces of one competition
# problem, each more compressed than the last. Longer wandering means a
# larger share of the trace comes after the first correct answer.
fixture = Path(__file__).resolve().parent.parent / "fixtures" / "verification_traces.jsonl"
print("\n=== bundled traces, same problem, three styles ===")
with open(fixture, encoding="utf-8") as fp:
    for rec in read_trace_records(fp):
        s = score_record(rec)
        style = rec.tags.get("method", "?")
        print(
            f"  {style:<22} tokens={s.length_total:>4}  first_correct={s.length_first_correct:>4}"
            f"  repeats={s.intermediate_correct_count}  penalty={s.reward_length_penalty:.3f}"
        )
