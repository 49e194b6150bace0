"""Turn raw sampled traces into a fine-tuning corpus, three ways.

rejection      keep each problem's shortest correct sample, untouched
reformat       keep correct samples but delete the post-think summary
rejection_then_reformat   both: pick the survivor, then strip it

Run from the repository root:  python3 demos/03_build_sft_corpus.py
"""
from cotscope import BuildMode, TraceRecord, build_sft_corpus_list, score_record

# Four samples of problem A (three correct, one wrong) and two of
# problem B (both wrong). Input must arrive grouped by problem, the way
# a sampling loop naturally writes it.
RAW = [
    ("A", 0, "7", "<think>Count the lattice points row by row: 3+3+1 = \\boxed{7}.</think>"
     " Rows of three, three, and one give seven in total. **Final Answer** \\boxed{7}"),
    ("A", 1, "7", "<think>Brute force: enumerate all nine candidates, discard the two"
     " outside the circle, so \\boxed{7}. Double-check the boundary cases, still"
     " \\boxed{7}. One more sanity pass over the corners confirms it.</think>"
     " After enumeration and two verification passes the count is seven."
     " **Final Answer** \\boxed{7}"),
    ("A", 2, "7", "<think>Symmetry halves the work: 4 above, 4 below, minus the double-counted"
     " axis point... \\boxed{8}? No: the axis point is single, \\boxed{7}.</think>"
     " **Final Answer** \\boxed{7}"),
    ("A", 3, "7", "<think>Area is roughly pi r^2 so about 12, but wait, lattice points are"
     " not area, let me instead integrate... no, sum over columns: 4+4+4 makes"
     " \\boxed{12}? That ignores the circle entirely. Try the area heuristic once"
     " more, pi times 4 is about 12.5, round down, call it \\boxed{12}. I keep"
     " going back and forth but the estimate feels close enough to commit.</think>"
     " The area heuristic says about twelve points. **Final Answer** \\boxed{12}"),
    ("B", 0, "16", "<think>Each face contributes 2, times 6 faces: \\boxed{12}. Hmm, but edges"
     " are shared, so maybe add the 8 corners and subtract the 12 edges, giving"
     " 12+8-12 = \\boxed{8}? Or do corners count double? Recount: faces 6, each"
     " with 2, no overlap claimed anywhere, so 12 stands after all.</think>"
     " Counting per face and ignoring sharing gives twelve."
     " **Final Answer** \\boxed{12}"),
    ("B", 1, "16", "No idea. **Final Answer** \\boxed{20}"),
]

records = [
    TraceRecord(
        problem_id=pid,
        dataset_id="demo",
        sample_index=idx,
        prompt="(geometry counting problem)",
        gold_answer=gold,
        response=response,
    )
    for pid, idx, gold, response in RAW
]

print("=== input samples ===")
for r in records:
    s = score_record(r)
    print(
        f"  {r.problem_id}:{r.sample_index}  correct={str(s.correct):<5} tokens={s.length_total}"
    )

for mode in (BuildMode.REJECTION, BuildMode.REFORMAT, BuildMode.REJECTION_THEN_REFORMAT):
    kept, stats = build_sft_corpus_list(records, mode)
    print(f"\n=== mode: {mode.value} ===")
    for r in kept:
        marker = " [reformatted]" if (r.tags or {}).get("reformatted") == "true" else ""
        print(f"  kept {r.problem_id}:{r.sample_index}  tokens={score_record(r).length_total}{marker}")
    print(
        f"  problems {stats.problems_kept}/{stats.problems_in} kept,"
        f" mean tokens {stats.mean_tokens_in:.1f} -> {stats.mean_tokens_out:.1f}"
        f" ({stats.reduction_fraction:.0%} shorter)"
    )

print("\nProblem B never produced a correct sample, so rejection drops it")
print("entirely rather than teach the model a wrong answer. The reformat")
print("pass keeps the reasoning but removes the restatement between the")
print("think block and the final answer; the record is re-scored to prove")
print("the edit never breaks correctness.")
