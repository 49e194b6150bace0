"""Compare the reward schemes on one group of sampled solutions.

Eight samples of the same problem: five correct at very different
lengths, three wrong. Each scheme turns the group into rewards, then
group-standardized advantages: what a policy update would actually see.

Run from the repository root:  python3 demos/02_rewards_and_advantages.py
"""
from cotscope import RewardConfig, RewardScheme, ScoredTrace, score_group

GROUP = []
for i, (correct, total, first) in enumerate(
    [
        (True, 180, 180),   # concise, answers at the very end
        (True, 420, 200),   # finds the answer early, then rambles
        (True, 900, 850),
        (False, 300, None),
        (True, 2400, 300),  # finds it early, buries it in verification
        (False, 1100, None),
        (True, 640, 640),
        (False, 90, None),  # short and wrong: brevity alone earns nothing
    ]
):
    penalty = (total - first) / total if correct else 0.0
    GROUP.append(
        ScoredTrace(
            problem_id="demo",
            dataset_id="demo",
            sample_index=i,
            correct=correct,
            length_total=total,
            length_first_correct=first,
            reward_correctness=1.0 if correct else 0.0,
            reward_length_penalty=penalty,
            reward_total=(1.0 if correct else 0.0) - penalty,
            intermediate_correct_count=1 if correct else 0,
        )
    )

cfg = RewardConfig(hard_cutoff=600, soft_l_cache=400, soft_l_max=1200, group_size=8)

header = "sample  ok  tokens  first"
schemes = [
    RewardScheme.ADAPTIVE,
    RewardScheme.HARD_LENGTH,
    RewardScheme.SOFT_LENGTH,
    RewardScheme.NORMALIZED_LENGTH,
    RewardScheme.TWYN,
]
for scheme in schemes:
    header += f"  {scheme.value:>17}"
print(header)

rows = [[] for _ in GROUP]
for scheme in schemes:
    breakdowns, sample_group = score_group(GROUP, scheme, cfg)
    for i, (b, adv) in enumerate(zip(breakdowns, sample_group.advantages)):
        rows[i].append(f"{b.total:>7.3f} a={adv:>+6.2f}")

for s, cells in zip(GROUP, rows):
    first = "-" if s.length_first_correct is None else str(s.length_first_correct)
    line = f"{s.sample_index:>6}  {'y' if s.correct else 'n'}  {s.length_total:>6}  {first:>5}"
    for cell in cells:
        line += f"  {cell:>17}"
    print(line)

print()
print("Reading the columns:")
print("  adaptive          charges only tokens after the first correct answer,")
print("                    so sample 4 (correct but buried) is punished hardest.")
print("  hard_length       all-or-nothing at 600 tokens; no gradient near the line.")
print("  soft_length       fades from 1 to 0 across the ramp; wrong answers inside")
print("                    the ramp go negative.")
print("  normalized_length rewards relative brevity, even for wrong answers (capped at 0).")
print("  twyn              ranks the correct members; wrong ones all land at 0.")
print()
print("Advantages in each column sum to ~0: the schemes disagree about which")
print("behavior gets pushed up, not about the group mean.")
