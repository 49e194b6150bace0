"""Reward schemes, group advantages, and config loading."""
from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from cotscope import (
    ConfigError,
    DomainError,
    RewardConfig,
    RewardScheme,
    adaptive_length_penalty,
    adaptive_reward,
    grpo_advantages,
    hard_length_reward,
    load_reward_config,
    normalized_length_reward,
    score_group,
    soft_length_reward,
    twyn_reward,
)
from tests.conftest import make_scored


class TestAdaptivePenalty:
    def test_fraction_after_first_correct(self):
        assert adaptive_length_penalty(100, 40, True) == pytest.approx(0.6)
        assert adaptive_length_penalty(100, 50, True) == 0.5

    def test_answering_at_the_end_costs_nothing(self):
        assert adaptive_length_penalty(100, 100, True) == 0.0

    def test_incorrect_pays_no_penalty(self):
        assert adaptive_length_penalty(100, 40, False) == 0.0
        assert adaptive_length_penalty(100, None, False) == 0.0

    def test_correct_without_prefix_pays_nothing(self):
        # defensive: correct implies a prefix upstream, but the formula
        # alone must not blow up
        assert adaptive_length_penalty(100, None, True) == 0.0

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            adaptive_length_penalty(0, 1, True)
        with pytest.raises(DomainError):
            adaptive_length_penalty(10, 11, True)

    @given(st.integers(1, 10**6), st.integers(1, 10**6))
    def test_always_in_unit_interval(self, total, first):
        first = min(first, total)
        p = adaptive_length_penalty(total, first, True)
        assert 0.0 <= p < 1.0

    def test_reward_total_uses_lambda(self):
        scored = make_scored(length_total=100, length_first_correct=40, reward_length_penalty=0.6)
        b = adaptive_reward(scored, RewardConfig(lambda_=0.5))
        assert b.r_c == 1.0
        assert b.r_l == pytest.approx(0.6)
        assert b.total == pytest.approx(1.0 - 0.5 * 0.6)
        assert b.details["lambda"] == 0.5

    def test_default_lambda_is_one(self):
        scored = make_scored(length_total=200, length_first_correct=50)
        b = adaptive_reward(scored)
        assert b.total == pytest.approx(1.0 - 0.75)


class TestHardLength:
    def test_boundary_is_inclusive(self):
        assert hard_length_reward(make_scored(length_total=500), cutoff=500).total == 1.0
        assert hard_length_reward(make_scored(length_total=501), cutoff=500).total == 0.0

    def test_incorrect_never_pays(self):
        assert hard_length_reward(make_scored(correct=False, length_total=10), cutoff=500).total == 0.0

    def test_cutoff_validation(self):
        with pytest.raises(ConfigError):
            hard_length_reward(make_scored(), cutoff=0)

    def test_breakdown_shape(self):
        b = hard_length_reward(make_scored(length_total=100), cutoff=500)
        assert b.scheme is RewardScheme.HARD_LENGTH
        assert b.r_l == 0.0
        assert b.details == {"cutoff": 500.0, "within_cutoff": 1.0}


class TestSoftLength:
    CACHE, MAX = 100, 200

    def reward(self, length, correct=True):
        return soft_length_reward(
            make_scored(correct=correct, length_total=length, length_first_correct=length if correct else None),
            self.CACHE,
            self.MAX,
        )

    def test_no_penalty_at_or_below_cache(self):
        assert self.reward(100).total == 1.0
        assert self.reward(50).total == 1.0

    def test_linear_ramp(self):
        assert self.reward(150).total == pytest.approx(0.5)
        assert self.reward(150).details["penalty"] == pytest.approx(0.5)
        assert self.reward(175).total == pytest.approx(0.25)

    def test_zero_at_the_top_of_the_ramp(self):
        assert self.reward(200).total == pytest.approx(0.0)

    def test_nothing_past_the_maximum(self):
        assert self.reward(201).total == 0.0
        assert self.reward(10_000).total == 0.0

    def test_incorrect_mid_ramp_goes_negative(self):
        # the formula subtracts the ramp from a zero correctness term
        assert self.reward(150, correct=False).total == pytest.approx(-0.5)

    def test_incorrect_past_maximum_is_zero(self):
        assert self.reward(500, correct=False).total == 0.0

    def test_requires_cache_below_max(self):
        with pytest.raises(ConfigError):
            soft_length_reward(make_scored(), 200, 200)

    def test_r_l_field_stays_zero(self):
        assert self.reward(150).r_l == 0.0


def _group(lengths, correct=None):
    correct = correct or [True] * len(lengths)
    return [
        make_scored(
            sample_index=i,
            length_total=n,
            correct=c,
            length_first_correct=n if c else None,
        )
        for i, (n, c) in enumerate(zip(lengths, correct))
    ]


class TestNormalizedLength:
    def test_bonus_spans_half_point_each_way(self):
        out = normalized_length_reward(_group([200, 400, 800]))
        assert [b.total for b in out] == pytest.approx([1.5, 1 + 1 / 6, 0.5])
        assert [b.details["bonus"] for b in out] == pytest.approx([0.5, 1 / 6, -0.5])

    def test_shortest_correct_gets_max_bonus(self):
        out = normalized_length_reward(_group([100, 300, 900]))
        assert out[0].total == 1.5

    def test_incorrect_capped_at_zero(self):
        out = normalized_length_reward(_group([200, 400, 800], [False, True, False]))
        assert out[0].total == 0.0  # short but wrong: brevity is not rewarded
        assert out[1].total == pytest.approx(1 + 1 / 6)
        assert out[2].total == pytest.approx(-0.5)

    def test_equal_lengths_mean_zero_bonus(self):
        out = normalized_length_reward(_group([300, 300, 300], [True, False, True]))
        assert [b.total for b in out] == [1.0, 0.0, 1.0]

    def test_empty_group_rejected(self):
        with pytest.raises(ValueError):
            normalized_length_reward([])


class TestTwyn:
    def test_rank_discounting(self):
        out = twyn_reward(_group([200, 400, 800]), beta=0.5)
        assert [b.total for b in out] == pytest.approx([1.0, 0.75, 0.5])
        assert [b.details["rank"] for b in out] == [0.0, 1.0, 2.0]

    def test_ties_share_the_lower_rank(self):
        out = twyn_reward(_group([100, 100, 300]), beta=0.5)
        assert [b.total for b in out] == pytest.approx([1.0, 1.0, 0.5])

    def test_lone_correct_keeps_full_reward(self):
        out = twyn_reward(_group([5000], [True]))
        assert out[0].total == 1.0

    def test_incorrect_members_get_zero(self):
        out = twyn_reward(_group([100, 200, 300], [True, False, True]), beta=0.5)
        assert [b.total for b in out] == pytest.approx([1.0, 0.0, 0.5])
        assert out[1].r_c == 0.0

    def test_order_of_members_does_not_matter(self):
        out = twyn_reward(_group([800, 200, 400]), beta=0.5)
        assert [b.total for b in out] == pytest.approx([0.5, 1.0, 0.75])

    def test_beta_scales_the_spread(self):
        out = twyn_reward(_group([200, 400, 800]), beta=1.0)
        assert [b.total for b in out] == pytest.approx([1.0, 0.5, 0.0])

    def test_beta_validation(self):
        with pytest.raises(ConfigError):
            twyn_reward(_group([100]), beta=1.5)

    @given(
        st.lists(st.integers(1, 10_000), min_size=1, max_size=12),
        st.lists(st.booleans(), min_size=12, max_size=12),
    )
    def test_correct_always_beats_incorrect(self, lengths, flags):
        group = _group(lengths, flags[: len(lengths)])
        out = twyn_reward(group, beta=0.5)
        for scored, b in zip(group, out):
            if scored.correct:
                assert 0.5 <= b.total <= 1.0
            else:
                assert b.total == 0.0


class TestGrpoAdvantages:
    def test_zero_deviation_gives_zeros(self):
        assert grpo_advantages([1.0, 1.0, 1.0]) == [0.0, 0.0, 0.0]

    def test_single_member(self):
        assert grpo_advantages([0.7]) == [0.0]

    def test_hand_case(self):
        rewards = [1.0, 0.0, 0.0, 0.0]
        mean = 0.25
        std = math.sqrt(sum((r - mean) ** 2 for r in rewards) / 4)
        adv = grpo_advantages(rewards, epsilon=1e-6)
        assert adv[0] == pytest.approx((1.0 - mean) / (std + 1e-6))
        assert adv[1] == pytest.approx((0.0 - mean) / (std + 1e-6))

    @given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=32))
    def test_sums_to_zero(self, rewards):
        adv = grpo_advantages(rewards)
        assert abs(math.fsum(adv)) <= 1e-9 * max(1, len(adv))

    @given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=2, max_size=16))
    def test_preserves_reward_order(self, rewards):
        adv = grpo_advantages(rewards)
        for i in range(len(rewards)):
            for j in range(len(rewards)):
                if rewards[i] < rewards[j]:
                    assert adv[i] <= adv[j]

    def test_validation(self):
        with pytest.raises(ValueError):
            grpo_advantages([])
        with pytest.raises(ConfigError):
            grpo_advantages([1.0], epsilon=0.0)


class TestScoreGroup:
    def test_adaptive_dispatch(self):
        members = _group([100, 200])
        breakdowns, group = score_group(members, RewardScheme.ADAPTIVE)
        assert [b.scheme for b in breakdowns] == [RewardScheme.ADAPTIVE] * 2
        assert group.rewards == tuple(b.total for b in breakdowns)
        assert len(group.advantages) == 2

    def test_missing_hard_cutoff(self):
        with pytest.raises(ConfigError, match="hard_cutoff"):
            score_group(_group([100]), RewardScheme.HARD_LENGTH)

    def test_missing_soft_params(self):
        with pytest.raises(ConfigError, match="soft_l"):
            score_group(_group([100]), RewardScheme.SOFT_LENGTH, RewardConfig(soft_l_max=500))

    def test_group_schemes_share_context(self):
        members = _group([200, 400, 800])
        breakdowns, group = score_group(members, RewardScheme.TWYN, RewardConfig(twyn_beta=0.5))
        assert group.rewards == pytest.approx((1.0, 0.75, 0.5))
        assert abs(sum(group.advantages)) <= 1e-9 * len(members)

    def test_empty_members(self):
        with pytest.raises(ValueError):
            score_group([], RewardScheme.ADAPTIVE)


class TestConfigLoading:
    def test_full_file(self, tmp_path):
        path = tmp_path / "rw.cfg"
        path.write_text(
            "# reward knobs\n"
            "lambda = 0.3\n"
            "\n"
            "hard_cutoff=4000\n"
            "soft_l_cache = 1000\n"
            "soft_l_max = 8000\n"
            "twyn_beta=0.25\n"
            "advantage_epsilon=1e-5\n"
            "group_size = 16\n",
            encoding="utf-8",
        )
        cfg = load_reward_config(str(path))
        assert cfg.lambda_ == 0.3
        assert cfg.hard_cutoff == 4000
        assert cfg.soft_l_cache == 1000 and cfg.soft_l_max == 8000
        assert cfg.twyn_beta == 0.25
        assert cfg.advantage_epsilon == 1e-5
        assert cfg.group_size == 16

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "rw.cfg"
        path.write_text("momentum = 0.9\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="unknown config key"):
            load_reward_config(str(path))

    def test_bad_value(self, tmp_path):
        path = tmp_path / "rw.cfg"
        path.write_text("lambda = fast\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="bad value"):
            load_reward_config(str(path))

    def test_not_key_value(self, tmp_path):
        path = tmp_path / "rw.cfg"
        path.write_text("just some text\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="key=value"):
            load_reward_config(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_reward_config(str(tmp_path / "absent.cfg"))

    def test_constraint_violations_surface(self, tmp_path):
        path = tmp_path / "rw.cfg"
        path.write_text("soft_l_cache = 900\nsoft_l_max = 100\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="soft_l_cache"):
            load_reward_config(str(path))
