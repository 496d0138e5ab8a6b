#include <gtest/gtest.h>

#include <numeric>
#include <vector>

#include "drmg/game.hpp"
#include "drmg/simulation.hpp"

using namespace drmg;

namespace {

GameSpec two_state_game(Divergence d = Divergence::kTV) {
  GameSpec g({2, 2}, 2, 2, d);
  const std::vector<double> stay0{1.0, 0.0}, stay1{0.0, 1.0};
  for (int h = 0; h < 2; ++h) {
    for (int a = 0; a < 4; ++a) {
      g.set_transition(h, 0, a, stay0);
      g.set_transition(h, 1, a, stay1);
    }
  }
  return g;
}

}  // namespace

TEST(JointEncoding, OriginMapsToZero) {
  const std::vector<int> A{2, 3};
  EXPECT_EQ(joint_index(std::vector<int>{0, 0}, A), 0);
}

TEST(JointEncoding, RowMajorWithFirstAgentMostSignificant) {
  const std::vector<int> A{2, 3};
  EXPECT_EQ(joint_index(std::vector<int>{1, 2}, A), 5);
  EXPECT_EQ(joint_index(std::vector<int>{1, 0}, A), 3);
  JointActionSpace space(A);
  EXPECT_EQ(space.encode(std::vector<int>{0, 2}), 2);
}

TEST(JointEncoding, RoundTripIsIdentity) {
  const std::vector<int> A{2, 3};
  for (int j = 0; j < 6; ++j) EXPECT_EQ(joint_index(joint_profile(j, A), A), j);
  JointActionSpace space({3, 2, 4});
  for (int j = 0; j < space.num_joint(); ++j) EXPECT_EQ(space.encode(space.decode(j)), j);
}

TEST(JointEncoding, OutOfRangeComponentsThrow) {
  const std::vector<int> A{2, 3};
  EXPECT_THROW(joint_index(std::vector<int>{2, 0}, A), std::out_of_range);
  EXPECT_THROW(joint_index(std::vector<int>{0, 3}, A), std::out_of_range);
  EXPECT_THROW(joint_index(std::vector<int>{0}, A), std::out_of_range);
  EXPECT_THROW(joint_profile(6, A), std::out_of_range);
  EXPECT_THROW(joint_profile(-1, A), std::out_of_range);
}

TEST(JointEncoding, OthersIndexAndJoinAreInverse) {
  JointActionSpace space({3, 2, 4});
  for (int agent = 0; agent < 3; ++agent) {
    for (int j = 0; j < space.num_joint(); ++j) {
      const int o = space.others_index(j, agent);
      ASSERT_LT(o, space.num_others(agent));
      EXPECT_EQ(space.join(o, agent, space.action_of(j, agent)), j);
    }
  }
  EXPECT_EQ(space.replace(space.encode(std::vector<int>{1, 1, 3}), 2, 0), space.encode(std::vector<int>{1, 1, 0}));
}

TEST(Validation, WellFormedGamePasses) {
  const auto g = two_state_game();
  EXPECT_TRUE(validate_spec(g).ok());
  EXPECT_NO_THROW(require_well_formed(g));
}

TEST(Validation, UnnormalizedRowIsAnError) {
  auto g = two_state_game();
  g.set_transition(1, 0, 2, std::vector<double>{0.5, 0.4});
  const auto report = validate_spec(g);
  EXPECT_TRUE(report.has_rule("kernel-normalized"));
  EXPECT_TRUE(report.has_errors());
  EXPECT_THROW(require_well_formed(g), std::invalid_argument);
}

TEST(Validation, NegativeProbabilityRewardOutOfRangeAndBadIndices) {
  auto g = two_state_game();
  g.set_transition(0, 1, 0, std::vector<double>{-0.1, 1.1});
  g.set_reward(1, 0, 0, 0, 1.5);
  g.set_fail_states({5});
  g.set_initial_state(7);
  const auto report = validate_spec(g);
  EXPECT_TRUE(report.has_rule("kernel-nonnegative"));
  EXPECT_TRUE(report.has_rule("reward-range"));
  EXPECT_TRUE(report.has_rule("fail-state-index"));
  EXPECT_TRUE(report.has_rule("initial-state-index"));
}

TEST(Validation, NegativeRadiusIsAnError) {
  auto g = two_state_game();
  g.set_base_radius(0, -0.1);
  EXPECT_TRUE(validate_spec(g).has_rule("radius-nonnegative"));
}

TEST(Validation, TvWithRadiusAndNoFailStateIsAnAssumptionFinding) {
  auto g = two_state_game();
  g.set_base_radius(0, 0.2);
  const auto report = validate_spec(g);
  EXPECT_TRUE(report.has_rule("fail-states-missing"));
  EXPECT_FALSE(report.has_errors());
  EXPECT_NO_THROW(require_well_formed(g));
}

TEST(Validation, FailStateMustBeAbsorbingWithZeroReward) {
  auto g = two_state_game();
  g.set_base_radius(1, 0.2);
  g.set_fail_states({1});
  EXPECT_TRUE(validate_spec(g).ok());
  g.set_reward(0, 1, 1, 3, 0.5);
  g.set_transition(0, 1, 2, std::vector<double>{0.5, 0.5});
  const auto report = validate_spec(g);
  EXPECT_TRUE(report.has_rule("fail-state-reward"));
  EXPECT_TRUE(report.has_rule("fail-state-absorbing"));
}

TEST(Validation, KlGamesSkipTheFailStateCheck) {
  auto g = two_state_game(Divergence::kKL);
  g.set_base_radius(0, 0.5);
  EXPECT_TRUE(validate_spec(g).ok());
}

TEST(Radii, OverridesApplyToTheirCellsOnly) {
  auto g = two_state_game();
  g.set_base_radius(0, 0.1);
  g.set_base_radius(1, 0.2);
  g.add_radius_override({.agent = -1, .h = 1, .s = 0, .joint_action = 3, .sigma = 0.7});
  EXPECT_DOUBLE_EQ(g.radius(0, 1, 0, 3), 0.7);
  EXPECT_DOUBLE_EQ(g.radius(1, 1, 0, 3), 0.7);
  EXPECT_DOUBLE_EQ(g.radius(0, 1, 0, 2), 0.1);
  EXPECT_DOUBLE_EQ(g.radius(1, 0, 0, 3), 0.2);
  // Base changes keep overrides.
  g.set_base_radius(0, 0.3);
  EXPECT_DOUBLE_EQ(g.radius(0, 1, 0, 3), 0.7);
  EXPECT_DOUBLE_EQ(g.radius(0, 1, 0, 2), 0.3);
  EXPECT_THROW(g.add_radius_override({.agent = 0, .h = 2, .s = 0, .joint_action = -1, .sigma = 0.1}),
               std::out_of_range);
}

TEST(InitialShock, RewardsAreOneInTheGoodState) {
  const std::vector<int> secret{1, 1};
  const auto g = build_initial_shock(2, 2, 4, 0.3, secret);
  for (int h = 0; h < 4; ++h) {
    for (int a = 0; a < 4; ++a) {
      EXPECT_EQ(g.reward(0, h, 0, a), 1.0);
      EXPECT_EQ(g.reward(1, h, 0, a), 1.0);
      EXPECT_EQ(g.reward(0, h, 1, a), a == 3 ? 1.0 : 0.0);
    }
  }
  EXPECT_EQ(g.initial_state(), 0);
}

TEST(InitialShock, SecretActionEscapesTheTrap) {
  const std::vector<int> secret{1, 1};
  const auto g = build_initial_shock(2, 2, 4, 0.3, secret);
  for (int h = 0; h < 4; ++h) {
    EXPECT_EQ(g.transition(h, 1, 3)[0], 1.0);
    EXPECT_EQ(g.transition(h, 1, 0)[1], 1.0);
    EXPECT_EQ(g.transition(h, 0, 2)[0], 1.0);
  }
}

TEST(InitialShock, RadiusOnlyAtFirstStepGoodState) {
  const std::vector<int> secret{1, 1};
  const auto g = build_initial_shock(2, 2, 4, 0.3, secret);
  for (int a = 0; a < 4; ++a) {
    EXPECT_DOUBLE_EQ(g.radius(0, 0, 0, a), 0.3);
    EXPECT_DOUBLE_EQ(g.radius(1, 1, 0, a), 0.0);
    EXPECT_DOUBLE_EQ(g.radius(0, 0, 1, a), 0.0);
  }
  // No fail state by design; the finding is advisory only.
  EXPECT_TRUE(validate_spec(g).has_rule("fail-states-missing"));
  EXPECT_FALSE(validate_spec(g).has_errors());
}

TEST(InitialShock, FailStateWrapperSatisfiesTheAssumption) {
  const std::vector<int> secret{0, 1};
  const auto g = build_initial_shock(2, 3, 3, 0.4, secret, true);
  EXPECT_EQ(g.num_states(), 3);
  EXPECT_TRUE(validate_spec(g).ok()) << validate_spec(g).summary();
}

TEST(InitialShock, RejectsBadArguments) {
  const std::vector<int> secret{2, 0};
  EXPECT_THROW(build_initial_shock(2, 2, 4, 0.3, secret), std::out_of_range);
  const std::vector<int> ok{1, 0};
  EXPECT_THROW(build_initial_shock(2, 2, 1, 0.3, ok), std::invalid_argument);
  EXPECT_THROW(build_initial_shock(2, 2, 4, 1.0, ok), std::invalid_argument);
}

TEST(CorruptedBandit, SecretArmCarriesTheAdvantage) {
  const std::vector<int> A{2, 2}, secret{1, 0};
  const auto g = build_corrupted_bandit(A, 0.1, 0.2, secret);
  EXPECT_EQ(g.horizon(), 1);
  EXPECT_EQ(g.num_states(), 1);
  EXPECT_TRUE(g.bernoulli_rewards());
  EXPECT_EQ(g.divergence(), Divergence::kKL);
  for (int a = 0; a < 4; ++a) EXPECT_DOUBLE_EQ(g.reward(0, 0, 0, a), a == 2 ? 0.6 : 0.5);
  EXPECT_TRUE(validate_spec(g).ok());
}

TEST(CorruptedBandit, ZeroRadiusIsAPlainBandit) {
  const std::vector<int> A{3}, secret{2};
  const auto g = build_corrupted_bandit(A, 0.2, 0.0, secret);
  EXPECT_FALSE(g.any_positive_radius());
}

TEST(RandomGame, DeterministicForAFixedSeed) {
  const std::vector<int> A{2, 3};
  const std::vector<double> r{0.1, 0.3};
  const auto g1 = build_random_game(2, 3, A, 2, r, Divergence::kKL, 11);
  const auto g2 = build_random_game(2, 3, A, 2, r, Divergence::kKL, 11);
  const auto g3 = build_random_game(2, 3, A, 2, r, Divergence::kKL, 12);
  bool same = true, differs = false;
  for (int s = 0; s < 3; ++s) {
    for (int a = 0; a < 6; ++a) {
      for (int t = 0; t < 3; ++t) {
        same = same && g1.transition(1, s, a)[t] == g2.transition(1, s, a)[t];
        differs = differs || g1.transition(1, s, a)[t] != g3.transition(1, s, a)[t];
      }
    }
  }
  EXPECT_TRUE(same);
  EXPECT_TRUE(differs);
  EXPECT_TRUE(validate_spec(g1).ok());
}

TEST(RandomGame, TvWithRadiusGetsAnAbsorbingFailState) {
  const std::vector<int> A{2, 2};
  const std::vector<double> r{0.2, 0.2};
  const auto g = build_random_game(2, 3, A, 3, r, Divergence::kTV, 5);
  ASSERT_EQ(g.num_states(), 4);
  ASSERT_EQ(g.fail_states().size(), 1u);
  const int f = g.fail_states()[0];
  for (int h = 0; h < 3; ++h) {
    for (int a = 0; a < 4; ++a) {
      EXPECT_EQ(g.transition(h, f, a)[f], 1.0);
      EXPECT_EQ(g.reward(0, h, f, a), 0.0);
    }
  }
  EXPECT_TRUE(validate_spec(g).ok()) << validate_spec(g).summary();
  EXPECT_EQ(g.start_states().size(), 3u);
}

TEST(RandomGame, ZeroRadiusTvHasNoFailState) {
  const std::vector<int> A{2, 2};
  const std::vector<double> r{0.0, 0.0};
  EXPECT_EQ(build_random_game(2, 3, A, 2, r, Divergence::kTV, 5).num_states(), 3);
}

TEST(Policy, UniformPolicyIsValidAndProduct) {
  const std::vector<int> A{2, 3};
  const std::vector<double> r{0.1, 0.1};
  const auto g = build_random_game(2, 2, A, 2, r, Divergence::kKL, 1);
  const auto pi = JointPolicy::uniform(g);
  EXPECT_TRUE(pi.product_structured());
  EXPECT_TRUE(validate_policy(pi).ok());
  const auto m1 = pi.marginal(0, 0, 1);
  ASSERT_EQ(m1.size(), 3u);
  EXPECT_NEAR(m1[2], 1.0 / 3.0, 1e-15);
}

TEST(Policy, DetectsBrokenRowsAndFakeProducts) {
  JointPolicy pi(1, 1, JointActionSpace({2, 2}));
  pi.set_row(0, 0, std::vector<double>{0.5, 0.0, 0.0, 0.5});
  EXPECT_TRUE(validate_policy(pi).ok());
  pi.set_product_structured(true);
  EXPECT_TRUE(validate_policy(pi).has_rule("policy-product"));
  pi.set_product_structured(false);
  pi.set_row(0, 0, std::vector<double>{0.5, 0.1, 0.0, 0.5});
  EXPECT_TRUE(validate_policy(pi).has_rule("policy-normalized"));
  pi.set_row(0, 0, std::vector<double>{1.2, -0.2, 0.0, 0.0});
  EXPECT_TRUE(validate_policy(pi).has_rule("policy-nonnegative"));
}

TEST(Policy, OthersMarginalSumsOverTheAgentsOwnAction) {
  JointPolicy pi(1, 1, JointActionSpace({2, 2}));
  pi.set_row(0, 0, std::vector<double>{0.1, 0.2, 0.3, 0.4});
  const auto others_of_0 = pi.others_marginal(0, 0, 0);  // agent 1's action
  EXPECT_NEAR(others_of_0[0], 0.4, 1e-15);
  EXPECT_NEAR(others_of_0[1], 0.6, 1e-15);
  const auto own = pi.marginal(0, 0, 0);
  EXPECT_NEAR(own[1], 0.7, 1e-15);
}

TEST(Simulation, DeterministicKernelAndPolicyGiveAUniqueTrajectory) {
  auto g = two_state_game();
  JointPolicy pi(2, 2, g.joint_space());
  for (int h = 0; h < 2; ++h) {
    pi.set_pure(h, 0, 2);
    pi.set_pure(h, 1, 1);
  }
  Rng a(1), b(99);
  const auto t1 = simulate_episode(g, pi, 1, a);
  const auto t2 = simulate_episode(g, pi, 1, b);
  ASSERT_EQ(t1.size(), 2u);
  for (std::size_t k = 0; k < t1.size(); ++k) {
    EXPECT_EQ(t1[k].s, t2[k].s);
    EXPECT_EQ(t1[k].a, 1);
    EXPECT_EQ(t1[k].next, 1);
    EXPECT_EQ(t1[k].h, static_cast<int>(k));
  }
}

TEST(Simulation, NextStateFrequenciesMatchTheKernel) {
  GameSpec g({1}, 3, 1, Divergence::kKL);
  const std::vector<double> row{0.2, 0.5, 0.3};
  for (int s = 0; s < 3; ++s) g.set_transition(0, s, 0, row);
  const auto pi = JointPolicy::uniform(g);
  Rng rng(2024);
  const int n = 100000;
  std::vector<int> hits(3, 0);
  for (int k = 0; k < n; ++k) ++hits[simulate_episode(g, pi, 0, rng).front().next];
  for (int t = 0; t < 3; ++t) {
    const double sd = std::sqrt(row[t] * (1 - row[t]) / n);
    EXPECT_NEAR(static_cast<double>(hits[t]) / n, row[t], 3 * sd);
  }
}

TEST(Simulation, BanditInstanceGivesOneBernoulliRecord) {
  const std::vector<int> A{2}, secret{0};
  const auto g = build_corrupted_bandit(A, 0.3, 0.1, secret);
  const auto pi = JointPolicy::uniform(g);
  Rng rng(3);
  double ones = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const auto t = simulate_episode(g, pi, 0, rng);
    ASSERT_EQ(t.size(), 1u);
    const double r = t.front().rewards[0];
    ASSERT_TRUE(r == 0.0 || r == 1.0);
    ones += r;
  }
  EXPECT_NEAR(ones / 2000, 0.5 * 0.8 + 0.5 * 0.5, 0.05);
}

TEST(Simulation, InitialStatesAvoidFailStatesUnlessPinned) {
  const std::vector<int> A{2, 2};
  const std::vector<double> r{0.2, 0.2};
  const auto g = build_random_game(2, 3, A, 2, r, Divergence::kTV, 8);
  Rng rng(4);
  std::vector<int> hits(4, 0);
  for (int k = 0; k < 3000; ++k) ++hits[sample_initial_state(g, rng)];
  EXPECT_EQ(hits[3], 0);
  for (int s = 0; s < 3; ++s) EXPECT_GT(hits[s], 800);
}
