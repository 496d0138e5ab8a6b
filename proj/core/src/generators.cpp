#include <random>
#include <stdexcept>
#include <vector>

#include "drmg/game.hpp"

namespace drmg {

GameSpec build_initial_shock(int num_agents, int actions_per_agent, int horizon, double sigma,
                             std::span<const int> secret, bool with_fail_state) {
  if (horizon < 2) throw std::invalid_argument("initial shock needs horizon >= 2");
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("initial shock needs sigma in (0, 1)");
  const std::vector<int> actions(num_agents, actions_per_agent);
  const int secret_joint = joint_index(secret, actions);  // throws on an invalid secret action

  constexpr int kGood = 0;
  constexpr int kBad = 1;
  constexpr int kFail = 2;
  const int num_states = with_fail_state ? 3 : 2;
  GameSpec spec(actions, num_states, horizon, Divergence::kTV);
  const int J = spec.num_joint_actions();

  std::vector<double> to_good(num_states, 0.0), to_bad(num_states, 0.0), to_fail(num_states, 0.0);
  to_good[kGood] = 1.0;
  to_bad[kBad] = 1.0;
  if (with_fail_state) to_fail[kFail] = 1.0;

  for (int h = 0; h < horizon; ++h) {
    for (int a = 0; a < J; ++a) {
      spec.set_transition(h, kGood, a, to_good);
      spec.set_transition(h, kBad, a, a == secret_joint ? to_good : to_bad);
      if (with_fail_state) spec.set_transition(h, kFail, a, to_fail);
      for (int i = 0; i < num_agents; ++i) {
        spec.set_reward(i, h, kGood, a, 1.0);
        spec.set_reward(i, h, kBad, a, a == secret_joint ? 1.0 : 0.0);
      }
    }
  }
  spec.add_radius_override({.agent = -1, .h = 0, .s = kGood, .joint_action = -1, .sigma = sigma});
  if (with_fail_state) spec.set_fail_states({kFail});
  spec.set_initial_state(kGood);
  return spec;
}

GameSpec build_corrupted_bandit(std::span<const int> actions_per_agent, double epsilon, double sigma,
                                std::span<const int> secret) {
  if (!(epsilon >= 0.0 && epsilon < 0.5)) throw std::invalid_argument("corrupted bandit needs epsilon in [0, 1/2)");
  if (!(sigma >= 0.0)) throw std::invalid_argument("corrupted bandit needs sigma >= 0");
  std::vector<int> actions(actions_per_agent.begin(), actions_per_agent.end());
  const int theta = joint_index(secret, actions);

  GameSpec spec(actions, 1, 1, Divergence::kKL);
  const std::vector<double> stay{1.0};
  for (int a = 0; a < spec.num_joint_actions(); ++a) {
    spec.set_transition(0, 0, a, stay);
    for (int i = 0; i < spec.num_agents(); ++i) spec.set_reward(i, 0, 0, a, a == theta ? 0.5 + epsilon : 0.5);
  }
  for (int i = 0; i < spec.num_agents(); ++i) spec.set_base_radius(i, sigma);
  spec.set_bernoulli_rewards(true);
  spec.set_initial_state(0);
  return spec;
}

GameSpec build_random_game(int num_agents, int num_states, std::span<const int> actions_per_agent, int horizon,
                           std::span<const double> radii, Divergence divergence, std::uint64_t seed) {
  if (num_agents < 1 || num_states < 1 || horizon < 1) throw std::invalid_argument("sizes must be >= 1");
  if (static_cast<int>(actions_per_agent.size()) != num_agents || static_cast<int>(radii.size()) != num_agents) {
    throw std::invalid_argument("need one action count and one radius per agent");
  }
  bool positive = false;
  for (double r : radii) {
    if (r < 0.0) throw std::invalid_argument("radii must be non-negative");
    positive = positive || r > 0.0;
  }
  const bool add_fail = divergence == Divergence::kTV && positive;
  const int total_states = num_states + (add_fail ? 1 : 0);

  GameSpec spec(std::vector<int>(actions_per_agent.begin(), actions_per_agent.end()), total_states, horizon,
                divergence);
  const int J = spec.num_joint_actions();

  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gamma1(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> row(total_states);
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < num_states; ++s) {
      for (int a = 0; a < J; ++a) {
        // Dirichlet(1) over the regular states via normalised Exp(1) draws.
        double sum = 0.0;
        for (int sp = 0; sp < num_states; ++sp) sum += (row[sp] = gamma1(rng));
        for (int sp = 0; sp < num_states; ++sp) row[sp] /= sum;
        if (add_fail) row[num_states] = 0.0;
        spec.set_transition(h, s, a, row);
        for (int i = 0; i < num_agents; ++i) spec.set_reward(i, h, s, a, unit(rng));
      }
    }
    if (add_fail) {
      std::fill(row.begin(), row.end(), 0.0);
      row[num_states] = 1.0;
      for (int a = 0; a < J; ++a) spec.set_transition(h, num_states, a, row);
    }
  }
  for (int i = 0; i < num_agents; ++i) spec.set_base_radius(i, radii[i]);
  if (add_fail) spec.set_fail_states({num_states});
  return spec;
}

}  // namespace drmg
