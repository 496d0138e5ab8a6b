#pragma once

#include <random>
#include <span>
#include <vector>

#include "drmg/game.hpp"

namespace drmg {

using Rng = std::mt19937_64;

/// One executed step: joint action `a` in state `s` at step `h`, the realised
/// per-agent rewards and the next state drawn from the nominal kernel.
struct Step {
  int h = 0;
  int s = 0;
  int a = 0;
  std::vector<double> rewards;
  int next = 0;
};

using Trajectory = std::vector<Step>;

/// Inverse-CDF draw from a probability vector; zero entries are never chosen.
int sample_index(std::span<const double> probs, Rng& rng);

/// Uniform draw over spec.start_states().
int sample_initial_state(const GameSpec& spec, Rng& rng);

/// Rolls out H steps of `pi` on the nominal kernel. Rewards are the table
/// values, or Bernoulli draws with those means when the spec carries the
/// Bernoulli flag.
Trajectory simulate_episode(const GameSpec& spec, const JointPolicy& pi, int s1, Rng& rng);

}  // namespace drmg
