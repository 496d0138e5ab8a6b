#include "drmg/simulation.hpp"

#include <stdexcept>

namespace drmg {

int sample_index(std::span<const double> probs, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  int last_positive = -1;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    last_positive = static_cast<int>(k);
    u -= probs[k];
    if (u < 0.0) return last_positive;
  }
  if (last_positive < 0) throw std::invalid_argument("cannot sample from an all-zero distribution");
  return last_positive;
}

int sample_initial_state(const GameSpec& spec, Rng& rng) {
  const auto starts = spec.start_states();
  if (starts.size() == 1) return starts.front();
  std::uniform_int_distribution<std::size_t> pick(0, starts.size() - 1);
  return starts[pick(rng)];
}

Trajectory simulate_episode(const GameSpec& spec, const JointPolicy& pi, int s1, Rng& rng) {
  if (s1 < 0 || s1 >= spec.num_states()) throw std::out_of_range("initial state out of range");
  Trajectory traj;
  traj.reserve(spec.horizon());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int s = s1;
  for (int h = 0; h < spec.horizon(); ++h) {
    Step step;
    step.h = h;
    step.s = s;
    step.a = sample_index(pi.row(h, s), rng);
    step.rewards.resize(spec.num_agents());
    for (int i = 0; i < spec.num_agents(); ++i) {
      const double r = spec.reward(i, h, s, step.a);
      step.rewards[i] = spec.bernoulli_rewards() ? (unit(rng) < r ? 1.0 : 0.0) : r;
    }
    step.next = sample_index(spec.transition(h, s, step.a), rng);
    s = step.next;
    traj.push_back(std::move(step));
  }
  return traj;
}

}  // namespace drmg
