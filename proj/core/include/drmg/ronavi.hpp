#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "drmg/game.hpp"
#include "drmg/robust_planning.hpp"
#include "drmg/simulation.hpp"
#include "drmg/trace.hpp"
#include "drmg/types.hpp"

namespace drmg {

/// Visit counts N_h(s,a), N_h(s,a,s') and the empirical kernel
/// P_hat(s'|s,a) = N_h(s,a,s') / max(N_h(s,a), 1). Rows of unvisited cells are zero.
class CountStore {
 public:
  CountStore() = default;
  CountStore(int horizon, int num_states, int num_joint);
  explicit CountStore(const GameSpec& spec)
      : CountStore(spec.horizon(), spec.num_states(), spec.num_joint_actions()) {}

  void record(int h, int s, int a, int next);
  /// Appends every step of a trajectory.
  void update(std::span<const Step> trajectory);

  std::int64_t visits(int h, int s, int a) const { return visits_[cell(h, s, a)]; }
  std::int64_t transitions(int h, int s, int a, int next) const {
    return transitions_[cell(h, s, a) * num_states_ + next];
  }
  std::span<const double> empirical(int h, int s, int a) const {
    return {empirical_.data() + cell(h, s, a) * num_states_, static_cast<std::size_t>(num_states_)};
  }

  std::int64_t total_visits() const { return total_; }
  std::int64_t visited_cells() const { return visited_cells_; }

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int num_joint() const { return num_joint_; }

 private:
  std::size_t cell(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * num_states_ + s) * num_joint_ + a;
  }

  int horizon_ = 0;
  int num_states_ = 0;
  int num_joint_ = 0;
  std::vector<std::int64_t> visits_;
  std::vector<std::int64_t> transitions_;
  std::vector<double> empirical_;
  std::int64_t total_ = 0;
  std::int64_t visited_cells_ = 0;
};

struct LearnerConfig {
  int episodes = 1;  // K
  double delta = 0.05;
  Divergence divergence = Divergence::kTV;
  EquilibriumKind kind = EquilibriumKind::kCCE;
  double c1 = 1.0;
  double c2 = 1.0;
  double cf = 1.0;
  double eta_floor = 0.0;  // <= 0: 1e-8 * H
  std::uint64_t seed = 0;
  /// Score every j-th episode (plus the last one) with the exact oracle.
  int score_every = 1;
  /// Gap kinds reported in the trace; the learner's kind is always scored.
  std::vector<EquilibriumKind> extra_score_kinds;
  /// Record per-episode wall time (makes traces non-reproducible).
  bool record_timing = false;
  /// Forces the bonus to zero (degenerate planning checks).
  bool zero_bonus = false;
};

/// Throws std::invalid_argument if the configuration is out of range.
void validate_config(const LearnerConfig& cfg);

/// iota = log(S^2 (prod A_i) H^2 K^{3/2} / delta).
double confidence_log(const GameSpec& spec, const LearnerConfig& cfg);

/// Optimistic and pessimistic tables for every agent from one planning pass.
struct ValueBounds {
  std::vector<ValueTable> upper;
  std::vector<ValueTable> lower;
};

/// Bernstein-style TV bonus built from the empirical variance of the midpoint
/// of the bounds at h + 1, the count, and the width of the bounds.
double bonus_tv(const GameSpec& spec, const CountStore& counts, const ValueBounds& bounds,
                const LearnerConfig& cfg, int agent, int h, int s, int a);

/// KL bonus scaled by the inverse radius and the smallest positive empirical
/// probability of the row (1 when the row is unvisited).
double bonus_kl(const GameSpec& spec, const CountStore& counts, const LearnerConfig& cfg, int agent, int h, int s,
                int a);

struct EpisodePlan {
  JointPolicy policy;
  ValueBounds bounds;
  std::vector<double> bonus;  // [i][h][s][a]
};

/// Optimistic robust planning on the empirical model: backward over h,
/// clipped upper/lower robust backups with bonus, then per-state equilibrium
/// of the upper Q matrices.
EpisodePlan plan_episode(const GameSpec& spec, const CountStore& counts, const LearnerConfig& cfg);

struct OnlineResult {
  RegretTrace trace;
  std::vector<JointPolicy> policies;  // pi^1 .. pi^K
  std::vector<int> initial_states;
  CountStore counts;
  /// Index into `policies` of the scored policy with the smallest gap.
  int certified_index = 0;
};

/// Called after planning each episode (1-based k), before execution.
using PlanObserver = std::function<void(int episode, const EpisodePlan& plan)>;

/// Full online loop: plan, execute on the nominal kernel, record data,
/// update counts, and score the executed policy with the exact robust oracle.
/// The spec's divergence must match cfg.divergence.
OnlineResult run_online(const GameSpec& spec, const LearnerConfig& cfg, const PlanObserver& observer = {});

}  // namespace drmg
